#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "casimix/constants.hpp"
#include "casimix/dielectric.hpp"
#include "casimix/mixing.hpp"
#include "casimix/numerics.hpp"

// Zero-temperature Lifshitz force per unit area between two effective-medium
// slabs across a gap:
//   F = (hbar c / 2 pi^2) sum_{s,p} Int dzeta Int dQ  Q k3 r13 r23 e^{-2 k3 L}
//                                                      / (1 - r13 r23 e^{-2 k3 L})
// evaluated along the imaginary frequency axis. With zeta in eV, Q in 1/nm
// and k3 in 1/nm the double integral carries eV/nm^3 and the prefactor is
// 1/(2 pi^2); the ideal-conductor limit then reproduces
// F0 = hbar c pi^2 / (240 L^4) exactly, which anchors the convention.

namespace casimix {

enum class Polarization { s, p };

// Normal wave vector inside a layer of permittivity eps at imaginary
// frequency zeta (eV) and transverse wave vector Q (1/nm).
inline double k_layer(double eps, double zeta_ev, double q_inv_nm) {
    const double q_light = zeta_ev / hbar_c_ev_nm;
    return std::sqrt(eps * q_light * q_light + q_inv_nm * q_inv_nm);
}

// Imaginary-axis Fresnel reflection coefficient for the a->b interface.
// Conventions: r = 0 when eps_a = eps_b; as eps_b -> inf (perfect
// conductor) r_p -> +1 and r_s -> -1, so the r13*r23 product entering the
// force tends to +1 for both polarizations.
inline double fresnel_r(double eps_a, double eps_b, double zeta_ev, double q_inv_nm,
                        Polarization pol) {
    const double ka = k_layer(eps_a, zeta_ev, q_inv_nm);
    const double kb = k_layer(eps_b, zeta_ev, q_inv_nm);
    if (pol == Polarization::s) return (ka - kb) / (ka + kb);
    return (eps_b * ka - eps_a * kb) / (eps_b * ka + eps_a * kb);
}

struct Slab {
    CompositeSpec composite;
    MixingRule rule;
};

struct SlabSystem {
    Slab slab1;
    Slab slab2;
    DielectricModel gap;
    double separation_nm;

    SlabSystem(Slab s1, Slab s2, DielectricModel gap_, double l_nm)
        : slab1(std::move(s1)), slab2(std::move(s2)), gap(std::move(gap_)), separation_nm(l_nm) {
        if (!(l_nm > 0.0))
            throw std::invalid_argument("SlabSystem: separation must be > 0");
    }
};

struct ForceResult {
    double force_pa;     // negative: attractive, matching F0 = -hbar c pi^2/240 L^4
    double eta;          // |F| / F0, dimensionless
    double quad_error;   // error estimate on eta
    bool validity_ok;    // 4 pi L > a for both slabs
};

// Effective-medium treatment is valid when the dominant wavelength
// ~ 4 pi L exceeds the inhomogeneity size a, for both slabs.
inline bool validity_check(const SlabSystem& sys) {
    const double lam = 4.0 * pi * sys.separation_nm;
    return lam > sys.slab1.composite.inclusion_radius_nm &&
           lam > sys.slab2.composite.inclusion_radius_nm;
}

namespace detail {

// One polarization's r13*r23 product at fixed (zeta, Q). A slab under the
// 'ideal' rule contributes the perfect-conductor limit r_p = 1, r_s = -1.
struct SlabReflectivity {
    bool ideal;
    double eps;  // effective permittivity, unused when ideal
};

inline double r_product(const SlabReflectivity& s1, const SlabReflectivity& s2, double eps3,
                        double zeta, double q, Polarization pol) {
    const double sign = pol == Polarization::s ? -1.0 : 1.0;
    const double r1 = s1.ideal ? sign : fresnel_r(eps3, s1.eps, zeta, q, pol);
    const double r2 = s2.ideal ? sign : fresnel_r(eps3, s2.eps, zeta, q, pol);
    return r1 * r2;
}

// Q k3 sum_pol rr e^{-x} / (1 - rr e^{-x}) with x = 2 k3 L. The denominator
// is written as -expm1(-x) + e^{-x}(1 - rr) so the rr -> 1, x -> 0 corner
// stays finite.
inline double q_integrand(const SlabReflectivity& s1, const SlabReflectivity& s2, double eps3,
                          double zeta, double q, double l_nm) {
    const double k3 = k_layer(eps3, zeta, q);
    const double x = 2.0 * k3 * l_nm;
    const double em = std::exp(-x);
    if (em == 0.0) return 0.0;
    double sum = 0.0;
    for (Polarization pol : {Polarization::s, Polarization::p}) {
        const double rr = r_product(s1, s2, eps3, zeta, q, pol);
        const double denom = -std::expm1(-x) + em * (1.0 - rr);
        sum += rr * em / denom;
    }
    return q * k3 * sum;
}

}  // namespace detail

inline ForceResult force_per_area(const SlabSystem& sys,
                                  const QuadratureSpec& q = QuadratureSpec::force_default()) {
    const double l_nm = sys.separation_nm;
    const bool ideal1 = sys.slab1.rule.kind == RuleKind::ideal;
    const bool ideal2 = sys.slab2.rule.kind == RuleKind::ideal;

    // Permittivity evaluations (possibly a Kramers-Kronig integral each) are
    // hoisted out of the inner Q integral: they depend on zeta only.
    const QuadratureSpec eps_spec = QuadratureSpec::dielectric_default();
    QuadratureSpec inner_spec(0.1 * q.rel_tol, q.abs_tol, q.max_subdivisions);

    auto outer = [&](double zeta) {
        const ImaginaryFrequency z{zeta};
        const double eps3 = eval_model(sys.gap, z, eps_spec);
        const detail::SlabReflectivity s1{
            ideal1, ideal1 ? 0.0 : effective_epsilon(sys.slab1.composite, sys.slab1.rule, z, eps_spec)};
        const detail::SlabReflectivity s2{
            ideal2, ideal2 ? 0.0 : effective_epsilon(sys.slab2.composite, sys.slab2.rule, z, eps_spec)};
        auto inner = [&](double qq) {
            return detail::q_integrand(s1, s2, eps3, zeta, qq, l_nm);
        };
        return integrate_semi_infinite(inner, 0.0, inner_spec, 0.5 / l_nm).value;
    };

    const IntegralResult zeta_int =
        integrate_semi_infinite(outer, 0.0, q, 0.5 * hbar_c_ev_nm / l_nm);

    const double f0 = ideal_pressure_ev_nm3(l_nm);
    const double magnitude = zeta_int.value / (2.0 * pi * pi);  // eV/nm^3
    const double eta = magnitude / f0;
    // Outer bound plus the relative slack allowed to every inner integral.
    const double quad_error = zeta_int.error_bound / (2.0 * pi * pi) / f0 +
                              inner_spec.rel_tol * std::abs(eta);
    return {-magnitude * ev_per_nm3_in_pa, eta, quad_error, validity_check(sys)};
}

// eta = |F| / F0 at the system's separation.
inline double reduction_factor(const SlabSystem& sys,
                               const QuadratureSpec& q = QuadratureSpec::force_default()) {
    return force_per_area(sys, q).eta;
}

}  // namespace casimix
