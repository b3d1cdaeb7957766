#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "casimix/dielectric.hpp"
#include "casimix/numerics.hpp"

// Effective-medium approximations: bounds, Maxwell-Garnett, Bruggeman,
// Looyenga, the Bergman spectral representation, and the ellipsoid
// generalizations. All formulas take the already-evaluated imaginary-axis
// permittivities eps_i, eps_h >= 1 and return a real effective value.

namespace casimix {

struct FillingFraction {
    double value;
    explicit FillingFraction(double f) : value(f) {
        if (!(f >= 0.0 && f <= 1.0))
            throw std::invalid_argument("FillingFraction: must be in [0,1]");
    }
};

class SingularSpectralDomainError : public std::domain_error {
public:
    explicit SingularSpectralDomainError(const std::string& what)
        : std::domain_error(what) {}
};

class UnphysicalInputError : public std::domain_error {
public:
    explicit UnphysicalInputError(const std::string& what) : std::domain_error(what) {}
};

class InvalidEccentricityError : public std::domain_error {
public:
    explicit InvalidEccentricityError(const std::string& what) : std::domain_error(what) {}
};

struct Bounds {
    double lower;
    double upper;
};

// Arithmetic (upper) and harmonic (lower) averages.
inline Bounds wiener_bounds(double eps_i, double eps_h, FillingFraction f) {
    const double fv = f.value;
    const double upper = fv * eps_i + (1.0 - fv) * eps_h;
    const double lower = eps_i * eps_h / (fv * eps_h + (1.0 - fv) * eps_i);
    return {lower, upper};
}

// Hashin-Shtrikman bounds for spherical microgeometry; the two closed forms
// swap roles depending on which constituent is larger, so the result is
// ordered before returning.
inline Bounds hashin_shtrikman_bounds(double eps_i, double eps_h, FillingFraction f) {
    if (eps_i == eps_h) return {eps_h, eps_h};
    const double fv = f.value;
    const double a = eps_h + eps_h * fv / (eps_h / (eps_i - eps_h) + (1.0 - fv) / 3.0);
    const double b = eps_i + (1.0 - fv) * eps_i / (eps_i / (eps_h - eps_i) + fv / 3.0);
    return a <= b ? Bounds{a, b} : Bounds{b, a};
}

inline double maxwell_garnett(double eps_i, double eps_h, FillingFraction f) {
    const double alpha = (eps_i - eps_h) / (eps_i + 2.0 * eps_h);
    return eps_h * (1.0 + 2.0 * f.value * alpha) / (1.0 - f.value * alpha);
}

// Symmetric two-phase mixture: the unique positive root of
//   2 e^2 - [(3f-1) eps_i + (2-3f) eps_h] e - eps_i eps_h = 0,
// the cleared form of f(eps_i-e)/(eps_i+2e) + (1-f)(eps_h-e)/(eps_h+2e) = 0.
// The product of the roots is -eps_i*eps_h/2 < 0, so exactly one root is
// positive; that is the physical branch on the imaginary axis.
inline double bruggeman_sphere(double eps_i, double eps_h, FillingFraction f) {
    const double fv = f.value;
    const double a1 = -((3.0 * fv - 1.0) * eps_i + (2.0 - 3.0 * fv) * eps_h);
    try {
        return solve_quadratic_positive(2.0, a1, -eps_i * eps_h);
    } catch (const AmbiguousRootError& e) {
        throw UnphysicalInputError(std::string("bruggeman: ") + e.what());
    } catch (const NoRealRootError& e) {
        throw UnphysicalInputError(std::string("bruggeman: ") + e.what());
    }
}

inline double looyenga(double eps_i, double eps_h, FillingFraction f) {
    const double c = f.value * std::cbrt(eps_i) + (1.0 - f.value) * std::cbrt(eps_h);
    return c * c * c;
}

// Geometry-only spectral density over depolarization values in [0,1]:
// discrete poles plus an optional sampled continuous part. The Bergman
// normalization sum(w) + integral(G) = 1 is enforced at construction.
class SpectralFunction {
public:
    struct Pole {
        double weight;
        double position;
    };

    explicit SpectralFunction(std::vector<Pole> poles,
                              std::vector<double> grid_l = {},
                              std::vector<double> grid_g = {})
        : poles_(std::move(poles)), grid_l_(std::move(grid_l)), grid_g_(std::move(grid_g)) {
        double mass = 0.0;
        for (const auto& p : poles_) {
            if (!(p.weight > 0.0))
                throw std::invalid_argument("SpectralFunction: pole weights must be > 0");
            if (!(p.position >= 0.0 && p.position <= 1.0))
                throw std::invalid_argument("SpectralFunction: pole positions must be in [0,1]");
            mass += p.weight;
        }
        if (grid_l_.size() != grid_g_.size())
            throw std::invalid_argument("SpectralFunction: grid length mismatch");
        if (!grid_l_.empty()) {
            if (grid_l_.size() < 2)
                throw std::invalid_argument("SpectralFunction: continuous part needs >= 2 nodes");
            for (std::size_t i = 0; i < grid_l_.size(); ++i) {
                if (!(grid_l_[i] >= 0.0 && grid_l_[i] <= 1.0))
                    throw std::invalid_argument("SpectralFunction: grid nodes must be in [0,1]");
                if (i > 0 && !(grid_l_[i] > grid_l_[i - 1]))
                    throw std::invalid_argument("SpectralFunction: grid must be increasing");
                if (!(grid_g_[i] >= 0.0))
                    throw std::invalid_argument("SpectralFunction: density must be >= 0");
            }
            mass += continuous_mass();
        }
        if (std::abs(mass - 1.0) > 1e-6)
            throw std::invalid_argument("SpectralFunction: sum rule violated, total mass = " +
                                        std::to_string(mass));
    }

    const std::vector<Pole>& poles() const { return poles_; }
    bool has_continuous() const { return !grid_l_.empty(); }
    const std::vector<double>& grid_l() const { return grid_l_; }
    const std::vector<double>& grid_g() const { return grid_g_; }

    double continuous_mass() const {
        double m = 0.0;
        for (std::size_t i = 0; i + 1 < grid_l_.size(); ++i)
            m += 0.5 * (grid_g_[i] + grid_g_[i + 1]) * (grid_l_[i + 1] - grid_l_[i]);
        return m;
    }

    double density_at(double l) const {
        auto it = std::lower_bound(grid_l_.begin(), grid_l_.end(), l);
        if (it == grid_l_.begin() || it == grid_l_.end())
            return it == grid_l_.end() ? grid_g_.back() : grid_g_.front();
        const std::size_t hi = static_cast<std::size_t>(it - grid_l_.begin());
        const std::size_t lo = hi - 1;
        const double t = (l - grid_l_[lo]) / (grid_l_[hi] - grid_l_[lo]);
        return grid_g_[lo] + t * (grid_g_[hi] - grid_g_[lo]);
    }

private:
    std::vector<Pole> poles_;
    std::vector<double> grid_l_, grid_g_;
};

// eps = eps_h (1 - f Int_0^1 G(L)/(t-L) dL) with t = eps_h/(eps_h - eps_i).
// On the imaginary axis eps_i > eps_h gives t < 0, outside the pole
// interval; t in [0,1] is the real-axis resonance regime and is rejected.
inline double spectral_eval(const SpectralFunction& g, double eps_i, double eps_h,
                            FillingFraction f,
                            const QuadratureSpec& q = QuadratureSpec::dielectric_default()) {
    if (eps_i == eps_h) return eps_h;
    const double t = eps_h / (eps_h - eps_i);
    if (t >= 0.0 && t <= 1.0)
        throw SingularSpectralDomainError("spectral_eval: t = " + std::to_string(t) +
                                          " lies inside [0,1]");
    double integral = 0.0;
    for (const auto& p : g.poles()) integral += p.weight / (t - p.position);
    if (g.has_continuous()) {
        const auto& gl = g.grid_l();
        for (std::size_t i = 0; i + 1 < gl.size(); ++i) {
            if (g.grid_g()[i] == 0.0 && g.grid_g()[i + 1] == 0.0) continue;
            auto h = [&](double l) { return g.density_at(l) / (t - l); };
            integral += integrate_finite(h, gl[i], gl[i + 1], q).value;
        }
    }
    return eps_h * (1.0 - f.value * integral);
}

// Depolarization factors of a prolate spheroid (a > b = c) with
// eccentricity e: L_a = (1-e^2)/(2e^3) [ln((1+e)/(1-e)) - 2e]. The closed
// form cancels catastrophically as e -> 0, so a series is used there;
// at e = 0 it returns the sphere value exactly.
inline std::array<double, 3> depolarization_prolate(double e) {
    if (!(e >= 0.0 && e < 1.0))
        throw InvalidEccentricityError("eccentricity must be in [0,1), got " +
                                       std::to_string(e));
    if (e == 0.0) return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    double la;
    if (e < 1e-3) {
        const double e2 = e * e;
        la = 1.0 / 3.0 - 2.0 * e2 / 15.0 - 2.0 * e2 * e2 / 35.0;
    } else {
        const double bracket = std::log1p(e) - std::log1p(-e) - 2.0 * e;
        la = (1.0 - e * e) / (2.0 * e * e * e) * bracket;
    }
    const double lb = 0.5 * (1.0 - la);
    return {la, lb, lb};
}

namespace detail {

// Per-axis dimensionless polarizability of an ellipsoidal inclusion,
// normalized so L = 1/3 reproduces the Maxwell-Garnett sphere value
// (eps_i - eps_h)/(eps_i + 2 eps_h).
inline double ellipsoid_polarizability(double eps_i, double eps_h, double l) {
    return (eps_i - eps_h) / (3.0 * (eps_h + l * (eps_i - eps_h)));
}

inline double mg_closure(double eps_h, double f, double alpha) {
    return eps_h * (1.0 + 2.0 * f * alpha) / (1.0 - f * alpha);
}

}  // namespace detail

// Maxwell-Garnett for aligned ellipsoids: one effective value per axis.
inline std::array<double, 3> maxwell_garnett_ellipsoid_axes(double eps_i, double eps_h,
                                                            FillingFraction f,
                                                            const std::array<double, 3>& depol) {
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i)
        out[static_cast<std::size_t>(i)] = detail::mg_closure(
            eps_h, f.value,
            detail::ellipsoid_polarizability(eps_i, eps_h, depol[static_cast<std::size_t>(i)]));
    return out;
}

// Maxwell-Garnett for randomly oriented ellipsoids: the polarizability is
// orientation-averaged before the closure.
inline double maxwell_garnett_ellipsoid(double eps_i, double eps_h, FillingFraction f,
                                        const std::array<double, 3>& depol) {
    double alpha = 0.0;
    for (double l : depol) alpha += detail::ellipsoid_polarizability(eps_i, eps_h, l);
    alpha /= 3.0;
    return detail::mg_closure(eps_h, f.value, alpha);
}

// Bruggeman for ellipsoids with depolarization factor l along the probed
// axis: positive root of
//   f (eps_i - e)/(eps_i + (1/l - 1) e) + (1-f)(eps_h - e)/(eps_h + (1/l - 1) e) = 0,
// cleared to k e^2 - [k(f eps_i + (1-f) eps_h) - (f eps_h + (1-f) eps_i)] e
//   - eps_i eps_h = 0 with k = 1/l - 1. Reduces to the sphere rule at l = 1/3.
inline double bruggeman_ellipsoid(double eps_i, double eps_h, FillingFraction f, double l) {
    if (!(l > 0.0 && l < 1.0))
        throw std::invalid_argument("bruggeman_ellipsoid: depolarization factor must be in (0,1)");
    const double k = 1.0 / l - 1.0;
    const double fv = f.value;
    const double a1 = -(k * (fv * eps_i + (1.0 - fv) * eps_h) -
                        (fv * eps_h + (1.0 - fv) * eps_i));
    try {
        return solve_quadratic_positive(k, a1, -eps_i * eps_h);
    } catch (const AmbiguousRootError& e) {
        throw UnphysicalInputError(std::string("bruggeman_ellipsoid: ") + e.what());
    } catch (const NoRealRootError& e) {
        throw UnphysicalInputError(std::string("bruggeman_ellipsoid: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Composite description and rule dispatch

struct Sphere {};
struct Prolate {
    double eccentricity;
};
struct ExplicitDepolarization {
    std::array<double, 3> l;
};

struct InclusionShape {
    std::variant<Sphere, Prolate, ExplicitDepolarization> variant;

    InclusionShape() : variant(Sphere{}) {}
    InclusionShape(Sphere s) : variant(s) {}
    InclusionShape(Prolate p) : variant(p) {
        if (!(p.eccentricity >= 0.0 && p.eccentricity < 1.0))
            throw InvalidEccentricityError("prolate eccentricity must be in [0,1)");
    }
    InclusionShape(ExplicitDepolarization d) : variant(d) {
        double sum = 0.0;
        for (double l : d.l) {
            if (!(l >= 0.0 && l <= 1.0))
                throw std::invalid_argument("depolarization factors must be in [0,1]");
            sum += l;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("depolarization factors must sum to 1");
    }

    std::array<double, 3> depolarization() const {
        return std::visit(
            [](const auto& v) -> std::array<double, 3> {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, Sphere>)
                    return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
                else if constexpr (std::is_same_v<T, Prolate>)
                    return depolarization_prolate(v.eccentricity);
                else
                    return v.l;
            },
            variant);
    }
};

struct CompositeSpec {
    DielectricModel host;
    DielectricModel inclusion;
    FillingFraction f{0.0};
    InclusionShape shape;
    double inclusion_radius_nm = 1.0;  // metadata for the 4*pi*L > a validity check

    CompositeSpec() = default;  // vacuum in vacuum
    CompositeSpec(DielectricModel host_, DielectricModel inclusion_, FillingFraction f_,
                  InclusionShape shape_ = InclusionShape{}, double radius_nm = 1.0)
        : host(std::move(host_)),
          inclusion(std::move(inclusion_)),
          f(f_),
          shape(shape_),
          inclusion_radius_nm(radius_nm) {
        if (!(radius_nm > 0.0))
            throw std::invalid_argument("CompositeSpec: inclusion radius must be > 0");
    }
};

enum class RuleKind {
    wiener_lower,
    wiener_upper,
    hs_lower,
    hs_upper,
    maxwell_garnett,
    bruggeman,
    looyenga,
    spectral,
    mg_ellipsoid,
    bruggeman_ellipsoid,
    ideal,  // perfect-conductor override; has no effective permittivity
};

struct MixingRule {
    RuleKind kind = RuleKind::maxwell_garnett;
    std::optional<SpectralFunction> spectral;  // required for RuleKind::spectral

    MixingRule() = default;
    MixingRule(RuleKind k) : kind(k) {}
    MixingRule(RuleKind k, SpectralFunction g) : kind(k), spectral(std::move(g)) {}
};

// Canonical rule names, in the canonical output ordering.
inline const std::vector<std::pair<RuleKind, std::string>>& rule_names() {
    static const std::vector<std::pair<RuleKind, std::string>> names = {
        {RuleKind::wiener_lower, "wiener-lower"},
        {RuleKind::wiener_upper, "wiener-upper"},
        {RuleKind::hs_lower, "hs-lower"},
        {RuleKind::hs_upper, "hs-upper"},
        {RuleKind::maxwell_garnett, "maxwell-garnett"},
        {RuleKind::bruggeman, "bruggeman"},
        {RuleKind::looyenga, "looyenga"},
        {RuleKind::spectral, "spectral"},
        {RuleKind::mg_ellipsoid, "mg-ellipsoid"},
        {RuleKind::bruggeman_ellipsoid, "bruggeman-ellipsoid"},
        {RuleKind::ideal, "ideal"},
    };
    return names;
}

inline std::string rule_name(RuleKind k) {
    for (const auto& [kind, name] : rule_names())
        if (kind == k) return name;
    throw std::logic_error("rule_name: unknown kind");
}

inline RuleKind rule_kind_from_name(const std::string& name) {
    for (const auto& [kind, n] : rule_names())
        if (n == name) return kind;
    throw std::invalid_argument("unknown mixing rule '" + name + "'");
}

inline int rule_canonical_index(RuleKind k) {
    const auto& names = rule_names();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i].first == k) return static_cast<int>(i);
    return -1;
}

// Rule dispatch on already-evaluated constituent permittivities.
inline double apply_mixing_rule(const MixingRule& rule, double eps_i, double eps_h,
                                FillingFraction f, const InclusionShape& shape,
                                const QuadratureSpec& q = QuadratureSpec::dielectric_default()) {
    switch (rule.kind) {
        case RuleKind::wiener_lower:
            return wiener_bounds(eps_i, eps_h, f).lower;
        case RuleKind::wiener_upper:
            return wiener_bounds(eps_i, eps_h, f).upper;
        case RuleKind::hs_lower:
            return hashin_shtrikman_bounds(eps_i, eps_h, f).lower;
        case RuleKind::hs_upper:
            return hashin_shtrikman_bounds(eps_i, eps_h, f).upper;
        case RuleKind::maxwell_garnett:
            return maxwell_garnett(eps_i, eps_h, f);
        case RuleKind::bruggeman:
            return bruggeman_sphere(eps_i, eps_h, f);
        case RuleKind::looyenga:
            return looyenga(eps_i, eps_h, f);
        case RuleKind::spectral:
            if (!rule.spectral)
                throw std::invalid_argument("spectral rule used without a spectral function");
            if (eps_i == eps_h) return eps_h;
            return spectral_eval(*rule.spectral, eps_i, eps_h, f, q);
        case RuleKind::mg_ellipsoid:
            return maxwell_garnett_ellipsoid(eps_i, eps_h, f, shape.depolarization());
        case RuleKind::bruggeman_ellipsoid:
            // aligned along the shape's distinguished (first) axis
            return bruggeman_ellipsoid(eps_i, eps_h, f, shape.depolarization()[0]);
        case RuleKind::ideal:
            throw std::invalid_argument("the 'ideal' rule has no effective permittivity");
    }
    throw std::logic_error("apply_mixing_rule: unhandled rule");
}

// Evaluate host and inclusion at zeta, then apply the rule.
inline double effective_epsilon(const CompositeSpec& spec, const MixingRule& rule,
                                ImaginaryFrequency z,
                                const QuadratureSpec& q = QuadratureSpec::dielectric_default()) {
    const double eps_h = eval_model(spec.host, z, q);
    const double eps_i = eval_model(spec.inclusion, z, q);
    return apply_mixing_rule(rule, eps_i, eps_h, spec.f, spec.shape, q);
}

}  // namespace casimix
