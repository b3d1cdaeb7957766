#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "casimix/constants.hpp"
#include "casimix/numerics.hpp"

// Material permittivities on the imaginary frequency axis, eps(i*zeta).
// On that axis every causal passive permittivity is real, >= 1, and
// monotone decreasing in zeta, which is what the Lifshitz integral needs.

namespace casimix {

// Photon energy on the imaginary axis, in eV.
struct ImaginaryFrequency {
    double zeta_ev;
    explicit ImaginaryFrequency(double z) : zeta_ev(z) {
        if (!(z >= 0.0))
            throw std::invalid_argument("ImaginaryFrequency: zeta must be >= 0");
    }
};

class DivergentAtZeroError : public std::domain_error {
public:
    explicit DivergentAtZeroError(const std::string& what) : std::domain_error(what) {}
};

class IncompleteSpectrumError : public std::runtime_error {
public:
    explicit IncompleteSpectrumError(const std::string& what) : std::runtime_error(what) {}
};

struct DrudeParams {
    double omega_p_ev;  // plasma frequency
    double gamma_ev;    // damping; 0 means a lossless plasma

    DrudeParams(double omega_p, double gamma) : omega_p_ev(omega_p), gamma_ev(gamma) {
        if (!(omega_p > 0.0)) throw std::invalid_argument("DrudeParams: omega_p must be > 0");
        if (!(gamma >= 0.0)) throw std::invalid_argument("DrudeParams: gamma must be >= 0");
    }
};

struct Oscillator {
    double strength;  // dimensionless absorption strength C_k
    double omega_ev;  // absorption frequency

    bool operator==(const Oscillator&) const = default;
};

struct OscillatorParams {
    std::vector<Oscillator> oscillators;  // empty list is vacuum

    OscillatorParams() = default;
    explicit OscillatorParams(std::vector<Oscillator> osc) : oscillators(std::move(osc)) {
        for (const auto& o : oscillators) {
            if (!(o.strength > 0.0))
                throw std::invalid_argument("OscillatorParams: strength must be > 0");
            if (!(o.omega_ev > 0.0))
                throw std::invalid_argument("OscillatorParams: omega must be > 0");
        }
    }
};

// Sampled loss spectrum eps''(omega) plus the two pieces of information the
// Kramers-Kronig rotation needs outside the sampled window: a Drude model
// below omega_min and a power-law decay eps'' ~ omega^-tail beyond omega_max.
class SpectrumTable {
public:
    SpectrumTable(std::vector<double> omega_ev, std::vector<double> eps2,
                  std::optional<DrudeParams> low_freq_extrapolation = std::nullopt,
                  double tail_exponent = 3.0)
        : omega_(std::move(omega_ev)),
          eps2_(std::move(eps2)),
          extrapolation_(std::move(low_freq_extrapolation)),
          tail_exponent_(tail_exponent) {
        if (omega_.size() < 2)
            throw std::invalid_argument("SpectrumTable: need at least 2 samples");
        if (omega_.size() != eps2_.size())
            throw std::invalid_argument("SpectrumTable: length mismatch");
        if (!(omega_.front() > 0.0))
            throw std::invalid_argument("SpectrumTable: omega must be positive");
        for (std::size_t i = 1; i < omega_.size(); ++i)
            if (!(omega_[i] > omega_[i - 1]))
                throw std::invalid_argument("SpectrumTable: omega must be strictly increasing");
        for (double y : eps2_)
            if (!(y >= 0.0))
                throw std::invalid_argument("SpectrumTable: eps'' must be >= 0 (passivity)");
        if (!(tail_exponent_ > 0.0))
            throw std::invalid_argument("SpectrumTable: tail exponent must be > 0");
        all_positive_ = true;
        for (double y : eps2_) all_positive_ = all_positive_ && y > 0.0;
        if (all_positive_) loglog_.emplace(omega_, eps2_);
    }

    const std::vector<double>& omega() const { return omega_; }
    const std::vector<double>& eps2() const { return eps2_; }
    const std::optional<DrudeParams>& extrapolation() const { return extrapolation_; }
    double tail_exponent() const { return tail_exponent_; }

    // Interpolated loss at omega inside the sampled window. Log-log when the
    // data allows it, linear across panels touching a zero sample.
    double eps2_at(double omega) const {
        if (all_positive_) return interp_loglog(*loglog_, omega);
        const auto& xs = omega_;
        if (omega < xs.front() || omega > xs.back())
            throw OutOfRangeError("SpectrumTable: omega outside sampled range");
        auto it = std::lower_bound(xs.begin(), xs.end(), omega);
        if (it != xs.end() && *it == omega) return eps2_[static_cast<std::size_t>(it - xs.begin())];
        const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
        const std::size_t lo = hi - 1;
        if (eps2_[lo] > 0.0 && eps2_[hi] > 0.0) {
            const double p = std::log(eps2_[hi] / eps2_[lo]) / std::log(xs[hi] / xs[lo]);
            return eps2_[lo] * std::exp(p * std::log(omega / xs[lo]));
        }
        return eps2_[lo] + (eps2_[hi] - eps2_[lo]) * (omega - xs[lo]) / (xs[hi] - xs[lo]);
    }

private:
    std::vector<double> omega_, eps2_;
    std::optional<DrudeParams> extrapolation_;
    double tail_exponent_;
    bool all_positive_ = false;
    std::optional<InterpolationTable> loglog_;
};

struct Vacuum {};

// eps(i*zeta) = 1 + omega_p^2 / (zeta (zeta + gamma)); diverges at zeta = 0.
inline double eval_drude_imag(const DrudeParams& p, ImaginaryFrequency z) {
    if (z.zeta_ev == 0.0)
        throw DivergentAtZeroError("Drude permittivity diverges at zeta = 0");
    return 1.0 + p.omega_p_ev * p.omega_p_ev / (z.zeta_ev * (z.zeta_ev + p.gamma_ev));
}

// eps(i*zeta) = 1 + sum_k C_k / (1 + (zeta/omega_k)^2).
inline double eval_oscillator_imag(const OscillatorParams& p, ImaginaryFrequency z) {
    double eps = 1.0;
    for (const auto& o : p.oscillators) {
        const double r = z.zeta_ev / o.omega_ev;
        eps += o.strength / (1.0 + r * r);
    }
    return eps;
}

// Kramers-Kronig rotation of a sampled loss spectrum:
//   eps(i*zeta) = 1 + (2/pi) Int_0^inf omega eps''(omega)/(omega^2+zeta^2) domega.
// The integral is split at the table limits: Drude extrapolation below,
// interpolated data panel by panel inside, power-law tail above.
inline double kk_rotate(const SpectrumTable& s, ImaginaryFrequency z,
                        const QuadratureSpec& q = QuadratureSpec::dielectric_default()) {
    const double zeta = z.zeta_ev;
    if (!(zeta > 0.0))
        throw std::invalid_argument("kk_rotate: requires zeta > 0");
    const double z2 = zeta * zeta;
    const auto& om = s.omega();

    QuadratureSpec panel_spec(q.rel_tol, q.abs_tol, std::max(1, q.max_subdivisions / 10));

    double low = 0.0;
    if (s.extrapolation()) {
        const DrudeParams& d = *s.extrapolation();
        const double wp2g = d.omega_p_ev * d.omega_p_ev * d.gamma_ev;
        if (wp2g > 0.0) {
            auto f = [&](double w) {
                return wp2g / ((w * w + d.gamma_ev * d.gamma_ev) * (w * w + z2));
            };
            low = integrate_finite(f, 0.0, om.front(), panel_spec).value;
        }
    } else if (om.front() > 0.01 * zeta) {
        throw IncompleteSpectrumError(
            "no low-frequency extrapolation and table starts at " +
            std::to_string(om.front()) + " eV, too high for zeta = " +
            std::to_string(zeta) + " eV");
    }

    double data = 0.0;
    for (std::size_t i = 0; i + 1 < om.size(); ++i) {
        if (s.eps2()[i] == 0.0 && s.eps2()[i + 1] == 0.0) continue;
        // quadrature nodes can land one rounding step past the panel edge
        auto f = [&](double w) {
            const double wc = std::clamp(w, om.front(), om.back());
            return wc * s.eps2_at(wc) / (wc * wc + z2);
        };
        data += integrate_finite(f, om[i], om[i + 1], panel_spec).value;
    }

    double tail = 0.0;
    const double y_end = s.eps2().back();
    if (y_end > 0.0) {
        const double w_end = om.back();
        const double p = s.tail_exponent();
        auto f = [&](double w) {
            return y_end * std::pow(w / w_end, -p) * w / (w * w + z2);
        };
        tail = integrate_semi_infinite(f, w_end, panel_spec, std::max(w_end, zeta)).value;
    }

    return 1.0 + (2.0 / pi) * (low + data + tail);
}

// One material; evaluation dispatches on the variant.
struct DielectricModel {
    std::variant<Vacuum, DrudeParams, OscillatorParams, SpectrumTable> variant;

    DielectricModel() : variant(Vacuum{}) {}
    DielectricModel(Vacuum v) : variant(v) {}
    DielectricModel(DrudeParams p) : variant(std::move(p)) {}
    DielectricModel(OscillatorParams p) : variant(std::move(p)) {}
    DielectricModel(SpectrumTable t) : variant(std::move(t)) {}

    bool is_vacuum() const { return std::holds_alternative<Vacuum>(variant); }
};

inline double eval_model(const DielectricModel& m, ImaginaryFrequency z,
                         const QuadratureSpec& q = QuadratureSpec::dielectric_default()) {
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Vacuum>)
                return 1.0;
            else if constexpr (std::is_same_v<T, DrudeParams>)
                return eval_drude_imag(v, z);
            else if constexpr (std::is_same_v<T, OscillatorParams>)
                return eval_oscillator_imag(v, z);
            else
                return kk_rotate(v, z, q);
        },
        m.variant);
}

}  // namespace casimix
