#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "casimix/constants.hpp"
#include "casimix/dielectric.hpp"

// Synthetic loss spectra with known imaginary-axis closed forms, used to
// exercise the Kramers-Kronig rotation against independent oracles.

namespace casimix::testing {

// Drude loss eps''(w) = wp^2 g / (w (w^2 + g^2)); its rotation has the
// closed form 1 + wp^2/(z (z + g)).
inline SpectrumTable drude_loss_table(double omega_p, double gamma,
                                      double w_min = 1e-3, double w_max = 1e3,
                                      int per_decade = 40) {
    const int n = static_cast<int>(std::round(per_decade * std::log10(w_max / w_min))) + 1;
    std::vector<double> om(static_cast<std::size_t>(n)), e2(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double w = w_min * std::pow(w_max / w_min, double(i) / (n - 1));
        om[static_cast<std::size_t>(i)] = w;
        e2[static_cast<std::size_t>(i)] =
            omega_p * omega_p * gamma / (w * (w * w + gamma * gamma));
    }
    return SpectrumTable(std::move(om), std::move(e2), DrudeParams(omega_p, gamma), 3.0);
}

// Damped Lorentz oscillator loss; rotation closed form
// 1 + C w0^2 / (w0^2 + g z + z^2). The resonance is resolved with
// arctan-spaced abscissae merged into a log-spaced background grid.
inline SpectrumTable lorentz_loss_table(double strength, double omega_0, double gamma,
                                        double w_min = 1e-4, double w_max = 1e3) {
    std::vector<double> om;
    const int n_log = static_cast<int>(std::round(80 * std::log10(w_max / w_min))) + 1;
    for (int i = 0; i < n_log; ++i)
        om.push_back(w_min * std::pow(w_max / w_min, double(i) / (n_log - 1)));
    const int n_pk = 400;
    for (int i = 0; i < n_pk; ++i) {
        const double th = (double(i) / (n_pk - 1) - 0.5) * 0.995 * 3.14159265358979323846;
        const double w = omega_0 + gamma * std::tan(th);
        if (w > w_min && w < w_max) om.push_back(w);
    }
    std::sort(om.begin(), om.end());
    om.erase(std::unique(om.begin(), om.end()), om.end());
    std::vector<double> e2;
    e2.reserve(om.size());
    for (double w : om) {
        const double d = omega_0 * omega_0 - w * w;
        e2.push_back(strength * omega_0 * omega_0 * gamma * w / (d * d + gamma * gamma * w * w));
    }
    return SpectrumTable(std::move(om), std::move(e2), std::nullopt, 3.0);
}

inline double drude_closed_form(double omega_p, double gamma, double zeta) {
    return 1.0 + omega_p * omega_p / (zeta * (zeta + gamma));
}

inline double lorentz_closed_form(double strength, double omega_0, double gamma, double zeta) {
    return 1.0 + strength * omega_0 * omega_0 /
                     (omega_0 * omega_0 + gamma * zeta + zeta * zeta);
}

// Silica-like two-oscillator host used across the physics tests.
inline OscillatorParams silica_like_host() {
    return OscillatorParams({{1.098, 13.3815}, {0.829, 0.05707}});
}

}  // namespace casimix::testing
