#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Shared numeric kernels: adaptive Gauss-Kronrod quadrature on finite and
// semi-infinite intervals, a positive-root quadratic solver, and log-log
// table interpolation. Everything here is a pure function; no shared state.

namespace casimix {

struct QuadratureSpec {
    double rel_tol;
    double abs_tol;
    int max_subdivisions;

    QuadratureSpec(double rel, double abs, int max_sub)
        : rel_tol(rel), abs_tol(abs), max_subdivisions(max_sub) {
        if (!(rel > 0.0 && rel < 1.0))
            throw std::invalid_argument("QuadratureSpec: rel_tol must be in (0,1)");
        if (!(abs > 0.0))
            throw std::invalid_argument("QuadratureSpec: abs_tol must be positive");
        if (max_sub < 1)
            throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
    }

    // Defaults used by the physics layers: tight for single permittivity
    // integrals, slightly looser for the force double integral.
    static QuadratureSpec dielectric_default() { return {1e-6, 1e-14, 2000}; }
    static QuadratureSpec force_default() { return {1e-5, 1e-30, 400}; }
};

struct IntegralResult {
    double value = 0.0;
    double error_bound = 0.0;
    int subdivisions = 0;
};

class InvalidIntegrandError : public std::runtime_error {
public:
    explicit InvalidIntegrandError(const std::string& what)
        : std::runtime_error(what) {}
};

// Thrown when the subdivision budget is exhausted; carries the best
// estimate so callers can decide whether it is still usable.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double estimate, double error_bound)
        : std::runtime_error(what), estimate(estimate), error_bound(error_bound) {}
    double estimate;
    double error_bound;
};

class NoRealRootError : public std::runtime_error {
public:
    explicit NoRealRootError(const std::string& what) : std::runtime_error(what) {}
};

class AmbiguousRootError : public std::runtime_error {
public:
    explicit AmbiguousRootError(const std::string& what) : std::runtime_error(what) {}
};

class OutOfRangeError : public std::out_of_range {
public:
    explicit OutOfRangeError(const std::string& what) : std::out_of_range(what) {}
};

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule (positive nodes;
// the rule is symmetric about the interval midpoint).
inline constexpr double gk_nodes[8] = {
    0.9914553711208126392068547, 0.9491079123427585245261897,
    0.8648644233597690727897128, 0.7415311855993944398638648,
    0.5860872354676911302941448, 0.4058451513773971669066064,
    0.2077849550078984676006894, 0.0};
inline constexpr double gk_weights[8] = {
    0.0229353220105292249637320, 0.0630920926299785532907007,
    0.1047900103222501838398763, 0.1406532597155259187451896,
    0.1690047266392679028265834, 0.1903505780647854099132564,
    0.2044329400752988924141620, 0.2094821410847278280129992};
inline constexpr double g7_weights[4] = {
    0.1294849661688696932706114, 0.2797053914892766679014678,
    0.3818300505051189449503698, 0.4179591836734693877551020};

struct Segment {
    double lo, hi;
    double value;
    double error;
};

struct SegmentWorse {
    bool operator()(const Segment& a, const Segment& b) const {
        if (a.error != b.error) return a.error < b.error;
        return a.lo > b.lo;  // deterministic tie-break
    }
};

// One Gauss-Kronrod 7-15 panel. The error estimate |K15-G7| is a
// conservative bound for the K15 result.
template <class F>
Segment gk15(F&& f, double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    double resk = gk_weights[7] * f(c);
    double resg = g7_weights[3] * f(c);
    for (int i = 0; i < 7; ++i) {
        const double x = h * gk_nodes[i];
        const double fsum = f(c - x) + f(c + x);
        resk += gk_weights[i] * fsum;
        if (i % 2 == 1) resg += g7_weights[i / 2] * fsum;
    }
    resk *= h;
    resg *= h;
    if (std::isnan(resk) || std::isnan(resg))
        throw InvalidIntegrandError("integrand returned NaN on [" +
                                    std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return {lo, hi, resk, std::abs(resk - resg)};
}

template <class F>
IntegralResult adaptive(F&& f, double lo, double hi, const QuadratureSpec& spec) {
    std::priority_queue<Segment, std::vector<Segment>, SegmentWorse> heap;
    Segment first = gk15(f, lo, hi);
    double total = first.value;
    double err = first.error;    // refinable part
    double stuck = 0.0;          // segments at floating point resolution
    heap.push(first);
    int splits = 0;
    while (err + stuck > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
        if (splits >= spec.max_subdivisions || heap.empty())
            throw ConvergenceError("quadrature did not converge after " +
                                       std::to_string(splits) + " subdivisions",
                                   total, err + stuck);
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (mid <= worst.lo || mid >= worst.hi) {
            err -= worst.error;
            stuck += worst.error;
            continue;
        }
        Segment left = gk15(f, worst.lo, mid);
        Segment right = gk15(f, mid, worst.hi);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++splits;
    }
    return {total, err + stuck, splits};
}

}  // namespace detail

// Integrate f over [lo, hi] to max(abs_tol, rel_tol*|I|). Endpoints are
// never evaluated, so integrable endpoint singularities are tolerated.
template <class F>
IntegralResult integrate_finite(F&& f, double lo, double hi, const QuadratureSpec& spec) {
    if (!(lo < hi)) throw std::invalid_argument("integrate: requires lo < hi");
    return detail::adaptive(std::forward<F>(f), lo, hi, spec);
}

// Integrate f over [lo, inf) via the compactification x = lo + scale*t/(1-t),
// t in (0,1). `scale` sets the abscissa where half the unit interval is
// spent; match it to the integrand's decay length.
template <class F>
IntegralResult integrate_semi_infinite(F&& f, double lo, const QuadratureSpec& spec,
                                       double scale = 1.0) {
    if (!(scale > 0.0)) throw std::invalid_argument("integrate: scale must be positive");
    auto g = [&f, lo, scale](double t) {
        const double om = 1.0 - t;
        const double x = lo + scale * t / om;
        return f(x) * scale / (om * om);
    };
    return detail::adaptive(g, 0.0, 1.0, spec);
}

// Entry point matching both finite and infinite upper limits.
template <class F>
IntegralResult integrate_adaptive(F&& f, double lo, double hi, const QuadratureSpec& spec) {
    if (std::isinf(hi))
        return integrate_semi_infinite(std::forward<F>(f), lo, spec);
    return integrate_finite(std::forward<F>(f), lo, hi, spec);
}

// Unique strictly positive real root of a2*x^2 + a1*x + a0 = 0.
// A double root counts as a single root.
inline double solve_quadratic_positive(double a2, double a1, double a0) {
    if (a2 == 0.0) throw std::invalid_argument("solve_quadratic_positive: a2 must be nonzero");
    const double disc = a1 * a1 - 4.0 * a2 * a0;
    if (disc < 0.0) throw NoRealRootError("negative discriminant " + std::to_string(disc));
    const double sd = std::sqrt(disc);
    // Citardauq form: compute the larger-magnitude root first, derive the
    // other from the product, avoiding cancellation.
    const double q = -0.5 * (a1 + std::copysign(sd, a1));
    double r1, r2;
    if (q != 0.0) {
        r1 = q / a2;
        r2 = a0 / q;
    } else {
        r1 = 0.0;  // a1 == 0 and a0 == 0
        r2 = 0.0;
    }
    const bool p1 = r1 > 0.0;
    const bool p2 = r2 > 0.0;
    if (p1 && p2 && r1 != r2)
        throw AmbiguousRootError("two distinct positive roots");
    if (!p1 && !p2)
        throw AmbiguousRootError("no strictly positive root");
    return p1 ? r1 : r2;
}

// Strictly increasing non-negative abscissae with matching ordinates.
class InterpolationTable {
public:
    InterpolationTable(std::vector<double> abscissae, std::vector<double> ordinates)
        : xs_(std::move(abscissae)), ys_(std::move(ordinates)) {
        if (xs_.size() < 2)
            throw std::invalid_argument("InterpolationTable: need at least 2 points");
        if (xs_.size() != ys_.size())
            throw std::invalid_argument("InterpolationTable: length mismatch");
        if (xs_.front() < 0.0)
            throw std::invalid_argument("InterpolationTable: abscissae must be non-negative");
        for (std::size_t i = 1; i < xs_.size(); ++i)
            if (!(xs_[i] > xs_[i - 1]))
                throw std::invalid_argument(
                    "InterpolationTable: abscissae must be strictly increasing");
    }

    const std::vector<double>& abscissae() const { return xs_; }
    const std::vector<double>& ordinates() const { return ys_; }
    double x_min() const { return xs_.front(); }
    double x_max() const { return xs_.back(); }

private:
    std::vector<double> xs_, ys_;
};

// Piecewise-linear interpolation in (log x, log y); exact at the nodes.
// Extrapolation is deliberately not provided here.
inline double interp_loglog(const InterpolationTable& table, double x) {
    const auto& xs = table.abscissae();
    const auto& ys = table.ordinates();
    if (x < xs.front() || x > xs.back())
        throw OutOfRangeError("interp_loglog: x = " + std::to_string(x) +
                              " outside [" + std::to_string(xs.front()) + ", " +
                              std::to_string(xs.back()) + "]");
    if (xs.front() <= 0.0)
        throw std::invalid_argument("interp_loglog: abscissae must be positive");
    auto it = std::lower_bound(xs.begin(), xs.end(), x);
    if (it != xs.end() && *it == x) return ys[static_cast<std::size_t>(it - xs.begin())];
    const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    const std::size_t lo = hi - 1;
    if (!(ys[lo] > 0.0 && ys[hi] > 0.0))
        throw std::invalid_argument("interp_loglog: ordinates must be positive");
    const double slope = std::log(ys[hi] / ys[lo]) / std::log(xs[hi] / xs[lo]);
    return ys[lo] * std::exp(slope * std::log(x / xs[lo]));
}

}  // namespace casimix
