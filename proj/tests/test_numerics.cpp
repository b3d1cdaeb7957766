#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "casimix/constants.hpp"
#include "casimix/numerics.hpp"

using namespace casimix;
using Catch::Approx;

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
const QuadratureSpec tight{1e-10, 1e-14, 2000};
}  // namespace

TEST_CASE("quadrature: constant integrand") {
    auto r = integrate_adaptive([](double) { return 1.0; }, 0.0, 1.0, tight);
    REQUIRE(r.value == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("quadrature: decaying exponential on the half line") {
    QuadratureSpec q{1e-8, 1e-14, 500};
    auto r = integrate_adaptive([](double x) { return std::exp(-x); }, 0.0, inf, q);
    REQUIRE(r.value == Approx(1.0).epsilon(1e-8));
    REQUIRE(std::abs(r.value - 1.0) <= std::max(q.abs_tol, q.rel_tol * r.value) * 10);
}

TEST_CASE("quadrature: planck-type kernel equals pi^4/15") {
    // The x^3/(e^x - 1) kernel is the shape of the ideal-conductor force
    // integral; its value is known analytically.
    const double expected = std::pow(pi, 4) / 15.0;
    auto r = integrate_adaptive([](double x) { return x * x * x / std::expm1(x); }, 0.0, inf,
                                QuadratureSpec{1e-9, 1e-14, 1000});
    REQUIRE(r.value == Approx(expected).epsilon(1e-8));
}

TEST_CASE("quadrature: integrable endpoint singularity") {
    auto r = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                                QuadratureSpec{1e-8, 1e-12, 2000});
    REQUIRE(r.value == Approx(2.0).epsilon(1e-7));
}

TEST_CASE("quadrature: error bound honored when effort is doubled") {
    auto kernel = [](double x) { return std::sin(3.0 * x) * std::exp(-x * x); };
    for (int maxsub : {20, 40, 80}) {
        QuadratureSpec base{1e-7, 1e-14, maxsub};
        QuadratureSpec doubled{1e-7, 1e-14, 2 * maxsub};
        IntegralResult a, b;
        try {
            a = integrate_finite(kernel, 0.0, 6.0, base);
        } catch (const ConvergenceError& e) {
            a = {e.estimate, e.error_bound, maxsub};
        }
        b = integrate_finite(kernel, 0.0, 6.0, doubled);
        REQUIRE(std::abs(a.value - b.value) < 2.0 * a.error_bound + 1e-15);
    }
}

TEST_CASE("quadrature: NaN integrand is rejected") {
    REQUIRE_THROWS_AS(integrate_adaptive([](double x) { return std::log(x - 0.5); }, 0.0, 1.0,
                                         QuadratureSpec{1e-6, 1e-12, 100}),
                      InvalidIntegrandError);
}

TEST_CASE("quadrature: subdivision budget exhaustion reports best estimate") {
    // A spike the initial panel cannot resolve, with a budget of one split.
    auto spike = [](double x) { return 1.0 / (1e-6 + (x - 0.3) * (x - 0.3)); };
    try {
        integrate_finite(spike, 0.0, 1.0, QuadratureSpec{1e-12, 1e-14, 1});
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        REQUIRE(e.estimate > 0.0);
        REQUIRE(e.error_bound > 0.0);
    }
}

TEST_CASE("quadratic: examples") {
    REQUIRE(solve_quadratic_positive(1.0, 0.0, -4.0) == Approx(2.0).epsilon(1e-14));
    REQUIRE(solve_quadratic_positive(2.0, -5.5, -10.0) == Approx(4.0).epsilon(1e-14));
    // double root at 1
    REQUIRE(solve_quadratic_positive(1.0, -2.0, 1.0) == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("quadratic: error cases") {
    REQUIRE_THROWS_AS(solve_quadratic_positive(1.0, 0.0, 4.0), NoRealRootError);
    REQUIRE_THROWS_AS(solve_quadratic_positive(1.0, -5.0, 6.0), AmbiguousRootError);  // 2 and 3
    REQUIRE_THROWS_AS(solve_quadratic_positive(1.0, 3.0, 2.0), AmbiguousRootError);   // -1 and -2
    REQUIRE_THROWS_AS(solve_quadratic_positive(0.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("quadratic: residual bound on random one-positive-root inputs") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> mag(-6.0, 6.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const double rp = std::pow(10.0, mag(rng));   // positive root
        const double rn = -std::pow(10.0, mag(rng));  // negative root
        const double a2 = (trial % 2 ? 1.0 : -1.0) * std::pow(10.0, mag(rng));
        const double a1 = -a2 * (rp + rn);
        const double a0 = a2 * rp * rn;
        const double r = solve_quadratic_positive(a2, a1, a0);
        const double resid = std::abs(a2 * r * r + a1 * r + a0);
        const double scale = std::max({std::abs(a2 * r * r), std::abs(a1 * r), std::abs(a0)});
        REQUIRE(resid <= 1e-10 * scale);
    }
}

TEST_CASE("interp_loglog: node exactness and examples") {
    InterpolationTable t1({1.0, 10.0}, {1.0, 10.0});
    REQUIRE(interp_loglog(t1, 1.0) == 1.0);
    REQUIRE(interp_loglog(t1, 10.0) == 10.0);

    InterpolationTable t2({1.0, 100.0}, {1.0, 10000.0});
    REQUIRE(interp_loglog(t2, 10.0) == Approx(100.0).epsilon(1e-13));

    InterpolationTable t3({1.0, 10.0}, {5.0, 5.0});
    REQUIRE(interp_loglog(t3, 3.0) == Approx(5.0).epsilon(1e-14));
}

TEST_CASE("interp_loglog: out of range is an error, never extrapolation") {
    InterpolationTable t({1.0, 2.0, 4.0}, {1.0, 2.0, 4.0});
    REQUIRE_THROWS_AS(interp_loglog(t, 0.5), OutOfRangeError);
    REQUIRE_THROWS_AS(interp_loglog(t, 4.0001), OutOfRangeError);
    // a zero abscissa or non-positive ordinate cannot be log-mapped
    InterpolationTable z({0.0, 1.0}, {1.0, 2.0});
    REQUIRE_THROWS_AS(interp_loglog(z, 0.5), std::invalid_argument);
    InterpolationTable n({1.0, 2.0}, {0.0, 2.0});
    REQUIRE_THROWS_AS(interp_loglog(n, 1.5), std::invalid_argument);
}

TEST_CASE("interp_loglog: reproduces power laws to 1e-12") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> cdist(-3.0, 3.0), pdist(-5.0, 5.0);
    std::uniform_real_distribution<double> xdist(0.1, 100.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double c = std::pow(10.0, cdist(rng));
        const double p = pdist(rng);
        std::vector<double> xs, ys;
        for (double x = 0.1; x <= 120.0; x *= 1.7) {
            xs.push_back(x);
            ys.push_back(c * std::pow(x, p));
        }
        InterpolationTable t(xs, ys);
        for (int i = 0; i < 20; ++i) {
            double x = xdist(rng);
            x = std::min(std::max(x, xs.front()), xs.back());
            const double expected = c * std::pow(x, p);
            REQUIRE(interp_loglog(t, x) == Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("table invariants enforced at construction") {
    REQUIRE_THROWS_AS(InterpolationTable({1.0}, {1.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(InterpolationTable({1.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(InterpolationTable({2.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(InterpolationTable({-1.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(InterpolationTable({1.0, 2.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("quadrature spec invariants") {
    REQUIRE_THROWS_AS(QuadratureSpec(0.0, 1e-12, 10), std::invalid_argument);
    REQUIRE_THROWS_AS(QuadratureSpec(1.5, 1e-12, 10), std::invalid_argument);
    REQUIRE_THROWS_AS(QuadratureSpec(1e-6, 0.0, 10), std::invalid_argument);
    REQUIRE_THROWS_AS(QuadratureSpec(1e-6, 1e-12, 0), std::invalid_argument);
}
