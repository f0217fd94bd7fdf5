#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "cpca/chebfit.hpp"
#include "cpca/objectives.hpp"
#include "cpca/rng.hpp"
#include "helpers.hpp"

using namespace cpca;
using Catch::Approx;

TEST_CASE("interval rejects degenerate bounds") {
    CHECK_THROWS_AS(Interval(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Interval(2.0, -1.0), std::invalid_argument);
    CHECK(Interval(0.0, 4.0).width() == 4.0);
}

TEST_CASE("cheb_points reference values") {
    const auto p2 = cheb_points(2, Interval(-1, 1));
    REQUIRE(p2.size() == 3);
    CHECK(p2[0] == Approx(1.0).margin(1e-15));
    CHECK(p2[1] == Approx(0.0).margin(1e-15));
    CHECK(p2[2] == Approx(-1.0).margin(1e-15));

    const auto p1 = cheb_points(1, Interval(0, 4));
    CHECK(p1[0] == Approx(4.0).margin(1e-15));
    CHECK(p1[1] == Approx(0.0).margin(1e-15));

    const double r = std::sqrt(2.0) / 2.0;
    const auto p4 = cheb_points(4, Interval(-1, 1));
    CHECK(p4[1] == Approx(r).margin(1e-15));
    CHECK(p4[3] == Approx(-r).margin(1e-15));
}

TEST_CASE("cheb_points nest exactly") {
    for (int m : {2, 4, 8, 16, 64}) {
        const auto coarse = cheb_points(m, Interval(-2.5, 7.0));
        const auto fine = cheb_points(2 * m, Interval(-2.5, 7.0));
        for (int k = 0; k <= m; ++k) {
            CHECK(coarse[static_cast<std::size_t>(k)] == fine[static_cast<std::size_t>(2 * k)]);
        }
    }
}

TEST_CASE("coefficients of x^2") {
    // values of x^2 at the m=2 grid [1, 0, -1]
    const auto c = coeffs_from_values({1.0, 0.0, 1.0});
    REQUIRE(c.size() == 3);
    CHECK(c[0] == Approx(0.5).margin(1e-15));
    CHECK(c[1] == Approx(0.0).margin(1e-15));
    CHECK(c[2] == Approx(0.5).margin(1e-15));
}

TEST_CASE("coefficients of a constant") {
    for (int m : {2, 5, 9}) {
        const std::vector<double> values(static_cast<std::size_t>(m) + 1, 1.0);
        const auto c = coeffs_from_values(values);
        CHECK(c[0] == Approx(1.0).margin(1e-14));
        for (std::size_t j = 1; j < c.size(); ++j) CHECK(c[j] == Approx(0.0).margin(1e-14));
    }
}

TEST_CASE("degree-16 interpolant of exp matches exp everywhere") {
    const Interval iv(-1, 1);
    const auto grid = cheb_points(16, iv);
    std::vector<double> values;
    for (double x : grid) values.push_back(std::exp(x));
    const ChebProxy p(iv, coeffs_from_values(values));
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double x = -1.0 + 2.0 * i / 999.0;
        worst = std::max(worst, std::abs(std::exp(x) - eval_clenshaw(p, x)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("interpolation property at construction points") {
    Rng rng(11);
    for (int m : {2, 3, 7, 12, 33}) {
        const Interval iv(-0.5, 2.0);
        const auto grid = cheb_points(m, iv);
        std::vector<double> values;
        for (double x : grid) {
            (void)x;
            values.push_back(rng.uniform(-10, 10));
        }
        const ChebProxy p(iv, coeffs_from_values(values));
        for (std::size_t k = 0; k < grid.size(); ++k) {
            CHECK(std::abs(eval_clenshaw(p, grid[k]) - values[k]) <= 1e-10 * (1.0 + std::abs(values[k])));
        }
    }
}

TEST_CASE("fast transform agrees with the direct sum") {
    Rng rng(7);
    for (int m : {2, 4, 8, 16, 64, 256, 1024}) {
        std::vector<double> values(static_cast<std::size_t>(m) + 1);
        for (auto& v : values) v = rng.uniform(-3, 3);
        const auto direct = coeffs_from_values(values);
        const auto fast = coeffs_from_values_dct(values);
        double scale = 0.0;
        for (double c : direct) scale = std::max(scale, std::abs(c));
        for (std::size_t j = 0; j < direct.size(); ++j)
            CHECK(std::abs(direct[j] - fast[j]) <= 1e-12 * (1.0 + scale));
    }
    CHECK_THROWS_AS(coeffs_from_values_dct(std::vector<double>(6, 1.0)), std::invalid_argument);
}

TEST_CASE("clenshaw reference values") {
    const ChebProxy sq(Interval(-1, 1), {0.5, 0.0, 0.5});
    CHECK(eval_clenshaw(sq, 0.3) == Approx(0.09).margin(1e-15));
    const ChebProxy constant(Interval(2, 3), {4.25});
    CHECK(eval_clenshaw(constant, 2.7) == 4.25);
}

TEST_CASE("clenshaw matches direct trigonometric evaluation") {
    Rng rng(21);
    std::vector<double> coeffs(10);
    for (auto& c : coeffs) c = rng.uniform(-2, 2);
    const ChebProxy p(Interval(-1, 1), coeffs);
    for (int i = 0; i < 100; ++i) {
        const double u = rng.uniform(-1, 1);
        CHECK(eval_clenshaw(p, u) == Approx(test_helpers::eval_cheb_direct_trig(coeffs, u)).margin(1e-12));
    }
}

TEST_CASE("basis boundedness bounds evaluations by the coefficient mass") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = test_helpers::random_proxy(rng, 2 + trial, Interval(-3, 1));
        double mass = 0.0;
        for (double c : p.coeffs) mass += std::abs(c);
        for (int i = 0; i < 200; ++i) {
            const double x = rng.uniform(-3, 1);
            CHECK(std::abs(eval_clenshaw(p, x)) <= mass * (1.0 + 1e-12) + 1e-12);
        }
    }
}

TEST_CASE("max_error_on_grid") {
    const ChebProxy sq(Interval(-1, 1), {0.5, 0.0, 0.5});
    CHECK(max_error_on_grid([](double x) { return x * x; }, sq, 101) <= 1e-15);
    CHECK(max_error_on_grid([](double x) { return x * x + 0.25; }, sq, 11) == Approx(0.25).margin(1e-14));
}

TEST_CASE("adaptive fit captures a cubic exactly at degree 4") {
    const auto t3 = [](double x) { return 4 * x * x * x - 3 * x; };
    const auto [proxy, report] = adaptive_fit(t3, Interval(-1, 1), 1e-10, 1 << 14);
    REQUIRE(report.degree == 4);
    REQUIRE(proxy.coeffs.size() == 5);
    CHECK(proxy.coeffs[3] == Approx(1.0).margin(1e-13));
    for (std::size_t j : {0u, 1u, 2u, 4u}) CHECK(proxy.coeffs[j] == Approx(0.0).margin(1e-13));
    CHECK(report.achieved_check_error <= 1e-13);
    CHECK(report.evals_used == 2 * report.degree + 1);
}

TEST_CASE("adaptive fit of an exp-sum meets the bound on a dense grid") {
    const auto f = make_expsum(1, 1, 2, 2).f;
    const auto [proxy, report] = adaptive_fit(f, Interval(-1, 1), 1e-8, 1 << 14);
    CHECK(max_error_on_grid(f, proxy, 10000) <= 1e-8);
    CHECK(report.evals_used == 2 * report.degree + 1);
}

TEST_CASE("adaptive fit of a logistic-log sample meets the bound on a dense grid") {
    const auto f = sample_objective(ObjectiveFamily::LogisticLog, 22, 0).f;
    const auto [proxy, report] = adaptive_fit(f, Interval(-1, 1), 1e-6, 1 << 14);
    CHECK(max_error_on_grid(f, proxy, 10000) <= 1e-6);
}

TEST_CASE("adaptive fit of |x| hits the degree cap") {
    CHECK_THROWS_AS(adaptive_fit([](double x) { return std::abs(x); }, Interval(-1, 1), 1e-6, 2048),
                    DegreeCapExceeded);
}

TEST_CASE("strict mode also checks a uniform grid") {
    FitOptions opts;
    opts.strict_uniform_check = true;
    const auto f = [](double x) { return std::cos(3 * x) + 0.2 * x; };
    const auto [proxy, report] = adaptive_fit(f, Interval(-1, 1), 1e-9, 1 << 14, opts);
    CHECK(max_error_on_grid(f, proxy, 5000) <= 1e-8);
}

TEST_CASE("degree grows linearly in the digits requested for analytic functions") {
    std::vector<double> digits, degrees;
    for (int k = 2; k <= 12; ++k) {
        const auto [proxy, report] =
            adaptive_fit([](double x) { return std::exp(x); }, Interval(-1, 1), std::pow(10.0, -k), 1 << 14);
        digits.push_back(static_cast<double>(k));
        degrees.push_back(static_cast<double>(report.degree));
    }
    const auto fit = test_helpers::fit_line(digits, degrees);
    INFO("measured slope " << fit.slope << " degrees per decade");
    CHECK(fit.slope <= 2.0);  // recorded bound; measured about 1.3 for exp
    for (std::size_t i = 1; i < degrees.size(); ++i) CHECK(degrees[i] >= degrees[i - 1]);
}
