#include <cmath>
#include <random>

#include "doctest.h"
#include "varbounds/error.hpp"
#include "varbounds/payoff.hpp"

using namespace varbounds;
using doctest::Approx;

namespace {

std::vector<ConvexPayoff> builtins() {
    return {make_payoff(Vanilla{}), make_payoff(Gamma{}), make_payoff(CorridorDown{0.9}),
            make_payoff(CorridorUp{1.1})};
}

// Composite Simpson on [a, b].
double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("built-in payoff values and limits") {
    const ConvexPayoff v = make_payoff(Vanilla{});
    CHECK(v(1.0) == 0.0);
    CHECK(v.asymptotic_slope == 0.0);
    CHECK(v.origin_value == kInf);
    CHECK(v.tail_intercept == -kInf);

    const ConvexPayoff g = make_payoff(Gamma{});
    CHECK(g(1.0) == Approx(-1.0));
    CHECK(g.asymptotic_slope == kInf);
    CHECK(g.origin_value == 0.0);

    const ConvexPayoff up = make_payoff(CorridorUp{1.0});
    CHECK(up(0.5) == 0.0);
    CHECK(up(std::exp(1.0)) == Approx(std::exp(1.0) - 2.0));
    CHECK(up.asymptotic_slope == Approx(1.0));
    CHECK(up.origin_value == 0.0);

    const ConvexPayoff down = make_payoff(CorridorDown{1.0});
    CHECK(down(2.0) == 0.0);
    CHECK(down(0.5) == Approx(std::log(2.0) - 0.5));
    CHECK(down.affine_tail_threshold == Approx(1.0));
    CHECK(down.tail_intercept == 0.0);
}

TEST_CASE("asymptotic slope matches the derivative far out") {
    for (const auto& p : builtins()) {
        if (!std::isfinite(p.asymptotic_slope)) continue;
        CHECK(std::abs(p.derivative(1e6) - p.derivative(1e7)) < 1e-6);
        CHECK(std::abs(p.derivative(1e7) - p.asymptotic_slope) < 1e-6);
    }
}

TEST_CASE("right derivative matches finite differences") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(std::log(0.01), std::log(100.0));
    for (const auto& p : builtins()) {
        for (int i = 0; i < 100; ++i) {
            const double x = std::exp(u(rng));
            const double h = 1e-6 * x;
            // One-sided to the right, which is also correct at the barrier.
            const double fd = (-3.0 * p(x) + 4.0 * p(x + h) - p(x + 2.0 * h)) / (2.0 * h);
            CHECK(p.derivative(x) == Approx(fd).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("curvature weight integrates to derivative differences") {
    for (const auto& p : builtins()) {
        const std::vector<std::pair<double, double>> intervals = {{0.2, 0.8}, {1.2, 3.0}, {5.0, 40.0}};
        for (auto [a, b] : intervals) {
            if (p.barrier > 0.0 && a < p.barrier && p.barrier < b) continue;
            const double lhs = p.derivative(b) - p.derivative(a);
            const double rhs = simpson([&](double x) { return p.second_derivative(x); }, a, b);
            CHECK(std::abs(lhs - rhs) < 1e-8);
        }
    }
}

TEST_CASE("convexity on random triples") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(std::log(0.01), std::log(100.0)), t(0.0, 1.0);
    for (const auto& p : builtins()) {
        for (int i = 0; i < 500; ++i) {
            const double x = std::exp(u(rng)), y = std::exp(u(rng)), s = t(rng);
            CHECK(p(s * x + (1 - s) * y) <= s * p(x) + (1 - s) * p(y) + 1e-12);
        }
    }
}

TEST_CASE("weight grammar") {
    CHECK(parse_payoff("vanilla").kind == PayoffKind::Vanilla);
    CHECK(parse_payoff("gamma").kind == PayoffKind::Gamma);
    CHECK(parse_payoff("corridor-down:0.9").barrier == 0.9);
    CHECK(parse_payoff("corridor-up:1.25").kind == PayoffKind::CorridorUp);
    CHECK(parse_payoff("custom")(2.0) == Approx(0.5));
    CHECK(parse_payoff("custom:0.25:1")(2.0) == Approx(1.0));
    CHECK_THROWS_AS(parse_payoff("corridor-up"), Error);
    CHECK_THROWS_AS(parse_payoff("corridor-up:x"), Error);
    CHECK_THROWS_AS(parse_payoff("corridor-up:-1"), Error);
    CHECK_THROWS_AS(parse_payoff("log"), Error);
}

TEST_CASE("custom payoffs must be convex") {
    CustomConvex concave;
    concave.value = [](double x) { return std::sqrt(x); };
    concave.right_derivative = [](double x) { return 0.5 / std::sqrt(x); };
    concave.curvature_weight = [](double x) { return -0.25 * std::sqrt(x); };
    concave.origin_value = 0.0;
    CHECK_THROWS_AS(make_payoff(concave), Error);
}

TEST_CASE("shift_affine adds a line and keeps the limits coherent") {
    const ConvexPayoff v = make_payoff(Vanilla{});
    const ConvexPayoff s = shift_affine(v, 0.5, -2.0);
    CHECK(s(3.0) == Approx(v(3.0) + 1.5 - 2.0));
    CHECK(s.derivative(3.0) == Approx(v.derivative(3.0) + 0.5));
    CHECK(s.asymptotic_slope == Approx(0.5));
    CHECK(s.second_derivative(3.0) == Approx(v.second_derivative(3.0)));
}

TEST_CASE("check_c1") {
    const ConvexPayoff v = make_payoff(Vanilla{});
    CHECK(check_c1(make_normalized({1.0, 1.2}, {0.1, 0.2}), v));
    CHECK_FALSE(check_c1(make_normalized({1.0, 1.2}, {0.1, 0.12}), v));
    CHECK(check_c1(make_normalized({1.0, 1.2}, {0.1, 0.12}), make_payoff(Gamma{})));
    CHECK(check_c1(make_normalized({1.2}, {0.4}), v));
}

TEST_CASE("superhedge feasibility") {
    CHECK_FALSE(superhedge_feasible(make_payoff(Vanilla{})));
    CHECK_FALSE(superhedge_feasible(make_payoff(Gamma{})));
    CHECK(superhedge_feasible(make_payoff(CorridorUp{1.0})));
    CHECK(superhedge_feasible(make_payoff(CorridorDown{1.0})) == false);
}

TEST_CASE("dual existence for the lower bound") {
    const NormalizedChain c = make_normalized({1.2}, {0.4});
    auto e = dual_existence_lb(c, make_payoff(Vanilla{}));
    CHECK(e.status == ExistenceStatus::Guaranteed);
    CHECK(e.condition == "iv");
    e = dual_existence_lb(make_normalized({0.8, 2.0}, {0.05, 1.0}), make_payoff(CorridorDown{1.0}));
    CHECK(e.status == ExistenceStatus::Guaranteed);
    CHECK(e.condition == "i");
    e = dual_existence_lb(c, make_payoff(CorridorDown{1.0}));
    CHECK(e.status == ExistenceStatus::Undetermined);
}
