#include <cmath>

#include "doctest.h"
#include "random_chains.hpp"
#include "varbounds/error.hpp"
#include "varbounds/grid.hpp"
#include "varbounds/upper.hpp"

using namespace varbounds;
using doctest::Approx;

namespace {

// Extremal laws sit on the strikes plus z, so the one-atom-per-interval rule does not apply.
bool prices_chain(const NormalizedChain& c, const AtomicMeasure& mu) {
    const MeasureCheck m = check_measure(c, mu);
    return m.mass_error <= 1e-10 && m.forward_error <= 1e-8 && m.put_error <= 1e-8;
}

}  // namespace

TEST_CASE("superhedge feasibility") {
    const NormalizedChain c = make_normalized({1.2}, {0.4});
    CHECK_FALSE(feasible(superhedge(c, make_payoff(Vanilla{}))));
    CHECK_FALSE(feasible(superhedge(c, make_payoff(CorridorDown{0.8}))));
    CHECK(upper_value(superhedge(c, make_payoff(Vanilla{}))) == kInf);
    CHECK_FALSE(std::get<Infeasible>(superhedge(c, make_payoff(Gamma{}))).reason.empty());
    // Gamma is bounded at 0 but grows like x log x.
    CHECK(std::get<Infeasible>(superhedge(c, make_payoff(Gamma{}))).reason.find("superlinearly") != std::string::npos);
}

TEST_CASE("corridor-up superhedge on one put") {
    const NormalizedChain c = make_normalized({1.2}, {0.4});
    const ConvexPayoff payoff = make_payoff(CorridorUp{1.0});
    const UpperResult r = superhedge(c, payoff);
    REQUIRE(feasible(r));
    const Superhedge& s = std::get<Superhedge>(r);
    CHECK(s.value == Approx(0.2 + payoff(1.2) * 2.0 / 3.0));
    CHECK(s.portfolio.forward == Approx(1.0));
    CHECK(s.portfolio.payoff(0.0) == Approx(0.0).scale(1.0));
    CHECK(s.portfolio.payoff(1.2) == Approx(payoff(1.2)));
    const auto xs = verification_grid(c);
    CHECK(max_excess(payoff, s.portfolio, xs, false).worst <= 0.0);
}

TEST_CASE("extremal upper measure") {
    const NormalizedChain c = make_normalized({1.2}, {0.4});
    const AtomicMeasure mu = extremal_upper_measure(c, 3.0);
    REQUIRE(mu.size() == 3);
    CHECK(mu.atoms[0] == 0.0);
    CHECK(mu.weights[0] == Approx(1.0 / 3.0));
    CHECK(mu.weights[1] == Approx(5.0 / 9.0));
    CHECK(mu.weights[2] == Approx(1.0 / 9.0));
    CHECK(prices_chain(c, mu));
    try {
        extremal_upper_measure(c, 1.3);
        FAIL("expected NegativeWeight");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NegativeWeight);
    }
    CHECK_THROWS_AS(extremal_upper_measure(c, 1.0), Error);

    const NormalizedChain capped = make_normalized({0.8, 2.0}, {0.05, 1.0});
    const AtomicMeasure m2 = extremal_upper_measure(capped, 2.0);
    for (double x : m2.atoms) CHECK((x == 0.0 || x == 0.8 || x == 2.0));
    CHECK(prices_chain(capped, m2));
    CHECK_THROWS_AS(extremal_upper_measure(capped, 5.0), Error);
}

TEST_CASE("extremal measures approach the superhedge price from below") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        const NormalizedChain c = testing::random_interior_chain(rng, 1 + t % 6);
        const ConvexPayoff payoff = make_payoff(CorridorUp{0.7 + 0.03 * t});
        const double price = upper_value(superhedge(c, payoff));
        const double kn = c.k[c.n()];
        double prev = -kInf;
        for (double f : {2.0, 10.0, 100.0}) {
            AtomicMeasure mu;
            try {
                mu = extremal_upper_measure(c, f * kn);
            } catch (const Error& e) {
                // Small k_n needs a larger z before the last weight turns nonnegative.
                CHECK(e.code() == ErrorCode::NegativeWeight);
                CHECK(f < 100.0);
                continue;
            }
            CHECK(prices_chain(c, mu));
            const double v = mu.integrate([&](double x) { return payoff(x); });
            CHECK(v <= price + 1e-10);
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("affine payoffs superhedge at their forward value") {
    CustomConvex s;
    s.value = [](double x) { return 2.0 * x - 1.0; };
    s.right_derivative = [](double) { return 2.0; };
    s.curvature_weight = [](double) { return 0.0; };
    s.origin_value = -1.0;
    s.asymptotic_slope = 2.0;
    s.tail_intercept = -1.0;
    s.affine_tail_threshold = 0.0;
    const ConvexPayoff payoff = make_payoff(s);
    std::mt19937_64 rng(6);
    for (int t = 0; t < 10; ++t) {
        const NormalizedChain c = testing::random_consistent_chain(rng, 1 + t % 5);
        CHECK(upper_value(superhedge(c, payoff)) == Approx(1.0));
    }
}
