#include <chrono>
#include <cmath>

#include "doctest.h"
#include "random_chains.hpp"
#include "varbounds/error.hpp"
#include "varbounds/grid.hpp"
#include "varbounds/lower.hpp"
#include "varbounds/upper.hpp"

using namespace varbounds;
using doctest::Approx;

namespace {

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::Numerical;
}

ConvexPayoff affine_payoff() {
    CustomConvex s;
    s.label = "x-1";
    s.value = [](double x) { return x - 1.0; };
    s.right_derivative = [](double) { return 1.0; };
    s.curvature_weight = [](double) { return 0.0; };
    s.origin_value = -1.0;
    s.asymptotic_slope = 1.0;
    s.tail_intercept = -1.0;
    s.affine_tail_threshold = 0.0;
    return make_payoff(s);
}

void check_subhedge(const NormalizedChain& c, const ConvexPayoff& payoff, const LowerBoundResult& r) {
    const auto xs = verification_grid(c, r.measure.atoms);
    CHECK(xs.size() >= 10000);
    const Excess e = max_excess(payoff, r.subhedge, xs, true);
    CHECK(e.worst <= 0.0);
    for (std::size_t j = 0; j < r.measure.size(); ++j) {
        const double x = r.measure.atoms[j];
        if (x > 0.0 && r.measure.weights[j] > 1e-9)
            CHECK(std::abs(r.subhedge.payoff(x) - payoff(x)) <= 1e-8 * std::max(1.0, std::abs(payoff(x))));
    }
}

}  // namespace

TEST_CASE("feasible policy sets") {
    auto a = feasible_policy_sets(make_normalized({1.2}, {0.4}));
    REQUIRE(a.size() == 1);
    CHECK(a[0].lo == Approx(1.0 / 3.0));
    CHECK(a[0].hi == 1.0);
    a = feasible_policy_sets(make_normalized({1.0, 1.2}, {0.1, 0.25}));
    CHECK(a[0].lo == Approx(0.1));
    CHECK(a[0].hi == Approx(0.75));
    CHECK(a[1].lo == Approx(0.75));
    CHECK(a[1].hi == 1.0);
    CHECK(code_of([] { feasible_policy_sets(make_normalized({1.0}, {0.0})); }) == ErrorCode::UnsupportedChain);
}

TEST_CASE("atoms from a policy") {
    const NormalizedChain c = make_normalized({1.2}, {0.4});
    AtomicMeasure mu = atoms_from_policy(c, {8.0 / 9.0});
    REQUIRE(mu.size() == 2);
    CHECK(mu.atoms[0] == Approx(0.75));
    CHECK(mu.atoms[1] == Approx(3.0));
    CHECK(mu.weights[0] == Approx(8.0 / 9.0));
    CHECK(mu.weights[1] == Approx(1.0 / 9.0));
    CHECK(check_measure(c, mu).ok);

    // zeta = 1 on this chain puts one atom at 0.8, which misprices the forward.
    CHECK(code_of([&] { atoms_from_policy(c, {1.0}); }) == ErrorCode::ForwardViolation);

    const NormalizedChain c6 = make_normalized({1.2}, {0.6});
    mu = atoms_from_policy(c6, {1.0}, true);
    REQUIRE(mu.size() == 1);
    CHECK(mu.atoms[0] == Approx(0.6));
    CHECK(mu.weights[0] == Approx(1.0));
    // A policy outside A_1 forces an atom outside its interval.
    CHECK(code_of([&] { atoms_from_policy(c, {0.2}); }) == ErrorCode::DegeneratePolicy);
}

TEST_CASE("one-put lower bounds, measures and subhedges") {
    struct Row {
        double p, value, psi, phi, put;
        std::vector<double> atoms, weights;
    };
    const Row rows[] = {{0.4, 11.0 / 9.0, 2.0 / 3.0, -1.0 / 9.0, 5.0 / 3.0, {0.75, 3.0}, {8.0 / 9.0, 1.0 / 9.0}},
                        {0.6, 5.0 / 3.0, 0.0, 0.0, 1.0 / 0.36, {0.6}, {1.0}},
                        {0.7, 2.0, -0.8, 0.0, 4.0, {0.5}, {1.0}}};
    const ConvexPayoff payoff = inverse_power_payoff();
    for (const Row& r : rows) {
        CAPTURE(r.p);
        const NormalizedChain c = make_normalized({1.2}, {r.p});
        const auto t0 = std::chrono::steady_clock::now();
        const LowerBoundResult lb = lower_bound(c, payoff);
        CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 1.0);
        CHECK(lb.method == LowerMethod::DynamicProgram);
        CHECK(lb.value == Approx(r.value).epsilon(1e-6));
        REQUIRE(lb.measure.size() == r.atoms.size());
        for (std::size_t j = 0; j < r.atoms.size(); ++j) {
            CHECK(lb.measure.atoms[j] == Approx(r.atoms[j]).epsilon(1e-6));
            CHECK(lb.measure.weights[j] == Approx(r.weights[j]).epsilon(1e-6));
        }
        CHECK(lb.subhedge.cash == Approx(r.psi).scale(1.0).epsilon(1e-6));
        CHECK(lb.subhedge.forward == Approx(r.phi).scale(1.0).epsilon(1e-6));
        CHECK(lb.subhedge.puts[0] == Approx(r.put).epsilon(1e-6));
        CHECK(lb.subhedge_cost == Approx(r.value).epsilon(1e-6));
        check_subhedge(c, payoff, lb);
    }
    // The p = 0.6 and 0.7 optima lose the forward to infinity.
    CHECK(lower_bound(make_normalized({1.2}, {0.7}), payoff).measure.escaped_forward == Approx(0.5));
}

TEST_CASE("tail tightening adds calls up to the asymptotic slope") {
    const NormalizedChain c = make_normalized({1.2}, {0.7});
    const ConvexPayoff payoff = inverse_power_payoff(0.25, 1.0);
    const DpResult dp = dp_lower_bound(c, payoff);
    const HedgePortfolio h = reconstruct_subhedge(c, payoff, dp.measure);
    const double base = normalized_cost(c, h);
    CHECK(base == Approx(2.125));
    const TightenResult t = tighten_tail(c, payoff, h);
    CHECK(t.theta == Approx(0.25));
    CHECK_FALSE(t.domination_limited);
    const double tightened = normalized_cost(c, t.portfolio);
    CHECK(tightened > base);
    CHECK(tightened == Approx(2.25));
    CHECK(tightened == Approx(dp.value).epsilon(1e-8));
    // The optimum sends mass to infinity, so the grid needs a long reach.
    const double oracle = grid_lp_oracle(c, payoff, oracle_grid(c, dp.measure.atoms, 4000, 1000.0));
    CHECK(std::abs(oracle - tightened) <= 2e-3);

    const LowerBoundResult lb = lower_bound(c, payoff);
    CHECK(lb.theta == Approx(0.25));
    CHECK(lb.subhedge_cost == Approx(2.25));

    // Already at the asymptotic slope: unchanged.
    const TightenResult again = tighten_tail(c, payoff, t.portfolio);
    CHECK(again.theta == 0.0);
    CHECK(again.portfolio.forward == t.portfolio.forward);
}

TEST_CASE("vanilla lower bound never tightens") {
    const LowerBoundResult lb = lower_bound(make_normalized({1.2}, {0.4}), make_payoff(Vanilla{}));
    CHECK(lb.existence.status == ExistenceStatus::Guaranteed);
    CHECK(lb.existence.condition == "iv");
    CHECK(lb.theta == 0.0);
}

TEST_CASE("grid LP oracle") {
    const NormalizedChain c = make_normalized({1.2}, {0.4});
    CHECK(std::abs(grid_lp_oracle(c, inverse_power_payoff(), oracle_grid(c, {0.75, 3.0})) - 1.2222) <= 2e-3);
    CHECK(std::abs(grid_lp_oracle(c, affine_payoff(), oracle_grid(c))) <= 1e-9);
    std::mt19937_64 rng(2);
    const NormalizedChain r = testing::random_interior_chain(rng, 5);
    CHECK(std::abs(grid_lp_oracle(r, affine_payoff(), oracle_grid(r))) <= 1e-9);
    CHECK(grid_lp_oracle(c, affine_payoff(), oracle_grid(c)) == Approx(lower_bound(c, affine_payoff()).value).scale(1.0));
}

TEST_CASE("c1 violation") {
    // p_2 = (k_2/k_1) p_1 forces mass onto the origin.
    const NormalizedChain c = make_normalized({0.5, 1.2}, {0.1, 0.24});
    CHECK(code_of([&] { dp_lower_bound(c, make_payoff(Vanilla{})); }) == ErrorCode::C1Violation);
    CHECK(code_of([&] { lower_bound(c, make_payoff(Vanilla{})); }) == ErrorCode::C1Violation);
    CHECK(code_of([&] { grid_lp_oracle(c, make_payoff(Vanilla{}), oracle_grid(c)); }) == ErrorCode::Unbounded);
}

TEST_CASE("random chains: sandwich, measure invariants and domination") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 40; ++t) {
        const NormalizedChain c = testing::random_consistent_chain(rng, 1 + t % 8);
        const ConvexPayoff payoff = testing::random_payoff(rng);
        CAPTURE(t);
        CAPTURE(payoff.label);
        if (!check_c1(c, payoff)) continue;
        const LowerBoundResult lb = lower_bound(c, payoff);
        CAPTURE(to_string(lb.method));
        CAPTURE(lb.theta);
        const MeasureCheck m = check_measure(c, lb.measure);
        CHECK_MESSAGE(m.ok, m.detail);
        check_subhedge(c, payoff, lb);
        CHECK(lb.subhedge_cost <= lb.value + 1e-8);
        const double oracle = grid_lp_oracle(c, payoff, oracle_grid(c, lb.measure.atoms));
        CHECK(oracle <= lb.value + 5e-3);
        if (lb.existence.guaranteed()) CHECK(std::abs(oracle - lb.value) <= 5e-3);
        const UpperResult ub = superhedge(c, payoff);
        if (feasible(ub)) CHECK(lb.value <= upper_value(ub) + 1e-6);
    }
}

TEST_CASE("adding a consistent quote never lowers the bound") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 30; ++t) {
        const testing::AtomicLaw law = testing::random_law(rng, 6);
        const auto [lo, hi] = std::minmax_element(law.atoms.begin(), law.atoms.end());
        std::uniform_real_distribution<double> u(std::log(*lo) + 0.01, std::log(*hi) - 0.01);
        std::vector<double> k;
        while (k.size() < 4) {
            const double x = std::exp(u(rng));
            if (std::none_of(k.begin(), k.end(), [&](double y) { return std::abs(x - y) < 1e-3; })) k.push_back(x);
        }
        const NormalizedChain small = testing::chain_from_law(law, {k[0], k[1], k[2]});
        const NormalizedChain big = testing::chain_from_law(law, k);
        for (const ConvexPayoff& p : {make_payoff(Vanilla{}), make_payoff(Gamma{})})
            CHECK(lower_bound(big, p).value >= lower_bound(small, p).value - 1e-9);
    }
}

TEST_CASE("boundary chains route to the LP") {
    const NormalizedChain c = make_normalized({0.5, 1.2}, {0.0, 0.4});
    REQUIRE(c.n_min == 1);
    const ConvexPayoff payoff = make_payoff(Vanilla{});
    const LowerBoundResult lb = lower_bound(c, payoff);
    CHECK(lb.method == LowerMethod::GridLp);
    CHECK(check_measure(c, lb.measure).ok);
    const double oracle = grid_lp_oracle(c, payoff, oracle_grid(c, lb.measure.atoms));
    CHECK(std::abs(oracle - lb.value) <= 5e-3);
    CHECK(lb.value == Approx(lb.measure.integrate([&](double x) { return payoff(x); })).epsilon(1e-6));
    check_subhedge(c, payoff, lb);

    const NormalizedChain capped = make_normalized({0.8, 2.0}, {0.05, 1.0});
    REQUIRE(capped.n_max == 2);
    const LowerBoundResult lc = lower_bound(capped, payoff);
    CHECK(lc.method == LowerMethod::GridLp);
    CHECK(lc.existence.condition == "i");
    CHECK(check_measure(capped, lc.measure).ok);
    check_subhedge(capped, payoff, lc);
}
