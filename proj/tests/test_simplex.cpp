#include <cmath>

#include "doctest.h"
#include "varbounds/simplex.hpp"

using namespace varbounds;
using doctest::Approx;

namespace {

StandardFormLp make(std::size_t rows, const std::vector<std::vector<double>>& cols, const std::vector<double>& c,
                    const std::vector<double>& b) {
    StandardFormLp lp;
    lp.rows = rows;
    lp.b = b;
    for (std::size_t j = 0; j < cols.size(); ++j) lp.add_column(cols[j], c[j]);
    return lp;
}

void check_duals(const StandardFormLp& lp, const LpResult& r) {
    double by = 0.0;
    for (std::size_t i = 0; i < lp.rows; ++i) by += lp.b[i] * r.y[i];
    CHECK(by == Approx(r.objective).epsilon(1e-10));
    for (std::size_t j = 0; j < lp.cols(); ++j) {
        double ya = 0.0;
        for (std::size_t i = 0; i < lp.rows; ++i) ya += r.y[i] * lp.a[j * lp.rows + i];
        CHECK(ya <= lp.c[j] + 1e-10);
    }
}

}  // namespace

TEST_CASE("two-variable maximisation with slacks") {
    // max x + y  s.t. x + 2y <= 4, 3x + y <= 6  ->  x = 1.6, y = 1.2.
    const auto lp = make(2, {{1, 3}, {2, 1}, {1, 0}, {0, 1}}, {-1, -1, 0, 0}, {4, 6});
    const LpResult r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.objective == Approx(-2.8));
    CHECK(r.z[0] == Approx(1.6));
    CHECK(r.z[1] == Approx(1.2));
    check_duals(lp, r);
}

TEST_CASE("equality rows with negative right-hand sides") {
    // min z0 + 2 z1 + 3 z2  s.t. -z0 - z1 - z2 = -3, z0 - z2 = 0.
    const auto lp = make(2, {{-1, 1}, {-1, 0}, {-1, -1}}, {1, 2, 3}, {-3, 0});
    const LpResult r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    // z1 = 3 costs 6; z0 = z2 = 1.5 costs 6 too; mixing is also 6.
    CHECK(r.objective == Approx(6.0));
    check_duals(lp, r);
}

TEST_CASE("infeasible and unbounded programs") {
    const auto infeasible = make(1, {{1}, {1}}, {1, 1}, {-1});
    CHECK(solve_lp(infeasible).status == LpStatus::Infeasible);
    const auto unbounded = make(1, {{1}, {-1}}, {-1, 0}, {1});
    CHECK(solve_lp(unbounded).status == LpStatus::Unbounded);
}

TEST_CASE("degenerate program terminates") {
    // Beale's cycling example in standard form.
    const auto lp = make(3,
                         {{0.25, 0.5, 0}, {-8, -12, 0}, {-1, -0.5, 1}, {9, 3, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
                         {-0.75, 20, -0.5, 6, 0, 0, 0}, {0, 0, 1});
    const LpResult r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.objective == Approx(-1.25));
    check_duals(lp, r);
}

TEST_CASE("redundant equality rows") {
    const auto lp = make(2, {{1, 2}, {1, 2}}, {1, 3}, {1, 2});
    const LpResult r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.objective == Approx(1.0));
    check_duals(lp, r);
}
