#include <sstream>

#include "doctest.h"
#include "random_chains.hpp"
#include "varbounds/chain.hpp"
#include "varbounds/error.hpp"

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

std::string message_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("normalize divides by the forward and discounted forward") {
    OptionChain a{1.0, 1.0, 1.0, {1.2}, {0.4}};
    NormalizedChain c = normalize(a);
    CHECK(c.k == std::vector<double>{0.0, 1.2});
    CHECK(c.p == std::vector<double>{0.0, 0.4});

    c = normalize(OptionChain{1.0, 0.5, 100.0, {100.0}, {5.0}});
    CHECK(c.k[1] == Approx(1.0));
    CHECK(c.p[1] == Approx(0.1));

    c = normalize(OptionChain{1.0, 1.0, 100.0, {80.0, 120.0}, {2.0, 14.0}});
    CHECK(c.k[1] == Approx(0.8));
    CHECK(c.k[2] == Approx(1.2));
    CHECK(c.p[1] == Approx(0.02));
    CHECK(c.p[2] == Approx(0.14));
}

TEST_CASE("normalize rejects bad market parameters and strikes") {
    CHECK(code_of([] { normalize(OptionChain{1.0, 1.0, 0.0, {1.0}, {0.1}}); }) == ErrorCode::InvalidInput);
    CHECK(code_of([] { normalize(OptionChain{1.0, 0.0, 1.0, {1.0}, {0.1}}); }) == ErrorCode::InvalidInput);
    CHECK(code_of([] { normalize(OptionChain{1.0, 1.0, 1.0, {1.0, 1.0}, {0.1, 0.1}}); }) ==
          ErrorCode::InvalidInput);
    CHECK(code_of([] { normalize(OptionChain{1.0, 1.0, 1.0, {1.2, 1.0}, {0.4, 0.1}}); }) ==
          ErrorCode::InvalidInput);
    CHECK(code_of([] { normalize(OptionChain{1.0, 1.0, 1.0, {}, {}}); }) == ErrorCode::InvalidInput);
}

TEST_CASE("denormalize inverts normalize") {
    const OptionChain a{0.25, 0.97, 1234.5, {900.0, 1100.0, 1300.0}, {12.5, 60.25, 180.0}};
    const OptionChain b = denormalize(normalize(a));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(b.strikes[i] == Approx(a.strikes[i]).epsilon(1e-14));
        CHECK(b.put_prices[i] == Approx(a.put_prices[i]).epsilon(1e-14));
    }
    CHECK(b.forward == a.forward);
    CHECK(b.discount == a.discount);
}

TEST_CASE("validate_puts verdicts") {
    CHECK(validate_puts(make_normalized({1.2}, {0.4})).status == ChainStatus::Consistent);
    const ChainVerdict below = validate_puts(make_normalized({1.2}, {0.1}));
    CHECK(below.status == ChainStatus::ModelIndependentArbitrage);
    CHECK_FALSE(below.witness.empty());
    CHECK(validate_puts(make_normalized({1.2}, {1.2})).status == ChainStatus::WeakArbitrage);
    // Negative price, slope above one, concavity.
    CHECK(validate_puts(make_normalized({1.0}, {-0.1})).status == ChainStatus::ModelIndependentArbitrage);
    CHECK(validate_puts(make_normalized({1.0, 1.1}, {0.2, 0.35})).status ==
          ChainStatus::ModelIndependentArbitrage);
    CHECK(validate_puts(make_normalized({0.8, 1.0, 1.2}, {0.1, 0.2, 0.25})).status ==
          ChainStatus::ModelIndependentArbitrage);
    // Slope one is fine once n_max is finite: a point mass at 1 prices this chain.
    CHECK(validate_puts(make_normalized({1.0, 2.0}, {0.0, 1.0})).status == ChainStatus::Consistent);
}

TEST_CASE("boundary indices") {
    auto b = boundary_indices(make_normalized({1.2}, {0.4}));
    CHECK(b.n_min == 0);
    CHECK(b.n_max == kInfIndex);
    b = boundary_indices(make_normalized({0.5, 1.2}, {0.0, 0.4}));
    CHECK(b.n_min == 1);
    CHECK(b.n_max == kInfIndex);
    b = boundary_indices(make_normalized({2.0}, {1.0}));
    CHECK(b.n_min == 0);
    CHECK(b.n_max == 1);
}

TEST_CASE("interpolant r") {
    const NormalizedChain c = make_normalized({1.2}, {0.4});
    CHECK(interpolant_r(c, 0.6) == Approx(0.2));
    CHECK(interpolant_r(c, 1.2) == Approx(0.4));
    CHECK(interpolant_r(c, 2.2) == Approx(1.4));
    CHECK(interpolant_r(c, 0.0) == 0.0);
}

TEST_CASE("chains priced from atomic laws are consistent with ordered slopes in [0,1)") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 300; ++t) {
        const NormalizedChain c = testing::random_consistent_chain(rng, 1 + t % 10);
        REQUIRE(validate_puts(c).consistent());
        const std::size_t last = c.last_informative();
        for (std::size_t i = 1; i <= last; ++i) {
            CHECK(c.slope(i) >= -1e-12);
            CHECK(c.slope(i) < 1.0);
            if (i > 1) CHECK(c.slope(i) >= c.slope(i - 1) - 1e-10);
        }
    }
}

TEST_CASE("CSV ingestion") {
    SUBCASE("rows in any order, BOM and blank lines tolerated") {
        std::istringstream in("\xEF\xBB\xBFstrike,put_price\n120,14\n\n80, 2\n");
        const OptionChain a = read_chain_csv(in, 100.0, 1.0, 0.5, "chain.csv");
        CHECK(a.strikes == std::vector<double>{80.0, 120.0});
        CHECK(a.put_prices == std::vector<double>{2.0, 14.0});
        CHECK(a.maturity == 0.5);
    }
    SUBCASE("missing header") {
        std::istringstream in("120,14\n");
        CHECK(code_of([&] { read_chain_csv(in, 100.0, 1.0, 1.0, "chain.csv"); }) == ErrorCode::Parse);
    }
    SUBCASE("bad number carries the line number") {
        std::istringstream in("strike,put_price\n80,2\n120,abc\n");
        const std::string msg = message_of([&] { read_chain_csv(in, 100.0, 1.0, 1.0, "chain.csv"); });
        CHECK(msg.find("chain.csv:3") != std::string::npos);
    }
    SUBCASE("duplicate strikes are rejected") {
        std::istringstream in("strike,put_price\n80,2\n80,2.1\n");
        CHECK(code_of([&] { read_chain_csv(in, 100.0, 1.0, 1.0, "chain.csv"); }) == ErrorCode::Parse);
    }
    SUBCASE("wrong field count") {
        std::istringstream in("strike,put_price\n80,2,3\n");
        CHECK(code_of([&] { read_chain_csv(in, 100.0, 1.0, 1.0, "chain.csv"); }) == ErrorCode::Parse);
    }
}
