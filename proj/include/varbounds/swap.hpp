#pragma once

#include <optional>
#include <string>
#include <variant>

#include "varbounds/chain.hpp"
#include "varbounds/lower.hpp"
#include "varbounds/payoff.hpp"
#include "varbounds/portfolio.hpp"
#include "varbounds/upper.hpp"

namespace varbounds {

enum class Side { Lower, Upper };
const char* to_string(Side s);

namespace verdict {
struct Consistent {};
struct BoundaryRequiresDualExistence {
    Side side = Side::Lower;
    ExistenceVerdict existence;
};
struct ModelIndependentArbitrage {
    Side side = Side::Lower;
};
struct WeakArbitrage {
    std::string reason;
};
}  // namespace verdict

using PriceVerdict = std::variant<verdict::Consistent, verdict::BoundaryRequiresDualExistence,
                                  verdict::ModelIndependentArbitrage, verdict::WeakArbitrage>;

std::string describe(const PriceVerdict& v);
const char* verdict_name(const PriceVerdict& v);
// True for verdicts that establish an arbitrage, including a boundary quote whose
// dual problem is known to have no solution.
bool is_arbitrage(const PriceVerdict& v);

// Quotes within this distance of a bound, in normalized price units, are boundary quotes.
inline constexpr double kBoundaryTol = 1e-6;

double vol_points(double rate);
double rate_from_vol_points(double vol_points);

// rate = 2 V - 2 lambda(1), and back.
double swap_rate_from_value(const ConvexPayoff& payoff, double normalized_value);
double value_from_swap_rate(const ConvexPayoff& payoff, double rate);

// Verdict for a normalized price given both bounds and their dual-existence verdicts.
PriceVerdict classify_value(double value, double lower, double upper, const ExistenceVerdict& lower_existence,
                            const ExistenceVerdict& upper_existence, bool c1);

PriceVerdict classify_european(const NormalizedChain& c, const ConvexPayoff& payoff, double price,
                               const DpOptions& options = {});
PriceVerdict classify_european(const NormalizedChain& c, const ConvexPayoff& payoff, double price,
                               const LowerBoundResult& lower, const UpperResult& upper);
PriceVerdict classify_swap_quote(const NormalizedChain& c, const ConvexPayoff& payoff, double rate,
                                 const DpOptions& options = {});
PriceVerdict classify_swap_quote(const NormalizedChain& c, const ConvexPayoff& payoff, double rate,
                                 const LowerBoundResult& lower, const UpperResult& upper);

// Classification of a vanilla swap quote against a published lower bound, both in
// vol points; the log contract's dual problem always attains its infimum.
PriceVerdict classify_against_published_lower(double quote_volpts, double lower_volpts);

struct BoundSide {
    bool available = false;     // false when the bound is infinite or was not computed
    double value = 0.0;         // normalized European value
    double currency = 0.0;      // D F value
    double swap_rate = 0.0;     // 2 value - 2 lambda(1)
    std::optional<double> vol_points;
};

struct QuoteInfo {
    std::string unit;           // "volpts" or "variance"
    double input = 0.0;
    double swap_rate = 0.0;
    double european_price = 0.0;  // currency
};

struct BoundsReport {
    std::string payoff;
    std::string payoff_kind;
    double lambda_at_one = 0.0;
    ChainVerdict chain;
    bool c1 = true;
    std::string lower_method;
    BoundSide lower;
    BoundSide upper;
    std::string upper_note;
    std::optional<HedgePortfolio> subhedge;    // currency
    std::optional<HedgePortfolio> superhedge;  // currency
    std::optional<AtomicMeasure> lower_measure;
    std::optional<AtomicMeasure> upper_measure;
    double upper_measure_z = 0.0;
    ExistenceVerdict lower_existence;
    ExistenceVerdict upper_existence;
    double tail_calls_added = 0.0;
    std::optional<QuoteInfo> quote;
    std::optional<PriceVerdict> verdict;
    // The swap-only consistency question is open; verdicts assume the traded European.
    bool swap_only_equivalence_unverified = true;
};

struct BoundsOptions {
    DpOptions dp;
    std::optional<double> quote_volpts;
    std::optional<double> quote_variance;
};

// Report for any chain. An inconsistent chain stops after validation; a payoff
// failing check_c1 gets an unavailable +inf lower bound and a WeakArbitrage verdict.
BoundsReport bounds_report(const NormalizedChain& c, const ConvexPayoff& payoff,
                           const BoundsOptions& options = {});
// Like bounds_report for a variance-swap weight, but throws C1Violation.
BoundsReport swap_rate_bounds(const NormalizedChain& c, const WeightSpec& weight,
                              const BoundsOptions& options = {});

}  // namespace varbounds
