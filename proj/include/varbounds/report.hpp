#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "varbounds/pathwise.hpp"
#include "varbounds/swap.hpp"

namespace varbounds {

using Json = nlohmann::ordered_json;

// Numbers carry 12 significant digits; infinities are the strings "inf" and "-inf".
Json number_to_json(double x);
double number_from_json(const Json& j);

Json to_json(const HedgePortfolio& h);
Json to_json(const AtomicMeasure& mu);
Json to_json(const ExistenceVerdict& e);
Json to_json(const ChainVerdict& v);
Json to_json(const PriceVerdict& v);
Json to_json(const BoundsReport& r);
Json to_json(const PathcheckReport& r);

HedgePortfolio portfolio_from_json(const Json& j);
AtomicMeasure measure_from_json(const Json& j);
ExistenceVerdict existence_from_json(const Json& j);
ChainVerdict chain_verdict_from_json(const Json& j);
PriceVerdict verdict_from_json(const Json& j);
BoundsReport bounds_report_from_json(const Json& j);
PathcheckReport pathcheck_report_from_json(const Json& j);

std::string render_text(const BoundsReport& r);
std::string render_text(const PathcheckReport& r);

// Plot data: strike, payoff, subhedge, superhedge in currency units.
void write_bounds_plot_csv(std::ostream& out, const NormalizedChain& c, const ConvexPayoff& payoff,
                           const BoundsReport& r, std::size_t points = 400);
// Plot data: level and the finest-partition local time.
void write_local_time_plot_csv(std::ostream& out, const SampledPath& path);

}  // namespace varbounds
