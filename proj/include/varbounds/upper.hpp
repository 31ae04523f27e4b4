#pragma once

#include <string>
#include <variant>

#include "varbounds/chain.hpp"
#include "varbounds/payoff.hpp"
#include "varbounds/portfolio.hpp"

namespace varbounds {

struct Superhedge {
    HedgePortfolio portfolio;  // normalized
    double value = 0.0;        // normalized setup cost
};

struct Infeasible {
    std::string reason;
};

using UpperResult = std::variant<Superhedge, Infeasible>;

// Cheapest superhedge: the chord interpolation of lambda through the informative strikes.
UpperResult superhedge(const NormalizedChain& c, const ConvexPayoff& payoff);

// Law on {k_{n_min}, ..., k_n, z} that attains the chord bound on [0, k_n].
AtomicMeasure extremal_upper_measure(const NormalizedChain& c, double z);

inline bool feasible(const UpperResult& r) { return std::holds_alternative<Superhedge>(r); }
inline double upper_value(const UpperResult& r) {
    return feasible(r) ? std::get<Superhedge>(r).value : kInf;
}

}  // namespace varbounds
