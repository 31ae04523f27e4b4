#pragma once

#include <cstddef>
#include <vector>

#include "varbounds/chain.hpp"
#include "varbounds/payoff.hpp"
#include "varbounds/portfolio.hpp"

namespace varbounds {

// Log-spaced points on [lo, hi] merged with `extra` (each kept if inside), sorted and unique.
std::vector<double> log_grid(double lo, double hi, std::size_t points,
                             const std::vector<double>& extra = {});

// Default lower end of evaluation grids: max(k_1 * 1e-3, 1e-4).
double grid_floor(const NormalizedChain& c);

// 10^4 log-spaced points on [grid_floor, max(100 k_n, 10 * largest extra)] plus strikes and extras.
std::vector<double> verification_grid(const NormalizedChain& c, const std::vector<double>& extra = {},
                                      std::size_t points = 10000);

// Largest value of sign*(h(x) - lambda(x)) over the grid, with the tolerance scaled
// into it: a result <= 0 means domination holds to abs_tol + rel_tol*|lambda|.
struct Excess {
    double worst = -1e300;  // scaled excess
    double raw = -1e300;    // unscaled h - lambda (or lambda - h) at the worst point
    double at = 0.0;
};
Excess max_excess(const ConvexPayoff& payoff, const HedgePortfolio& h, const std::vector<double>& xs,
                  bool above, double abs_tol = 1e-8, double rel_tol = 1e-12);

}  // namespace varbounds
