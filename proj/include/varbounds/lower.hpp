#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "varbounds/chain.hpp"
#include "varbounds/payoff.hpp"
#include "varbounds/portfolio.hpp"

namespace varbounds {

struct PolicyInterval {
    double lo;
    double hi;
};

// A_i = [slope of r left of k_i, slope right of k_i], with A_n capped at 1.
std::vector<PolicyInterval> feasible_policy_sets(const NormalizedChain& c);

// Measure of the cumulative-weight policy zeta_1..zeta_n. With zeta_n = 1 there is
// no tail atom; unless `allow_escape`, the forward must then still be priced.
AtomicMeasure atoms_from_policy(const NormalizedChain& c, const std::vector<double>& zeta,
                                bool allow_escape = false);

// Objective of the policy: sum of stage costs plus the tail term.
double policy_objective(const NormalizedChain& c, const ConvexPayoff& payoff,
                        const std::vector<double>& zeta);

struct DpOptions {
    std::size_t grid = 200;        // points per A_i
    double tolerance = 1e-7;       // stop refining once the value moves less than this
    std::size_t min_passes = 2;
    std::size_t max_passes = 40;
    bool polish = true;            // projected Newton on the continuous objective afterwards
};

struct DpResult {
    double value = 0.0;            // inf of integral lambda over the admissible laws
    double grid_value = 0.0;       // best value found on the grids, before polishing
    std::vector<double> zeta;
    AtomicMeasure measure;         // may carry escaped forward mass when zeta_n = 1
    std::size_t passes = 0;
    std::size_t newton_iterations = 0;
};

DpResult dp_lower_bound(const NormalizedChain& c, const ConvexPayoff& payoff,
                        const DpOptions& options = {});

struct ReconstructInfo {
    bool used_lp_fallback = false;
    double max_violation = 0.0;    // max of subhedge - lambda on the verification grid
    double atom_error = 0.0;       // max |subhedge - lambda| at atoms
    double cost_error = 0.0;
};

HedgePortfolio reconstruct_subhedge(const NormalizedChain& c, const ConvexPayoff& payoff,
                                    const AtomicMeasure& mu, ReconstructInfo* info = nullptr);

struct TightenResult {
    HedgePortfolio portfolio;
    double theta = 0.0;
    bool domination_limited = false;  // theta was cut back by bisection
};

TightenResult tighten_tail(const NormalizedChain& c, const ConvexPayoff& payoff,
                           const HedgePortfolio& portfolio);

// ~4000 log-spaced points on [grid_floor, x_max_factor * k_n] plus strikes and `extra`.
std::vector<double> oracle_grid(const NormalizedChain& c, const std::vector<double>& extra = {},
                                std::size_t points = 4000, double x_max_factor = 100.0);

// Value of max y'b subject to y'a(x_g) <= lambda(x_g) on the grid.
double grid_lp_oracle(const NormalizedChain& c, const ConvexPayoff& payoff,
                      const std::vector<double>& x_grid);

struct GridLpSolution {
    double value = 0.0;
    HedgePortfolio portfolio;
    AtomicMeasure measure;
    std::size_t cutting_rounds = 0;
};

// Subhedge LP restricted to the support set K of admissible laws, with
// cutting planes from the verification grid and optional equality points.
// Extends the resulting portfolio to all of (0, inf) using the costless
// put at k_{n_min} and call at k_{n_max}.
GridLpSolution solve_subhedge_lp(const NormalizedChain& c, const ConvexPayoff& payoff,
                                 const std::vector<double>& equality_points = {});

enum class LowerMethod { DynamicProgram, GridLp };
const char* to_string(LowerMethod m);

struct LowerBoundResult {
    LowerMethod method = LowerMethod::DynamicProgram;
    double value = 0.0;            // normalized V^L
    AtomicMeasure measure;
    std::vector<double> zeta;
    HedgePortfolio subhedge;       // normalized
    double subhedge_cost = 0.0;
    ExistenceVerdict existence;
    double theta = 0.0;
    bool domination_limited = false;
};

// Full pipeline for a validated chain: DP where supported, grid LP otherwise.
LowerBoundResult lower_bound(const NormalizedChain& c, const ConvexPayoff& payoff,
                             const DpOptions& options = {});

}  // namespace varbounds
