#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "varbounds/chain.hpp"

namespace varbounds {

enum class Units { Normalized, Currency };

// Static position in cash, the forward and puts.
//   Normalized: payoff(x) = cash + forward*x + sum puts_i*(k_i - x)^+,
//               cost = cash + forward + sum puts_i*p_i.
//   Currency:   cash is a time-0 amount and forward counts units of the
//               underlying exposure S_T; payoff(S) = cash/D + forward*S + sum puts_i*(K_i - S)^+.
struct HedgePortfolio {
    Units units = Units::Normalized;
    double cash = 0.0;
    double forward = 0.0;
    std::vector<double> strikes;
    std::vector<double> puts;

    double payoff(double x, double discount = 1.0) const;
    // Kinks only at strikes, so a grid of evaluations is a batched kernel call.
    void payoff_many(const std::vector<double>& xs, std::vector<double>& out,
                     double discount = 1.0) const;
    // Setup cost; prices are p_i (normalized) or P_i (currency) aligned with strikes.
    double cost(const std::vector<double>& prices, double forward_price = 1.0) const;
    double tail_slope() const { return forward; }

    static HedgePortfolio zero(const NormalizedChain& c);
    // Piecewise-linear payoff through (k_j, v_j), j = 0..n, with slope `tail` beyond k_n.
    static HedgePortfolio from_nodes(const NormalizedChain& c, const std::vector<double>& v,
                                     double tail);
};

double normalized_cost(const NormalizedChain& c, const HedgePortfolio& h);
HedgePortfolio to_currency(const NormalizedChain& c, const HedgePortfolio& h);
HedgePortfolio to_normalized(const NormalizedChain& c, const HedgePortfolio& h);
// Adds theta units of the synthetic call at k_n built from put-call parity.
HedgePortfolio add_call(const HedgePortfolio& h, std::size_t strike_index, double theta);

// Finitely supported law. `escaped_forward` is forward mass carried off to
// infinity by a weak limit: the law prices every put but misses the forward by that amount.
struct AtomicMeasure {
    std::vector<double> atoms;
    std::vector<double> weights;
    double escaped_forward = 0.0;

    double mass() const;
    double mean() const;
    double put_price(double k) const;
    double integrate(const std::function<double(double)>& f) const;
    std::size_t size() const { return atoms.size(); }
};

struct MeasureCheck {
    bool ok = true;
    double mass_error = 0.0;
    double forward_error = 0.0;
    double put_error = 0.0;
    bool one_atom_per_interval = true;
    std::string detail;
};

// Verifies mass, forward and put repricing, and the one-atom-per-interval shape.
// Escaped forward mass is added back to the forward check.
MeasureCheck check_measure(const NormalizedChain& c, const AtomicMeasure& mu,
                           double mass_tol = 1e-10, double moment_tol = 1e-8);

}  // namespace varbounds
