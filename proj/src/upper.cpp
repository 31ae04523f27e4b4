#include "varbounds/upper.hpp"

#include <cmath>
#include <sstream>

#include "varbounds/error.hpp"

namespace varbounds {

UpperResult superhedge(const NormalizedChain& c, const ConvexPayoff& payoff) {
    const std::size_t n = c.n();
    const bool capped = c.n_max_finite() && c.n_max <= n;
    if (c.n_min == 0 && !std::isfinite(payoff.origin_value))
        return Infeasible{"payoff unbounded at the origin and n_min = 0"};
    if (!capped && !std::isfinite(payoff.asymptotic_slope))
        return Infeasible{"payoff grows superlinearly and n_max is infinite"};

    const std::size_t first = c.n_min;
    const std::size_t last = c.last_informative();
    std::vector<double> v(n + 1, 0.0);
    for (std::size_t j = first; j <= last; ++j) v[j] = payoff(c.k[j]);
    double tail = 0.0;
    if (capped)
        tail = last > first ? (v[last] - v[last - 1]) / (c.k[last] - c.k[last - 1]) : 0.0;
    else
        tail = payoff.asymptotic_slope;
    // Strikes past k_{n_max} carry no information: continue the last chord without kinks.
    for (std::size_t j = last + 1; j <= n; ++j) v[j] = v[last] + tail * (c.k[j] - c.k[last]);
    // Below k_{n_min} no law puts mass; continue the first chord.
    if (first > 0) {
        const double s = last > first ? (v[first + 1] - v[first]) / (c.k[first + 1] - c.k[first]) : tail;
        for (std::size_t j = 0; j < first; ++j) v[j] = v[first] - s * (c.k[first] - c.k[j]);
    }
    Superhedge s;
    s.portfolio = HedgePortfolio::from_nodes(c, v, tail);
    s.value = normalized_cost(c, s.portfolio);
    return s;
}

AtomicMeasure extremal_upper_measure(const NormalizedChain& c, double z) {
    const std::size_t n = c.n();
    const bool capped = c.n_max_finite() && c.n_max <= n;
    std::vector<double> xs, rs;
    const std::size_t last = capped ? c.n_max : n;
    for (std::size_t j = c.n_min; j <= last; ++j) {
        xs.push_back(c.k[j]);
        rs.push_back(c.p[j]);
    }
    if (capped) {
        require(std::abs(z - c.k[c.n_max]) <= 1e-12 * (1.0 + z), ErrorCode::InvalidInput,
                "with n_max <= n the extremal law uses z = k_{n_max}");
    } else {
        require(z > c.k[n], ErrorCode::InvalidInput, "z must exceed k_n");
        xs.push_back(z);
        rs.push_back(z - 1.0);
    }
    AtomicMeasure mu;
    double left = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const double right = j + 1 < xs.size() ? (rs[j + 1] - rs[j]) / (xs[j + 1] - xs[j]) : 1.0;
        const double w = right - left;
        if (w < -1e-14) {
            std::ostringstream os;
            os << "weight " << w << " at x=" << xs[j] << "; choose a larger z";
            fail(ErrorCode::NegativeWeight, os.str());
        }
        mu.atoms.push_back(xs[j]);
        mu.weights.push_back(std::max(w, 0.0));
        left = right;
    }
    return mu;
}

}  // namespace varbounds
