#include "varbounds/grid.hpp"

#include <algorithm>
#include <cmath>

namespace varbounds {

std::vector<double> log_grid(double lo, double hi, std::size_t points,
                             const std::vector<double>& extra) {
    std::vector<double> xs;
    xs.reserve(points + extra.size());
    const double ratio = std::log(hi / lo);
    for (std::size_t j = 0; j < points; ++j) {
        const double t = points > 1 ? static_cast<double>(j) / static_cast<double>(points - 1) : 0.0;
        xs.push_back(lo * std::exp(ratio * t));
    }
    for (double e : extra)
        if (e >= lo && e <= hi && std::isfinite(e)) xs.push_back(e);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

double grid_floor(const NormalizedChain& c) { return std::max(c.k[1] * 1e-3, 1e-4); }

std::vector<double> verification_grid(const NormalizedChain& c, const std::vector<double>& extra,
                                      std::size_t points) {
    double hi = 100.0 * c.k[c.n()];
    for (double e : extra)
        if (std::isfinite(e)) hi = std::max(hi, 10.0 * e);
    std::vector<double> pts(c.k.begin() + 1, c.k.end());
    pts.insert(pts.end(), extra.begin(), extra.end());
    return log_grid(grid_floor(c), hi, points, pts);
}

Excess max_excess(const ConvexPayoff& payoff, const HedgePortfolio& h, const std::vector<double>& xs,
                  bool above, double abs_tol, double rel_tol) {
    std::vector<double> hv;
    h.payoff_many(xs, hv);
    Excess e;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const double lam = payoff(xs[j]);
        // A +inf payoff is dominated by any subhedge and by no superhedge.
        if (std::isinf(lam) && above) continue;
        const double raw = above ? hv[j] - lam : lam - hv[j];
        const double scaled = raw - abs_tol - rel_tol * std::abs(lam);
        if (scaled > e.worst) {
            e.worst = scaled;
            e.raw = raw;
            e.at = xs[j];
        }
    }
    return e;
}

}  // namespace varbounds
