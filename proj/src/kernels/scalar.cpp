// Reference kernels. The AVX2 variants must agree with these to rounding.
#include <algorithm>
#include <cmath>

#include "varbounds/kernels.hpp"

namespace varbounds::kernels {
namespace {

void local_time(const double* x, std::size_t n_points, const double* levels, std::size_t n_levels,
                double* out) {
    for (std::size_t i = 0; i < n_levels; ++i) {
        const double u = levels[i];
        double acc = 0.0;
        for (std::size_t j = 0; j + 1 < n_points; ++j) {
            const double a = x[j], b = x[j + 1];
            const double lo = std::min(a, b), hi = std::max(a, b);
            if (lo <= u && u <= hi) acc += std::abs(b - u);
        }
        out[i] = 2.0 * acc;
    }
}

// Antiderivative of |b - u| in u.
inline double prim(double u, double b) { return 0.5 * (u - b) * std::abs(u - b); }

void local_time_cells(const double* x, std::size_t n_points, const double* edges,
                      std::size_t n_edges, double* out) {
    for (std::size_t c = 0; c + 1 < n_edges; ++c) {
        const double e0 = edges[c], e1 = edges[c + 1];
        double acc = 0.0;
        for (std::size_t j = 0; j + 1 < n_points; ++j) {
            const double a = x[j], b = x[j + 1];
            const double lo = std::max(e0, std::min(a, b));
            const double hi = std::min(e1, std::max(a, b));
            if (lo < hi) acc += prim(hi, b) - prim(lo, b);
        }
        out[c] = 2.0 * acc;
    }
}

inline void neumaier(double& s, double& comp, double v) {
    const double t = s + v;
    if (std::abs(s) >= std::abs(v))
        comp += (s - t) + v;
    else
        comp += (v - t) + s;
    s = t;
}

IncrementSums increment_sums(const double* x, std::size_t n_points, const double* g1,
                             const double* g2) {
    double s1 = 0.0, c1 = 0.0, s2 = 0.0, c2 = 0.0;
    for (std::size_t j = 0; j + 1 < n_points; ++j) {
        const double d = x[j + 1] - x[j];
        neumaier(s1, c1, g1[j] * d);
        neumaier(s2, c2, g2[j] * d * d);
    }
    return {s1 + c1, s2 + c2};
}

void put_portfolio(double cash, double slope, const double* strikes, const double* weights,
                   std::size_t n, const double* xs, std::size_t m, double* out) {
    for (std::size_t q = 0; q < m; ++q) {
        const double x = xs[q];
        double v = cash + slope * x;
        for (std::size_t i = 0; i < n; ++i) v += weights[i] * std::max(strikes[i] - x, 0.0);
        out[q] = v;
    }
}

}  // namespace

namespace detail {
const KernelTable scalar_table{&local_time, &local_time_cells, &increment_sums, &put_portfolio};
}

}  // namespace varbounds::kernels
