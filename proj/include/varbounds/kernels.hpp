#pragma once

#include <cstddef>

namespace varbounds::kernels {

enum class Backend { Scalar, Avx2 };

struct IncrementSums {
    double first = 0.0;   // sum g1_j * dX_j
    double second = 0.0;  // sum g2_j * dX_j^2
};

struct KernelTable {
    // out[i] = 2 * sum_j 1[min_j <= u_i <= max_j] |x_{j+1} - u_i| over the increments of x.
    void (*local_time)(const double* x, std::size_t n_points, const double* levels,
                       std::size_t n_levels, double* out);
    // out[c] = integral over [edges_c, edges_{c+1}] of the same local time profile.
    void (*local_time_cells)(const double* x, std::size_t n_points, const double* edges,
                             std::size_t n_edges, double* out);
    // Compensated sums over increments dX_j = x_{j+1} - x_j, j < n_points - 1.
    IncrementSums (*increment_sums)(const double* x, std::size_t n_points, const double* g1,
                                    const double* g2);
    // out[m] = cash + slope*xs[m] + sum_i weights_i (strikes_i - xs[m])^+.
    void (*put_portfolio)(double cash, double slope, const double* strikes, const double* weights,
                          std::size_t n, const double* xs, std::size_t m, double* out);
};

bool avx2_available();
Backend active_backend();
// Forces a backend (tests); requesting Avx2 on an unsupported CPU is ignored.
void set_backend(Backend b);
const KernelTable& table(Backend b);
const KernelTable& active();
const char* to_string(Backend b);

namespace detail {
extern const KernelTable scalar_table;
#if defined(VARBOUNDS_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
}  // namespace detail

}  // namespace varbounds::kernels
