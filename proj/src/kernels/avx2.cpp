// AVX2 variants of the reference kernels; vectorized across increments
// (local time) or evaluation points (portfolios), 4 doubles per lane group.
#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "varbounds/kernels.hpp"

namespace varbounds::kernels {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline __m256d vabs(__m256d v) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

void local_time(const double* x, std::size_t n_points, const double* levels, std::size_t n_levels,
                double* out) {
    const std::size_t steps = n_points > 0 ? n_points - 1 : 0;
    const std::size_t vec_end = steps - steps % 4;
    for (std::size_t i = 0; i < n_levels; ++i) {
        const double u = levels[i];
        const __m256d uu = _mm256_set1_pd(u);
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t j = 0; j < vec_end; j += 4) {
            const __m256d a = _mm256_loadu_pd(x + j);
            const __m256d b = _mm256_loadu_pd(x + j + 1);
            const __m256d lo = _mm256_min_pd(a, b), hi = _mm256_max_pd(a, b);
            const __m256d in = _mm256_and_pd(_mm256_cmp_pd(lo, uu, _CMP_LE_OQ),
                                             _mm256_cmp_pd(uu, hi, _CMP_LE_OQ));
            acc = _mm256_add_pd(acc, _mm256_and_pd(in, vabs(_mm256_sub_pd(b, uu))));
        }
        double s = hsum(acc);
        for (std::size_t j = vec_end; j < steps; ++j) {
            const double a = x[j], b = x[j + 1];
            if (std::min(a, b) <= u && u <= std::max(a, b)) s += std::abs(b - u);
        }
        out[i] = 2.0 * s;
    }
}

inline __m256d prim(__m256d u, __m256d b) {
    const __m256d d = _mm256_sub_pd(u, b);
    return _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(0.5), d), vabs(d));
}

void local_time_cells(const double* x, std::size_t n_points, const double* edges,
                      std::size_t n_edges, double* out) {
    const std::size_t steps = n_points > 0 ? n_points - 1 : 0;
    const std::size_t vec_end = steps - steps % 4;
    for (std::size_t c = 0; c + 1 < n_edges; ++c) {
        const double e0 = edges[c], e1 = edges[c + 1];
        const __m256d v0 = _mm256_set1_pd(e0), v1 = _mm256_set1_pd(e1);
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t j = 0; j < vec_end; j += 4) {
            const __m256d a = _mm256_loadu_pd(x + j);
            const __m256d b = _mm256_loadu_pd(x + j + 1);
            const __m256d lo = _mm256_max_pd(v0, _mm256_min_pd(a, b));
            const __m256d hi = _mm256_min_pd(v1, _mm256_max_pd(a, b));
            const __m256d mask = _mm256_cmp_pd(lo, hi, _CMP_LT_OQ);
            const __m256d term = _mm256_sub_pd(prim(hi, b), prim(lo, b));
            acc = _mm256_add_pd(acc, _mm256_and_pd(mask, term));
        }
        double s = hsum(acc);
        for (std::size_t j = vec_end; j < steps; ++j) {
            const double a = x[j], b = x[j + 1];
            const double lo = std::max(e0, std::min(a, b));
            const double hi = std::min(e1, std::max(a, b));
            if (lo < hi) s += 0.5 * ((hi - b) * std::abs(hi - b) - (lo - b) * std::abs(lo - b));
        }
        out[c] = 2.0 * s;
    }
}

// Lane-wise Neumaier accumulation.
inline void neumaier(__m256d& s, __m256d& comp, __m256d v) {
    const __m256d t = _mm256_add_pd(s, v);
    const __m256d big_s = _mm256_cmp_pd(vabs(s), vabs(v), _CMP_GE_OQ);
    const __m256d c_s = _mm256_add_pd(_mm256_sub_pd(s, t), v);
    const __m256d c_v = _mm256_add_pd(_mm256_sub_pd(v, t), s);
    comp = _mm256_add_pd(comp, _mm256_blendv_pd(c_v, c_s, big_s));
    s = t;
}

inline void neumaier1(double& s, double& comp, double v) {
    const double t = s + v;
    if (std::abs(s) >= std::abs(v))
        comp += (s - t) + v;
    else
        comp += (v - t) + s;
    s = t;
}

IncrementSums increment_sums(const double* x, std::size_t n_points, const double* g1,
                             const double* g2) {
    const std::size_t steps = n_points > 0 ? n_points - 1 : 0;
    const std::size_t vec_end = steps - steps % 4;
    __m256d s1 = _mm256_setzero_pd(), c1 = _mm256_setzero_pd();
    __m256d s2 = _mm256_setzero_pd(), c2 = _mm256_setzero_pd();
    for (std::size_t j = 0; j < vec_end; j += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + j + 1), _mm256_loadu_pd(x + j));
        neumaier(s1, c1, _mm256_mul_pd(_mm256_loadu_pd(g1 + j), d));
        neumaier(s2, c2, _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(g2 + j), d), d));
    }
    alignas(32) double a1[4], b1[4], a2[4], b2[4];
    _mm256_store_pd(a1, s1);
    _mm256_store_pd(b1, c1);
    _mm256_store_pd(a2, s2);
    _mm256_store_pd(b2, c2);
    double t1 = 0.0, k1 = 0.0, t2 = 0.0, k2 = 0.0;
    for (int l = 0; l < 4; ++l) {
        neumaier1(t1, k1, a1[l]);
        neumaier1(t2, k2, a2[l]);
        k1 += b1[l];
        k2 += b2[l];
    }
    for (std::size_t j = vec_end; j < steps; ++j) {
        const double d = x[j + 1] - x[j];
        neumaier1(t1, k1, g1[j] * d);
        neumaier1(t2, k2, g2[j] * d * d);
    }
    return {t1 + k1, t2 + k2};
}

void put_portfolio(double cash, double slope, const double* strikes, const double* weights,
                   std::size_t n, const double* xs, std::size_t m, double* out) {
    const std::size_t vec_end = m - m % 4;
    const __m256d vc = _mm256_set1_pd(cash), vs = _mm256_set1_pd(slope);
    const __m256d zero = _mm256_setzero_pd();
    for (std::size_t q = 0; q < vec_end; q += 4) {
        const __m256d x = _mm256_loadu_pd(xs + q);
        __m256d v = _mm256_add_pd(vc, _mm256_mul_pd(vs, x));
        for (std::size_t i = 0; i < n; ++i) {
            const __m256d intrinsic = _mm256_max_pd(_mm256_sub_pd(_mm256_set1_pd(strikes[i]), x), zero);
            v = _mm256_add_pd(v, _mm256_mul_pd(_mm256_set1_pd(weights[i]), intrinsic));
        }
        _mm256_storeu_pd(out + q, v);
    }
    for (std::size_t q = vec_end; q < m; ++q) {
        const double x = xs[q];
        double v = cash + slope * x;
        for (std::size_t i = 0; i < n; ++i) v += weights[i] * std::max(strikes[i] - x, 0.0);
        out[q] = v;
    }
}

}  // namespace

namespace detail {
const KernelTable avx2_table{&local_time, &local_time_cells, &increment_sums, &put_portfolio};
}

}  // namespace varbounds::kernels
