#include "varbounds/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "varbounds/error.hpp"

namespace varbounds {

const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "Optimal";
        case LpStatus::Infeasible: return "Infeasible";
        case LpStatus::Unbounded: return "Unbounded";
        case LpStatus::IterationLimit: return "IterationLimit";
    }
    return "Unknown";
}

void StandardFormLp::add_column(const std::vector<double>& column, double cost) {
    require(column.size() == rows, ErrorCode::InvalidInput, "column height mismatch");
    a.insert(a.end(), column.begin(), column.end());
    c.push_back(cost);
}

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kFeasTol = 1e-9;

struct Solver {
    std::size_t m = 0, n = 0;  // rows, structural columns (artificials are n..n+m-1)
    std::vector<double> a;     // scaled, column-major
    std::vector<double> b;     // scaled, nonnegative
    std::vector<double> cost;  // structural costs
    std::vector<double> binv;  // row-major m x m
    std::vector<std::size_t> basis;
    std::vector<char> in_basis;
    std::vector<double> xb;
    std::size_t iterations = 0;

    double column_entry(std::size_t j, std::size_t i) const {
        return j < n ? a[j * m + i] : (j - n == i ? 1.0 : 0.0);
    }

    // u = B^{-1} A_j
    void ftran(std::size_t j, std::vector<double>& u) const {
        u.assign(m, 0.0);
        if (j >= n) {
            const std::size_t r = j - n;
            for (std::size_t i = 0; i < m; ++i) u[i] = binv[i * m + r];
            return;
        }
        const double* col = &a[j * m];
        for (std::size_t i = 0; i < m; ++i) {
            const double* row = &binv[i * m];
            double s = 0.0;
            for (std::size_t k = 0; k < m; ++k) s += row[k] * col[k];
            u[i] = s;
        }
    }

    void refactor() {
        // Gauss-Jordan inverse of the current basis with partial pivoting.
        std::vector<double> bm(m * m), inv(m * m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            inv[i * m + i] = 1.0;
            for (std::size_t r = 0; r < m; ++r) bm[r * m + i] = column_entry(basis[i], r);
        }
        for (std::size_t col = 0; col < m; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < m; ++r)
                if (std::abs(bm[r * m + col]) > std::abs(bm[piv * m + col])) piv = r;
            require(std::abs(bm[piv * m + col]) > 1e-14, ErrorCode::Numerical, "singular LP basis");
            if (piv != col) {
                for (std::size_t k = 0; k < m; ++k) {
                    std::swap(bm[piv * m + k], bm[col * m + k]);
                    std::swap(inv[piv * m + k], inv[col * m + k]);
                }
            }
            const double d = bm[col * m + col];
            for (std::size_t k = 0; k < m; ++k) {
                bm[col * m + k] /= d;
                inv[col * m + k] /= d;
            }
            for (std::size_t r = 0; r < m; ++r) {
                if (r == col) continue;
                const double f = bm[r * m + col];
                if (f == 0.0) continue;
                for (std::size_t k = 0; k < m; ++k) {
                    bm[r * m + k] -= f * bm[col * m + k];
                    inv[r * m + k] -= f * inv[col * m + k];
                }
            }
        }
        binv = std::move(inv);
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < m; ++k) s += binv[i * m + k] * b[k];
            xb[i] = std::max(s, 0.0);
        }
    }

    void pivot(std::size_t r, std::size_t q, const std::vector<double>& u) {
        const double ur = u[r];
        double* prow = &binv[r * m];
        for (std::size_t k = 0; k < m; ++k) prow[k] /= ur;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r || u[i] == 0.0) continue;
            double* row = &binv[i * m];
            const double f = u[i];
            for (std::size_t k = 0; k < m; ++k) row[k] -= f * prow[k];
        }
        const double step = xb[r] / ur;
        for (std::size_t i = 0; i < m; ++i) xb[i] = i == r ? step : std::max(xb[i] - step * u[i], 0.0);
        in_basis[basis[r]] = 0;
        basis[r] = q;
        in_basis[q] = 1;
    }

    // Runs simplex iterations with the given cost vector over columns [0, n + m).
    LpStatus run(const std::vector<double>& c, bool allow_artificial_entry, std::size_t max_it) {
        std::vector<double> y(m), u(m);
        const double cscale = [&] {
            double s = 1.0;
            for (std::size_t j = 0; j < n; ++j) s = std::max(s, std::abs(c[j]));
            return s;
        }();
        std::size_t since_refactor = 0, degenerate_run = 0;
        while (iterations < max_it) {
            if (since_refactor >= 64) {
                refactor();
                since_refactor = 0;
            }
            for (std::size_t k = 0; k < m; ++k) {
                double s = 0.0;
                for (std::size_t i = 0; i < m; ++i) s += c[basis[i]] * binv[i * m + k];
                y[k] = s;
            }
            const bool bland = degenerate_run > 50;
            std::size_t q = std::numeric_limits<std::size_t>::max();
            double best = 0.0;
            const std::size_t limit = allow_artificial_entry ? n + m : n;
            for (std::size_t j = 0; j < limit; ++j) {
                if (in_basis[j]) continue;
                double d = c[j];
                if (j < n) {
                    const double* col = &a[j * m];
                    for (std::size_t i = 0; i < m; ++i) d -= y[i] * col[i];
                } else {
                    d -= y[j - n];
                }
                const double tol = 1e-11 * (1.0 + std::abs(c[j])) + 1e-13 * cscale;
                if (d < -tol) {
                    if (bland) {
                        q = j;
                        break;
                    }
                    const double score = d;
                    if (score < best) {
                        best = score;
                        q = j;
                    }
                }
            }
            if (q == std::numeric_limits<std::size_t>::max()) return LpStatus::Optimal;
            ftran(q, u);
            std::size_t r = std::numeric_limits<std::size_t>::max();
            double ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m; ++i) {
                if (u[i] <= kPivotTol) continue;
                const double t = xb[i] / u[i];
                if (t < ratio - 1e-14 ||
                    (t <= ratio + 1e-14 && r != std::numeric_limits<std::size_t>::max() &&
                     (bland ? basis[i] < basis[r] : u[i] > u[r]))) {
                    ratio = t;
                    r = i;
                }
            }
            if (r == std::numeric_limits<std::size_t>::max()) return LpStatus::Unbounded;
            degenerate_run = ratio <= 1e-14 ? degenerate_run + 1 : 0;
            pivot(r, q, u);
            ++iterations;
            ++since_refactor;
        }
        return LpStatus::IterationLimit;
    }
};

}  // namespace

LpResult solve_lp(const StandardFormLp& lp, std::size_t max_iterations) {
    const std::size_t m = lp.rows, n = lp.cols();
    require(m > 0 && lp.b.size() == m && lp.a.size() == m * n, ErrorCode::InvalidInput,
            "malformed linear program");
    Solver s;
    s.m = m;
    s.n = n;
    s.a = lp.a;
    s.b = lp.b;
    s.cost = lp.c;
    // Row equilibration and sign normalization so that b >= 0.
    std::vector<double> scale(m, 1.0);
    for (std::size_t i = 0; i < m; ++i) {
        double mx = 0.0;
        for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, std::abs(s.a[j * m + i]));
        double f = mx > 0.0 ? 1.0 / mx : 1.0;
        if (s.b[i] * f < 0.0) f = -f;
        scale[i] = f;
        for (std::size_t j = 0; j < n; ++j) s.a[j * m + i] *= f;
        s.b[i] *= f;
    }
    s.basis.resize(m);
    s.in_basis.assign(n + m, 0);
    s.xb = s.b;
    s.binv.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        s.basis[i] = n + i;
        s.in_basis[n + i] = 1;
        s.binv[i * m + i] = 1.0;
    }

    LpResult res;
    std::vector<double> c1(n + m, 0.0);
    for (std::size_t i = 0; i < m; ++i) c1[n + i] = 1.0;
    LpStatus st = s.run(c1, false, max_iterations);
    s.refactor();
    double infeas = 0.0, bnorm = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (s.basis[i] >= n) infeas += s.xb[i];
        bnorm += std::abs(s.b[i]);
    }
    if (st == LpStatus::IterationLimit) {
        res.status = st;
        res.iterations = s.iterations;
        return res;
    }
    if (infeas > kFeasTol * (1.0 + bnorm)) {
        res.status = LpStatus::Infeasible;
        res.iterations = s.iterations;
        return res;
    }
    // Drive zero-level artificials out of the basis where a structural column can replace them.
    std::vector<double> u;
    for (std::size_t r = 0; r < m; ++r) {
        if (s.basis[r] < n) continue;
        std::size_t best = n;
        double best_abs = 1e-9;
        for (std::size_t j = 0; j < n; ++j) {
            if (s.in_basis[j]) continue;
            double v = 0.0;
            for (std::size_t k = 0; k < m; ++k) v += s.binv[r * m + k] * s.a[j * m + k];
            if (std::abs(v) > best_abs) {
                best_abs = std::abs(v);
                best = j;
            }
        }
        if (best < n) {
            s.ftran(best, u);
            s.xb[r] = 0.0;
            s.pivot(r, best, u);
        }
    }
    s.refactor();

    std::vector<double> c2(n + m, 0.0);
    std::copy(s.cost.begin(), s.cost.end(), c2.begin());
    st = s.run(c2, false, max_iterations);
    s.refactor();
    res.status = st;
    res.iterations = s.iterations;
    res.z.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (s.basis[i] < n) res.z[s.basis[i]] = s.xb[i];
    res.y.assign(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        double v = 0.0;
        for (std::size_t i = 0; i < m; ++i) v += c2[s.basis[i]] * s.binv[i * m + k];
        res.y[k] = v * scale[k];
    }
    res.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) res.objective += lp.c[j] * res.z[j];
    return res;
}

}  // namespace varbounds
