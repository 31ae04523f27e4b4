#include "varbounds/lower.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "varbounds/error.hpp"
#include "varbounds/grid.hpp"
#include "varbounds/simplex.hpp"

namespace varbounds {

const char* to_string(LowerMethod m) {
    return m == LowerMethod::DynamicProgram ? "dynamic-program" : "grid-lp";
}

namespace {

void require_dp_chain(const NormalizedChain& c) {
    if (c.n_min > 0)
        fail(ErrorCode::UnsupportedChain, "n_min = " + std::to_string(c.n_min) + " > 0");
    if (c.n_max_finite())
        fail(ErrorCode::UnsupportedChain, "n_max = " + std::to_string(c.n_max) + " <= n");
}

// Stage costs of the policy objective. Stage i (1..n) places weight
// w = z - zp at chi = k_i + (zp*dk - dr)/w; the cost w*lambda(chi) is the
// perspective of lambda, hence jointly convex in (zp, z).
class Objective {
public:
    Objective(const NormalizedChain& c, const ConvexPayoff& p)
        : c_(c), p_(p), n_(c.n()), ct_(1.0 + c.p[c.n()] - c.k[c.n()]) {}

    std::size_t n() const { return n_; }

    double stage(std::size_t i, double zp, double z) const {
        const double w = z - zp;
        const double dk = c_.k[i] - c_.k[i - 1];
        const double a = zp * dk - (c_.p[i] - c_.p[i - 1]);
        if (w <= 0.0) return a >= -1e-13 ? 0.0 : kInf;
        const double chi = std::clamp(c_.k[i] + a / w, c_.k[i - 1], c_.k[i]);
        const double lam = p_(chi);
        return std::isinf(lam) ? kInf : w * lam;
    }

    double tail(double z) const {
        if (z >= 1.0) {
            const double g = p_.asymptotic_slope;
            return std::isfinite(g) ? g * ct_ : kInf;
        }
        const double w = 1.0 - z;
        return w * p_.value(c_.k[n_] + ct_ / w);
    }

    double total(const std::vector<double>& zeta) const {
        double s = 0.0, zp = 0.0;
        for (std::size_t i = 1; i <= n_; ++i) {
            s += stage(i, zp, zeta[i - 1]);
            zp = zeta[i - 1];
        }
        return s + tail(zp);
    }

    // Gradient and tridiagonal Hessian (diag, super-diagonal).
    void derivatives(const std::vector<double>& zeta, std::vector<double>& g, std::vector<double>& hd,
                     std::vector<double>& ho) const {
        g.assign(n_, 0.0);
        hd.assign(n_, 0.0);
        ho.assign(n_ > 0 ? n_ - 1 : 0, 0.0);
        double zp = 0.0;
        for (std::size_t i = 1; i <= n_; ++i) {
            const double z = zeta[i - 1];
            const double w = z - zp;
            const double kp = c_.k[i - 1], k = c_.k[i], dk = k - kp;
            if (w > 0.0) {
                const double a = zp * dk - (c_.p[i] - c_.p[i - 1]);
                const double chi = std::clamp(k + a / w, kp, k);
                const double u = chi - k;
                const double lam = p_(chi), d1 = p_.derivative(chi), d2 = p_.second_derivative(chi);
                g[i - 1] += lam - u * d1;
                hd[i - 1] += d2 * u * u / w;
                if (i > 1) {
                    g[i - 2] += -(lam + d1 * (kp - chi));
                    hd[i - 2] += d2 * (dk + u) * (dk + u) / w;
                    ho[i - 2] += -d2 * u * (dk + u) / w;
                }
            } else {
                // Zero-weight stage: one-sided derivatives in the only feasible directions.
                g[i - 1] += p_(k);
                hd[i - 1] = kInf;
                if (i > 1) {
                    g[i - 2] += -p_(kp);
                    hd[i - 2] = kInf;
                }
            }
            zp = z;
        }
        const double w = 1.0 - zp;
        const double kn = c_.k[n_];
        if (w > 0.0) {
            const double chi = kn + ct_ / w;
            const double lam = p_.value(chi), d1 = p_.derivative(chi), d2 = p_.second_derivative(chi);
            g[n_ - 1] += -(lam + d1 * (kn - chi));
            hd[n_ - 1] += d2 * ct_ * ct_ / (w * w * w);
        } else {
            const double icpt = p_.tail_intercept + p_.asymptotic_slope * kn;
            g[n_ - 1] += std::isfinite(icpt) ? -icpt : kInf;
            hd[n_ - 1] = kInf;
        }
    }

private:
    const NormalizedChain& c_;
    const ConvexPayoff& p_;
    std::size_t n_;
    double ct_;
};

struct PassResult {
    double value = kInf;
    std::vector<double> zeta;
};

PassResult dp_pass(const Objective& obj, const std::vector<std::vector<double>>& grids) {
    const std::size_t n = obj.n();
    std::vector<std::vector<double>> V(n + 1);
    std::vector<std::vector<std::uint32_t>> arg(n + 1);
    V[n].resize(grids[n].size());
    for (std::size_t g = 0; g < grids[n].size(); ++g) V[n][g] = obj.tail(grids[n][g]);
    for (std::size_t i = n - 1; i >= 1; --i) {
        const auto& zi = grids[i];
        const auto& zn = grids[i + 1];
        V[i].assign(zi.size(), kInf);
        arg[i].assign(zi.size(), 0);
        for (std::size_t g = 0; g < zi.size(); ++g) {
            double best = kInf;
            std::uint32_t bi = 0;
            for (std::size_t h = 0; h < zn.size(); ++h) {
                const double v = obj.stage(i + 1, zi[g], zn[h]) + V[i + 1][h];
                if (v < best) {  // strict: ties keep the smallest zeta
                    best = v;
                    bi = static_cast<std::uint32_t>(h);
                }
            }
            V[i][g] = best;
            arg[i][g] = bi;
        }
    }
    PassResult r;
    std::size_t g0 = 0;
    for (std::size_t g = 0; g < grids[1].size(); ++g) {
        const double v = obj.stage(1, 0.0, grids[1][g]) + V[1][g];
        if (v < r.value) {
            r.value = v;
            g0 = g;
        }
    }
    r.zeta.resize(n);
    std::size_t cur = g0;
    for (std::size_t i = 1; i <= n; ++i) {
        r.zeta[i - 1] = grids[i][cur];
        if (i < n) cur = arg[i][cur];
    }
    return r;
}

std::vector<double> uniform(double lo, double hi, std::size_t g) {
    if (!(hi > lo) || g < 2) return {lo};
    std::vector<double> z(g);
    for (std::size_t j = 0; j < g; ++j)
        z[j] = j + 1 == g ? hi : lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(g - 1);
    return z;
}

// Thomas algorithm on a symmetric tridiagonal system; false if a pivot is not positive.
bool solve_tridiagonal(std::vector<double> d, const std::vector<double>& e, std::vector<double> rhs,
                       std::vector<double>& x) {
    const std::size_t m = d.size();
    std::vector<double> cp(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (i > 0) {
            d[i] -= e[i - 1] * cp[i - 1];
            rhs[i] -= e[i - 1] * rhs[i - 1] / d[i - 1];
        }
        if (!(d[i] > 0.0) || !std::isfinite(d[i])) return false;
        if (i + 1 < m) cp[i] = e[i] / d[i];
    }
    x.assign(m, 0.0);
    for (std::size_t i = m; i-- > 0;) {
        x[i] = rhs[i] / d[i];
        if (i + 1 < m) x[i] -= cp[i] * x[i + 1];
    }
    return true;
}

// Projected Newton with an Armijo search on the box constraints zeta_i in A_i.
std::size_t polish(const Objective& obj, const std::vector<PolicyInterval>& box,
                   std::vector<double>& z) {
    const std::size_t n = obj.n();
    std::vector<double> g, hd, ho, trial(n);
    double f = obj.total(z);
    std::size_t it = 0;
    for (; it < 200 && std::isfinite(f); ++it) {
        obj.derivatives(z, g, hd, ho);
        std::vector<char> free(n, 0);
        double pg = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double width = box[i].hi - box[i].lo;
            const double eps = 1e-14 * std::max(1.0, width);
            const bool at_lo = z[i] <= box[i].lo + eps, at_hi = z[i] >= box[i].hi - eps;
            const bool active = width <= 0.0 || (at_lo && g[i] > 0.0) || (at_hi && g[i] < 0.0);
            if (active) continue;
            if (!std::isfinite(g[i])) return it;
            free[i] = 1;
            pg = std::max(pg, std::abs(g[i]));
        }
        if (pg <= 1e-15 * (1.0 + std::abs(f))) break;
        // Reduced system over maximal runs of consecutive free variables.
        std::vector<double> dir(n, 0.0);
        for (std::size_t s = 0; s < n;) {
            if (!free[s]) {
                ++s;
                continue;
            }
            std::size_t e = s;
            while (e + 1 < n && free[e + 1]) ++e;
            const std::size_t m = e - s + 1;
            std::vector<double> d(m), off(m > 0 ? m - 1 : 0), rhs(m), x;
            double dmax = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const std::size_t i = s + j;
                double h = hd[i];
                if (!std::isfinite(h) || h <= 0.0)
                    h = std::abs(g[i]) / (0.1 * (box[i].hi - box[i].lo)) + 1e-300;
                d[j] = h;
                dmax = std::max(dmax, h);
                rhs[j] = -g[i];
                if (j + 1 < m) off[j] = std::isfinite(ho[i]) ? ho[i] : 0.0;
            }
            double reg = 1e-13 * (1.0 + dmax);
            bool ok = false;
            for (int attempt = 0; attempt < 12 && !ok; ++attempt) {
                std::vector<double> dd = d;
                for (auto& v : dd) v += reg;
                ok = solve_tridiagonal(dd, off, rhs, x);
                reg *= 100.0;
            }
            for (std::size_t j = 0; j < m; ++j)
                dir[s + j] = ok ? x[j] : rhs[j] / d[j];
            s = e + 1;
        }
        double slope = 0.0;
        for (std::size_t i = 0; i < n; ++i) slope += g[i] * dir[i];
        if (!(slope < 0.0)) {
            for (std::size_t i = 0; i < n; ++i) dir[i] = free[i] ? -g[i] : 0.0;
        }
        double alpha = 1.0;
        bool accepted = false;
        double fn = f;
        for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
            double decrease = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = std::clamp(z[i] + alpha * dir[i], box[i].lo, box[i].hi);
                decrease += g[i] * (trial[i] - z[i]);
            }
            fn = obj.total(trial);
            if (fn <= f + 1e-4 * decrease && fn <= f) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        const double gain = f - fn;
        z = trial;
        f = fn;
        if (gain <= 1e-16 * (1.0 + std::abs(f)) && alpha < 1.0) break;
    }
    return it;
}

std::size_t interval_of(const NormalizedChain& c, double x) {
    // 1..n for [k_{i-1}, k_i), n+1 for [k_n, inf)
    const auto it = std::upper_bound(c.k.begin(), c.k.end(), x);
    return static_cast<std::size_t>(it - c.k.begin());
}

bool dominated(const NormalizedChain& c, const ConvexPayoff& payoff, const HedgePortfolio& h,
               const std::vector<double>& extra, Excess* out = nullptr) {
    const auto grid = verification_grid(c, extra);
    const Excess e = max_excess(payoff, h, grid, true);
    if (out) *out = e;
    if (e.worst > 0.0) return false;
    // Beyond the grid the portfolio is the line cash + forward*x.
    const double gamma = payoff.asymptotic_slope;
    if (!std::isfinite(gamma)) return true;
    if (h.forward > gamma + 1e-12) return false;
    if (h.forward >= gamma - 1e-12 && payoff.tail_intercept - h.cash < -1e-8) return false;
    return true;
}

}  // namespace

std::vector<PolicyInterval> feasible_policy_sets(const NormalizedChain& c) {
    require_dp_chain(c);
    const std::size_t n = c.n();
    // Slopes of collinear quotes can dip by rounding; a running max keeps the
    // left endpoints nondecreasing so consecutive sets still chain.
    std::vector<double> s(n + 2, 1.0);
    for (std::size_t i = 1; i <= n; ++i) s[i] = std::max(c.slope(i), i > 1 ? s[i - 1] : 0.0);
    std::vector<PolicyInterval> a(n);
    for (std::size_t i = 1; i <= n; ++i) a[i - 1] = {s[i], std::max(s[i], i < n ? s[i + 1] : 1.0)};
    return a;
}

AtomicMeasure atoms_from_policy(const NormalizedChain& c, const std::vector<double>& zeta,
                                bool allow_escape) {
    const std::size_t n = c.n();
    require(zeta.size() == n, ErrorCode::DegeneratePolicy, "policy length must equal n");
    AtomicMeasure mu;
    double zp = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double z = zeta[i - 1];
        if (z < zp - 1e-14 || z > 1.0 + 1e-14)
            fail(ErrorCode::DegeneratePolicy, "policy must be nondecreasing and at most 1");
        const double w = z - zp;
        const double dk = c.k[i] - c.k[i - 1];
        const double a = zp * dk - (c.p[i] - c.p[i - 1]);
        if (w <= 1e-12) {
            if (a < -1e-10) fail(ErrorCode::DegeneratePolicy, "interval " + std::to_string(i) +
                                                                  " needs mass but receives none");
            zp = z;
            continue;
        }
        const double chi = c.k[i] + a / w;
        // a carries rounding of its two terms, which the division by a small w amplifies.
        const double slack = 1e-10 + 4.0 * std::numeric_limits<double>::epsilon() *
                                         (std::abs(zp * dk) + std::abs(c.p[i] - c.p[i - 1])) / w;
        if (chi < c.k[i - 1] - slack || chi > c.k[i] + slack) {
            std::ostringstream os;
            os << "atom " << chi << " outside [" << c.k[i - 1] << ", " << c.k[i] << "]";
            fail(ErrorCode::DegeneratePolicy, os.str());
        }
        mu.atoms.push_back(std::clamp(chi, c.k[i - 1], c.k[i]));
        mu.weights.push_back(w);
        zp = z;
    }
    const double ct = 1.0 + c.p[n] - c.k[n];
    const double tail = 1.0 - zp;
    if (tail > 1e-15) {
        mu.atoms.push_back(c.k[n] + ct / tail);
        mu.weights.push_back(tail);
    } else {
        const double missing = 1.0 - mu.mean();
        if (std::abs(missing) > 1e-8) {
            if (!allow_escape) {
                std::ostringstream os;
                os << "measure prices the forward at " << mu.mean() << " instead of 1";
                fail(ErrorCode::ForwardViolation, os.str());
            }
            mu.escaped_forward = missing;
        }
    }
    // Collinear quotes can put the atoms of two neighbouring intervals on their shared strike.
    AtomicMeasure merged;
    merged.escaped_forward = mu.escaped_forward;
    for (std::size_t j = 0; j < mu.size(); ++j) {
        double x = mu.atoms[j];
        const auto it = std::lower_bound(c.k.begin(), c.k.end(), x);
        if (it != c.k.end() && std::abs(*it - x) <= 1e-12 * (1.0 + x)) x = *it;
        if (it != c.k.begin() && std::abs(*(it - 1) - x) <= 1e-12 * (1.0 + x)) x = *(it - 1);
        if (!merged.atoms.empty() && merged.atoms.back() == x) {
            merged.weights.back() += mu.weights[j];
        } else {
            merged.atoms.push_back(x);
            merged.weights.push_back(mu.weights[j]);
        }
    }
    return merged;
}

double policy_objective(const NormalizedChain& c, const ConvexPayoff& payoff,
                        const std::vector<double>& zeta) {
    return Objective(c, payoff).total(zeta);
}

DpResult dp_lower_bound(const NormalizedChain& c, const ConvexPayoff& payoff,
                        const DpOptions& options) {
    require_dp_chain(c);
    if (!check_c1(c, payoff))
        fail(ErrorCode::C1Violation, "p_2 <= (k_2/k_1) p_1 with payoff unbounded at 0: V^L = +inf");
    require(options.grid >= 2, ErrorCode::InvalidInput, "grid resolution must be at least 2");
    const auto box = feasible_policy_sets(c);
    const std::size_t n = c.n();
    const Objective obj(c, payoff);

    std::vector<std::vector<double>> grids(n + 1);
    std::vector<double> spacing(n + 1, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        grids[i] = uniform(box[i - 1].lo, box[i - 1].hi, options.grid);
        spacing[i] = grids[i].size() > 1 ? grids[i][1] - grids[i][0] : 0.0;
    }
    PassResult best = dp_pass(obj, grids);
    std::size_t passes = 1;
    if (!std::isfinite(best.value))
        fail(ErrorCode::Numerical, "dynamic program found no finite policy");
    while (passes < options.max_passes) {
        bool any = false;
        for (std::size_t i = 1; i <= n; ++i) {
            const double z = best.zeta[i - 1];
            const double lo = std::max(box[i - 1].lo, z - 2.0 * spacing[i]);
            const double hi = std::min(box[i - 1].hi, z + 2.0 * spacing[i]);
            auto g = uniform(lo, hi, options.grid);
            g.push_back(z);
            std::sort(g.begin(), g.end());
            g.erase(std::unique(g.begin(), g.end()), g.end());
            grids[i] = std::move(g);
            spacing[i] = options.grid > 1 ? (hi - lo) / static_cast<double>(options.grid - 1) : 0.0;
            any = any || spacing[i] > 1e-16;
        }
        PassResult next = dp_pass(obj, grids);
        ++passes;
        const double change = best.value - next.value;
        if (next.value <= best.value) best = std::move(next);
        if (!any || (passes >= options.min_passes && std::abs(change) < options.tolerance)) break;
    }

    DpResult r;
    r.grid_value = best.value;
    r.passes = passes;
    r.zeta = best.zeta;
    r.value = best.value;
    if (options.polish) {
        std::vector<double> z = best.zeta;
        r.newton_iterations = polish(obj, box, z);
        const double v = obj.total(z);
        if (v <= r.value) {
            r.value = v;
            r.zeta = std::move(z);
        }
    }
    r.measure = atoms_from_policy(c, r.zeta, true);
    return r;
}

HedgePortfolio reconstruct_subhedge(const NormalizedChain& c, const ConvexPayoff& payoff,
                                    const AtomicMeasure& mu, ReconstructInfo* info) {
    const std::size_t n = c.n();
    std::vector<double> node(n + 1, kInf);
    bool tail_atom = false;
    double tail_slope = 0.0;
    auto offer = [&](std::size_t j, double v) { node[j] = std::min(node[j], v); };
    std::vector<double> atoms;
    for (std::size_t a = 0; a < mu.size(); ++a) {
        if (mu.weights[a] <= 0.0) continue;
        const double x = mu.atoms[a];
        atoms.push_back(x);
        const std::size_t i = interval_of(c, x);
        const std::size_t lo_node = i - 1;
        if (std::abs(x - c.k[lo_node]) <= 1e-10 * (1.0 + c.k[lo_node])) {
            offer(lo_node, payoff(c.k[lo_node]));
            continue;
        }
        if (i <= n && std::abs(x - c.k[i]) <= 1e-10 * (1.0 + c.k[i])) {
            offer(i, payoff(c.k[i]));
            continue;
        }
        if (i == n + 1) {
            offer(n, payoff.tangent(x, c.k[n]));
            tail_atom = true;
            tail_slope = payoff.derivative(x);
        } else {
            offer(i - 1, payoff.tangent(x, c.k[i - 1]));
            offer(i, payoff.tangent(x, c.k[i]));
        }
    }
    if (!tail_atom) {
        // Weak-limit measure: the forward mass escaped to infinity. A flat tail
        // (or the payoff's own slope when it decreases) is priced by the measure.
        const double g = payoff.asymptotic_slope;
        tail_slope = std::isfinite(g) ? std::min(0.0, g) : 0.0;
    }
    // Nodes without an adjacent atom are interpolated between their neighbours.
    std::vector<std::size_t> known;
    for (std::size_t j = 0; j <= n; ++j)
        if (std::isfinite(node[j])) known.push_back(j);
    require(!known.empty(), ErrorCode::ReconstructionFailure, "measure has no usable atoms");
    for (std::size_t j = 0; j <= n; ++j) {
        if (std::isfinite(node[j])) continue;
        const auto right = std::upper_bound(known.begin(), known.end(), j);
        if (right != known.begin() && right != known.end()) {
            const std::size_t l = *(right - 1), r = *right;
            const double t = (c.k[j] - c.k[l]) / (c.k[r] - c.k[l]);
            node[j] = node[l] + t * (node[r] - node[l]);
        } else if (right == known.end()) {
            const std::size_t l = known.back();
            node[j] = node[l] + tail_slope * (c.k[j] - c.k[l]);
        } else {
            const std::size_t r = *right;
            double s = 0.0;
            if (right + 1 != known.end()) {
                const std::size_t r2 = *(right + 1);
                s = (node[r2] - node[r]) / (c.k[r2] - c.k[r]);
            }
            node[j] = node[r] - s * (c.k[r] - c.k[j]);
        }
    }
    HedgePortfolio h = HedgePortfolio::from_nodes(c, node, tail_slope);

    auto assess = [&](const HedgePortfolio& cand, ReconstructInfo& ri) {
        Excess ex;
        const bool dom = dominated(c, payoff, cand, atoms, &ex);
        ri.max_violation = std::max(0.0, ex.raw);
        ri.atom_error = 0.0;
        for (double x : atoms) ri.atom_error = std::max(ri.atom_error, std::abs(cand.payoff(x) - payoff(x)));
        const double priced = mu.integrate([&](double x) { return payoff(x); }) +
                              cand.forward * mu.escaped_forward;
        ri.cost_error = std::abs(normalized_cost(c, cand) - priced);
        return dom && ri.atom_error <= 1e-8 && ri.cost_error <= 1e-8 * (1.0 + std::abs(priced));
    };
    ReconstructInfo ri;
    if (assess(h, ri)) {
        if (info) *info = ri;
        return h;
    }
    GridLpSolution lp = solve_subhedge_lp(c, payoff, atoms);
    ReconstructInfo rl;
    rl.used_lp_fallback = true;
    Excess ex;
    const bool dom = dominated(c, payoff, lp.portfolio, atoms, &ex);
    rl.max_violation = std::max(0.0, ex.raw);
    for (double x : atoms) rl.atom_error = std::max(rl.atom_error, std::abs(lp.portfolio.payoff(x) - payoff(x)));
    if (!dom || rl.atom_error > 1e-8) {
        std::ostringstream os;
        os << "tangent construction violated tolerances (violation " << ri.max_violation
           << ", atom error " << ri.atom_error << ") and the LP fallback did too (violation "
           << rl.max_violation << ", atom error " << rl.atom_error << ")";
        fail(ErrorCode::ReconstructionFailure, os.str());
    }
    if (info) *info = rl;
    return lp.portfolio;
}

TightenResult tighten_tail(const NormalizedChain& c, const ConvexPayoff& payoff,
                           const HedgePortfolio& portfolio) {
    const double gamma = payoff.asymptotic_slope;
    require(std::isfinite(gamma), ErrorCode::InvalidInput, "tail tightening needs a finite slope");
    TightenResult r{portfolio, 0.0, false};
    const double theta = gamma - portfolio.forward;
    if (!(theta > 1e-15)) return r;
    const std::size_t last = c.n() - 1;
    HedgePortfolio lifted = add_call(portfolio, last, theta);
    if (dominated(c, payoff, lifted, {})) {
        r.portfolio = lifted;
        r.theta = theta;
        return r;
    }
    double lo = 0.0, hi = theta;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (dominated(c, payoff, add_call(portfolio, last, mid), {}))
            lo = mid;
        else
            hi = mid;
    }
    r.portfolio = add_call(portfolio, last, lo);
    r.theta = lo;
    r.domination_limited = true;
    return r;
}

std::vector<double> oracle_grid(const NormalizedChain& c, const std::vector<double>& extra,
                                std::size_t points, double x_max_factor) {
    std::vector<double> pts(c.k.begin() + 1, c.k.end());
    pts.insert(pts.end(), extra.begin(), extra.end());
    double hi = x_max_factor * c.k[c.n()];
    for (double e : extra)
        if (std::isfinite(e)) hi = std::max(hi, e);
    return log_grid(grid_floor(c), hi, points, pts);
}

namespace {

std::vector<double> basis_column(const NormalizedChain& c, const std::vector<std::size_t>& puts,
                                 double x) {
    std::vector<double> col(2 + puts.size());
    col[0] = 1.0;
    col[1] = x;
    for (std::size_t j = 0; j < puts.size(); ++j) col[2 + j] = std::max(c.k[puts[j]] - x, 0.0);
    return col;
}

}  // namespace

double grid_lp_oracle(const NormalizedChain& c, const ConvexPayoff& payoff,
                      const std::vector<double>& x_grid) {
    std::vector<std::size_t> puts;
    for (std::size_t i = 1; i <= c.n(); ++i) puts.push_back(i);
    StandardFormLp lp;
    lp.rows = 2 + puts.size();
    lp.b = {1.0, 1.0};
    for (std::size_t i : puts) lp.b.push_back(c.p[i]);
    for (double x : x_grid) {
        const double v = payoff(x);
        if (std::isfinite(v)) lp.add_column(basis_column(c, puts, x), v);
    }
    const LpResult res = solve_lp(lp);
    if (res.status == LpStatus::Infeasible)
        fail(ErrorCode::Unbounded, "no grid law prices the chain: the subhedge LP is unbounded");
    require(res.status == LpStatus::Optimal, ErrorCode::Numerical,
            std::string("grid LP ended with status ") + to_string(res.status));
    return res.objective;
}

GridLpSolution solve_subhedge_lp(const NormalizedChain& c, const ConvexPayoff& payoff,
                                 const std::vector<double>& equality_points) {
    const std::size_t n = c.n();
    const double k_lo = c.n_min > 0 ? c.k[c.n_min] : 0.0;
    const bool capped = c.n_max_finite() && c.n_max <= n;
    const double k_hi = capped ? c.k[c.n_max] : kInf;
    std::vector<std::size_t> puts;
    for (std::size_t i = c.n_min + 1; i <= n; ++i)
        if (!capped || i < c.n_max) puts.push_back(i);
    auto in_k = [&](double x) { return x >= k_lo && x <= k_hi; };

    std::vector<double> grid;
    for (double x : oracle_grid(c, equality_points))
        if (in_k(x)) grid.push_back(x);
    if (c.n_min > 0) grid.push_back(k_lo);
    if (capped) grid.push_back(k_hi);
    const auto vgrid_all = verification_grid(c, equality_points);
    std::vector<double> vgrid;
    for (double x : vgrid_all)
        if (in_k(x)) vgrid.push_back(x);

    GridLpSolution sol;
    LpResult res;
    HedgePortfolio h = HedgePortfolio::zero(c);
    for (std::size_t round = 0; round < 200; ++round) {
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        StandardFormLp lp;
        lp.rows = 2 + puts.size();
        lp.b = {1.0, 1.0};
        for (std::size_t i : puts) lp.b.push_back(c.p[i]);
        for (double x : grid) {
            const double v = payoff(x);
            if (std::isfinite(v)) lp.add_column(basis_column(c, puts, x), v);
        }
        for (double x : equality_points) {
            const double v = payoff(x);
            if (!std::isfinite(v)) continue;
            auto col = basis_column(c, puts, x);
            lp.add_column(col, v);
            for (auto& e : col) e = -e;
            lp.add_column(col, -v);
        }
        res = solve_lp(lp);
        if (res.status == LpStatus::Infeasible)
            fail(ErrorCode::Unbounded, "no law on K prices the chain: V^L = +inf");
        require(res.status == LpStatus::Optimal, ErrorCode::Numerical,
                std::string("subhedge LP ended with status ") + to_string(res.status));
        h = HedgePortfolio::zero(c);
        h.cash = res.y[0];
        h.forward = res.y[1];
        for (std::size_t j = 0; j < puts.size(); ++j) h.puts[puts[j] - 1] = res.y[2 + j];
        // Measure: grid masses, plus net equality masses.
        sol.measure = AtomicMeasure{};
        std::size_t col = 0;
        for (double x : grid) {
            if (!std::isfinite(payoff(x))) continue;
            if (res.z[col] > 1e-13) {
                sol.measure.atoms.push_back(x);
                sol.measure.weights.push_back(res.z[col]);
            }
            ++col;
        }
        for (double x : equality_points) {
            if (!std::isfinite(payoff(x))) continue;
            const double net = res.z[col] - res.z[col + 1];
            col += 2;
            if (net > 1e-13) {
                sol.measure.atoms.push_back(x);
                sol.measure.weights.push_back(net);
            }
        }
        sol.cutting_rounds = round;
        // Cutting planes: add the worst verification points where the payoff is exceeded.
        // Mass split over neighbouring grid points leaves a chord above the payoff between
        // them, so each interval's barycentre is checked too.
        std::vector<double> check = vgrid;
        {
            std::vector<std::pair<double, double>> acc(n + 2, {0.0, 0.0});
            for (std::size_t a = 0; a < sol.measure.size(); ++a) {
                const std::size_t i = interval_of(c, sol.measure.atoms[a]);
                acc[i].first += sol.measure.weights[a];
                acc[i].second += sol.measure.weights[a] * sol.measure.atoms[a];
            }
            for (const auto& [w, m] : acc)
                if (w > 0.0 && in_k(m / w)) check.push_back(m / w);
        }
        std::vector<double> hv;
        h.payoff_many(check, hv);
        std::vector<std::pair<double, double>> viol;
        for (std::size_t j = 0; j < check.size(); ++j) {
            const double lam = payoff(check[j]);
            if (!std::isfinite(lam)) continue;
            const double ex = hv[j] - lam - 1e-11 * (1.0 + std::abs(lam));
            if (ex > 0.0) viol.emplace_back(ex, check[j]);
        }
        if (viol.empty()) break;
        std::sort(viol.begin(), viol.end(), std::greater<>());
        for (std::size_t j = 0; j < std::min<std::size_t>(viol.size(), 64); ++j) grid.push_back(viol[j].second);
    }

    // Merge same-interval atoms at their barycentre.
    {
        AtomicMeasure merged;
        std::vector<std::pair<double, double>> acc(n + 2, {0.0, 0.0});
        for (std::size_t a = 0; a < sol.measure.size(); ++a) {
            const std::size_t i = interval_of(c, sol.measure.atoms[a]);
            acc[i].first += sol.measure.weights[a];
            acc[i].second += sol.measure.weights[a] * sol.measure.atoms[a];
        }
        for (const auto& [w, m] : acc)
            if (w > 0.0) {
                merged.atoms.push_back(m / w);
                merged.weights.push_back(w);
            }
        sol.measure = merged;
    }

    // Extend domination off K with the costless put at k_{n_min} and call at k_{n_max}.
    if (c.n_min > 0) {
        double theta = 0.0;
        for (double x : vgrid_all) {
            if (x >= k_lo) break;
            const double lam = payoff(x);
            if (!std::isfinite(lam)) continue;
            theta = std::max(theta, (h.payoff(x) - lam) / (k_lo - x));
        }
        if (theta > 0.0) h.puts[c.n_min - 1] -= theta * (1.0 + 1e-12);
    }
    if (capped) {
        double theta = 0.0;
        for (double x : vgrid_all) {
            if (x <= k_hi) continue;
            const double lam = payoff(x);
            if (!std::isfinite(lam)) continue;
            theta = std::max(theta, (h.payoff(x) - lam) / (x - k_hi));
        }
        if (std::isfinite(payoff.asymptotic_slope))
            theta = std::max(theta, h.forward - payoff.asymptotic_slope);
        if (theta > 0.0) h = add_call(h, c.n_max - 1, -theta * (1.0 + 1e-12));
    }
    sol.portfolio = h;
    sol.value = res.objective;
    return sol;
}

LowerBoundResult lower_bound(const NormalizedChain& c, const ConvexPayoff& payoff,
                             const DpOptions& options) {
    const ChainVerdict verdict = validate_puts(c);
    require(verdict.consistent(), ErrorCode::InvalidInput,
            std::string("chain is not consistent: ") + to_string(verdict.status) + " (" + verdict.witness + ")");
    if (!check_c1(c, payoff))
        fail(ErrorCode::C1Violation, "p_2 <= (k_2/k_1) p_1 with payoff unbounded at 0: V^L = +inf");
    LowerBoundResult r;
    if (c.n_min == 0 && !c.n_max_finite()) {
        r.method = LowerMethod::DynamicProgram;
        DpResult dp = dp_lower_bound(c, payoff, options);
        r.value = dp.value;
        r.zeta = dp.zeta;
        r.measure = dp.measure;
        r.subhedge = reconstruct_subhedge(c, payoff, dp.measure);
        // Condition (ii) speaks about the optimal subhedge, so tighten before judging it.
        // An atom beyond k_n pins the subhedge to the payoff there; calls at k_n cannot be added.
        bool tail_atom = false;
        for (std::size_t j = 0; j < dp.measure.size(); ++j)
            tail_atom = tail_atom || (dp.measure.atoms[j] > c.k[c.n()] && dp.measure.weights[j] > 0.0);
        if (!tail_atom && !dual_existence_lb(c, payoff).guaranteed() && std::isfinite(payoff.asymptotic_slope)) {
            TightenResult t = tighten_tail(c, payoff, r.subhedge);
            r.subhedge = t.portfolio;
            r.theta = t.theta;
            r.domination_limited = t.domination_limited;
        }
        r.existence = dual_existence_lb(c, payoff, &r.subhedge);
    } else {
        r.method = LowerMethod::GridLp;
        GridLpSolution lp = solve_subhedge_lp(c, payoff);
        r.value = lp.value;
        r.measure = lp.measure;
        r.subhedge = lp.portfolio;
        r.existence = dual_existence_lb(c, payoff, &r.subhedge);
    }
    r.subhedge_cost = normalized_cost(c, r.subhedge);
    return r;
}

}  // namespace varbounds
