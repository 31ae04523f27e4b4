#include "varbounds/pathwise.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <random>

#include "varbounds/error.hpp"
#include "varbounds/kernels.hpp"

namespace varbounds {

bool SampledPath::positive() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return v > 0.0; });
}
double SampledPath::min() const { return *std::min_element(values.begin(), values.end()); }
double SampledPath::max() const { return *std::max_element(values.begin(), values.end()); }

SampledPath make_path(std::vector<double> times, std::vector<double> values) {
    require(times.size() == values.size() && times.size() >= 2, ErrorCode::InvalidInput,
            "a path needs at least two samples with one time each");
    require(times[0] == 0.0, ErrorCode::InvalidInput, "path times must start at 0");
    for (std::size_t j = 0; j < times.size(); ++j) {
        require(std::isfinite(times[j]) && std::isfinite(values[j]), ErrorCode::InvalidInput,
                "path samples must be finite");
        if (j > 0)
            require(times[j] > times[j - 1], ErrorCode::InvalidInput, "path times must increase strictly");
    }
    return SampledPath{std::move(times), std::move(values)};
}

PartitionLadder PartitionLadder::dyadic(const SampledPath& path, std::size_t depth) {
    require(depth >= 1 && depth < 31, ErrorCode::InvalidInput, "ladder depth must lie in [1, 30]");
    const std::size_t coarsest = std::size_t{1} << (depth - 1);
    require(path.steps() % coarsest == 0 && path.steps() >= coarsest, ErrorCode::InvalidInput,
            "path steps must be a multiple of 2^(depth-1)");
    PartitionLadder l;
    for (std::size_t s = coarsest; s >= 1; s /= 2) {
        l.strides.push_back(s);
        double m = 0.0;
        for (std::size_t j = 0; j + s < path.times.size(); j += s)
            m = std::max(m, path.times[j + s] - path.times[j]);
        if (!l.mesh.empty())
            require(m < l.mesh.back(), ErrorCode::InvalidInput, "ladder mesh must decrease strictly");
        l.mesh.push_back(m);
    }
    return l;
}

std::vector<double> partition_values(const SampledPath& path, std::size_t stride) {
    require(stride >= 1 && path.steps() % stride == 0, ErrorCode::InvalidInput,
            "partition stride must divide the number of steps");
    std::vector<double> y;
    y.reserve(path.steps() / stride + 1);
    for (std::size_t j = 0; j < path.values.size(); j += stride) y.push_back(path.values[j]);
    return y;
}

std::vector<double> quadratic_variation(const SampledPath& path, std::size_t stride) {
    const auto y = partition_values(path, stride);
    std::vector<double> qv(y.size(), 0.0);
    for (std::size_t j = 1; j < y.size(); ++j) {
        const double d = y[j] - y[j - 1];
        qv[j] = qv[j - 1] + d * d;
    }
    return qv;
}

std::vector<double> level_grid(const std::vector<double>& values, std::size_t count) {
    require(count >= 4, ErrorCode::InvalidInput, "level grid needs at least 4 levels");
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const double lo = *mn;
    const double span = std::max(*mx - lo, 1e-9 * (1.0 + std::abs(lo)));
    const double h = span / static_cast<double>(count - 3);
    std::vector<double> u(count);
    for (std::size_t i = 0; i < count; ++i) u[i] = lo + (static_cast<double>(i) - 1.0) * h;
    return u;
}

LocalTimeProfile discrete_local_time(const SampledPath& path, std::size_t stride,
                                     const std::vector<double>& levels, std::optional<std::size_t> upto) {
    auto y = partition_values(path, stride);
    if (upto) {
        require(*upto < y.size(), ErrorCode::InvalidInput, "local time horizon beyond the partition");
        y.resize(*upto + 1);
    }
    LocalTimeProfile prof{levels, std::vector<double>(levels.size(), 0.0)};
    kernels::active().local_time(y.data(), y.size(), levels.data(), levels.size(), prof.values.data());
    return prof;
}

double follmer_integral(const SampledPath& path, const std::function<double(double)>& fprime,
                        std::size_t stride) {
    const auto y = partition_values(path, stride);
    std::vector<double> g(y.size()), zero(y.size(), 0.0);
    for (std::size_t j = 0; j < y.size(); ++j) g[j] = fprime(y[j]);
    return kernels::active().increment_sums(y.data(), y.size(), g.data(), zero.data()).first;
}

ItoFunction square_function() {
    return {"square", [](double x) { return x * x; }, [](double x) { return 2.0 * x; },
            [](double) { return 2.0; }, false, {}};
}

ItoFunction cube_function() {
    return {"cube", [](double x) { return x * x * x; }, [](double x) { return 3.0 * x * x; },
            [](double x) { return 6.0 * x; }, false, {}};
}

ItoFunction function_from_payoff(const ConvexPayoff& p) {
    ItoFunction f;
    f.name = p.label;
    f.value = p.value;
    f.derivative = p.right_derivative;
    const auto w = p.curvature_weight;
    f.second_derivative = [w](double x) { return w(x) / (x * x); };
    f.local_time_form = !p.kinks.empty();
    f.kinks = p.kinks;
    return f;
}

namespace {

double ito_residual(const std::vector<double>& y, const ItoFunction& f) {
    const std::size_t m = y.size();
    std::vector<double> g1(m), g2(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) g1[j] = f.derivative(y[j]);
    if (!f.local_time_form)
        for (std::size_t j = 0; j < m; ++j) g2[j] = 0.5 * f.second_derivative(y[j]);
    const auto sums = kernels::active().increment_sums(y.data(), m, g1.data(), g2.data());
    double curvature = sums.second;
    if (f.local_time_form) {
        // Exact cell integrals of the local time against the cell average of f'',
        // which is the difference quotient of f'. Cells are split at the kinks.
        std::vector<double> edges = level_grid(y);
        for (double k : f.kinks)
            if (k > edges.front() && k < edges.back()) edges.push_back(k);
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        std::vector<double> cells(edges.size() - 1);
        kernels::active().local_time_cells(y.data(), m, edges.data(), edges.size(), cells.data());
        curvature = 0.0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (cells[c] == 0.0) continue;
            const double e0 = edges[c], e1 = edges[c + 1];
            const double avg = (f.derivative(e1) - f.derivative(e0)) / (e1 - e0);
            curvature += 0.5 * cells[c] * avg;
        }
    }
    return std::abs((f.value(y.back()) - f.value(y.front())) - sums.first - curvature);
}

}  // namespace

std::vector<double> verify_ito(const SampledPath& path, const ItoFunction& f, const PartitionLadder& ladder) {
    std::vector<double> res;
    for (std::size_t s : ladder.strides) res.push_back(ito_residual(partition_values(path, s), f));
    return res;
}

double OccupationCheck::relative_gap() const {
    if (rhs == 0.0) return lhs == 0.0 ? 0.0 : kInf;
    return std::abs(lhs - rhs) / rhs;
}

OccupationCheck occupation_density_check(const SampledPath& path, std::size_t stride, double a, double b) {
    require(a <= b, ErrorCode::InvalidInput, "interval must satisfy a <= b");
    const auto y = partition_values(path, stride);
    const auto grid = level_grid(path.values);
    std::vector<double> pts{a};
    for (double u : grid)
        if (u > a && u < b) pts.push_back(u);
    pts.push_back(b);
    std::vector<double> lt(pts.size());
    kernels::active().local_time(y.data(), y.size(), pts.data(), pts.size(), lt.data());
    OccupationCheck oc;
    for (std::size_t i = 1; i < pts.size(); ++i) oc.lhs += 0.5 * (lt[i] + lt[i - 1]) * (pts[i] - pts[i - 1]);
    for (std::size_t j = 0; j + 1 < y.size(); ++j)
        if (y[j] >= a && y[j] <= b) oc.rhs += (y[j + 1] - y[j]) * (y[j + 1] - y[j]);
    return oc;
}

OccupationCheck occupation_density_check(const SampledPath& path, const PartitionLadder& ladder, double a,
                                         double b) {
    return occupation_density_check(path, ladder.strides.back(), a, b);
}

MonotoneMap identity_map() {
    return {"identity", [](double x) { return x; }, [](double) { return 1.0; }, [](double u) { return u; }};
}

MonotoneMap scale_map(double c) {
    require(c != 0.0 && std::isfinite(c), ErrorCode::NonMonotone, "scale factor must be nonzero");
    return {"scale", [c](double x) { return c * x; }, [c](double) { return c; }, [c](double u) { return u / c; }};
}

MonotoneMap log_map() {
    return {"log", [](double x) { return std::log(x); }, [](double x) { return 1.0 / x; },
            [](double u) { return std::exp(u); }};
}

double transform_local_time(const SampledPath& path, const MonotoneMap& f, std::size_t stride) {
    const auto x = partition_values(path, stride);
    int sign = 0;
    for (double v : x) {
        const double d = f.derivative(v);
        const int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
        if (s == 0 || !std::isfinite(d) || (sign != 0 && s != sign))
            fail(ErrorCode::NonMonotone, "map '" + f.name + "' is not strictly monotone on the path range");
        sign = s;
    }
    std::vector<double> y(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        y[j] = f.forward(x[j]);
        require(std::isfinite(y[j]), ErrorCode::NonMonotone, "map '" + f.name + "' undefined on the path");
    }
    const auto levels = level_grid(y);
    std::vector<double> ly(levels.size()), pre(levels.size()), lx(levels.size());
    kernels::active().local_time(y.data(), y.size(), levels.data(), levels.size(), ly.data());
    for (std::size_t i = 0; i < levels.size(); ++i) pre[i] = f.inverse(levels[i]);
    kernels::active().local_time(x.data(), x.size(), pre.data(), pre.size(), lx.data());
    const double h = levels[1] - levels[0];
    double s = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const double d = ly[i] - std::abs(f.derivative(pre[i])) * lx[i];
        s += d * d;
    }
    return std::sqrt(h * s);
}

namespace {

template <class Step>
SampledPath walk(std::uint64_t seed, std::size_t steps, double horizon, double x0, Step step) {
    require(steps >= 1 && horizon > 0.0, ErrorCode::InvalidInput, "walk needs steps >= 1 and horizon > 0");
    std::mt19937_64 rng(seed);
    std::vector<double> t(steps + 1), v(steps + 1);
    const double dt = horizon / static_cast<double>(steps);
    v[0] = x0;
    for (std::size_t j = 1; j <= steps; ++j) {
        t[j] = dt * static_cast<double>(j);
        const bool up = (rng() >> 63) != 0;
        v[j] = step(v[j - 1], up, dt);
    }
    return make_path(std::move(t), std::move(v));
}

}  // namespace

SampledPath geometric_walk(std::uint64_t seed, std::size_t steps, double sigma, double horizon, double x0) {
    require(x0 > 0.0 && sigma >= 0.0, ErrorCode::InvalidInput, "geometric walk needs x0 > 0 and sigma >= 0");
    const double up = std::exp(sigma * std::sqrt(horizon / static_cast<double>(steps)));
    const double down = 1.0 / up;
    return walk(seed, steps, horizon, x0, [=](double prev, bool u, double) { return prev * (u ? up : down); });
}

SampledPath arithmetic_walk(std::uint64_t seed, std::size_t steps, double horizon, double x0) {
    const double s = std::sqrt(horizon / static_cast<double>(steps));
    return walk(seed, steps, horizon, x0, [=](double prev, bool u, double) { return prev + (u ? s : -s); });
}

SampledPath read_path_csv(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    std::vector<double> t, v;
    auto num = [&](std::string s, const std::string& where) {
        s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; }), s.end());
        double x = 0.0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
        if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
            fail(ErrorCode::Parse, where + ": not a number: '" + s + "'");
        return x;
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::string compact;
        for (char ch : line)
            if (!std::isspace(static_cast<unsigned char>(ch))) compact += ch;
        if (compact.empty()) continue;
        const std::string where = source + ":" + std::to_string(lineno);
        if (!header) {
            require(compact == "time,value", ErrorCode::Parse, where + ": expected header 'time,value'");
            header = true;
            continue;
        }
        const auto comma = line.find(',');
        require(comma != std::string::npos && line.find(',', comma + 1) == std::string::npos, ErrorCode::Parse,
                where + ": expected two comma-separated fields");
        t.push_back(num(line.substr(0, comma), where));
        v.push_back(num(line.substr(comma + 1), where));
    }
    require(header, ErrorCode::Parse, source + ": empty input");
    try {
        return make_path(std::move(t), std::move(v));
    } catch (const Error& e) {
        fail(ErrorCode::Parse, source + ": " + e.what());
    }
}

SampledPath read_path_csv_file(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::InvalidInput, "cannot open " + path);
    return read_path_csv(in, path);
}

bool decreasing_tail(const std::vector<double>& xs, std::size_t count, double floor) {
    if (xs.size() < count) return false;
    for (std::size_t j = xs.size() - count + 1; j < xs.size(); ++j) {
        if (xs[j] <= floor && xs[j - 1] <= floor) continue;
        if (!(xs[j] < xs[j - 1])) return false;
    }
    return true;
}

PathcheckReport run_pathcheck(const SampledPath& path, const ItoFunction& f, std::size_t depth) {
    require(depth >= 5, ErrorCode::InvalidInput, "ladder too shallow: depth must be at least 5");
    const PartitionLadder ladder = PartitionLadder::dyadic(path, depth);
    PathcheckReport r;
    r.function = f.name;
    r.depth = depth;
    r.steps = path.steps();
    const double lo = path.min(), hi = path.max();
    r.interval_lo = lo + (hi - lo) / 3.0;
    r.interval_hi = lo + 2.0 * (hi - lo) / 3.0;
    const auto sq = verify_ito(path, square_function(), ladder);
    const auto res = verify_ito(path, f, ladder);
    const bool positive = path.positive();
    std::vector<double> gaps, transform;
    for (std::size_t l = 0; l < ladder.depth(); ++l) {
        LevelStats s;
        s.stride = ladder.strides[l];
        s.mesh = ladder.mesh[l];
        s.quadratic_variation = quadratic_variation(path, s.stride).back();
        s.residual_square = sq[l];
        s.residual = res[l];
        const auto oc = occupation_density_check(path, s.stride, r.interval_lo, r.interval_hi);
        s.occupation_lhs = oc.lhs;
        s.occupation_rhs = oc.rhs;
        s.occupation_gap = oc.relative_gap();
        gaps.push_back(s.occupation_gap);
        if (positive) {
            s.log_transform_discrepancy = transform_local_time(path, log_map(), s.stride);
            transform.push_back(*s.log_transform_discrepancy);
        }
        r.levels.push_back(s);
    }
    const double scale = std::max({1.0, lo * lo, hi * hi});
    r.square_identity = std::all_of(sq.begin(), sq.end(), [&](double v) { return v <= 1e-12 * scale; });
    r.residual_decreasing = decreasing_tail(res);
    r.occupation_decreasing = decreasing_tail(gaps, 3, 1e-12);
    r.occupation_within_5pct = gaps.back() < 0.05;
    if (positive) {
        const double fine = transform.back(), coarse = transform[transform.size() - 3];
        r.transform_halves = fine <= 0.5 * coarse;
    }
    // Occupation gaps come from increments straddling the interval ends, so their
    // monotonicity is a frequency statement over many paths, not a per-path check.
    r.pass = r.square_identity && r.residual_decreasing && r.occupation_within_5pct &&
             r.transform_halves.value_or(true);
    return r;
}

}  // namespace varbounds
