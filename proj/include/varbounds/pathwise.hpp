#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "varbounds/payoff.hpp"

namespace varbounds {

struct SampledPath {
    std::vector<double> times;
    std::vector<double> values;

    std::size_t steps() const { return values.size() - 1; }
    bool positive() const;
    double min() const;
    double max() const;
};

// Checks times strictly increasing from 0 and values finite.
SampledPath make_path(std::vector<double> times, std::vector<double> values);

// Nested partitions given by strides on the path grid, coarsest first; the
// finest has stride 1.
struct PartitionLadder {
    std::vector<std::size_t> strides;
    std::vector<double> mesh;

    std::size_t depth() const { return strides.size(); }
    static PartitionLadder dyadic(const SampledPath& path, std::size_t depth);
};

std::vector<double> partition_values(const SampledPath& path, std::size_t stride);

// Cumulative sum of squared increments at the partition times (first entry 0).
std::vector<double> quadratic_variation(const SampledPath& path, std::size_t stride);

struct LocalTimeProfile {
    std::vector<double> levels;
    std::vector<double> values;
};

inline constexpr std::size_t kLevelCount = 512;

// `count` uniform levels over [min X, max X] padded by one cell on each side.
std::vector<double> level_grid(const std::vector<double>& values, std::size_t count = kLevelCount);

// Discrete local time over the partition up to partition index `upto` (default: T).
LocalTimeProfile discrete_local_time(const SampledPath& path, std::size_t stride,
                                     const std::vector<double>& levels,
                                     std::optional<std::size_t> upto = std::nullopt);

// Left-point Riemann sum of f' against the partition increments.
double follmer_integral(const SampledPath& path, const std::function<double(double)>& fprime,
                        std::size_t stride);

struct ItoFunction {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    std::function<double(double)> second_derivative;
    // Curvature term as half the integral of local time against f'' (for payoffs
    // whose second derivative jumps), instead of the discrete QV sum.
    bool local_time_form = false;
    std::vector<double> kinks;
};

ItoFunction square_function();
ItoFunction cube_function();
ItoFunction function_from_payoff(const ConvexPayoff& payoff);

std::vector<double> verify_ito(const SampledPath& path, const ItoFunction& f, const PartitionLadder& ladder);

struct OccupationCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double relative_gap() const;
};

OccupationCheck occupation_density_check(const SampledPath& path, std::size_t stride, double a, double b);
OccupationCheck occupation_density_check(const SampledPath& path, const PartitionLadder& ladder,
                                         double a, double b);

struct MonotoneMap {
    std::string name;
    std::function<double(double)> forward;
    std::function<double(double)> derivative;
    std::function<double(double)> inverse;
};

MonotoneMap identity_map();
MonotoneMap scale_map(double factor);
MonotoneMap log_map();

// L2 distance over the level grid of f(X) between the local time of f(X) and the
// profile transported from X.
double transform_local_time(const SampledPath& path, const MonotoneMap& f, std::size_t stride = 1);

// Positive walk x0 * exp(+-sigma sqrt(dt)) with fair coin flips.
SampledPath geometric_walk(std::uint64_t seed, std::size_t steps, double sigma = 1.0,
                           double horizon = 1.0, double x0 = 1.0);
// x0 +- sqrt(dt) with fair coin flips.
SampledPath arithmetic_walk(std::uint64_t seed, std::size_t steps, double horizon = 1.0, double x0 = 0.0);

// Path CSV with header `time,value`.
SampledPath read_path_csv(std::istream& in, const std::string& source = "<input>");
SampledPath read_path_csv_file(const std::string& path);

struct LevelStats {
    std::size_t stride = 1;
    double mesh = 0.0;
    double quadratic_variation = 0.0;
    double residual_square = 0.0;
    double residual = 0.0;
    double occupation_lhs = 0.0;
    double occupation_rhs = 0.0;
    double occupation_gap = 0.0;
    std::optional<double> log_transform_discrepancy;
};

struct PathcheckReport {
    std::string function;
    std::string source;
    std::size_t depth = 0;
    std::size_t steps = 0;
    std::optional<std::uint64_t> seed;
    double interval_lo = 0.0;
    double interval_hi = 0.0;
    std::vector<LevelStats> levels;
    bool square_identity = true;        // x^2 residual <= 1e-12 * max(1, X^2) at every level
    bool residual_decreasing = true;    // final three levels
    bool occupation_decreasing = true;  // final three levels; reported, not part of pass
    bool occupation_within_5pct = true; // finest level
    std::optional<bool> transform_halves;  // finest vs two levels coarser
    bool pass = false;
};

// Strict decrease, except that values at the rounding floor count as converged.
bool decreasing_tail(const std::vector<double>& xs, std::size_t count = 3, double floor = 1e-13);

PathcheckReport run_pathcheck(const SampledPath& path, const ItoFunction& f, std::size_t depth);

inline constexpr std::size_t kDefaultWalkSteps = 16384;

}  // namespace varbounds
