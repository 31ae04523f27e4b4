#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "varbounds/chain.hpp"
#include "varbounds/portfolio.hpp"

namespace varbounds {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Vanilla {};
struct Gamma {};
struct CorridorDown { double a; };
struct CorridorUp { double a; };
// A user-supplied convex function with its analytic limits.
struct CustomConvex {
    std::string label = "custom";
    std::function<double(double)> value;
    std::function<double(double)> right_derivative;
    std::function<double(double)> curvature_weight;  // w(x) with lambda''(dx) = w(x)/x^2 dx
    double origin_value = kInf;
    double asymptotic_slope = 0.0;
    double tail_intercept = 0.0;  // lim lambda(x) - x lambda'(x)
    double affine_tail_threshold = kInf;
    std::vector<double> kinks;
};

using WeightSpec = std::variant<Vanilla, CorridorDown, CorridorUp, Gamma, CustomConvex>;

enum class PayoffKind { Vanilla, CorridorDown, CorridorUp, Gamma, Custom };
const char* to_string(PayoffKind k);

struct ConvexPayoff {
    PayoffKind kind = PayoffKind::Custom;
    std::string label;
    double barrier = 0.0;  // corridor barrier a, zero otherwise

    std::function<double(double)> value;
    std::function<double(double)> right_derivative;
    std::function<double(double)> curvature_weight;

    double origin_value = kInf;           // lambda(0+)
    double asymptotic_slope = 0.0;        // gamma = lambda'(inf)
    double tail_intercept = 0.0;          // lim lambda(x) - x lambda'(x); -inf means the tail moment diverges
    double affine_tail_threshold = kInf;  // least z with lambda affine on [z, inf)
    std::vector<double> kinks;            // points where the curvature jumps

    double operator()(double x) const { return x <= 0.0 ? origin_value : value(x); }
    double derivative(double x) const { return right_derivative(x); }
    // Density of lambda'' with respect to Lebesgue measure.
    double second_derivative(double x) const { return curvature_weight(x) / (x * x); }
    // Tangent line at x evaluated at y.
    double tangent(double x, double y) const { return value(x) + right_derivative(x) * (y - x); }
    bool weight_payoff() const { return kind != PayoffKind::Custom; }
};

ConvexPayoff make_payoff(const WeightSpec& spec);

// lambda(x) + alpha*x + beta.
ConvexPayoff shift_affine(const ConvexPayoff& payoff, double alpha, double beta);

// 1/x + a*x^b; the demo payoff used for the single-put examples (a = 0 gives 1/x).
ConvexPayoff inverse_power_payoff(double a = 0.0, double b = 1.0);

// Grammar: vanilla | gamma | corridor-down:<a> | corridor-up:<a> | custom | custom:<a>:<b>
ConvexPayoff parse_payoff(const std::string& text);

bool check_c1(const NormalizedChain& c, const ConvexPayoff& payoff);
bool superhedge_feasible(const ConvexPayoff& payoff);

enum class ExistenceStatus { Guaranteed, Fails, Undetermined };

struct ExistenceVerdict {
    ExistenceStatus status = ExistenceStatus::Undetermined;
    std::string condition;  // "i", "ii", "iv", or a short reason
    bool guaranteed() const { return status == ExistenceStatus::Guaranteed; }
};

const char* to_string(ExistenceStatus s);

// Whether the lower-bound dual problem attains its infimum.
ExistenceVerdict dual_existence_lb(const NormalizedChain& c, const ConvexPayoff& payoff,
                                   const HedgePortfolio* subhedge = nullptr);
// Whether the upper-bound dual problem attains its supremum.
ExistenceVerdict dual_existence_ub(const NormalizedChain& c, const ConvexPayoff& payoff);

}  // namespace varbounds
