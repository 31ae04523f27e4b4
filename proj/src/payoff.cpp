#include "varbounds/payoff.hpp"

#include <cmath>
#include <sstream>

#include "varbounds/error.hpp"

namespace varbounds {

const char* to_string(PayoffKind k) {
    switch (k) {
        case PayoffKind::Vanilla: return "vanilla";
        case PayoffKind::CorridorDown: return "corridor-down";
        case PayoffKind::CorridorUp: return "corridor-up";
        case PayoffKind::Gamma: return "gamma";
        case PayoffKind::Custom: return "custom";
    }
    return "unknown";
}

const char* to_string(ExistenceStatus s) {
    switch (s) {
        case ExistenceStatus::Guaranteed: return "Guaranteed";
        case ExistenceStatus::Fails: return "Fails";
        case ExistenceStatus::Undetermined: return "Undetermined";
    }
    return "Unknown";
}

namespace {

std::string number_label(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

ConvexPayoff vanilla() {
    ConvexPayoff p;
    p.kind = PayoffKind::Vanilla;
    p.label = "vanilla";
    p.value = [](double x) { return -std::log(x); };
    p.right_derivative = [](double x) { return -1.0 / x; };
    p.curvature_weight = [](double) { return 1.0; };
    p.origin_value = kInf;
    p.asymptotic_slope = 0.0;
    p.tail_intercept = -kInf;
    return p;
}

ConvexPayoff gamma_payoff() {
    ConvexPayoff p;
    p.kind = PayoffKind::Gamma;
    p.label = "gamma";
    p.value = [](double x) { return x * std::log(x) - x; };
    p.right_derivative = [](double x) { return std::log(x); };
    p.curvature_weight = [](double x) { return x; };
    p.origin_value = 0.0;
    p.asymptotic_slope = kInf;
    p.tail_intercept = -kInf;
    return p;
}

ConvexPayoff corridor_down(double a) {
    require(a > 0.0 && std::isfinite(a), ErrorCode::InvalidInput, "corridor barrier must be > 0");
    ConvexPayoff p;
    p.kind = PayoffKind::CorridorDown;
    p.label = "corridor-down:" + number_label(a);
    p.barrier = a;
    p.value = [a](double x) { return x < a ? -std::log(x / a) + x / a - 1.0 : 0.0; };
    p.right_derivative = [a](double x) { return x < a ? -1.0 / x + 1.0 / a : 0.0; };
    p.curvature_weight = [a](double x) { return x < a ? 1.0 : 0.0; };
    p.origin_value = kInf;
    p.asymptotic_slope = 0.0;
    p.tail_intercept = 0.0;
    p.affine_tail_threshold = a;
    p.kinks = {a};
    return p;
}

ConvexPayoff corridor_up(double a) {
    require(a > 0.0 && std::isfinite(a), ErrorCode::InvalidInput, "corridor barrier must be > 0");
    ConvexPayoff p;
    p.kind = PayoffKind::CorridorUp;
    p.label = "corridor-up:" + number_label(a);
    p.barrier = a;
    p.value = [a](double x) { return x > a ? -std::log(x / a) + x / a - 1.0 : 0.0; };
    p.right_derivative = [a](double x) { return x >= a ? -1.0 / x + 1.0 / a : 0.0; };
    p.curvature_weight = [a](double x) { return x >= a ? 1.0 : 0.0; };
    p.origin_value = 0.0;
    p.asymptotic_slope = 1.0 / a;
    p.tail_intercept = -kInf;
    p.kinks = {a};
    return p;
}

void spot_check_convexity(const ConvexPayoff& p) {
    constexpr int m = 300;
    double prev_slope = -kInf;
    double x0 = 1e-3, v0 = p.value(x0);
    for (int j = 1; j <= m; ++j) {
        const double x1 = 1e-3 * std::pow(1e6, static_cast<double>(j) / m);
        const double v1 = p.value(x1);
        require(std::isfinite(v1), ErrorCode::InvalidInput, p.label + ": non-finite value");
        const double s = (v1 - v0) / (x1 - x0);
        require(s >= prev_slope - 1e-10 * (1.0 + std::abs(prev_slope)), ErrorCode::InvalidInput,
                p.label + ": payoff fails the convexity spot check near x=" + number_label(x0));
        require(p.curvature_weight(x1) >= 0.0, ErrorCode::InvalidInput,
                p.label + ": negative curvature weight");
        prev_slope = s;
        x0 = x1;
        v0 = v1;
    }
}

ConvexPayoff custom(const CustomConvex& c) {
    require(static_cast<bool>(c.value) && static_cast<bool>(c.right_derivative) &&
                static_cast<bool>(c.curvature_weight),
            ErrorCode::InvalidInput, "custom payoff needs value, derivative and curvature");
    ConvexPayoff p;
    p.kind = PayoffKind::Custom;
    p.label = c.label;
    p.value = c.value;
    p.right_derivative = c.right_derivative;
    p.curvature_weight = c.curvature_weight;
    p.origin_value = c.origin_value;
    p.asymptotic_slope = c.asymptotic_slope;
    p.tail_intercept = c.tail_intercept;
    p.affine_tail_threshold = c.affine_tail_threshold;
    p.kinks = c.kinks;
    spot_check_convexity(p);
    return p;
}

}  // namespace

ConvexPayoff make_payoff(const WeightSpec& spec) {
    struct Visitor {
        ConvexPayoff operator()(const Vanilla&) const { return vanilla(); }
        ConvexPayoff operator()(const Gamma&) const { return gamma_payoff(); }
        ConvexPayoff operator()(const CorridorDown& s) const { return corridor_down(s.a); }
        ConvexPayoff operator()(const CorridorUp& s) const { return corridor_up(s.a); }
        ConvexPayoff operator()(const CustomConvex& s) const { return custom(s); }
    };
    return std::visit(Visitor{}, spec);
}

ConvexPayoff shift_affine(const ConvexPayoff& p, double alpha, double beta) {
    ConvexPayoff q = p;
    q.label = p.label + "+affine";
    const auto v = p.value;
    const auto d = p.right_derivative;
    q.value = [v, alpha, beta](double x) { return v(x) + alpha * x + beta; };
    q.right_derivative = [d, alpha](double x) { return d(x) + alpha; };
    q.origin_value = p.origin_value + beta;
    q.asymptotic_slope = p.asymptotic_slope + alpha;
    q.tail_intercept = p.tail_intercept + beta;
    return q;
}

ConvexPayoff inverse_power_payoff(double a, double b) {
    require(a >= 0.0, ErrorCode::InvalidInput, "custom:<a>:<b> needs a >= 0");
    require(a == 0.0 || b >= 1.0 || b <= 0.0, ErrorCode::InvalidInput,
            "custom:<a>:<b> needs b >= 1 or b <= 0 for convexity");
    CustomConvex c;
    c.label = a == 0.0 ? "custom" : "custom:" + number_label(a) + ":" + number_label(b);
    c.value = [a, b](double x) { return 1.0 / x + a * std::pow(x, b); };
    c.right_derivative = [a, b](double x) { return -1.0 / (x * x) + a * b * std::pow(x, b - 1.0); };
    c.curvature_weight = [a, b](double x) {
        return 2.0 / x + a * b * (b - 1.0) * std::pow(x, b);
    };
    c.origin_value = kInf;
    if (a == 0.0 || b < 1.0) {
        c.asymptotic_slope = 0.0;
        c.tail_intercept = b == 0.0 ? a : 0.0;
    } else if (b == 1.0) {
        c.asymptotic_slope = a;
        c.tail_intercept = 0.0;
    } else {
        c.asymptotic_slope = kInf;
        c.tail_intercept = -kInf;
    }
    return make_payoff(c);
}

ConvexPayoff parse_payoff(const std::string& text) {
    auto parts = std::vector<std::string>{};
    std::string cur;
    for (char ch : text) {
        if (ch == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    auto num = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        require(used == s.size() && !s.empty() && std::isfinite(v), ErrorCode::InvalidInput,
                "bad number '" + s + "' in weight '" + text + "'");
        return v;
    };
    const std::string& head = parts[0];
    if (head == "vanilla" && parts.size() == 1) return make_payoff(Vanilla{});
    if (head == "gamma" && parts.size() == 1) return make_payoff(Gamma{});
    if (head == "corridor-down" && parts.size() == 2) return make_payoff(CorridorDown{num(parts[1])});
    if (head == "corridor-up" && parts.size() == 2) return make_payoff(CorridorUp{num(parts[1])});
    if (head == "custom" && parts.size() == 1) return inverse_power_payoff(0.0, 1.0);
    if (head == "custom" && parts.size() == 3) return inverse_power_payoff(num(parts[1]), num(parts[2]));
    fail(ErrorCode::InvalidInput,
         "unknown weight '" + text +
             "' (expected vanilla, gamma, corridor-down:<a>, corridor-up:<a>, custom[:<a>:<b>])");
}

bool check_c1(const NormalizedChain& c, const ConvexPayoff& payoff) {
    if (c.n_min != 0 || std::isfinite(payoff.origin_value)) return true;
    // With one put and p_1 > 0 no mass is forced onto the origin.
    if (c.n() < 2) return true;
    return c.p[2] > (c.k[2] / c.k[1]) * c.p[1] + kChainTol;
}

bool superhedge_feasible(const ConvexPayoff& payoff) {
    return std::isfinite(payoff.origin_value) && std::isfinite(payoff.asymptotic_slope);
}

ExistenceVerdict dual_existence_lb(const NormalizedChain& c, const ConvexPayoff& payoff,
                                   const HedgePortfolio* subhedge) {
    using S = ExistenceStatus;
    if (c.n_max_finite()) return {S::Guaranteed, "i"};
    if (payoff.tail_intercept == -kInf) return {S::Guaranteed, "iv"};
    if (subhedge == nullptr) return {S::Undetermined, "no subhedge supplied"};
    const HedgePortfolio h = to_normalized(c, *subhedge);
    constexpr double tol = 1e-9;
    const double kn = c.k[c.n()];
    const double gamma = payoff.asymptotic_slope;
    const double phi = h.tail_slope();
    const double gap_at_kn = payoff(kn) - h.payoff(kn);
    if (gap_at_kn > tol && (!std::isfinite(gamma) || phi < gamma - tol)) return {S::Guaranteed, "ii"};
    if (payoff.affine_tail_threshold < kInf) return {S::Undetermined, "payoff affine on a half-line"};
    if (phi > gamma + tol) return {S::Undetermined, "subhedge tail steeper than payoff"};
    // Beyond k_n the subhedge is the line psi + phi x; check it stays strictly below.
    for (int j = 0; j <= 400; ++j) {
        const double s = kn * std::pow(1e4, j / 400.0);
        if (payoff(s) - h.payoff(s) <= 0.0) return {S::Undetermined, "subhedge touches payoff beyond k_n"};
    }
    const double psi = h.payoff(kn) - phi * kn;
    if (payoff.tail_intercept - psi < -tol) return {S::Undetermined, "asymptotic contact"};
    return {S::Fails, "subhedge strictly below payoff on [k_n, inf)"};
}

ExistenceVerdict dual_existence_ub(const NormalizedChain& c, const ConvexPayoff& payoff) {
    using S = ExistenceStatus;
    if (c.n_max_finite()) return {S::Guaranteed, "i"};
    if (payoff.affine_tail_threshold <= c.k[c.n()]) return {S::Guaranteed, "affine tail"};
    return {S::Fails, "n_max infinite and payoff not affine beyond k_n"};
}

}  // namespace varbounds
