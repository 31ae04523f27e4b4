#include "varbounds/swap.hpp"

#include <cmath>
#include <sstream>

#include "varbounds/error.hpp"

namespace varbounds {

const char* to_string(Side s) { return s == Side::Lower ? "lower" : "upper"; }

const char* verdict_name(const PriceVerdict& v) {
    switch (v.index()) {
        case 0: return "Consistent";
        case 1: return "BoundaryRequiresDualExistence";
        case 2: return "ModelIndependentArbitrage";
        default: return "WeakArbitrage";
    }
}

std::string describe(const PriceVerdict& v) {
    std::ostringstream os;
    os << verdict_name(v);
    if (const auto* b = std::get_if<verdict::BoundaryRequiresDualExistence>(&v))
        os << "(" << to_string(b->side) << ", " << to_string(b->existence.status) << " "
           << b->existence.condition << ")";
    else if (const auto* m = std::get_if<verdict::ModelIndependentArbitrage>(&v))
        os << "(" << (m->side == Side::Lower ? "below" : "above") << ")";
    else if (const auto* w = std::get_if<verdict::WeakArbitrage>(&v))
        os << "(" << w->reason << ")";
    return os.str();
}

bool is_arbitrage(const PriceVerdict& v) {
    if (std::holds_alternative<verdict::ModelIndependentArbitrage>(v) ||
        std::holds_alternative<verdict::WeakArbitrage>(v))
        return true;
    if (const auto* b = std::get_if<verdict::BoundaryRequiresDualExistence>(&v))
        return b->existence.status == ExistenceStatus::Fails;
    return false;
}

double vol_points(double rate) {
    require(rate >= 0.0 && std::isfinite(rate), ErrorCode::InvalidInput,
            "vol points need a finite nonnegative rate");
    return 100.0 * std::sqrt(rate);
}

double rate_from_vol_points(double vp) {
    require(vp >= 0.0 && std::isfinite(vp), ErrorCode::InvalidInput,
            "vol points must be finite and nonnegative");
    return (vp / 100.0) * (vp / 100.0);
}

double swap_rate_from_value(const ConvexPayoff& payoff, double v) { return 2.0 * v - 2.0 * payoff(1.0); }

double value_from_swap_rate(const ConvexPayoff& payoff, double rate) { return 0.5 * rate + payoff(1.0); }

PriceVerdict classify_value(double value, double lower, double upper, const ExistenceVerdict& lower_existence,
                            const ExistenceVerdict& upper_existence, bool c1) {
    if (!c1) return verdict::WeakArbitrage{"payoff unbounded at 0 and p_2 <= (k_2/k_1) p_1"};
    if (std::isfinite(lower) && std::abs(value - lower) <= kBoundaryTol)
        return verdict::BoundaryRequiresDualExistence{Side::Lower, lower_existence};
    if (std::isfinite(upper) && std::abs(value - upper) <= kBoundaryTol)
        return verdict::BoundaryRequiresDualExistence{Side::Upper, upper_existence};
    if (value < lower) return verdict::ModelIndependentArbitrage{Side::Lower};
    if (value > upper) return verdict::ModelIndependentArbitrage{Side::Upper};
    return verdict::Consistent{};
}

PriceVerdict classify_european(const NormalizedChain& c, const ConvexPayoff& payoff, double price,
                               const LowerBoundResult& lower, const UpperResult& upper) {
    const double v = price / (c.discount * c.forward);
    return classify_value(v, lower.value, upper_value(upper), lower.existence, dual_existence_ub(c, payoff),
                          check_c1(c, payoff));
}

PriceVerdict classify_european(const NormalizedChain& c, const ConvexPayoff& payoff, double price,
                               const DpOptions& options) {
    if (!check_c1(c, payoff))
        return verdict::WeakArbitrage{"payoff unbounded at 0 and p_2 <= (k_2/k_1) p_1"};
    return classify_european(c, payoff, price, lower_bound(c, payoff, options), superhedge(c, payoff));
}

PriceVerdict classify_swap_quote(const NormalizedChain& c, const ConvexPayoff& payoff, double rate,
                                 const LowerBoundResult& lower, const UpperResult& upper) {
    const double price = c.discount * c.forward * value_from_swap_rate(payoff, rate);
    return classify_european(c, payoff, price, lower, upper);
}

PriceVerdict classify_swap_quote(const NormalizedChain& c, const ConvexPayoff& payoff, double rate,
                                 const DpOptions& options) {
    const double price = c.discount * c.forward * value_from_swap_rate(payoff, rate);
    return classify_european(c, payoff, price, options);
}

PriceVerdict classify_against_published_lower(double quote_volpts, double lower_volpts) {
    // Vanilla: lambda(1) = 0, so normalized value = rate / 2.
    const double v = 0.5 * rate_from_vol_points(quote_volpts);
    const double lower = 0.5 * rate_from_vol_points(lower_volpts);
    return classify_value(v, lower, kInf, {ExistenceStatus::Guaranteed, "iv"},
                          {ExistenceStatus::Fails, "n_max infinite and payoff not affine beyond k_n"}, true);
}

namespace {

BoundSide make_side(const NormalizedChain& c, const ConvexPayoff& payoff, double v) {
    BoundSide s;
    s.value = v;
    s.available = std::isfinite(v);
    s.currency = c.discount * c.forward * v;
    s.swap_rate = s.available ? swap_rate_from_value(payoff, v) : v;
    if (s.available && s.swap_rate >= 0.0) s.vol_points = vol_points(s.swap_rate);
    return s;
}

}  // namespace

BoundsReport bounds_report(const NormalizedChain& c, const ConvexPayoff& payoff, const BoundsOptions& o) {
    BoundsReport r;
    r.payoff = payoff.label;
    r.payoff_kind = to_string(payoff.kind);
    r.lambda_at_one = payoff(1.0);
    r.chain = validate_puts(c);
    if (!r.chain.consistent()) return r;

    r.c1 = check_c1(c, payoff);
    if (r.c1) {
        const LowerBoundResult lb = lower_bound(c, payoff, o.dp);
        r.lower_method = to_string(lb.method);
        r.lower = make_side(c, payoff, lb.value);
        r.subhedge = to_currency(c, lb.subhedge);
        r.lower_measure = lb.measure;
        r.lower_existence = lb.existence;
        r.tail_calls_added = lb.theta;
    } else {
        r.lower_method = "none";
        r.lower = make_side(c, payoff, kInf);
        r.lower_existence = {ExistenceStatus::Undetermined, "lower bound is +inf"};
    }

    const UpperResult ub = superhedge(c, payoff);
    r.upper_existence = dual_existence_ub(c, payoff);
    if (const auto* s = std::get_if<Superhedge>(&ub)) {
        r.upper = make_side(c, payoff, s->value);
        r.superhedge = to_currency(c, s->portfolio);
        const bool capped = c.n_max_finite() && c.n_max <= c.n();
        r.upper_measure_z = capped ? c.k[c.n_max] : 100.0 * c.k[c.n()];
        try {
            r.upper_measure = extremal_upper_measure(c, r.upper_measure_z);
        } catch (const Error&) {
            r.upper_measure.reset();
        }
    } else {
        r.upper = make_side(c, payoff, kInf);
        r.upper_note = std::get<Infeasible>(ub).reason;
    }

    if (o.quote_volpts || o.quote_variance) {
        QuoteInfo q;
        if (o.quote_volpts) {
            q.unit = "volpts";
            q.input = *o.quote_volpts;
            q.swap_rate = rate_from_vol_points(q.input);
        } else {
            q.unit = "variance";
            q.input = *o.quote_variance;
            q.swap_rate = q.input;
        }
        const double v = value_from_swap_rate(payoff, q.swap_rate);
        q.european_price = c.discount * c.forward * v;
        r.quote = q;
        r.verdict = classify_value(v, r.lower.value, r.upper.value, r.lower_existence, r.upper_existence, r.c1);
    }
    return r;
}

BoundsReport swap_rate_bounds(const NormalizedChain& c, const WeightSpec& weight, const BoundsOptions& o) {
    const ConvexPayoff payoff = make_payoff(weight);
    if (validate_puts(c).consistent() && !check_c1(c, payoff))
        fail(ErrorCode::C1Violation, "p_2 <= (k_2/k_1) p_1 with payoff unbounded at 0: V^L = +inf");
    return bounds_report(c, payoff, o);
}

}  // namespace varbounds
