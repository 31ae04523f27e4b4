#include "varbounds/report.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "varbounds/error.hpp"
#include "varbounds/grid.hpp"

namespace varbounds {

Json number_to_json(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

double number_from_json(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        if (s == "nan") return std::nan("");
    }
    fail(ErrorCode::Parse, "expected a number, got " + j.dump());
}

namespace {

Json numbers(const std::vector<double>& xs) {
    Json a = Json::array();
    for (double x : xs) a.push_back(number_to_json(x));
    return a;
}

std::vector<double> numbers_from(const Json& j) {
    std::vector<double> xs;
    for (const auto& e : j) xs.push_back(number_from_json(e));
    return xs;
}

Json side_to_json(const BoundSide& s) {
    Json j;
    j["available"] = s.available;
    j["value"] = number_to_json(s.value);
    j["currency"] = number_to_json(s.currency);
    j["swap_rate"] = number_to_json(s.swap_rate);
    j["vol_points"] = s.vol_points ? number_to_json(*s.vol_points) : Json(nullptr);
    return j;
}

BoundSide side_from_json(const Json& j) {
    BoundSide s;
    s.available = j.at("available").get<bool>();
    s.value = number_from_json(j.at("value"));
    s.currency = number_from_json(j.at("currency"));
    s.swap_rate = number_from_json(j.at("swap_rate"));
    if (!j.at("vol_points").is_null()) s.vol_points = number_from_json(j.at("vol_points"));
    return s;
}

Side side_from(const std::string& s) {
    if (s == "lower" || s == "below") return Side::Lower;
    if (s == "upper" || s == "above") return Side::Upper;
    fail(ErrorCode::Parse, "unknown side '" + s + "'");
}

template <class E, std::size_t N>
E enum_from(const std::string& s, const E (&values)[N]) {
    for (E v : values)
        if (s == to_string(v)) return v;
    fail(ErrorCode::Parse, "unknown enumerator '" + s + "'");
}

}  // namespace

Json to_json(const HedgePortfolio& h) {
    Json j;
    j["units"] = h.units == Units::Currency ? "currency" : "normalized";
    j["cash"] = number_to_json(h.cash);
    j["forward"] = number_to_json(h.forward);
    Json puts = Json::array();
    for (std::size_t i = 0; i < h.strikes.size(); ++i)
        puts.push_back({{"strike", number_to_json(h.strikes[i])}, {"weight", number_to_json(h.puts[i])}});
    j["puts"] = puts;
    return j;
}

HedgePortfolio portfolio_from_json(const Json& j) {
    HedgePortfolio h;
    h.units = j.at("units").get<std::string>() == "currency" ? Units::Currency : Units::Normalized;
    h.cash = number_from_json(j.at("cash"));
    h.forward = number_from_json(j.at("forward"));
    for (const auto& p : j.at("puts")) {
        h.strikes.push_back(number_from_json(p.at("strike")));
        h.puts.push_back(number_from_json(p.at("weight")));
    }
    return h;
}

Json to_json(const AtomicMeasure& mu) {
    Json j;
    j["atoms"] = numbers(mu.atoms);
    j["weights"] = numbers(mu.weights);
    j["escaped_forward"] = number_to_json(mu.escaped_forward);
    return j;
}

AtomicMeasure measure_from_json(const Json& j) {
    AtomicMeasure mu;
    mu.atoms = numbers_from(j.at("atoms"));
    mu.weights = numbers_from(j.at("weights"));
    mu.escaped_forward = number_from_json(j.at("escaped_forward"));
    require(mu.atoms.size() == mu.weights.size(), ErrorCode::Parse, "measure atoms and weights differ in length");
    return mu;
}

Json to_json(const ExistenceVerdict& e) {
    return {{"status", to_string(e.status)}, {"condition", e.condition}};
}

ExistenceVerdict existence_from_json(const Json& j) {
    static constexpr ExistenceStatus all[] = {ExistenceStatus::Guaranteed, ExistenceStatus::Fails,
                                              ExistenceStatus::Undetermined};
    return {enum_from(j.at("status").get<std::string>(), all), j.at("condition").get<std::string>()};
}

Json to_json(const ChainVerdict& v) { return {{"status", to_string(v.status)}, {"witness", v.witness}}; }

ChainVerdict chain_verdict_from_json(const Json& j) {
    static constexpr ChainStatus all[] = {ChainStatus::Consistent, ChainStatus::WeakArbitrage,
                                          ChainStatus::ModelIndependentArbitrage};
    return {enum_from(j.at("status").get<std::string>(), all), j.at("witness").get<std::string>()};
}

Json to_json(const PriceVerdict& v) {
    Json j;
    j["verdict"] = verdict_name(v);
    if (const auto* b = std::get_if<verdict::BoundaryRequiresDualExistence>(&v)) {
        j["side"] = to_string(b->side);
        j["existence"] = to_json(b->existence);
    } else if (const auto* m = std::get_if<verdict::ModelIndependentArbitrage>(&v)) {
        j["side"] = m->side == Side::Lower ? "below" : "above";
    } else if (const auto* w = std::get_if<verdict::WeakArbitrage>(&v)) {
        j["reason"] = w->reason;
    }
    j["arbitrage"] = is_arbitrage(v);
    return j;
}

PriceVerdict verdict_from_json(const Json& j) {
    const auto name = j.at("verdict").get<std::string>();
    if (name == "Consistent") return verdict::Consistent{};
    if (name == "BoundaryRequiresDualExistence")
        return verdict::BoundaryRequiresDualExistence{side_from(j.at("side").get<std::string>()),
                                                      existence_from_json(j.at("existence"))};
    if (name == "ModelIndependentArbitrage")
        return verdict::ModelIndependentArbitrage{side_from(j.at("side").get<std::string>())};
    if (name == "WeakArbitrage") return verdict::WeakArbitrage{j.at("reason").get<std::string>()};
    fail(ErrorCode::Parse, "unknown verdict '" + name + "'");
}

Json to_json(const BoundsReport& r) {
    Json j;
    j["payoff"] = r.payoff;
    j["payoff_kind"] = r.payoff_kind;
    j["lambda_at_one"] = number_to_json(r.lambda_at_one);
    j["chain"] = to_json(r.chain);
    j["c1"] = r.c1;
    j["lower_method"] = r.lower_method;
    j["lower"] = side_to_json(r.lower);
    j["upper"] = side_to_json(r.upper);
    j["upper_note"] = r.upper_note;
    j["subhedge"] = r.subhedge ? to_json(*r.subhedge) : Json(nullptr);
    j["superhedge"] = r.superhedge ? to_json(*r.superhedge) : Json(nullptr);
    j["lower_measure"] = r.lower_measure ? to_json(*r.lower_measure) : Json(nullptr);
    j["upper_measure"] = r.upper_measure ? to_json(*r.upper_measure) : Json(nullptr);
    j["upper_measure_z"] = number_to_json(r.upper_measure_z);
    j["lower_existence"] = to_json(r.lower_existence);
    j["upper_existence"] = to_json(r.upper_existence);
    j["tail_calls_added"] = number_to_json(r.tail_calls_added);
    if (r.quote) {
        j["quote"] = {{"unit", r.quote->unit},
                      {"input", number_to_json(r.quote->input)},
                      {"swap_rate", number_to_json(r.quote->swap_rate)},
                      {"european_price", number_to_json(r.quote->european_price)}};
    } else {
        j["quote"] = nullptr;
    }
    j["verdict"] = r.verdict ? to_json(*r.verdict) : Json(nullptr);
    j["swap_only_equivalence_unverified"] = r.swap_only_equivalence_unverified;
    return j;
}

BoundsReport bounds_report_from_json(const Json& j) {
    BoundsReport r;
    try {
        r.payoff = j.at("payoff").get<std::string>();
        r.payoff_kind = j.at("payoff_kind").get<std::string>();
        r.lambda_at_one = number_from_json(j.at("lambda_at_one"));
        r.chain = chain_verdict_from_json(j.at("chain"));
        r.c1 = j.at("c1").get<bool>();
        r.lower_method = j.at("lower_method").get<std::string>();
        r.lower = side_from_json(j.at("lower"));
        r.upper = side_from_json(j.at("upper"));
        r.upper_note = j.at("upper_note").get<std::string>();
        if (!j.at("subhedge").is_null()) r.subhedge = portfolio_from_json(j.at("subhedge"));
        if (!j.at("superhedge").is_null()) r.superhedge = portfolio_from_json(j.at("superhedge"));
        if (!j.at("lower_measure").is_null()) r.lower_measure = measure_from_json(j.at("lower_measure"));
        if (!j.at("upper_measure").is_null()) r.upper_measure = measure_from_json(j.at("upper_measure"));
        r.upper_measure_z = number_from_json(j.at("upper_measure_z"));
        r.lower_existence = existence_from_json(j.at("lower_existence"));
        r.upper_existence = existence_from_json(j.at("upper_existence"));
        r.tail_calls_added = number_from_json(j.at("tail_calls_added"));
        if (const auto& q = j.at("quote"); !q.is_null())
            r.quote = QuoteInfo{q.at("unit").get<std::string>(), number_from_json(q.at("input")),
                                number_from_json(q.at("swap_rate")), number_from_json(q.at("european_price"))};
        if (!j.at("verdict").is_null()) r.verdict = verdict_from_json(j.at("verdict"));
        r.swap_only_equivalence_unverified = j.at("swap_only_equivalence_unverified").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Parse, std::string("bounds report: ") + e.what());
    }
    return r;
}

Json to_json(const PathcheckReport& r) {
    Json j;
    j["function"] = r.function;
    j["source"] = r.source;
    j["depth"] = r.depth;
    j["steps"] = r.steps;
    j["seed"] = r.seed ? Json(*r.seed) : Json(nullptr);
    j["interval"] = {number_to_json(r.interval_lo), number_to_json(r.interval_hi)};
    Json levels = Json::array();
    for (const auto& s : r.levels) {
        Json l;
        l["stride"] = s.stride;
        l["mesh"] = number_to_json(s.mesh);
        l["quadratic_variation"] = number_to_json(s.quadratic_variation);
        l["residual_square"] = number_to_json(s.residual_square);
        l["residual"] = number_to_json(s.residual);
        l["occupation_lhs"] = number_to_json(s.occupation_lhs);
        l["occupation_rhs"] = number_to_json(s.occupation_rhs);
        l["occupation_gap"] = number_to_json(s.occupation_gap);
        l["log_transform_discrepancy"] =
            s.log_transform_discrepancy ? number_to_json(*s.log_transform_discrepancy) : Json(nullptr);
        levels.push_back(l);
    }
    j["levels"] = levels;
    j["square_identity"] = r.square_identity;
    j["residual_decreasing"] = r.residual_decreasing;
    j["occupation_decreasing"] = r.occupation_decreasing;
    j["occupation_within_5pct"] = r.occupation_within_5pct;
    j["transform_halves"] = r.transform_halves ? Json(*r.transform_halves) : Json(nullptr);
    j["pass"] = r.pass;
    return j;
}

PathcheckReport pathcheck_report_from_json(const Json& j) {
    PathcheckReport r;
    try {
        r.function = j.at("function").get<std::string>();
        r.source = j.at("source").get<std::string>();
        r.depth = j.at("depth").get<std::size_t>();
        r.steps = j.at("steps").get<std::size_t>();
        if (!j.at("seed").is_null()) r.seed = j.at("seed").get<std::uint64_t>();
        r.interval_lo = number_from_json(j.at("interval").at(0));
        r.interval_hi = number_from_json(j.at("interval").at(1));
        for (const auto& l : j.at("levels")) {
            LevelStats s;
            s.stride = l.at("stride").get<std::size_t>();
            s.mesh = number_from_json(l.at("mesh"));
            s.quadratic_variation = number_from_json(l.at("quadratic_variation"));
            s.residual_square = number_from_json(l.at("residual_square"));
            s.residual = number_from_json(l.at("residual"));
            s.occupation_lhs = number_from_json(l.at("occupation_lhs"));
            s.occupation_rhs = number_from_json(l.at("occupation_rhs"));
            s.occupation_gap = number_from_json(l.at("occupation_gap"));
            if (!l.at("log_transform_discrepancy").is_null())
                s.log_transform_discrepancy = number_from_json(l.at("log_transform_discrepancy"));
            r.levels.push_back(s);
        }
        r.square_identity = j.at("square_identity").get<bool>();
        r.residual_decreasing = j.at("residual_decreasing").get<bool>();
        r.occupation_decreasing = j.at("occupation_decreasing").get<bool>();
        r.occupation_within_5pct = j.at("occupation_within_5pct").get<bool>();
        if (!j.at("transform_halves").is_null()) r.transform_halves = j.at("transform_halves").get<bool>();
        r.pass = j.at("pass").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Parse, std::string("pathcheck report: ") + e.what());
    }
    return r;
}

namespace {

std::string fmt(double x, int prec = 6) {
    if (std::isinf(x)) return x > 0 ? "+inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(prec) << x;
    return os.str();
}

void portfolio_text(std::ostream& os, const char* name, const HedgePortfolio& h) {
    os << name << ": cash(PV) " << fmt(h.cash) << ", forward " << fmt(h.forward) << "\n";
    for (std::size_t i = 0; i < h.strikes.size(); ++i)
        if (h.puts[i] != 0.0) os << "    put K=" << fmt(h.strikes[i]) << "  x " << fmt(h.puts[i]) << "\n";
}

void measure_text(std::ostream& os, const char* name, const AtomicMeasure& mu) {
    os << name << ":";
    for (std::size_t i = 0; i < mu.size(); ++i) os << " " << fmt(mu.atoms[i]) << "@" << fmt(mu.weights[i]);
    if (mu.escaped_forward != 0.0) os << " (escaped forward " << fmt(mu.escaped_forward) << ")";
    os << "\n";
}

void side_text(std::ostream& os, const char* name, const BoundSide& s) {
    os << name << ": ";
    if (!s.available) {
        os << fmt(s.value) << "\n";
        return;
    }
    os << fmt(s.value) << " normalized, " << fmt(s.currency) << " currency, swap rate " << fmt(s.swap_rate);
    if (s.vol_points) os << " (" << fmt(*s.vol_points, 4) << " vol pts)";
    os << "\n";
}

}  // namespace

std::string render_text(const BoundsReport& r) {
    std::ostringstream os;
    os << "payoff: " << r.payoff << " [" << r.payoff_kind << "]\n";
    os << "chain: " << to_string(r.chain.status);
    if (!r.chain.witness.empty()) os << " (" << r.chain.witness << ")";
    os << "\n";
    if (!r.chain.consistent()) return os.str();
    if (!r.c1) os << "payoff unbounded at 0 with a flat first put slope: lower bound is +inf\n";
    side_text(os, "lower", r.lower);
    if (!r.lower_method.empty()) os << "  method " << r.lower_method << ", dual existence "
                                    << to_string(r.lower_existence.status) << " (" << r.lower_existence.condition
                                    << ")\n";
    if (r.tail_calls_added != 0.0) os << "  tail calls added " << fmt(r.tail_calls_added) << "\n";
    side_text(os, "upper", r.upper);
    if (!r.upper_note.empty()) os << "  " << r.upper_note << "\n";
    os << "  dual existence " << to_string(r.upper_existence.status) << " (" << r.upper_existence.condition
       << ")\n";
    if (r.subhedge) portfolio_text(os, "subhedge", *r.subhedge);
    if (r.superhedge) portfolio_text(os, "superhedge", *r.superhedge);
    if (r.lower_measure) measure_text(os, "lower measure", *r.lower_measure);
    if (r.upper_measure) measure_text(os, "upper measure", *r.upper_measure);
    if (r.quote) {
        os << "quote: " << fmt(r.quote->input) << " " << r.quote->unit << " (swap rate " << fmt(r.quote->swap_rate)
           << ", European " << fmt(r.quote->european_price) << ")\n";
    }
    if (r.verdict) os << "verdict: " << describe(*r.verdict) << "\n";
    if (r.swap_only_equivalence_unverified && r.quote)
        os << "note: the verdict assumes the matching European is traded alongside the swap\n";
    return os.str();
}

std::string render_text(const PathcheckReport& r) {
    std::ostringstream os;
    os << "pathcheck " << r.function << " on " << r.source << ", " << r.steps << " steps, depth " << r.depth;
    if (r.seed) os << ", seed " << *r.seed;
    os << "\noccupation interval [" << fmt(r.interval_lo) << ", " << fmt(r.interval_hi) << "]\n";
    os << "stride        mesh          QV    res(x^2)    residual    occ gap   log-transform\n";
    for (const auto& s : r.levels) {
        os << std::setw(6) << s.stride << std::setw(12) << fmt(s.mesh, 4) << std::setw(12)
           << fmt(s.quadratic_variation, 6) << std::setw(12) << fmt(s.residual_square, 3) << std::setw(12)
           << fmt(s.residual, 4) << std::setw(11) << fmt(s.occupation_gap, 3) << std::setw(16)
           << (s.log_transform_discrepancy ? fmt(*s.log_transform_discrepancy, 4) : std::string("-")) << "\n";
    }
    auto yn = [](bool b) { return b ? "yes" : "no"; };
    os << "x^2 identity " << yn(r.square_identity) << ", residual decreasing " << yn(r.residual_decreasing)
       << ", occupation gap decreasing " << yn(r.occupation_decreasing) << ", finest gap < 5% "
       << yn(r.occupation_within_5pct);
    if (r.transform_halves) os << ", log transform halves " << yn(*r.transform_halves);
    os << "\n" << (r.pass ? "PASS" : "FAIL") << "\n";
    return os.str();
}

void write_bounds_plot_csv(std::ostream& out, const NormalizedChain& c, const ConvexPayoff& payoff,
                           const BoundsReport& r, std::size_t points) {
    const double lo = grid_floor(c);
    const double hi = 3.0 * c.k[c.n()];
    const auto xs = log_grid(lo, hi, points);
    out << "strike,payoff,subhedge,superhedge\n" << std::setprecision(12);
    for (double x : xs) {
        const double s = x * c.forward;
        out << s << "," << c.forward * payoff(x) << ",";
        if (r.subhedge) out << r.subhedge->payoff(s, c.discount);
        out << ",";
        if (r.superhedge) out << r.superhedge->payoff(s, c.discount);
        out << "\n";
    }
}

void write_local_time_plot_csv(std::ostream& out, const SampledPath& path) {
    const auto prof = discrete_local_time(path, 1, level_grid(path.values));
    out << "level,local_time\n" << std::setprecision(12);
    for (std::size_t i = 0; i < prof.levels.size(); ++i) out << prof.levels[i] << "," << prof.values[i] << "\n";
}

}  // namespace varbounds
