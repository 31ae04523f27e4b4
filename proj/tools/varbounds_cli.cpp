// varbounds: model-free bounds for convex payoffs and weighted variance swaps
// from a put chain, quote classification, and pathwise Ito checks.
//
// Exit status: 0 consistent, 2 arbitrage, 1 input error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "varbounds/chain.hpp"
#include "varbounds/error.hpp"
#include "varbounds/pathwise.hpp"
#include "varbounds/report.hpp"
#include "varbounds/swap.hpp"

using namespace varbounds;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitArbitrage = 2;

struct ChainArgs {
    std::string input;
    double forward = 0.0;
    double discount = 0.0;
    double maturity = 0.0;
    std::string weight = "vanilla";
    std::optional<double> quote_volpts;
    std::optional<double> quote_var;
    std::size_t grid = 200;
    std::string format = "json";
    std::string plot_csv;
};

struct PathArgs {
    std::string input;
    std::optional<std::uint64_t> seed;
    std::size_t depth = 6;
    std::size_t steps = kDefaultWalkSteps;
    double sigma = 1.0;
    std::string function = "vanilla";
    std::string format = "json";
    std::string plot_csv;
};

void add_chain_options(CLI::App* app, ChainArgs& a) {
    app->add_option("--input", a.input, "put chain CSV (strike,put_price)")->required()->check(CLI::ExistingFile);
    app->add_option("--forward", a.forward, "forward price F_T")->required()->check(CLI::PositiveNumber);
    app->add_option("--discount", a.discount, "discount factor D_T")->required()->check(CLI::Range(0.0, 1.0));
    app->add_option("--maturity", a.maturity, "maturity T in years")->required()->check(CLI::PositiveNumber);
    app->add_option("--weight", a.weight,
                    "vanilla | gamma | corridor-down:<a> | corridor-up:<a> | custom[:<a>:<b>]")
        ->capture_default_str();
    auto* v = app->add_option("--quote-volpts", a.quote_volpts, "quoted swap rate in vol points");
    auto* q = app->add_option("--quote-var", a.quote_var, "quoted swap rate in variance units");
    v->excludes(q);
    app->add_option("--grid", a.grid, "DP grid resolution")->capture_default_str()->check(CLI::Range(4, 100000));
    app->add_option("--format", a.format, "json | text")
        ->capture_default_str()
        ->check(CLI::IsMember({"json", "text"}));
    app->add_option("--plot-csv", a.plot_csv, "write strike, payoff, subhedge, superhedge columns to this file");
}

int chain_exit(const BoundsReport& r) {
    if (!r.chain.consistent() || !r.c1) return kExitArbitrage;
    if (r.verdict && is_arbitrage(*r.verdict)) return kExitArbitrage;
    return kExitOk;
}

int run_bounds(const ChainArgs& a, bool need_quote) {
    require(!need_quote || a.quote_volpts || a.quote_var, ErrorCode::InvalidInput,
            "classify needs --quote-volpts or --quote-var");
    const OptionChain chain = read_chain_csv_file(a.input, a.forward, a.discount, a.maturity);
    const NormalizedChain c = normalize(chain);
    const ConvexPayoff payoff = parse_payoff(a.weight);
    BoundsOptions o;
    o.dp.grid = a.grid;
    o.quote_volpts = a.quote_volpts;
    o.quote_variance = a.quote_var;
    const BoundsReport r = bounds_report(c, payoff, o);
    if (a.format == "json") {
        Json j = to_json(r);
        j["input"] = {{"file", a.input},
                      {"forward", number_to_json(a.forward)},
                      {"discount", number_to_json(a.discount)},
                      {"maturity", number_to_json(a.maturity)},
                      {"strikes", c.n()}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << render_text(r);
    }
    if (!a.plot_csv.empty()) {
        std::ofstream out(a.plot_csv);
        require(static_cast<bool>(out), ErrorCode::InvalidInput, "cannot write " + a.plot_csv);
        write_bounds_plot_csv(out, c, payoff, r);
    }
    return chain_exit(r);
}

int run_published(double quote, double lower, const std::string& format) {
    const PriceVerdict v = classify_against_published_lower(quote, lower);
    if (format == "json") {
        Json j;
        j["quote_volpts"] = number_to_json(quote);
        j["lower_volpts"] = number_to_json(lower);
        j["verdict"] = to_json(v);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "quote " << quote << " vs lower bound " << lower << " vol pts: " << describe(v) << "\n";
    }
    return is_arbitrage(v) ? kExitArbitrage : kExitOk;
}

ItoFunction pick_function(const std::string& name) {
    if (name == "square") return square_function();
    if (name == "cube") return cube_function();
    if (name == "neg-log" || name == "-ln") return function_from_payoff(parse_payoff("vanilla"));
    return function_from_payoff(parse_payoff(name));
}

int run_path(const PathArgs& a) {
    const ItoFunction f = pick_function(a.function);
    SampledPath path;
    std::string source;
    if (!a.input.empty()) {
        path = read_path_csv_file(a.input);
        source = a.input;
    } else {
        path = geometric_walk(a.seed.value_or(42), a.steps, a.sigma);
        source = "geometric walk";
    }
    PathcheckReport r = run_pathcheck(path, f, a.depth);
    r.source = source;
    if (a.input.empty()) r.seed = a.seed.value_or(42);
    if (a.format == "json")
        std::cout << to_json(r).dump(2) << "\n";
    else
        std::cout << render_text(r);
    if (!a.plot_csv.empty()) {
        std::ofstream out(a.plot_csv);
        require(static_cast<bool>(out), ErrorCode::InvalidInput, "cannot write " + a.plot_csv);
        write_local_time_plot_csv(out, path);
    }
    return r.pass ? kExitOk : kExitArbitrage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Model-free option and variance swap bounds from a put chain"};
    app.require_subcommand(1);

    ChainArgs bounds_args;
    auto* bounds = app.add_subcommand("bounds", "price bounds, hedges and dual measures");
    add_chain_options(bounds, bounds_args);

    ChainArgs classify_args;
    std::optional<double> lb_volpts;
    auto* classify = app.add_subcommand("classify", "classify a quoted swap rate against the bounds");
    classify->add_option("--input", classify_args.input, "put chain CSV (strike,put_price)")
        ->check(CLI::ExistingFile);
    classify->add_option("--forward", classify_args.forward)->check(CLI::PositiveNumber);
    classify->add_option("--discount", classify_args.discount)->check(CLI::Range(0.0, 1.0));
    classify->add_option("--maturity", classify_args.maturity)->check(CLI::PositiveNumber);
    classify->add_option("--weight", classify_args.weight)->capture_default_str();
    auto* cv = classify->add_option("--quote-volpts", classify_args.quote_volpts, "quoted swap rate in vol points");
    auto* cq = classify->add_option("--quote-var", classify_args.quote_var, "quoted swap rate in variance units");
    cv->excludes(cq);
    classify->add_option("--grid", classify_args.grid)->capture_default_str()->check(CLI::Range(4, 100000));
    classify->add_option("--format", classify_args.format)->check(CLI::IsMember({"json", "text"}));
    classify->add_option("--plot-csv", classify_args.plot_csv);
    auto* lb = classify->add_option("--lb-volpts", lb_volpts,
                                    "vanilla lower bound in vol points, used instead of a chain");
    lb->excludes("--input")->needs(cv);

    PathArgs path_args;
    auto* path = app.add_subcommand("pathcheck", "pathwise Ito, occupation density and local time checks");
    path->add_option("--input", path_args.input, "path CSV (time,value)")->check(CLI::ExistingFile);
    path->add_option("--seed", path_args.seed, "seed for the built-in geometric walk (default 42)");
    path->add_option("--depth", path_args.depth, "number of dyadic ladder levels")->capture_default_str();
    path->add_option("--steps", path_args.steps, "walk steps")->capture_default_str();
    path->add_option("--sigma", path_args.sigma, "walk volatility")->capture_default_str();
    path->add_option("--function", path_args.function,
                     "square | cube | neg-log | any weight spec accepted by --weight")
        ->capture_default_str();
    path->add_option("--format", path_args.format)->capture_default_str()->check(CLI::IsMember({"json", "text"}));
    path->add_option("--plot-csv", path_args.plot_csv, "write level, local_time columns to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*bounds) return run_bounds(bounds_args, false);
        if (*classify) {
            if (lb_volpts) return run_published(*classify_args.quote_volpts, *lb_volpts, classify_args.format);
            require(!classify_args.input.empty(), ErrorCode::InvalidInput,
                    "classify needs --input or --lb-volpts");
            require(classify_args.forward > 0.0, ErrorCode::InvalidInput, "--forward is required");
            require(classify_args.discount > 0.0, ErrorCode::InvalidInput, "--discount is required");
            require(classify_args.maturity > 0.0, ErrorCode::InvalidInput, "--maturity is required");
            return run_bounds(classify_args, true);
        }
        return run_path(path_args);
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
}
