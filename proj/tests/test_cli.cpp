#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(VARBOUNDS_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string fixture(const std::string& name) { return std::string(FIXTURES_DIR) + "/" + name; }

}  // namespace

TEST_CASE("cli bounds on a one-put chain") {
    const Run r = run("bounds --input " + fixture("one_put_p0.4.csv") +
                      " --forward 1 --discount 1 --maturity 1 --weight custom");
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["lower"]["value"].get<double>() == doctest::Approx(11.0 / 9.0).epsilon(1e-6));
    CHECK(j["input"]["strikes"] == 1);
}

TEST_CASE("cli classify") {
    CHECK(run("classify --lb-volpts 65.81 --quote-volpts 45.93").status == 2);
    CHECK(run("classify --lb-volpts 20 --quote-volpts 45.93").status == 0);
    const Run hi = run("classify --input " + fixture("one_put_p0.4.csv") +
                       " --forward 1 --discount 1 --maturity 1 --quote-volpts 500");
    CHECK(hi.status == 0);
    const Run lo = run("classify --input " + fixture("one_put_p0.4.csv") +
                       " --forward 1 --discount 1 --maturity 1 --quote-volpts 1");
    CHECK(lo.status == 2);
}

TEST_CASE("cli input errors") {
    CHECK(run("bounds --input " + fixture("one_put_p0.4.csv") + " --forward 1 --maturity 1").status == 1);
    CHECK(run("bounds --input /nonexistent.csv --forward 1 --discount 1 --maturity 1").status == 1);
    CHECK(run("bounds --input " + fixture("one_put_p0.4.csv") +
              " --forward 1 --discount 1 --maturity 1 --weight nonsense")
              .status == 1);
    CHECK(run("pathcheck --depth 1").status == 1);
    CHECK(run("").status == 1);
    CHECK(run("--help").status == 0);
}

TEST_CASE("cli pathcheck") {
    const Run r = run("pathcheck --seed 42");
    CHECK(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["pass"] == true);
    const Run flat = run("pathcheck --input " + fixture("constant_path.csv") + " --depth 5");
    CHECK(flat.status == 0);
    for (const auto& level : nlohmann::json::parse(flat.out)["levels"]) CHECK(level["residual"] == 0.0);
    CHECK(run("pathcheck --seed 42 --format text").out.find("PASS") != std::string::npos);
}
