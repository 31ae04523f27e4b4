#include "varbounds/chain.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>

#include "varbounds/error.hpp"

namespace varbounds {

const char* to_string(ChainStatus s) {
    switch (s) {
        case ChainStatus::Consistent: return "Consistent";
        case ChainStatus::WeakArbitrage: return "WeakArbitrage";
        case ChainStatus::ModelIndependentArbitrage: return "ModelIndependentArbitrage";
    }
    return "Unknown";
}

namespace {

void fill_indices(NormalizedChain& c) {
    const std::size_t n = c.n();
    c.n_min = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (std::abs(c.p[i]) <= kChainTol) c.n_min = i;
    c.n_max = kInfIndex;
    for (std::size_t i = 1; i <= n; ++i) {
        if (std::abs(c.p[i] - (c.k[i] - 1.0)) <= kChainTol) {
            c.n_max = i;
            break;
        }
    }
}

}  // namespace

NormalizedChain make_normalized(const std::vector<double>& k, const std::vector<double>& p) {
    require(!k.empty() && k.size() == p.size(), ErrorCode::InvalidInput,
            "need n >= 1 strikes with one price each");
    NormalizedChain c;
    c.k.reserve(k.size() + 1);
    c.p.reserve(p.size() + 1);
    c.k.push_back(0.0);
    c.p.push_back(0.0);
    for (std::size_t i = 0; i < k.size(); ++i) {
        require(std::isfinite(k[i]) && std::isfinite(p[i]), ErrorCode::InvalidInput,
                "non-finite strike or price");
        require(k[i] > c.k.back(), ErrorCode::InvalidInput,
                "strikes must be positive and strictly increasing");
        c.k.push_back(k[i]);
        c.p.push_back(p[i]);
    }
    fill_indices(c);
    return c;
}

NormalizedChain normalize(const OptionChain& chain) {
    require(chain.forward > 0.0 && std::isfinite(chain.forward), ErrorCode::InvalidInput,
            "forward must be positive");
    require(chain.discount > 0.0 && chain.discount <= 1.0, ErrorCode::InvalidInput,
            "discount factor must lie in (0, 1]");
    require(chain.maturity > 0.0, ErrorCode::InvalidInput, "maturity must be positive");
    require(chain.strikes.size() == chain.put_prices.size(), ErrorCode::InvalidInput,
            "strike/price length mismatch");
    std::vector<double> k(chain.strikes.size()), p(chain.strikes.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
        k[i] = chain.strikes[i] / chain.forward;
        p[i] = chain.put_prices[i] / (chain.discount * chain.forward);
    }
    NormalizedChain c = make_normalized(k, p);
    c.forward = chain.forward;
    c.discount = chain.discount;
    c.maturity = chain.maturity;
    return c;
}

OptionChain denormalize(const NormalizedChain& c) {
    OptionChain out;
    out.forward = c.forward;
    out.discount = c.discount;
    out.maturity = c.maturity;
    for (std::size_t i = 1; i <= c.n(); ++i) {
        out.strikes.push_back(c.k[i] * c.forward);
        out.put_prices.push_back(c.p[i] * c.discount * c.forward);
    }
    return out;
}

ChainVerdict validate_puts(const NormalizedChain& c) {
    const std::size_t n = c.n();
    auto mia = [](std::string w) { return ChainVerdict{ChainStatus::ModelIndependentArbitrage, std::move(w)}; };
    std::ostringstream os;
    for (std::size_t i = 1; i <= n; ++i) {
        if (c.p[i] < -kChainTol) {
            os << "negative put price at k=" << c.k[i];
            return mia(os.str());
        }
        if (c.p[i] < c.k[i] - 1.0 - kChainTol) {
            os << "r(" << c.k[i] << ")=" << c.p[i] << " below intrinsic " << c.k[i] - 1.0;
            return mia(os.str());
        }
    }
    double prev = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double s = c.slope(i);
        if (s < -kChainTol) {
            os << "r decreasing on [" << c.k[i - 1] << "," << c.k[i] << "]";
            return mia(os.str());
        }
        if (i > 1 && s < prev - kChainTol) {
            os << "r not convex at k=" << c.k[i - 1];
            return mia(os.str());
        }
        // A slope above one means a put spread costs more than its maximal payoff.
        if (s > 1.0 + kChainTol) {
            os << "slope " << s << " > 1 on [" << c.k[i - 1] << "," << c.k[i] << "]";
            return mia(os.str());
        }
        prev = s;
    }
    const std::size_t m = c.last_informative();
    const double left = c.slope(m);
    if (left >= 1.0 - kChainTol) {
        os << "left slope of r at k=" << c.k[m] << " equals 1";
        if (!c.n_max_finite()) return {ChainStatus::WeakArbitrage, os.str()};
        return mia(os.str());
    }
    return {ChainStatus::Consistent, ""};
}

BoundaryIndices boundary_indices(const NormalizedChain& c) { return {c.n_min, c.n_max}; }

double NormalizedChain::interpolant(double x) const {
    const std::size_t n = this->n();
    if (x <= 0.0) return 0.0;
    if (x >= k[n]) return p[n] + (x - k[n]);
    const auto it = std::upper_bound(k.begin(), k.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - k.begin());
    const double t = (x - k[i - 1]) / (k[i] - k[i - 1]);
    return p[i - 1] + t * (p[i] - p[i - 1]);
}

double interpolant_r(const NormalizedChain& c, double k) { return c.interpolant(k); }

namespace {

std::string trim(std::string s) {
    const auto ws = [](unsigned char ch) { return std::isspace(ch) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
    return s;
}

double parse_number(const std::string& field, const std::string& where) {
    const std::string t = trim(field);
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v))
        fail(ErrorCode::Parse, where + ": not a number: '" + t + "'");
    return v;
}

}  // namespace

OptionChain read_chain_csv(std::istream& in, double forward, double discount, double maturity,
                           const std::string& source) {
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    std::vector<std::pair<double, double>> rows;
    std::vector<std::size_t> row_lines;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        const std::string where = source + ":" + std::to_string(lineno);
        if (!header) {
            std::string h;
            for (char ch : t)
                if (!std::isspace(static_cast<unsigned char>(ch))) h += ch;
            if (h.rfind("\xEF\xBB\xBF", 0) == 0) h = h.substr(3);
            require(h == "strike,put_price", ErrorCode::Parse,
                    where + ": expected header 'strike,put_price'");
            header = true;
            continue;
        }
        const auto comma = t.find(',');
        require(comma != std::string::npos && t.find(',', comma + 1) == std::string::npos,
                ErrorCode::Parse, where + ": expected two comma-separated fields");
        const double k = parse_number(t.substr(0, comma), where);
        const double p = parse_number(t.substr(comma + 1), where);
        require(k > 0.0, ErrorCode::Parse, where + ": strike must be positive");
        require(p >= 0.0, ErrorCode::Parse, where + ": put price must be nonnegative");
        rows.emplace_back(k, p);
        row_lines.push_back(lineno);
    }
    require(header, ErrorCode::Parse, source + ": empty input");
    require(!rows.empty(), ErrorCode::Parse, source + ": no option rows");
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rows[a].first < rows[b].first; });
    OptionChain chain;
    chain.forward = forward;
    chain.discount = discount;
    chain.maturity = maturity;
    for (std::size_t j = 0; j < order.size(); ++j) {
        const auto& r = rows[order[j]];
        if (j > 0 && r.first == chain.strikes.back())
            fail(ErrorCode::Parse, source + ":" + std::to_string(row_lines[order[j]]) +
                                       ": duplicate strike " + trim(std::to_string(r.first)));
        chain.strikes.push_back(r.first);
        chain.put_prices.push_back(r.second);
    }
    return chain;
}

OptionChain read_chain_csv_file(const std::string& path, double forward, double discount,
                                double maturity) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::InvalidInput, "cannot open " + path);
    return read_chain_csv(in, forward, discount, maturity, path);
}

}  // namespace varbounds
