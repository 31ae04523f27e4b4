#include "varbounds/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "varbounds/error.hpp"
#include "varbounds/kernels.hpp"

namespace varbounds {

double HedgePortfolio::payoff(double x, double discount) const {
    double v = (units == Units::Currency ? cash / discount : cash) + forward * x;
    for (std::size_t i = 0; i < strikes.size(); ++i) v += puts[i] * std::max(strikes[i] - x, 0.0);
    return v;
}

void HedgePortfolio::payoff_many(const std::vector<double>& xs, std::vector<double>& out,
                                 double discount) const {
    out.resize(xs.size());
    const double c = units == Units::Currency ? cash / discount : cash;
    kernels::active().put_portfolio(c, forward, strikes.data(), puts.data(), strikes.size(),
                                    xs.data(), xs.size(), out.data());
}

double HedgePortfolio::cost(const std::vector<double>& prices, double forward_price) const {
    double v = cash + forward * forward_price;
    for (std::size_t i = 0; i < puts.size(); ++i) v += puts[i] * prices[i];
    return v;
}

HedgePortfolio HedgePortfolio::zero(const NormalizedChain& c) {
    HedgePortfolio h;
    h.strikes.assign(c.k.begin() + 1, c.k.end());
    h.puts.assign(c.n(), 0.0);
    return h;
}

HedgePortfolio HedgePortfolio::from_nodes(const NormalizedChain& c, const std::vector<double>& v,
                                          double tail) {
    const std::size_t n = c.n();
    require(v.size() == n + 1, ErrorCode::InvalidInput, "node values must cover k_0..k_n");
    HedgePortfolio h = zero(c);
    h.forward = tail;
    h.cash = v[n] - tail * c.k[n];
    for (std::size_t i = 1; i <= n; ++i) {
        const double left = (v[i] - v[i - 1]) / (c.k[i] - c.k[i - 1]);
        const double right = i == n ? tail : (v[i + 1] - v[i]) / (c.k[i + 1] - c.k[i]);
        h.puts[i - 1] = right - left;
    }
    return h;
}

double normalized_cost(const NormalizedChain& c, const HedgePortfolio& h) {
    require(h.units == Units::Normalized, ErrorCode::InvalidInput, "expected normalized portfolio");
    return h.cost(std::vector<double>(c.p.begin() + 1, c.p.end()), 1.0);
}

HedgePortfolio to_currency(const NormalizedChain& c, const HedgePortfolio& h) {
    if (h.units == Units::Currency) return h;
    HedgePortfolio out = h;
    out.units = Units::Currency;
    out.cash = c.discount * c.forward * h.cash;
    for (auto& k : out.strikes) k *= c.forward;
    return out;
}

HedgePortfolio to_normalized(const NormalizedChain& c, const HedgePortfolio& h) {
    if (h.units == Units::Normalized) return h;
    HedgePortfolio out = h;
    out.units = Units::Normalized;
    out.cash = h.cash / (c.discount * c.forward);
    for (auto& k : out.strikes) k /= c.forward;
    return out;
}

HedgePortfolio add_call(const HedgePortfolio& h, std::size_t strike_index, double theta) {
    require(h.units == Units::Normalized, ErrorCode::InvalidInput, "expected normalized portfolio");
    HedgePortfolio out = h;
    out.puts[strike_index] += theta;
    out.forward += theta;
    out.cash -= theta * h.strikes[strike_index];
    return out;
}

double AtomicMeasure::mass() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

double AtomicMeasure::mean() const {
    double s = 0.0;
    for (std::size_t j = 0; j < atoms.size(); ++j) s += weights[j] * atoms[j];
    return s;
}

double AtomicMeasure::put_price(double k) const {
    double s = 0.0;
    for (std::size_t j = 0; j < atoms.size(); ++j) s += weights[j] * std::max(k - atoms[j], 0.0);
    return s;
}

double AtomicMeasure::integrate(const std::function<double(double)>& f) const {
    double s = 0.0;
    for (std::size_t j = 0; j < atoms.size(); ++j)
        if (weights[j] != 0.0) s += weights[j] * f(atoms[j]);
    return s;
}

MeasureCheck check_measure(const NormalizedChain& c, const AtomicMeasure& mu, double mass_tol,
                           double moment_tol) {
    MeasureCheck r;
    std::ostringstream os;
    r.mass_error = std::abs(mu.mass() - 1.0);
    r.forward_error = std::abs(mu.mean() + mu.escaped_forward - 1.0);
    for (std::size_t i = 1; i <= c.n(); ++i)
        r.put_error = std::max(r.put_error, std::abs(mu.put_price(c.k[i]) - c.p[i]));
    std::vector<int> count(c.n() + 1, 0);
    for (std::size_t j = 0; j < mu.size(); ++j) {
        if (mu.atoms[j] < 0.0 || mu.weights[j] < -mass_tol) {
            r.ok = false;
            os << "negative atom or weight; ";
        }
        if (mu.weights[j] <= 0.0) continue;
        const auto it = std::upper_bound(c.k.begin(), c.k.end(), mu.atoms[j]);
        const std::size_t interval = static_cast<std::size_t>(it - c.k.begin()) - 1;
        if (++count[interval] > 1) r.one_atom_per_interval = false;
    }
    if (r.mass_error > mass_tol) os << "mass off by " << r.mass_error << "; ";
    if (r.forward_error > moment_tol) os << "forward off by " << r.forward_error << "; ";
    if (r.put_error > moment_tol) os << "puts off by " << r.put_error << "; ";
    if (!r.one_atom_per_interval) os << "two atoms in one interval; ";
    r.ok = r.ok && r.mass_error <= mass_tol && r.forward_error <= moment_tol &&
           r.put_error <= moment_tol && r.one_atom_per_interval;
    r.detail = os.str();
    return r;
}

}  // namespace varbounds
