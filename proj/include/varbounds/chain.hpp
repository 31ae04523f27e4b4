#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace varbounds {

// Absolute tolerance for equality tests on normalized quantities.
inline constexpr double kChainTol = 1e-12;
inline constexpr std::size_t kInfIndex = std::numeric_limits<std::size_t>::max();

struct OptionChain {
    double maturity = 1.0;
    double discount = 1.0;
    double forward = 1.0;
    std::vector<double> strikes;
    std::vector<double> put_prices;
};

struct NormalizedChain {
    std::vector<double> k;  // k[0] = 0
    std::vector<double> p;  // p[0] = 0
    std::size_t n_min = 0;
    std::size_t n_max = kInfIndex;  // kInfIndex when no strike sits on the ceiling

    // Market scale kept so portfolios can be reported in currency.
    double forward = 1.0;
    double discount = 1.0;
    double maturity = 1.0;

    std::size_t n() const { return k.size() - 1; }
    bool n_max_finite() const { return n_max != kInfIndex; }
    // Index of the last strike that carries information, n ∧ n_max.
    std::size_t last_informative() const { return n_max_finite() && n_max < n() ? n_max : n(); }
    // Slope of r on [k_{i-1}, k_i], i = 1..n.
    double slope(std::size_t i) const { return (p[i] - p[i - 1]) / (k[i] - k[i - 1]); }
    double interpolant(double x) const;
};

enum class ChainStatus { Consistent, WeakArbitrage, ModelIndependentArbitrage };

struct ChainVerdict {
    ChainStatus status = ChainStatus::Consistent;
    std::string witness;
    bool consistent() const { return status == ChainStatus::Consistent; }
};

const char* to_string(ChainStatus s);

// Builds a normalized chain directly from k_1..k_n and p_1..p_n (origin prepended).
NormalizedChain make_normalized(const std::vector<double>& k, const std::vector<double>& p);

NormalizedChain normalize(const OptionChain& chain);
OptionChain denormalize(const NormalizedChain& nchain);

ChainVerdict validate_puts(const NormalizedChain& nchain);

struct BoundaryIndices {
    std::size_t n_min;
    std::size_t n_max;
};
BoundaryIndices boundary_indices(const NormalizedChain& nchain);

double interpolant_r(const NormalizedChain& nchain, double k);

// CSV with header `strike,put_price`; rows may come in any order.
OptionChain read_chain_csv(std::istream& in, double forward, double discount, double maturity,
                           const std::string& source = "<input>");
OptionChain read_chain_csv_file(const std::string& path, double forward, double discount,
                                double maturity);

}  // namespace varbounds
