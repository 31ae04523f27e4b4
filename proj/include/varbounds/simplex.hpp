#pragma once

#include <cstddef>
#include <vector>

namespace varbounds {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };
const char* to_string(LpStatus s);

// Dense standard-form program: minimize c'z subject to A z = b, z >= 0.
// A is stored column-major: column j occupies a[j*rows .. j*rows + rows).
struct StandardFormLp {
    std::size_t rows = 0;
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> c;

    std::size_t cols() const { return c.size(); }
    void add_column(const std::vector<double>& column, double cost);
};

struct LpResult {
    LpStatus status = LpStatus::IterationLimit;
    double objective = 0.0;
    std::vector<double> z;  // primal, one per column
    std::vector<double> y;  // multipliers: y'A_j <= c_j at optimum, b'y = objective
    std::size_t iterations = 0;
};

// Two-phase revised simplex with an explicit basis inverse, periodic
// refactorization, Dantzig pricing and a Bland fallback against cycling.
LpResult solve_lp(const StandardFormLp& lp, std::size_t max_iterations = 100000);

}  // namespace varbounds
