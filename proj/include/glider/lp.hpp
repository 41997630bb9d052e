#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace glider {

enum class Relation { le, ge, eq };

struct LinConstraint {
    std::vector<double> coeffs;  // one entry per variable
    Relation rel = Relation::le;
    double rhs = 0.0;

    double lhs(std::span<const double> x) const;
    // Amount by which x violates the constraint; 0 when satisfied.
    double violation(std::span<const double> x) const;
};

// Bounded variables lo <= x <= hi together with linear rows.
struct LpProblem {
    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<LinConstraint> rows;

    std::size_t num_vars() const { return lo.size(); }
    void validate() const;
};

struct LpResult {
    bool feasible = false;
    std::vector<double> point;  // valid when feasible
    int pivots = 0;
    double max_residual = 0.0;
};

class LpCycling : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr double kLpTolerance = 1e-9;

// Phase-1 dense simplex with Bland's rule.
LpResult lp_feasible(const LpProblem& prob);

}  // namespace glider
