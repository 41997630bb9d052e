#include "glider/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace glider {

double LinConstraint::lhs(std::span<const double> x) const
{
    double s = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) s += coeffs[i] * x[i];
    return s;
}

double LinConstraint::violation(std::span<const double> x) const
{
    const double v = lhs(x);
    switch (rel) {
    case Relation::le: return std::max(0.0, v - rhs);
    case Relation::ge: return std::max(0.0, rhs - v);
    case Relation::eq: return std::abs(v - rhs);
    }
    return 0.0;
}

void LpProblem::validate() const
{
    if (lo.size() != hi.size()) throw std::invalid_argument("LpProblem: bound vectors differ in size");
    for (std::size_t j = 0; j < lo.size(); ++j) {
        if (!std::isfinite(lo[j]) || !std::isfinite(hi[j])) {
            throw std::invalid_argument("LpProblem: variable " + std::to_string(j) + " is unbounded");
        }
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].coeffs.size() != lo.size()) {
            throw std::invalid_argument("LpProblem: row " + std::to_string(i) + " has the wrong width");
        }
    }
}

namespace {

// Dense tableau for min sum(artificials) s.t. A y = b, y >= 0, b >= 0.
class Tableau {
public:
    Tableau(std::size_t m, std::size_t n) : m_(m), n_(n), a_((m + 1) * (n + 1), 0.0), basis_(m, 0) {}

    double& at(std::size_t r, std::size_t c) { return a_[r * (n_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return a_[r * (n_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, n_); }
    double& cost(std::size_t c) { return at(m_, c); }  // reduced costs; cost(n_) is -objective
    std::size_t& basis(std::size_t r) { return basis_[r]; }
    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }

    void pivot(std::size_t pr, std::size_t pc)
    {
        const double inv = 1.0 / at(pr, pc);
        for (std::size_t c = 0; c <= n_; ++c) at(pr, c) *= inv;
        at(pr, pc) = 1.0;
        for (std::size_t r = 0; r <= m_; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c <= n_; ++c) at(r, c) -= f * at(pr, c);
            at(r, pc) = 0.0;
        }
        basis_[pr] = pc;
    }

private:
    std::size_t m_;
    std::size_t n_;
    std::vector<double> a_;
    std::vector<std::size_t> basis_;
};

struct Row {
    std::vector<double> a;
    Relation rel;
    double b;
};

}  // namespace

LpResult lp_feasible(const LpProblem& prob)
{
    prob.validate();
    const std::size_t nv = prob.num_vars();
    for (std::size_t j = 0; j < nv; ++j) {
        if (prob.lo[j] > prob.hi[j] + kLpTolerance) return {};
    }

    // Shift to y = x - lo so that y >= 0, and add y <= hi - lo rows.
    std::vector<Row> rows;
    rows.reserve(prob.rows.size() + nv);
    for (const auto& c : prob.rows) {
        double b = c.rhs;
        for (std::size_t j = 0; j < nv; ++j) b -= c.coeffs[j] * prob.lo[j];
        rows.push_back({c.coeffs, c.rel, b});
    }
    for (std::size_t j = 0; j < nv; ++j) {
        std::vector<double> a(nv, 0.0);
        a[j] = 1.0;
        rows.push_back({std::move(a), Relation::le, std::max(0.0, prob.hi[j] - prob.lo[j])});
    }
    for (auto& r : rows) {
        if (r.b < 0.0) {
            for (double& v : r.a) v = -v;
            r.b = -r.b;
            if (r.rel == Relation::le) {
                r.rel = Relation::ge;
            } else if (r.rel == Relation::ge) {
                r.rel = Relation::le;
            }
        }
    }

    // Columns: structural, then one slack/surplus per inequality, then artificials.
    const std::size_t m = rows.size();
    std::size_t n_slack = 0;
    std::size_t n_art = 0;
    for (const auto& r : rows) {
        if (r.rel != Relation::eq) ++n_slack;
        if (r.rel != Relation::le) ++n_art;
    }
    const std::size_t n = nv + n_slack + n_art;
    const std::size_t first_art = nv + n_slack;
    Tableau t(m, n);
    std::size_t next_slack = nv;
    std::size_t next_art = first_art;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < nv; ++j) t.at(i, j) = rows[i].a[j];
        t.rhs(i) = rows[i].b;
        switch (rows[i].rel) {
        case Relation::le:
            t.at(i, next_slack) = 1.0;
            t.basis(i) = next_slack++;
            break;
        case Relation::ge:
            t.at(i, next_slack++) = -1.0;
            t.at(i, next_art) = 1.0;
            t.basis(i) = next_art++;
            break;
        case Relation::eq:
            t.at(i, next_art) = 1.0;
            t.basis(i) = next_art++;
            break;
        }
    }
    // Phase-1 objective row: reduced costs of sum(artificials) after pricing out the basis.
    for (std::size_t i = 0; i < m; ++i) {
        if (t.basis(i) < first_art) continue;
        for (std::size_t c = 0; c <= n; ++c) {
            if (c < first_art || c == n) t.cost(c) -= t.at(i, c);
        }
    }

    // Scale-aware tolerance for the objective test.
    double scale = 1.0;
    for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, std::abs(t.rhs(i)));

    LpResult res;
    const int cap = static_cast<int>(50 * (m + n) + 1000);
    while (true) {
        std::size_t enter = n;
        for (std::size_t c = 0; c < n; ++c) {
            if (t.cost(c) < -kLpTolerance) {
                enter = c;
                break;
            }
        }
        if (enter == n) break;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < m; ++r) {
            if (t.at(r, enter) > kLpTolerance) best = std::min(best, t.rhs(r) / t.at(r, enter));
        }
        // Bland: among minimum-ratio rows, the lowest basic index leaves.
        std::size_t leave = m;
        for (std::size_t r = 0; r < m; ++r) {
            if (t.at(r, enter) <= kLpTolerance || t.rhs(r) / t.at(r, enter) > best + kLpTolerance) continue;
            if (leave == m || t.basis(r) < t.basis(leave)) leave = r;
        }
        if (leave == m) break;  // unbounded direction cannot occur in phase 1; stop defensively
        t.pivot(leave, enter);
        if (++res.pivots > cap) {
            throw LpCycling("lp_feasible: pivot limit " + std::to_string(cap) + " exceeded");
        }
    }

    const double objective = -t.cost(n);
    if (objective > kLpTolerance * scale) return res;

    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) y[t.basis(i)] = std::max(0.0, t.rhs(i));
    res.point.resize(nv);
    for (std::size_t j = 0; j < nv; ++j) res.point[j] = std::clamp(prob.lo[j] + y[j], prob.lo[j], prob.hi[j]);
    // Residuals are reported, not used to reject: callers replay points concretely.
    for (const auto& c : prob.rows) res.max_residual = std::max(res.max_residual, c.violation(res.point));
    res.feasible = true;
    return res;
}

}  // namespace glider
