#include "glider/zonotope.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace glider {

Zonotope Zonotope::point(const Eigen::VectorXd& c)
{
    return {c, Eigen::MatrixXd(c.size(), 0)};
}

Zonotope Zonotope::from_box(std::span<const Interval> box)
{
    const auto n = static_cast<Eigen::Index>(box.size());
    Zonotope z{Eigen::VectorXd(n), Eigen::MatrixXd::Zero(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const Interval& b = box[static_cast<std::size_t>(i)];
        z.center[i] = b.mid();
        // Round the radius up so the box is covered despite the midpoint rounding.
        z.generators(i, i) = detail::up(std::max(b.hi - z.center[i], z.center[i] - b.lo));
    }
    return zono_compact(z);
}

void Zonotope::validate() const
{
    if (generators.rows() != center.size()) throw std::invalid_argument("Zonotope: generator rows differ from dim");
    if (!center.allFinite() || !generators.allFinite()) throw std::invalid_argument("Zonotope: non-finite entry");
}

Zonotope zono_linear_map(const Eigen::MatrixXd& a, const Zonotope& z)
{
    if (a.cols() != z.center.size()) throw std::invalid_argument("zono_linear_map: dimension mismatch");
    return {a * z.center, a * z.generators};
}

Zonotope zono_minkowski(const Zonotope& a, const Zonotope& b)
{
    if (a.dim() != b.dim()) throw std::invalid_argument("zono_minkowski: dimension mismatch");
    Zonotope r{a.center + b.center, Eigen::MatrixXd(a.dim(), a.count() + b.count())};
    r.generators << a.generators, b.generators;
    return r;
}

Zonotope zono_translate(const Zonotope& z, const Eigen::VectorXd& v)
{
    if (v.size() != z.center.size()) throw std::invalid_argument("zono_translate: dimension mismatch");
    return {z.center + v, z.generators};
}

IntervalVector zono_hull(const Zonotope& z)
{
    IntervalVector h(static_cast<std::size_t>(z.dim()));
    for (int i = 0; i < z.dim(); ++i) {
        const double r = z.generators.row(i).cwiseAbs().sum();
        // Relative slack covers the summation error of r and of the center.
        const double slack = 4.0 * std::numeric_limits<double>::epsilon() *
                             (std::abs(z.center[i]) + r * (1.0 + z.count()));
        h[static_cast<std::size_t>(i)] = detail::outward(z.center[i] - r - slack, z.center[i] + r + slack);
    }
    return h;
}

double zono_support(const Zonotope& z, const Eigen::VectorXd& l)
{
    if (l.size() != z.center.size()) throw std::invalid_argument("zono_support: dimension mismatch");
    return l.dot(z.center) + (l.transpose() * z.generators).cwiseAbs().sum();
}

Zonotope zono_reduce(const Zonotope& z, int max_order)
{
    if (max_order < 1) throw std::invalid_argument("zono_reduce: max_order must be at least 1");
    const int n = z.dim();
    const int cap = max_order * n;
    if (z.count() <= cap) return z;
    // Girard's criterion: boxing a generator costs ||g||_1 - ||g||_inf.
    std::vector<int> idx(static_cast<std::size_t>(z.count()));
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> score(idx.size());
    for (int j = 0; j < z.count(); ++j) {
        const auto g = z.generators.col(j);
        score[static_cast<std::size_t>(j)] = g.lpNorm<1>() - g.lpNorm<Eigen::Infinity>();
    }
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return score[static_cast<std::size_t>(a)] < score[static_cast<std::size_t>(b)];
    });
    const int n_box = z.count() - (cap - n);
    Eigen::VectorXd boxed = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n_box; ++k) boxed += z.generators.col(idx[static_cast<std::size_t>(k)]).cwiseAbs();
    Zonotope r{z.center, Eigen::MatrixXd::Zero(n, cap)};
    int col = 0;
    for (int k = n_box; k < z.count(); ++k) r.generators.col(col++) = z.generators.col(idx[static_cast<std::size_t>(k)]);
    for (int i = 0; i < n; ++i) {
        r.generators(i, col++) = boxed[i] > 0.0 ? detail::up(boxed[i] * (1.0 + 4.0 * std::numeric_limits<double>::epsilon() * n_box)) : 0.0;
    }
    return r;
}

std::pair<Zonotope, Zonotope> zono_split(const Zonotope& z)
{
    if (z.count() == 0) return {z, z};
    Eigen::Index best = 0;
    z.generators.colwise().lpNorm<Eigen::Infinity>().maxCoeff(&best);
    const Eigen::VectorXd half = 0.5 * z.generators.col(best);
    Zonotope a = z;
    Zonotope b = z;
    a.generators.col(best) = half;
    b.generators.col(best) = half;
    a.center -= half;
    b.center += half;
    return {a, b};
}

Zonotope zono_compact(const Zonotope& z)
{
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < z.generators.cols(); ++j) {
        if (z.generators.col(j).cwiseAbs().maxCoeff() > 0.0) keep.push_back(j);
    }
    Zonotope r{z.center, Eigen::MatrixXd(z.center.size(), static_cast<Eigen::Index>(keep.size()))};
    for (std::size_t k = 0; k < keep.size(); ++k) r.generators.col(static_cast<Eigen::Index>(k)) = z.generators.col(keep[k]);
    return r;
}

}  // namespace glider
