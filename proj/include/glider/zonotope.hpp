#pragma once

#include <span>
#include <utility>

#include <Eigen/Dense>

#include "glider/interval.hpp"

namespace glider {

// { c + G xi : |xi|_inf <= 1 }
struct Zonotope {
    Eigen::VectorXd center;
    Eigen::MatrixXd generators;  // dim x count

    int dim() const { return static_cast<int>(center.size()); }
    int count() const { return static_cast<int>(generators.cols()); }
    double order() const { return dim() > 0 ? static_cast<double>(count()) / dim() : 0.0; }

    static Zonotope point(const Eigen::VectorXd& c);
    static Zonotope from_box(std::span<const Interval> box);
    void validate() const;
};

Zonotope zono_linear_map(const Eigen::MatrixXd& a, const Zonotope& z);
Zonotope zono_minkowski(const Zonotope& a, const Zonotope& b);
Zonotope zono_translate(const Zonotope& z, const Eigen::VectorXd& v);

// Outward-rounded interval hull.
IntervalVector zono_hull(const Zonotope& z);

// max over z of l . x, closed form: l.c + sum |l.g_i|.
double zono_support(const Zonotope& z, const Eigen::VectorXd& l);

// Girard reduction: keeps the largest generators and boxes the rest so the
// result has at most max_order * dim generators and contains z.
Zonotope zono_reduce(const Zonotope& z, int max_order);

// Exact split along the longest generator: z is the union of the halves.
std::pair<Zonotope, Zonotope> zono_split(const Zonotope& z);

// Drops all-zero generator columns.
Zonotope zono_compact(const Zonotope& z);

}  // namespace glider
