#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace glider {

// Min-max affine maps taking the dataset into [0,1] per dimension.
struct NormSpec {
    std::vector<double> in_min;
    std::vector<double> in_max;
    double out_min = 0.0;
    double out_max = 1.0;

    std::size_t input_dim() const { return in_min.size(); }
    void validate() const;

    Eigen::VectorXd normalize(const Eigen::VectorXd& x) const;
    Eigen::VectorXd denormalize(const Eigen::VectorXd& xn) const;
    double normalize_output(double y) const { return (y - out_min) / (out_max - out_min); }
    double denormalize_output(double yn) const { return out_min + (out_max - out_min) * yn; }
};

class DegenerateRange : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace glider
