#pragma once

// Shared helpers for the unit tests: random networks, samplers, and a plain
// loop-based network evaluator used as an independent oracle.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "glider/interval.hpp"
#include "glider/mlp.hpp"

namespace testing {

// Random weights and biases; biases are nonzero so activation patterns vary.
inline glider::Network random_network(std::vector<int> widths, std::uint64_t seed, double bias_scale = 0.5)
{
    glider::Network net = glider::make_network(widths, seed);
    std::mt19937_64 rng(seed * 7919 + 1);
    std::uniform_real_distribution<double> u(-bias_scale, bias_scale);
    for (auto& l : net.layers) {
        for (Eigen::Index i = 0; i < l.b.size(); ++i) l.b[i] = u(rng);
    }
    return net;
}

// Evaluates the layers with raw nested loops over std::vector.
inline std::vector<double> loop_forward(const glider::Network& net, std::vector<double> x)
{
    for (const auto& l : net.layers) {
        std::vector<double> y(static_cast<std::size_t>(l.out_dim()), 0.0);
        for (int r = 0; r < l.out_dim(); ++r) {
            double s = l.b[r];
            for (int c = 0; c < l.in_dim(); ++c) s += l.w(r, c) * x[static_cast<std::size_t>(c)];
            if (l.act == glider::Activation::relu && s < 0.0) s = 0.0;
            y[static_cast<std::size_t>(r)] = s;
        }
        x = std::move(y);
    }
    return x;
}

inline Eigen::VectorXd uniform_in(const glider::IntervalVector& box, std::mt19937_64& rng)
{
    Eigen::VectorXd x(static_cast<Eigen::Index>(box.size()));
    for (std::size_t i = 0; i < box.size(); ++i) {
        std::uniform_real_distribution<double> u(box[i].lo, box[i].hi);
        x[static_cast<Eigen::Index>(i)] = box[i].width() > 0.0 ? u(rng) : box[i].lo;
    }
    return x;
}

inline Eigen::VectorXd uniform_vec(int n, double lo, double hi, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = u(rng);
    return x;
}

inline double rel_err(double a, double b, double floor = 1e-12)
{
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace testing
