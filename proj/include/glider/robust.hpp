#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

#include <Eigen/Dense>

#include "glider/mlp.hpp"

namespace glider {

struct AttackConfig {
    double epsilon = 0.01;   // infinity-norm radius, normalized units
    int steps = 10;
    double step_size = 0.0025;
    int restarts = 2;        // random starts in addition to the two from x itself

    void validate() const;
};

struct InputBox {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    static InputBox unit(int dim);
    bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
};

struct AttackResult {
    Eigen::VectorXd x;
    double loss = 0.0;  // (f(x*) - y)^2
};

// Projected sign-gradient ascent on (f(x') - y)^2 over the eps-ball around x
// intersected with box. Returns the best iterate seen across all starts.
AttackResult pgd_attack(const Network& net, const Eigen::VectorXd& x, double y, const AttackConfig& cfg,
                        const InputBox& box, std::mt19937_64& rng);

using InputPair = std::pair<Eigen::VectorXd, Eigen::VectorXd>;

class CoincidentPair : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// max over pairs of |f(x) - f(x*)| / ||x - x*||_inf.
double lipschitz_penalty(const Network& net, std::span<const InputPair> pairs);

struct RobustTrainConfig {
    AttackConfig attack;
    double lambda_lip = 0.1;
    int epochs = 2000;
    double lr = 0.05;
    int batch = 32;
    std::uint64_t seed = 0;

    void validate() const;
};

// Mini-batch descent on 0.5 * (MSE_clean + MSE_adv) + lambda * penalty. The
// batch order follows the same generator as train(), so a vanishing attack
// reproduces standard training.
TrainResult train_adversarial(const Network& net0, std::span<const Sample> samples, const RobustTrainConfig& cfg,
                              const InputBox& box);

// Largest |f(x) - f(x*)| / ||x - x*|| over the samples, where x* is a fresh
// attack that pushes f away from f(x).
double empirical_lipschitz(const Network& net, std::span<const Sample> samples, const AttackConfig& cfg,
                           const InputBox& box, std::uint64_t seed);

}  // namespace glider
