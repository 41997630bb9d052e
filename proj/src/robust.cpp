#include "glider/robust.hpp"

#include <cmath>
#include <limits>

namespace glider {

void AttackConfig::validate() const
{
    if (!(epsilon > 0.0)) throw std::invalid_argument("AttackConfig: epsilon must be positive");
    if (steps < 1) throw std::invalid_argument("AttackConfig: steps must be at least 1");
    if (!(step_size > 0.0)) throw std::invalid_argument("AttackConfig: step_size must be positive");
    if (restarts < 0) throw std::invalid_argument("AttackConfig: restarts must be non-negative");
}

void RobustTrainConfig::validate() const
{
    attack.validate();
    if (!(lambda_lip >= 0.0)) throw std::invalid_argument("RobustTrainConfig: lambda_lip must be non-negative");
    if (epochs < 0 || batch < 1 || !(lr > 0.0)) throw std::invalid_argument("RobustTrainConfig: bad schedule");
}

InputBox InputBox::unit(int dim)
{
    return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
}

bool InputBox::contains(const Eigen::VectorXd& x, double tol) const
{
    return ((x - lo).array() >= -tol).all() && ((hi - x).array() >= -tol).all();
}

namespace {

double sq_loss(const Network& net, const Eigen::VectorXd& x, double y)
{
    const double r = forward_scalar(net, x) - y;
    return r * r;
}

Eigen::VectorXd project(const Eigen::VectorXd& z, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi)
{
    return z.cwiseMax(lo).cwiseMin(hi);
}

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

AttackResult pgd_attack(const Network& net, const Eigen::VectorXd& x, double y, const AttackConfig& cfg,
                        const InputBox& box, std::mt19937_64& rng)
{
    cfg.validate();
    if (!box.contains(x)) throw std::invalid_argument("pgd_attack: x lies outside the box");
    // Feasible set: eps-ball intersected with the box, itself a box.
    const Eigen::VectorXd lo = (x.array() - cfg.epsilon).matrix().cwiseMax(box.lo);
    const Eigen::VectorXd hi = (x.array() + cfg.epsilon).matrix().cwiseMin(box.hi);

    AttackResult best{x, sq_loss(net, x, y)};
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Runs -1 and 0 both start at x; -1 first pushes f across y, since the
    // squared loss has an ascent basin on each side.
    for (int run = -1; run <= cfg.restarts; ++run) {
        Eigen::VectorXd z = x;
        if (run > 0) {
            for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = lo[i] + (hi[i] - lo[i]) * unit(rng);
            const double l = sq_loss(net, z, y);
            if (l > best.loss) best = {z, l};
        }
        double lock = run < 0 ? -1.0 : 0.0;
        for (int k = 0; k < cfg.steps; ++k) {
            const double r = forward_scalar(net, z) - y;
            const Eigen::VectorXd g = input_gradient(net, z);
            // At r == 0 the loss is flat; any ascent direction of |f| works.
            double dir = r != 0.0 ? sgn(r) : 1.0;
            if (lock != 0.0) {
                // Keep the reversed direction until f has crossed y.
                if (k == 0) lock = -dir;
                if (sgn(r) == lock) lock = 0.0;
                else dir = lock;
            }
            Eigen::VectorXd step(z.size());
            for (Eigen::Index i = 0; i < z.size(); ++i) step[i] = sgn(dir * g[i]);
            z = project(z + cfg.step_size * step, lo, hi);
            const double l = sq_loss(net, z, y);
            if (l > best.loss) best = {z, l};
        }
    }
    return best;
}

double lipschitz_penalty(const Network& net, std::span<const InputPair> pairs)
{
    double best = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double d = (pairs[i].first - pairs[i].second).lpNorm<Eigen::Infinity>();
        if (d == 0.0) throw CoincidentPair("lipschitz_penalty: pair " + std::to_string(i) + " is coincident");
        const double q = std::abs(forward_scalar(net, pairs[i].first) - forward_scalar(net, pairs[i].second)) / d;
        best = std::max(best, q);
    }
    return best;
}

TrainResult train_adversarial(const Network& net0, std::span<const Sample> samples, const RobustTrainConfig& cfg,
                              const InputBox& box)
{
    cfg.validate();
    if (samples.empty()) throw std::invalid_argument("train_adversarial: no samples");
    net0.validate();
    Network net = net0;
    std::mt19937_64 order_rng(cfg.seed);
    std::mt19937_64 attack_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

    std::vector<Sample> clean;
    std::vector<Sample> adv;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto order = shuffled_indices(samples.size(), order_rng);
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch));
            clean.clear();
            adv.clear();
            for (std::size_t i = start; i < stop; ++i) {
                const Sample& s = samples[order[i]];
                clean.push_back(s);
                adv.push_back({pgd_attack(net, s.x, s.y, cfg.attack, box, attack_rng).x, s.y});
            }
            Gradient g = gradient(net, clean, Loss::mse);
            g += gradient(net, adv, Loss::mse);
            g *= 0.5;
            if (cfg.lambda_lip > 0.0) {
                // Subgradient of the max quotient through its argmax pair,
                // with the attack points held fixed.
                double best = -1.0;
                std::size_t arg = 0;
                for (std::size_t i = 0; i < clean.size(); ++i) {
                    const double d = (clean[i].x - adv[i].x).lpNorm<Eigen::Infinity>();
                    if (d == 0.0) continue;
                    const double q =
                        std::abs(forward_scalar(net, clean[i].x) - forward_scalar(net, adv[i].x)) / d;
                    if (q > best) {
                        best = q;
                        arg = i;
                    }
                }
                if (best > 0.0) {
                    const double d = (clean[arg].x - adv[arg].x).lpNorm<Eigen::Infinity>();
                    const double diff = forward_scalar(net, clean[arg].x) - forward_scalar(net, adv[arg].x);
                    const double w = cfg.lambda_lip * sgn(diff) / d;
                    g += output_param_gradient(net, clean[arg].x, w);
                    g += output_param_gradient(net, adv[arg].x, -w);
                }
            }
            if (!std::isfinite(g.max_abs())) {
                throw TrainingDiverged(epoch, "adversarial training diverged at epoch " + std::to_string(epoch));
            }
            apply_step(net, g, cfg.lr);
        }
    }
    TrainResult r;
    r.train_rmse = batch_loss(net, samples, Loss::rmse);
    if (!std::isfinite(r.train_rmse)) {
        throw TrainingDiverged(cfg.epochs, "adversarial training diverged: final loss is not finite");
    }
    net.meta["training"] = "adversarial";
    net.meta["epochs"] = cfg.epochs;
    net.meta["lr"] = cfg.lr;
    net.meta["batch"] = cfg.batch;
    net.meta["seed"] = cfg.seed;
    net.meta["epsilon"] = cfg.attack.epsilon;
    net.meta["pgd_steps"] = cfg.attack.steps;
    net.meta["pgd_step_size"] = cfg.attack.step_size;
    net.meta["pgd_restarts"] = cfg.attack.restarts;
    net.meta["lambda_lip"] = cfg.lambda_lip;
    net.meta["train_rmse"] = r.train_rmse;
    r.net = std::move(net);
    return r;
}

double empirical_lipschitz(const Network& net, std::span<const Sample> samples, const AttackConfig& cfg,
                           const InputBox& box, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    double best = 0.0;
    for (const auto& s : samples) {
        const double f0 = forward_scalar(net, s.x);
        const AttackResult a = pgd_attack(net, s.x, f0, cfg, box, rng);
        const double d = (a.x - s.x).lpNorm<Eigen::Infinity>();
        if (d == 0.0) continue;
        best = std::max(best, std::abs(forward_scalar(net, a.x) - f0) / d);
    }
    return best;
}

}  // namespace glider
