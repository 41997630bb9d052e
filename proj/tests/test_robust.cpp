#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "glider/closedloop.hpp"
#include "glider/robust.hpp"
#include "support.hpp"

using namespace glider;

namespace {

const std::vector<int> kShape{6, 6, 4, 1, 1};

Network affine_1d(double slope)
{
    Network n;
    Layer l;
    l.w = Eigen::MatrixXd::Constant(1, 1, slope);
    l.b = Eigen::VectorXd::Zero(1);
    l.act = Activation::identity;
    n.layers.push_back(l);
    return n;
}

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

struct TrainedPair {
    std::vector<Sample> samples;
    TrainResult naive;
    TrainResult adversarial;
};

// Both default-config networks on the default dataset; the adversarial run is
// the slow part so it is shared between cases.
const TrainedPair& trained()
{
    static const TrainedPair p = [] {
        TrainedPair t;
        const auto rows = generate_dataset(SimConfig{}, PidGains{}, PlateParams::calibrated());
        t.samples = to_samples(rows, fit_norm(rows));
        t.naive = train(default_architecture(0), t.samples, TrainConfig{});
        t.adversarial = train_adversarial(default_architecture(0), t.samples, RobustTrainConfig{}, InputBox::unit(6));
        return t;
    }();
    return p;
}

}  // namespace

TEST_CASE("attack config validation")
{
    AttackConfig c;
    c.epsilon = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = AttackConfig{};
    c.steps = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    RobustTrainConfig r;
    r.lambda_lip = -1.0;
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
}

TEST_CASE("constant network leaves the point unattacked")
{
    Network net = make_network(kShape, 1);
    for (auto& l : net.layers) l.w.setZero();
    net.layers.back().b[0] = 0.3;
    std::mt19937_64 rng(1);
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(6, 0.5);
    const AttackResult a = pgd_attack(net, x, 0.3, AttackConfig{}, InputBox::unit(6), rng);
    CHECK(a.x == x);
    CHECK(a.loss == 0.0);
}

TEST_CASE("affine worst case sits on the ball boundary")
{
    const Network net = affine_1d(2.0);
    AttackConfig c;
    c.epsilon = 0.05;
    c.step_size = 0.02;
    c.steps = 10;
    std::mt19937_64 rng(2);
    const Eigen::VectorXd x = scalar(0.5);
    const AttackResult a = pgd_attack(net, x, forward_scalar(net, x), c, InputBox::unit(1), rng);
    CHECK(std::abs(a.x[0] - 0.5) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(std::sqrt(a.loss) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("attack reaches most of the sampled worst case")
{
    std::mt19937_64 rng(3);
    AttackConfig c;
    c.epsilon = 0.05;
    c.step_size = c.epsilon / 4;
    // One hidden layer: the deployed shape's width-1 ReLU makes flat dead
    // regions where sign-gradient ascent has nothing to follow.
    for (int trial = 0; trial < 20; ++trial) {
        const Network net = testing::random_network({6, 8, 1}, 100 + trial);
        const InputBox box = InputBox::unit(6);
        const Eigen::VectorXd x = testing::uniform_vec(6, 0.1, 0.9, rng);
        const double y = forward_scalar(net, x) + 0.01;
        IntervalVector ball;
        for (int i = 0; i < 6; ++i) ball.push_back({x[i] - c.epsilon, x[i] + c.epsilon});
        double grid = 0.0;
        for (int k = 0; k < 10000; ++k) {
            const double r = forward_scalar(net, testing::uniform_in(ball, rng)) - y;
            grid = std::max(grid, r * r);
        }
        const AttackResult a = pgd_attack(net, x, y, c, box, rng);
        CAPTURE(trial);
        CHECK(a.loss >= 0.95 * grid);
    }
}

TEST_CASE("attack stays in the ball and the box and never loses to the clean point")
{
    std::mt19937_64 rng(4);
    const Network net = testing::random_network(kShape, 7);
    InputBox box{Eigen::VectorXd::Constant(6, 0.0), Eigen::VectorXd::Constant(6, 1.0)};
    AttackConfig c;
    c.epsilon = 0.1;
    c.step_size = 0.04;
    for (int k = 0; k < 500; ++k) {
        // Points near the faces exercise the box projection.
        const Eigen::VectorXd x = testing::uniform_vec(6, 0.0, 1.0, rng).array().pow(4).matrix();
        const double y = std::uniform_real_distribution<double>(-1, 1)(rng);
        const AttackResult a = pgd_attack(net, x, y, c, box, rng);
        CHECK((a.x - x).lpNorm<Eigen::Infinity>() <= c.epsilon + 1e-15);
        CHECK(box.contains(a.x));
        const double clean = std::pow(forward_scalar(net, x) - y, 2);
        CHECK(a.loss >= clean);
        CHECK(a.loss == std::pow(forward_scalar(net, a.x) - y, 2));
    }
    CHECK_THROWS_AS(pgd_attack(net, Eigen::VectorXd::Constant(6, 2.0), 0.0, c, box, rng), std::invalid_argument);
}

TEST_CASE("lipschitz penalty examples")
{
    Network flat = make_network(kShape, 1);
    for (auto& l : flat.layers) l.w.setZero();
    std::vector<InputPair> pairs{{Eigen::VectorXd::Zero(6), Eigen::VectorXd::Ones(6)}};
    CHECK(lipschitz_penalty(flat, pairs) == 0.0);

    const Network three = affine_1d(3.0);
    std::vector<InputPair> p1{{scalar(0.1), scalar(0.4)}, {scalar(-2.0), scalar(5.0)}};
    CHECK(lipschitz_penalty(three, p1) == doctest::Approx(3.0).epsilon(1e-14));

    std::vector<InputPair> same{{scalar(1.0), scalar(1.0)}};
    CHECK_THROWS_AS(lipschitz_penalty(three, same), CoincidentPair);
}

TEST_CASE("lipschitz penalty matches a direct quotient")
{
    std::mt19937_64 rng(5);
    const Network net = testing::random_network(kShape, 9);
    std::vector<InputPair> pairs;
    double oracle = 0.0;
    for (int k = 0; k < 50; ++k) {
        const Eigen::VectorXd a = testing::uniform_vec(6, 0, 1, rng);
        const Eigen::VectorXd b = testing::uniform_vec(6, 0, 1, rng);
        pairs.emplace_back(a, b);
        const auto fa = testing::loop_forward(net, std::vector<double>(a.data(), a.data() + 6))[0];
        const auto fb = testing::loop_forward(net, std::vector<double>(b.data(), b.data() + 6))[0];
        double d = 0.0;
        for (int i = 0; i < 6; ++i) d = std::max(d, std::abs(a[i] - b[i]));
        oracle = std::max(oracle, std::abs(fa - fb) / d);
    }
    const double p = lipschitz_penalty(net, pairs);
    CHECK(p >= 0.0);
    CHECK(p == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("vanishing attack without penalty reproduces standard training")
{
    std::mt19937_64 rng(6);
    std::vector<Sample> s;
    for (int k = 0; k < 60; ++k) {
        const Eigen::VectorXd x = testing::uniform_vec(6, 0, 1, rng);
        s.push_back({x, 0.3 * x[0] + 0.2 * x[3]});
    }
    TrainConfig tc;
    tc.epochs = 200;
    tc.seed = 4;
    RobustTrainConfig rc;
    rc.attack.epsilon = 1e-12;
    rc.attack.step_size = 1e-13;
    rc.lambda_lip = 0.0;
    rc.epochs = tc.epochs;
    rc.seed = tc.seed;
    const auto a = train(default_architecture(2), s, tc);
    const auto b = train_adversarial(default_architecture(2), s, rc, InputBox::unit(6));
    double diff = 0.0;
    for (std::size_t k = 0; k < a.net.layers.size(); ++k) {
        diff = std::max(diff, (a.net.layers[k].w - b.net.layers[k].w).cwiseAbs().maxCoeff());
        diff = std::max(diff, (a.net.layers[k].b - b.net.layers[k].b).cwiseAbs().maxCoeff());
    }
    MESSAGE("max weight difference " << diff);
    CHECK(diff <= 1e-6);
    CHECK(b.net.meta["training"] == "adversarial");
}

TEST_CASE("adversarial training is deterministic")
{
    std::mt19937_64 rng(7);
    std::vector<Sample> s;
    for (int k = 0; k < 40; ++k) s.push_back({testing::uniform_vec(6, 0, 1, rng), 0.5});
    RobustTrainConfig rc;
    rc.epochs = 20;
    const auto a = train_adversarial(default_architecture(1), s, rc, InputBox::unit(6));
    const auto b = train_adversarial(default_architecture(1), s, rc, InputBox::unit(6));
    for (std::size_t k = 0; k < a.net.layers.size(); ++k) CHECK(a.net.layers[k].w == b.net.layers[k].w);
}

TEST_CASE("adversarial net is no steeper than the naive net")
{
    const auto& t = trained();
    AttackConfig probe;
    probe.epsilon = 1e-2;
    probe.step_size = probe.epsilon / 4;
    const InputBox box = InputBox::unit(6);
    const double ln = empirical_lipschitz(t.naive.net, t.samples, probe, box, 99);
    const double la = empirical_lipschitz(t.adversarial.net, t.samples, probe, box, 99);
    MESSAGE("empirical Lipschitz: naive " << ln << ", adversarial " << la);
    CHECK(la <= ln);
}

TEST_CASE("robustness costs clean accuracy")
{
    const auto& t = trained();
    MESSAGE("train RMSE: naive " << t.naive.train_rmse << ", adversarial " << t.adversarial.train_rmse);
    CHECK(t.adversarial.train_rmse >= t.naive.train_rmse);
}
