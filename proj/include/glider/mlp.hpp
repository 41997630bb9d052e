#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "glider/norm.hpp"

namespace glider {

enum class Activation { relu, identity };

struct Layer {
    Eigen::MatrixXd w;  // out x in
    Eigen::VectorXd b;
    Activation act = Activation::relu;

    int in_dim() const { return static_cast<int>(w.cols()); }
    int out_dim() const { return static_cast<int>(w.rows()); }
};

struct Network {
    std::vector<Layer> layers;
    std::optional<NormSpec> norm;
    nlohmann::json meta = nlohmann::json::object();

    int input_dim() const { return layers.empty() ? 0 : layers.front().in_dim(); }
    int output_dim() const { return layers.empty() ? 0 : layers.back().out_dim(); }
    std::vector<int> widths() const;
    int relu_count() const;
    void validate() const;
};

// Per-layer parameter gradients; shapes mirror the network.
struct Gradient {
    std::vector<Eigen::MatrixXd> dw;
    std::vector<Eigen::VectorXd> db;

    static Gradient zeros_like(const Network& net);
    Gradient& operator+=(const Gradient& o);
    Gradient& operator*=(double s);
    double max_abs() const;
};

struct Sample {
    Eigen::VectorXd x;
    double y = 0.0;
};

enum class Loss { mse, rmse };

Network make_network(std::span<const int> widths, std::uint64_t seed);
Network default_architecture(std::uint64_t seed);  // 6-6-4-1-1

Eigen::VectorXd forward(const Network& net, const Eigen::VectorXd& x, bool use_norm = false);
double forward_scalar(const Network& net, const Eigen::VectorXd& x, bool use_norm = false);

// Affine pre-activations of every layer, in order.
std::vector<Eigen::VectorXd> forward_preacts(const Network& net, const Eigen::VectorXd& x);

// Gradient of the scalar output with respect to the parameters, scaled by seed.
Gradient output_param_gradient(const Network& net, const Eigen::VectorXd& x, double seed);
// Gradient of the scalar output with respect to the input.
Eigen::VectorXd input_gradient(const Network& net, const Eigen::VectorXd& x);

double batch_loss(const Network& net, std::span<const Sample> batch, Loss loss = Loss::mse);
Gradient gradient(const Network& net, std::span<const Sample> batch, Loss loss = Loss::mse);

void apply_step(Network& net, const Gradient& g, double lr);

struct TrainConfig {
    int epochs = 2000;
    double lr = 0.05;
    int batch = 32;
    std::uint64_t seed = 0;
};

struct TrainResult {
    Network net;
    double train_rmse = 0.0;
};

class TrainingDiverged : public std::runtime_error {
public:
    TrainingDiverged(int epoch, const std::string& what) : std::runtime_error(what), epoch_(epoch) {}
    int epoch() const { return epoch_; }

private:
    int epoch_;
};

// Deterministic permutation of [0, n) used for mini-batch order.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::mt19937_64& rng);

TrainResult train(const Network& net0, std::span<const Sample> samples, const TrainConfig& cfg);

Network embed_normalization(const Network& net);
Network double_network(const Network& net);

nlohmann::json network_to_json(const Network& net);
Network network_from_json(const nlohmann::json& j);
void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

nlohmann::json norm_to_json(const NormSpec& n);
NormSpec norm_from_json(const nlohmann::json& j, const std::string& where = "norm");

}  // namespace glider
