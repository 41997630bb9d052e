#include "glider/mlp.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace glider {

// ---- NormSpec ---------------------------------------------------------------

void NormSpec::validate() const
{
    if (in_min.size() != in_max.size() || in_min.empty()) {
        throw std::invalid_argument("NormSpec: in_min/in_max sizes differ or are empty");
    }
    for (std::size_t i = 0; i < in_min.size(); ++i) {
        if (!(in_min[i] < in_max[i])) {
            throw DegenerateRange("NormSpec: degenerate input range in dimension " + std::to_string(i));
        }
    }
    if (!(out_min < out_max)) throw DegenerateRange("NormSpec: degenerate output range");
}

Eigen::VectorXd NormSpec::normalize(const Eigen::VectorXd& x) const
{
    Eigen::VectorXd r(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        r[i] = (x[i] - in_min[k]) / (in_max[k] - in_min[k]);
    }
    return r;
}

Eigen::VectorXd NormSpec::denormalize(const Eigen::VectorXd& xn) const
{
    Eigen::VectorXd r(xn.size());
    for (Eigen::Index i = 0; i < xn.size(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        r[i] = in_min[k] + (in_max[k] - in_min[k]) * xn[i];
    }
    return r;
}

// ---- Network ----------------------------------------------------------------

std::vector<int> Network::widths() const
{
    std::vector<int> w;
    if (layers.empty()) return w;
    w.push_back(layers.front().in_dim());
    for (const auto& l : layers) w.push_back(l.out_dim());
    return w;
}

int Network::relu_count() const
{
    int n = 0;
    for (const auto& l : layers) {
        if (l.act == Activation::relu) n += l.out_dim();
    }
    return n;
}

void Network::validate() const
{
    if (layers.empty()) throw std::invalid_argument("Network: no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const Layer& l = layers[i];
        if (l.b.size() != l.w.rows()) {
            throw std::invalid_argument("Network: layer " + std::to_string(i) + " bias size mismatch");
        }
        if (i > 0 && l.w.cols() != layers[i - 1].w.rows()) {
            throw std::invalid_argument("Network: layer " + std::to_string(i) + " input width mismatch");
        }
        if (!l.w.allFinite() || !l.b.allFinite()) {
            throw std::invalid_argument("Network: layer " + std::to_string(i) + " has non-finite entries");
        }
    }
    if (norm) {
        norm->validate();
        if (static_cast<int>(norm->input_dim()) != input_dim()) {
            throw std::invalid_argument("Network: NormSpec dimension does not match the input width");
        }
    }
}

Network make_network(std::span<const int> widths, std::uint64_t seed)
{
    if (widths.size() < 2) throw std::invalid_argument("make_network: need at least two widths");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Network net;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        const int fan_in = widths[i];
        const int fan_out = widths[i + 1];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        Layer l;
        l.w.resize(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r) {
            for (int c = 0; c < fan_in; ++c) l.w(r, c) = limit * unit(rng);
        }
        l.b = Eigen::VectorXd::Zero(fan_out);
        l.act = (i + 2 == widths.size()) ? Activation::identity : Activation::relu;
        net.layers.push_back(std::move(l));
    }
    net.meta["init_seed"] = seed;
    return net;
}

Network default_architecture(std::uint64_t seed)
{
    const int w[] = {6, 6, 4, 1, 1};
    return make_network(w, seed);
}

namespace {

Eigen::VectorXd activate(const Eigen::VectorXd& z, Activation act)
{
    if (act == Activation::identity) return z;
    return z.cwiseMax(0.0);
}

Eigen::VectorXd activation_slope(const Eigen::VectorXd& z, Activation act)
{
    if (act == Activation::identity) return Eigen::VectorXd::Ones(z.size());
    return (z.array() > 0.0).cast<double>().matrix();
}

struct Tape {
    std::vector<Eigen::VectorXd> inputs;  // input to each layer
    std::vector<Eigen::VectorXd> pre;
    Eigen::VectorXd out;
};

Tape record(const Network& net, const Eigen::VectorXd& x)
{
    Tape t;
    Eigen::VectorXd a = x;
    for (const auto& l : net.layers) {
        t.inputs.push_back(a);
        Eigen::VectorXd z = l.w * a + l.b;
        a = activate(z, l.act);
        t.pre.push_back(std::move(z));
    }
    t.out = a;
    return t;
}

// Accumulates seed * d out / d theta into g; returns d out / d x scaled by seed.
Eigen::VectorXd backprop(const Network& net, const Tape& t, const Eigen::VectorXd& seed, Gradient* g)
{
    Eigen::VectorXd delta = seed;
    for (std::size_t k = net.layers.size(); k-- > 0;) {
        const Layer& l = net.layers[k];
        delta = delta.cwiseProduct(activation_slope(t.pre[k], l.act));
        if (g != nullptr) {
            g->dw[k].noalias() += delta * t.inputs[k].transpose();
            g->db[k] += delta;
        }
        delta = l.w.transpose() * delta;
    }
    return delta;
}

}  // namespace

Eigen::VectorXd forward(const Network& net, const Eigen::VectorXd& x, bool use_norm)
{
    if (x.size() != net.input_dim()) throw std::invalid_argument("forward: input width mismatch");
    if (use_norm && net.norm) {
        Eigen::VectorXd y = record(net, net.norm->normalize(x)).out;
        for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = net.norm->denormalize_output(y[i]);
        return y;
    }
    Eigen::VectorXd a = x;
    for (const auto& l : net.layers) a = activate(l.w * a + l.b, l.act);
    return a;
}

double forward_scalar(const Network& net, const Eigen::VectorXd& x, bool use_norm)
{
    return forward(net, x, use_norm)[0];
}

std::vector<Eigen::VectorXd> forward_preacts(const Network& net, const Eigen::VectorXd& x)
{
    if (x.size() != net.input_dim()) throw std::invalid_argument("forward_preacts: input width mismatch");
    return record(net, x).pre;
}

Gradient Gradient::zeros_like(const Network& net)
{
    Gradient g;
    for (const auto& l : net.layers) {
        g.dw.push_back(Eigen::MatrixXd::Zero(l.w.rows(), l.w.cols()));
        g.db.push_back(Eigen::VectorXd::Zero(l.b.size()));
    }
    return g;
}

Gradient& Gradient::operator+=(const Gradient& o)
{
    for (std::size_t k = 0; k < dw.size(); ++k) {
        dw[k] += o.dw[k];
        db[k] += o.db[k];
    }
    return *this;
}

Gradient& Gradient::operator*=(double s)
{
    for (std::size_t k = 0; k < dw.size(); ++k) {
        dw[k] *= s;
        db[k] *= s;
    }
    return *this;
}

double Gradient::max_abs() const
{
    double m = 0.0;
    for (std::size_t k = 0; k < dw.size(); ++k) {
        m = std::max(m, dw[k].cwiseAbs().maxCoeff());
        m = std::max(m, db[k].cwiseAbs().maxCoeff());
    }
    return m;
}

Gradient output_param_gradient(const Network& net, const Eigen::VectorXd& x, double seed)
{
    Gradient g = Gradient::zeros_like(net);
    const Tape t = record(net, x);
    backprop(net, t, Eigen::VectorXd::Constant(1, seed), &g);
    return g;
}

Eigen::VectorXd input_gradient(const Network& net, const Eigen::VectorXd& x)
{
    const Tape t = record(net, x);
    return backprop(net, t, Eigen::VectorXd::Ones(1), nullptr);
}

double batch_loss(const Network& net, std::span<const Sample> batch, Loss loss)
{
    if (batch.empty()) throw std::invalid_argument("batch_loss: empty batch");
    double sum = 0.0;
    for (const auto& s : batch) {
        const double r = forward_scalar(net, s.x) - s.y;
        sum += r * r;
    }
    const double mse = sum / static_cast<double>(batch.size());
    return loss == Loss::mse ? mse : std::sqrt(mse);
}

Gradient gradient(const Network& net, std::span<const Sample> batch, Loss loss)
{
    if (batch.empty()) throw std::invalid_argument("gradient: empty batch");
    Gradient g = Gradient::zeros_like(net);
    const double n = static_cast<double>(batch.size());
    double sum = 0.0;
    for (const auto& s : batch) {
        const Tape t = record(net, s.x);
        const double r = t.out[0] - s.y;
        sum += r * r;
        backprop(net, t, Eigen::VectorXd::Constant(1, 2.0 * r / n), &g);
    }
    if (loss == Loss::rmse) {
        const double rmse = std::sqrt(sum / n);
        g *= rmse > 0.0 ? 1.0 / (2.0 * rmse) : 0.0;
    }
    return g;
}

void apply_step(Network& net, const Gradient& g, double lr)
{
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        net.layers[k].w -= lr * g.dw[k];
        net.layers[k].b -= lr * g.db[k];
    }
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::mt19937_64& rng)
{
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    // Fisher-Yates with rejection sampling keeps the order identical across
    // standard library implementations.
    for (std::size_t i = n; i > 1; --i) {
        const std::uint64_t bound = i;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t r = rng();
        while (r >= limit) r = rng();
        std::swap(idx[i - 1], idx[static_cast<std::size_t>(r % bound)]);
    }
    return idx;
}

TrainResult train(const Network& net0, std::span<const Sample> samples, const TrainConfig& cfg)
{
    if (samples.empty()) throw std::invalid_argument("train: no samples");
    if (cfg.batch < 1 || cfg.epochs < 0 || !(cfg.lr > 0.0)) throw std::invalid_argument("train: bad configuration");
    net0.validate();
    Network net = net0;
    std::mt19937_64 rng(cfg.seed);
    std::vector<Sample> batch;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto order = shuffled_indices(samples.size(), rng);
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch));
            batch.clear();
            for (std::size_t i = start; i < stop; ++i) batch.push_back(samples[order[i]]);
            const Gradient g = gradient(net, batch, Loss::mse);
            if (!std::isfinite(g.max_abs())) {
                throw TrainingDiverged(epoch, "training diverged at epoch " + std::to_string(epoch));
            }
            apply_step(net, g, cfg.lr);
        }
    }
    TrainResult r;
    r.train_rmse = batch_loss(net, samples, Loss::rmse);
    if (!std::isfinite(r.train_rmse)) throw TrainingDiverged(cfg.epochs, "training diverged: final loss is not finite");
    net.meta["training"] = "standard";
    net.meta["epochs"] = cfg.epochs;
    net.meta["lr"] = cfg.lr;
    net.meta["batch"] = cfg.batch;
    net.meta["seed"] = cfg.seed;
    net.meta["train_rmse"] = r.train_rmse;
    r.net = std::move(net);
    return r;
}

Network embed_normalization(const Network& net)
{
    if (!net.norm) throw std::invalid_argument("embed_normalization: network has no NormSpec");
    net.validate();
    const NormSpec& n = *net.norm;
    Network out = net;
    out.norm.reset();

    Layer& first = out.layers.front();
    Eigen::VectorXd scale(first.in_dim());
    Eigen::VectorXd shift(first.in_dim());
    for (int i = 0; i < first.in_dim(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        scale[i] = 1.0 / (n.in_max[k] - n.in_min[k]);
        shift[i] = n.in_min[k];
    }
    first.b = first.b - first.w * scale.cwiseProduct(shift);
    first.w = first.w * scale.asDiagonal();

    const double range = n.out_max - n.out_min;
    if (out.layers.back().act == Activation::identity) {
        Layer& last = out.layers.back();
        last.w *= range;
        last.b = range * last.b + Eigen::VectorXd::Constant(last.b.size(), n.out_min);
    } else {
        Layer post;
        const int w = out.layers.back().out_dim();
        post.w = range * Eigen::MatrixXd::Identity(w, w);
        post.b = Eigen::VectorXd::Constant(w, n.out_min);
        post.act = Activation::identity;
        out.layers.push_back(std::move(post));
    }
    out.meta["normalization"] = "embedded";
    return out;
}

Network double_network(const Network& net)
{
    net.validate();
    Network out;
    for (const auto& l : net.layers) {
        Layer d;
        d.w = Eigen::MatrixXd::Zero(2 * l.out_dim(), 2 * l.in_dim());
        d.w.topLeftCorner(l.out_dim(), l.in_dim()) = l.w;
        d.w.bottomRightCorner(l.out_dim(), l.in_dim()) = l.w;
        d.b.resize(2 * l.out_dim());
        d.b << l.b, l.b;
        d.act = l.act;
        out.layers.push_back(std::move(d));
    }
    out.meta = net.meta;
    out.meta["doubled"] = true;
    return out;
}

// ---- JSON -------------------------------------------------------------------

namespace {

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

const nlohmann::json& field(const nlohmann::json& j, const char* key, const std::string& path)
{
    if (!j.is_object()) throw SchemaError(path + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError(path + "." + key + ": missing field");
    return *it;
}

double number(const nlohmann::json& j, const std::string& path)
{
    if (!j.is_number()) throw SchemaError(path + ": expected a number");
    return j.get<double>();
}

std::vector<double> numbers(const nlohmann::json& j, const std::string& path)
{
    if (!j.is_array()) throw SchemaError(path + ": expected an array");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

}  // namespace

nlohmann::json norm_to_json(const NormSpec& n)
{
    return {{"in_min", n.in_min}, {"in_max", n.in_max}, {"out_min", n.out_min}, {"out_max", n.out_max}};
}

NormSpec norm_from_json(const nlohmann::json& j, const std::string& where)
{
    NormSpec n;
    n.in_min = numbers(field(j, "in_min", where), where + ".in_min");
    n.in_max = numbers(field(j, "in_max", where), where + ".in_max");
    n.out_min = number(field(j, "out_min", where), where + ".out_min");
    n.out_max = number(field(j, "out_max", where), where + ".out_max");
    n.validate();
    return n;
}

nlohmann::json network_to_json(const Network& net)
{
    nlohmann::json j;
    j["widths"] = net.widths();
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : net.layers) {
        nlohmann::json w = nlohmann::json::array();
        for (int r = 0; r < l.out_dim(); ++r) {
            std::vector<double> row(static_cast<std::size_t>(l.in_dim()));
            for (int c = 0; c < l.in_dim(); ++c) row[static_cast<std::size_t>(c)] = l.w(r, c);
            w.push_back(row);
        }
        std::vector<double> b(l.b.data(), l.b.data() + l.b.size());
        layers.push_back({{"w", w}, {"b", b}, {"act", l.act == Activation::relu ? "relu" : "id"}});
    }
    j["layers"] = layers;
    j["norm"] = net.norm ? norm_to_json(*net.norm) : nlohmann::json(nullptr);
    j["meta"] = net.meta;
    return j;
}

Network network_from_json(const nlohmann::json& j)
{
    const std::string root = "network";
    Network net;
    const auto& widths = field(j, "widths", root);
    const auto& layers = field(j, "layers", root);
    if (!layers.is_array()) throw SchemaError(root + ".layers: expected an array");
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const std::string path = root + ".layers[" + std::to_string(k) + "]";
        const auto& jl = layers[k];
        const auto& w = field(jl, "w", path);
        const auto bias = numbers(field(jl, "b", path), path + ".b");
        const auto& act = field(jl, "act", path);
        if (!w.is_array() || w.empty()) throw SchemaError(path + ".w: expected a non-empty array of rows");
        Layer l;
        const auto first = numbers(w[0], path + ".w[0]");
        l.w.resize(static_cast<Eigen::Index>(w.size()), static_cast<Eigen::Index>(first.size()));
        for (std::size_t r = 0; r < w.size(); ++r) {
            const auto row = numbers(w[r], path + ".w[" + std::to_string(r) + "]");
            if (row.size() != first.size()) throw SchemaError(path + ".w[" + std::to_string(r) + "]: ragged row");
            for (std::size_t c = 0; c < row.size(); ++c) {
                l.w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
            }
        }
        l.b = Eigen::Map<const Eigen::VectorXd>(bias.data(), static_cast<Eigen::Index>(bias.size()));
        if (act == "relu") {
            l.act = Activation::relu;
        } else if (act == "id") {
            l.act = Activation::identity;
        } else {
            throw SchemaError(path + ".act: expected \"relu\" or \"id\"");
        }
        net.layers.push_back(std::move(l));
    }
    if (auto it = j.find("norm"); it != j.end() && !it->is_null()) net.norm = norm_from_json(*it, root + ".norm");
    if (auto it = j.find("meta"); it != j.end()) net.meta = *it;
    try {
        net.validate();
    } catch (const std::invalid_argument& e) {
        throw SchemaError(root + ": " + e.what());
    }
    if (widths.get<std::vector<int>>() != net.widths()) throw SchemaError(root + ".widths: does not match the layers");
    return net;
}

void save_network(const Network& net, const std::string& path)
{
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_network: cannot open " + path);
    os << network_to_json(net).dump(1) << '\n';
}

Network load_network(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_network: cannot open " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return network_from_json(j);
}

}  // namespace glider
