#include "glider/config.hpp"

#include "glider/io.hpp"

namespace glider {

namespace {

template <class T>
void read(const nlohmann::json& j, const char* key, T& out, const std::string& path)
{
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + "." + key + ": " + e.what());
    }
}

void read_opt(const nlohmann::json& j, const char* key, std::optional<double>& out, const std::string& path)
{
    if (!j.contains(key)) return;
    if (j.at(key).is_null()) {
        out.reset();
        return;
    }
    double v = 0.0;
    read(j, key, v, path);
    out = v;
}

nlohmann::json opt(const std::optional<double>& v)
{
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

void read_budget(const nlohmann::json& j, Budget& b, const std::string& path)
{
    read(j, "max_nodes", b.max_nodes, path);
    read(j, "max_seconds", b.max_seconds, path);
}

nlohmann::json budget_json(const Budget& b)
{
    return {{"max_nodes", b.max_nodes}, {"max_seconds", b.max_seconds}};
}

AlphaMode alpha_mode_from(const std::string& s, const std::string& path)
{
    if (s == "exact") return AlphaMode::exact;
    if (s == "simplified") return AlphaMode::simplified;
    throw std::runtime_error(path + ": alpha mode must be \"exact\" or \"simplified\"");
}

}  // namespace

nlohmann::json plate_to_json(const PlateParams& p)
{
    return {{"ell", p.ell},
            {"mass", p.mass},
            {"rho_f", p.rho_f},
            {"alpha0", p.alpha0},
            {"delta_s", p.delta_s},
            {"cl1", p.cl1},
            {"cl2", p.cl2},
            {"cd0", p.cd0},
            {"cd1", p.cd1},
            {"cd90", p.cd90},
            {"ccp0", p.ccp0},
            {"ccp1", p.ccp1},
            {"ccp2", p.ccp2},
            {"cr", p.cr},
            {"a_semi", p.a_semi},
            {"b_semi", p.b_semi},
            {"g", p.g},
            {"m_prime", opt(p.m_prime)},
            {"inertia", opt(p.inertia)},
            {"tau_r_sign", p.tau_r_sign},
            {"lift_normal_sign", p.lift_normal_sign},
            {"lever_sign", p.lever_sign}};
}

AppConfig config_from_json(const nlohmann::json& j)
{
    AppConfig c;
    if (!j.is_object()) throw std::runtime_error("config: expected an object");
    read(j, "seed", c.seed, "config");
    read(j, "strict", c.strict, "config");
    read(j, "plate_preset", c.plate_preset, "config");
    if (c.plate_preset == "calibrated") {
        c.plate = PlateParams::calibrated();
    } else if (c.plate_preset == "published") {
        c.plate = PlateParams{};
    } else {
        throw std::runtime_error("config.plate_preset: expected \"calibrated\" or \"published\"");
    }
    if (j.contains("plate")) {
        const auto& p = j.at("plate");
        const std::string path = "config.plate";
        read(p, "ell", c.plate.ell, path);
        read(p, "mass", c.plate.mass, path);
        read(p, "rho_f", c.plate.rho_f, path);
        read(p, "alpha0", c.plate.alpha0, path);
        read(p, "delta_s", c.plate.delta_s, path);
        read(p, "cl1", c.plate.cl1, path);
        read(p, "cl2", c.plate.cl2, path);
        read(p, "cd0", c.plate.cd0, path);
        read(p, "cd1", c.plate.cd1, path);
        read(p, "cd90", c.plate.cd90, path);
        read(p, "ccp0", c.plate.ccp0, path);
        read(p, "ccp1", c.plate.ccp1, path);
        read(p, "ccp2", c.plate.ccp2, path);
        read(p, "cr", c.plate.cr, path);
        read(p, "a_semi", c.plate.a_semi, path);
        read(p, "b_semi", c.plate.b_semi, path);
        read(p, "g", c.plate.g, path);
        read_opt(p, "m_prime", c.plate.m_prime, path);
        read_opt(p, "inertia", c.plate.inertia, path);
        read(p, "tau_r_sign", c.plate.tau_r_sign, path);
        read(p, "lift_normal_sign", c.plate.lift_normal_sign, path);
        read(p, "lever_sign", c.plate.lever_sign, path);
    }
    if (j.contains("pid")) {
        const auto& p = j.at("pid");
        read(p, "kp", c.pid.kp, "config.pid");
        read(p, "ki", c.pid.ki, "config.pid");
        read(p, "kd", c.pid.kd, "config.pid");
        read(p, "u_center", c.pid.u_center, "config.pid");
        read(p, "u_min", c.pid.u_min, "config.pid");
        read(p, "u_max", c.pid.u_max, "config.pid");
    }
    if (j.contains("sim")) {
        const auto& s = j.at("sim");
        read(s, "t_end", c.sim.t_end, "config.sim");
        read(s, "dt_model", c.sim.dt_model, "config.sim");
        read(s, "dt_control", c.sim.dt_control, "config.sim");
        read(s, "n_sims", c.sim.n_sims, "config.sim");
        read(s, "x6_starts", c.sim.x6_starts, "config.sim");
        read(s, "record_skip", c.sim.record_skip, "config.sim");
        if (s.contains("x6_range") && !s.contains("x6_starts")) {
            const auto r = s.at("x6_range").get<std::vector<double>>();
            if (r.size() != 2) throw std::runtime_error("config.sim.x6_range: expected [lo, hi]");
            c.sim.x6_starts = linspace(r[0], r[1], c.sim.n_sims);
        }
    }
    if (j.contains("train")) {
        const auto& t = j.at("train");
        read(t, "epochs", c.train.epochs, "config.train");
        read(t, "lr", c.train.lr, "config.train");
        read(t, "batch", c.train.batch, "config.train");
    }
    if (j.contains("robust")) {
        const auto& r = j.at("robust");
        read(r, "epsilon", c.robust.attack.epsilon, "config.robust");
        read(r, "steps", c.robust.attack.steps, "config.robust");
        read(r, "step_size", c.robust.attack.step_size, "config.robust");
        read(r, "restarts", c.robust.attack.restarts, "config.robust");
        read(r, "lambda_lip", c.robust.lambda_lip, "config.robust");
        read(r, "epochs", c.robust.epochs, "config.robust");
        read(r, "lr", c.robust.lr, "config.robust");
        read(r, "batch", c.robust.batch, "config.robust");
    }
    if (j.contains("verify")) {
        const auto& v = j.at("verify");
        auto& th = c.verify.thresholds;
        read(v, "u_mid", th.u_mid, "config.verify");
        read(v, "u_low", th.u_low, "config.verify");
        read(v, "u_high", th.u_high, "config.verify");
        read(v, "pitch_low", th.pitch_low, "config.verify");
        read(v, "pitch_high", th.pitch_high, "config.verify");
        read(v, "omega_max", th.omega_max, "config.verify");
        read(v, "vy_max", th.vy_max, "config.verify");
        read(v, "resolution", c.verify.resolution, "config.verify");
        read(v, "p3_max", c.verify.p3_max, "config.verify");
        if (v.contains("budget")) read_budget(v.at("budget"), c.verify.budget, "config.verify.budget");
    }
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        read(s, "eps_list", c.sweep.eps_list, "config.sweep");
        read(s, "lstar_list", c.sweep.lstar_list, "config.sweep");
        read(s, "cell_seconds", c.sweep.cell_seconds, "config.sweep");
        if (s.contains("per_query")) read_budget(s.at("per_query"), c.sweep.per_query, "config.sweep.per_query");
    }
    if (j.contains("reach")) {
        const auto& r = j.at("reach");
        read(r, "dt", c.reach.dt, "config.reach");
        read(r, "t_end", c.reach.t_end, "config.reach");
        read(r, "dt_control", c.reach.dt_control, "config.reach");
        read(r, "n_splits", c.reach.n_splits, "config.reach");
        read(r, "max_order", c.reach.max_order, "config.reach");
        if (r.contains("width_resplit") && r.at("width_resplit").is_null()) {
            c.reach.width_resplit = std::numeric_limits<double>::infinity();
        } else {
            read(r, "width_resplit", c.reach.width_resplit, "config.reach");
        }
        read(r, "max_pieces", c.reach.max_pieces, "config.reach");
        read(r, "alpha_margin", c.reach.alpha_margin, "config.reach");
        read(r, "blowup", c.reach.blowup, "config.reach");
        if (r.contains("relu_mode")) {
            const auto m = r.at("relu_mode").get<std::string>();
            if (m == "zonotope") {
                c.reach.relu_mode = ReluMode::zonotope;
            } else if (m == "interval") {
                c.reach.relu_mode = ReluMode::interval;
            } else {
                throw std::runtime_error("config.reach.relu_mode: expected \"zonotope\" or \"interval\"");
            }
        }
        if (r.contains("alpha_mode")) c.reach.alpha_mode = alpha_mode_from(r.at("alpha_mode").get<std::string>(), "config.reach.alpha_mode");
    }
    c.plate.validate();
    c.pid.validate();
    c.sim.validate();
    c.robust.validate();
    c.reach.validate();
    return c;
}

nlohmann::json config_to_json(const AppConfig& c)
{
    nlohmann::json j;
    j["seed"] = c.seed;
    j["strict"] = c.strict;
    j["plate_preset"] = c.plate_preset;
    j["plate"] = plate_to_json(c.plate);
    j["pid"] = {{"kp", c.pid.kp}, {"ki", c.pid.ki}, {"kd", c.pid.kd},
                {"u_center", c.pid.u_center}, {"u_min", c.pid.u_min}, {"u_max", c.pid.u_max}};
    j["sim"] = {{"t_end", c.sim.t_end}, {"dt_model", c.sim.dt_model}, {"dt_control", c.sim.dt_control},
                {"n_sims", c.sim.n_sims}, {"x6_starts", c.sim.x6_starts}, {"record_skip", c.sim.record_skip}};
    j["train"] = {{"epochs", c.train.epochs}, {"lr", c.train.lr}, {"batch", c.train.batch}};
    j["robust"] = {{"epsilon", c.robust.attack.epsilon}, {"steps", c.robust.attack.steps},
                   {"step_size", c.robust.attack.step_size}, {"restarts", c.robust.attack.restarts},
                   {"lambda_lip", c.robust.lambda_lip}, {"epochs", c.robust.epochs}, {"lr", c.robust.lr},
                   {"batch", c.robust.batch}};
    const auto& th = c.verify.thresholds;
    j["verify"] = {{"u_mid", th.u_mid}, {"u_low", th.u_low}, {"u_high", th.u_high}, {"pitch_low", th.pitch_low},
                   {"pitch_high", th.pitch_high}, {"omega_max", th.omega_max}, {"vy_max", th.vy_max},
                   {"resolution", c.verify.resolution}, {"p3_max", c.verify.p3_max},
                   {"budget", budget_json(c.verify.budget)}};
    j["sweep"] = {{"eps_list", c.sweep.eps_list}, {"lstar_list", c.sweep.lstar_list},
                  {"cell_seconds", c.sweep.cell_seconds}, {"per_query", budget_json(c.sweep.per_query)}};
    j["reach"] = {{"dt", c.reach.dt}, {"t_end", c.reach.t_end}, {"dt_control", c.reach.dt_control},
                  {"n_splits", c.reach.n_splits}, {"max_order", c.reach.max_order},
                  {"width_resplit", std::isfinite(c.reach.width_resplit) ? nlohmann::json(c.reach.width_resplit) : nlohmann::json(nullptr)},
                  {"max_pieces", c.reach.max_pieces},
                  {"relu_mode", c.reach.relu_mode == ReluMode::zonotope ? "zonotope" : "interval"},
                  {"alpha_mode", c.reach.alpha_mode == AlphaMode::simplified ? "simplified" : "exact"},
                  {"alpha_margin", c.reach.alpha_margin}, {"blowup", c.reach.blowup}};
    return j;
}

AppConfig load_config(const std::string& path)
{
    return config_from_json(read_json(path));
}

}  // namespace glider
