// glider: batch front-end for the simulate -> dataset -> train -> verify -> reach pipeline.
//
// Each run resolves a full AppConfig (defaults, then --config, then flags) and a
// small set of command arguments, executes, and writes <out>/<command>.manifest.json.
// `rerun --manifest m.json` replays a manifest from its recorded settings.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "glider/config.hpp"
#include "glider/io.hpp"

#ifndef GLIDER_VERSION
#define GLIDER_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace glider;

namespace {

enum Exit : int { ok = 0, usage = 1, falsified = 2, unknown = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Run {
    std::string command;
    std::string config_path;
    AppConfig cfg;
    json args = json::object();  // command-specific, everything not in cfg
    std::string out_dir = ".";
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;

    std::string out(const std::string& name)
    {
        const std::string p = (fs::path(out_dir) / name).string();
        outputs.push_back(p);
        return p;
    }
    std::string in(const std::string& key)
    {
        if (!args.contains(key) || args[key].is_null()) throw UsageError("--" + key + " is required");
        const auto p = args[key].get<std::string>();
        inputs.push_back(p);
        return p;
    }
    template <class T>
    T arg(const std::string& key, T fallback) const
    {
        return args.contains(key) && !args[key].is_null() ? args[key].get<T>() : fallback;
    }
};

Network load_net(Run& r)
{
    return load_network(r.in("net"));
}

// Raw six-state box of the data the network was fitted on.
IntervalVector data_box(const Network& net)
{
    if (!net.norm) throw UsageError("network has no normalization; cannot derive the input box");
    IntervalVector box;
    for (std::size_t i = 0; i < net.norm->input_dim(); ++i) box.emplace_back(net.norm->in_min[i], net.norm->in_max[i]);
    return box;
}

Network raw_space(const Network& net)
{
    return net.norm ? embed_normalization(net) : net;
}

Network strip_norm(Network net)
{
    net.norm.reset();
    return net;
}

std::vector<double> starts(const Run& r)
{
    if (r.args.contains("x6") && !r.args["x6"].empty()) return r.args["x6"].get<std::vector<double>>();
    return r.cfg.sim.x6_starts;
}

std::unique_ptr<Controller> make_controller(Run& r)
{
    const auto kind = r.arg<std::string>("controller", "pid");
    if (kind == "pid") return std::make_unique<PidController>(r.cfg.pid, r.cfg.sim.dt_control);
    if (kind == "net") return std::make_unique<NetworkController>(load_net(r), r.cfg.pid.u_min, r.cfg.pid.u_max);
    throw UsageError("--controller must be pid or net");
}

AlphaCheck alpha_check(const Run& r)
{
    return r.cfg.strict ? AlphaCheck::error : AlphaCheck::warn;
}

int cmd_simulate(Run& r)
{
    const auto mode = r.arg<std::string>("mode", "closed");
    std::vector<Trace> traces;
    json summary = json::array();
    const auto x6 = starts(r);
    for (std::size_t i = 0; i < x6.size(); ++i) {
        Trace tr;
        if (mode == "open") {
            tr = simulate_open_loop(initial_state(x6[i]), r.arg<double>("ex", r.cfg.pid.u_center), r.cfg.plate,
                                    r.cfg.sim.t_end, r.cfg.sim.dt_model, alpha_check(r));
        } else if (mode == "closed") {
            auto ctrl = make_controller(r);
            tr = simulate_closed_loop(initial_state(x6[i]), *ctrl, r.cfg.sim, r.cfg.plate, alpha_check(r)).trace;
        } else {
            throw UsageError("--mode must be open or closed");
        }
        write_trace_csv(r.out("trace_" + std::to_string(i) + ".csv"), tr);
        const State& last = tr.states.back();
        summary.push_back({{"x6_init", x6[i]},
                           {"final_error", target_error(last)},
                           {"glide_slope", glide_slope(tr, r.cfg.sim.t_end / 2)},
                           {"alpha_violations", tr.alpha_violations}});
        traces.push_back(std::move(tr));
    }
    const auto lines = trace_polylines(traces);
    write_text(r.out("trajectories.svg"), render_svg(lines, r.arg<double>("band", 2.0), "closed-loop trajectories"));
    write_json(r.out("simulate.json"), summary);
    std::cout << summary.dump(1) << '\n';
    return ok;
}

int cmd_gen_data(Run& r)
{
    const auto rows = generate_dataset(r.cfg.sim, r.cfg.pid, r.cfg.plate);
    write_dataset_csv(r.out("dataset.csv"), rows);
    std::cout << rows.size() << " rows\n";
    return ok;
}

// Every k-th row, k = 1/holdout, is held out when holdout > 0.
void split_rows(const std::vector<DataRow>& rows, double holdout, std::vector<DataRow>& fit, std::vector<DataRow>& held)
{
    const std::size_t k = holdout > 0.0 ? static_cast<std::size_t>(std::lround(1.0 / holdout)) : 0;
    for (std::size_t i = 0; i < rows.size(); ++i) (k > 0 && i % k == k - 1 ? held : fit).push_back(rows[i]);
}

void report_training(Run& r, Network& net, const NormSpec& norm, std::span<const DataRow> held, const char* name)
{
    if (!held.empty()) {
        const auto hs = to_samples(held, norm);
        net.meta["holdout_rmse"] = batch_loss(strip_norm(net), hs, Loss::rmse);
    }
    net.norm = norm;
    save_network(net, r.out(name));
    std::cout << net.meta.dump(1) << '\n';
}

int cmd_train(Run& r)
{
    const auto rows = read_dataset_csv(r.in("data"));
    std::vector<DataRow> fit, held;
    split_rows(rows, r.arg<double>("holdout", 0.0), fit, held);
    const NormSpec norm = fit_norm(fit);
    TrainConfig tc = r.cfg.train;
    tc.seed = r.cfg.seed;
    auto res = train(default_architecture(r.cfg.seed), to_samples(fit, norm), tc);
    report_training(r, res.net, norm, held, r.arg<std::string>("name", "naive.json").c_str());
    return ok;
}

int cmd_train_adv(Run& r)
{
    const auto rows = read_dataset_csv(r.in("data"));
    std::vector<DataRow> fit, held;
    split_rows(rows, r.arg<double>("holdout", 0.0), fit, held);
    const NormSpec norm = fit_norm(fit);
    RobustTrainConfig rc = r.cfg.robust;
    rc.seed = r.cfg.seed;
    auto res = train_adversarial(default_architecture(r.cfg.seed), to_samples(fit, norm), rc, InputBox::unit(6));
    report_training(r, res.net, norm, held, r.arg<std::string>("name", "adversarial.json").c_str());
    return ok;
}

int exit_for(const Verdict& v)
{
    switch (v.outcome) {
    case Outcome::verified: return ok;
    case Outcome::falsified: return falsified;
    case Outcome::timeout: return unknown;
    }
    return unknown;
}

int cmd_verify(Run& r)
{
    const Network net = load_net(r);
    const int kind = r.arg<int>("property", 0);
    if (kind < 1 || kind > 4) throw UsageError("--property must be 1..4");
    if (!r.args.contains("ystar")) throw UsageError("--ystar is required");
    const double ystar = r.args["ystar"].get<double>();
    const auto spec = encode_property(kind, ystar, data_box(net), r.cfg.verify.thresholds);
    const Verdict v = bab_verify(raw_space(net), spec, r.cfg.verify.budget);
    const std::vector<ResultRecord> rec{{spec.name, ystar, v}};
    write_results_csv(r.out("verify.csv"), rec);
    std::cout << spec.name << " y*=" << ystar << ": " << verdict_label(v) << " (" << v.nodes << " nodes)\n";
    return exit_for(v);
}

int cmd_critical(Run& r)
{
    const Network net = load_net(r);
    const Network core = raw_space(net);
    const IntervalVector box = data_box(net);
    std::vector<int> kinds{1, 2, 3, 4};
    if (r.arg<int>("property", 0) != 0) kinds = {r.args["property"].get<int>()};
    CriticalSearch search{r.cfg.verify.resolution, r.cfg.verify.p3_max, r.cfg.verify.budget};
    std::vector<ResultRecord> rec;
    json table = json::object();
    for (int k : kinds) {
        if (k < 1 || k > 4) throw UsageError("--property must be 1..4");
        const auto res = find_critical_ystar(core, k, box, search, r.cfg.verify.thresholds);
        const std::string name = "P" + std::to_string(k);
        for (const auto& p : res.probes) rec.push_back({name, p.ystar, p.verdict});
        // A critical value reached only because the premise emptied out.
        bool vacuous = false;
        for (const auto& p : res.probes) {
            if (res.ystar && p.ystar == *res.ystar) vacuous = p.verdict.vacuous;
        }
        table[name] = {{"ystar", res.ystar ? json(*res.ystar) : json("Failed")}, {"bound_only", res.bound_only},
                       {"vacuous", vacuous}, {"probes", res.probes.size()}};
        std::cout << name << ": " << (res.ystar ? fmt17(*res.ystar) : std::string("Failed"))
                  << (res.bound_only ? " (bound only)" : "") << (vacuous ? " (vacuous)" : "") << '\n';
    }
    write_results_csv(r.out("critical_probes.csv"), rec);
    write_json(r.out("critical.json"), table);
    return ok;
}

int cmd_sweep(Run& r)
{
    const Network net = load_net(r);
    if (!net.norm) throw UsageError("robust-sweep needs a network with normalization");
    const auto rows = read_dataset_csv(r.in("data"));
    const auto samples = to_samples(rows, *net.norm);
    std::vector<Eigen::VectorXd> points;
    for (const auto& s : samples) points.push_back(s.x);
    IntervalVector unit(6, Interval(0.0, 1.0));
    const auto cells = robustness_sweep(strip_norm(net), points, unit, r.cfg.sweep);
    auto path = r.out("sweep.csv");
    std::ostringstream os;
    os << "eps,lstar,complete,attempted,verified,rate,seconds\n";
    for (const auto& c : cells) {
        os << fmt17(c.eps) << ',' << fmt17(c.lstar) << ',' << (c.complete ? 1 : 0) << ',' << c.attempted << ','
           << c.verified << ',' << fmt17(c.rate()) << ',' << fmt17(c.seconds) << '\n';
    }
    write_text(path, os.str());
    std::cout << os.str();
    return ok;
}

int cmd_reach(Run& r)
{
    const Network net = load_net(r);
    const auto x6 = r.cfg.sim.x6_starts;
    if (x6.empty()) throw UsageError("no initial x6 range");
    const auto [lo, hi] = std::minmax_element(x6.begin(), x6.end());
    const ReachResult res = reach_full(Interval(*lo, *hi), net, r.cfg.plate, r.cfg.reach);
    const double band = r.arg<double>("goal_ystar", 2.0);
    const GoalResult goal = goal_check(res, band);
    write_reach_csv(r.out("reach.csv"), res, r.cfg.reach.dt_control);
    const auto lines = reach_polylines(res);
    write_text(r.out("reach.svg"), render_svg(lines, band, "reachable sets"));
    json failures = json::array();
    for (const auto& b : res.branches) {
        if (!b.ok) failures.push_back({{"branch", b.index}, {"reason", b.failure}});
    }
    json g = {{"goal", goal_name(goal.verdict)}, {"max_abs", goal.max_abs}, {"band", band},
              {"complete", res.complete()}, {"failures", failures}};
    write_json(r.out("goal.json"), g);
    std::cout << g.dump(1) << '\n';
    switch (goal.verdict) {
    case GoalVerdict::success: return ok;
    case GoalVerdict::failure: return falsified;
    case GoalVerdict::unknown: return unknown;
    }
    return unknown;
}

// Worst |x6 + x5| over t >= settle across the configured starts.
double pid_score(const PidGains& g, const AppConfig& cfg, double settle)
{
    double worst = 0.0;
    for (double x6 : cfg.sim.x6_starts) {
        PidController pid(g, cfg.sim.dt_control);
        try {
            const auto cl = simulate_closed_loop(initial_state(x6), pid, cfg.sim, cfg.plate, AlphaCheck::off);
            for (std::size_t i = 0; i < cl.trace.t.size(); ++i) {
                if (cl.trace.t[i] >= settle) worst = std::max(worst, std::abs(target_error(cl.trace.states[i])));
            }
        } catch (const ControlStepDiverged&) {
            return std::numeric_limits<double>::infinity();
        }
    }
    return worst;
}

int cmd_tune_pid(Run& r)
{
    const double settle = r.arg<double>("settle", 10.0);
    // Zero plus signed decades around scale.
    const auto grid = [](double scale, int decades) {
        std::vector<double> v{0.0};
        for (int e = -decades; e <= decades; ++e) {
            v.push_back(scale * std::pow(10.0, e));
            v.push_back(-scale * std::pow(10.0, e));
        }
        return v;
    };
    const double scale = r.arg<double>("scale", 1e-3);
    PidGains best = r.cfg.pid;
    double best_score = pid_score(best, r.cfg, settle);
    for (double kp : grid(scale, 3)) {
        for (double ki : grid(scale * 0.1, 1)) {
            for (double kd : grid(scale, 3)) {
                PidGains g = r.cfg.pid;
                g.kp = kp;
                g.ki = ki;
                g.kd = kd;
                const double s = pid_score(g, r.cfg, settle);
                if (s < best_score) {
                    best_score = s;
                    best = g;
                }
            }
        }
    }
    json j = {{"kp", best.kp}, {"ki", best.ki}, {"kd", best.kd}, {"u_center", best.u_center},
              {"worst_abs_error", best_score}, {"settle", settle}};
    write_json(r.out("pid.json"), j);
    std::cout << j.dump(1) << '\n';
    return ok;
}

int dispatch(Run& r)
{
    if (r.command == "simulate") return cmd_simulate(r);
    if (r.command == "gen-data") return cmd_gen_data(r);
    if (r.command == "train") return cmd_train(r);
    if (r.command == "train-adv") return cmd_train_adv(r);
    if (r.command == "verify") return cmd_verify(r);
    if (r.command == "critical-ystar") return cmd_critical(r);
    if (r.command == "robust-sweep") return cmd_sweep(r);
    if (r.command == "reach") return cmd_reach(r);
    if (r.command == "tune-pid") return cmd_tune_pid(r);
    throw UsageError("unknown command " + r.command);
}

int execute(Run& r)
{
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(r.out_dir);
    const int code = dispatch(r);
    RunManifest m;
    m.command = r.command;
    m.config_path = r.config_path;
    m.seed = r.cfg.seed;
    m.inputs = r.inputs;
    m.outputs = r.outputs;
    m.tool_version = GLIDER_VERSION;
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    m.settings = {{"config", config_to_json(r.cfg)}, {"args", r.args}, {"out", r.out_dir}, {"exit", code}};
    const std::string mpath = (fs::path(r.out_dir) / (r.command + ".manifest.json")).string();
    m.outputs.push_back(mpath);
    write_json(mpath, m.to_json());
    return code;
}

Run from_manifest(const std::string& path)
{
    const json j = read_json(path);
    Run r;
    r.command = j.at("command").get<std::string>();
    r.config_path = j.at("config").get<std::string>();
    const json& s = j.at("settings");
    r.cfg = config_from_json(s.at("config"));
    r.args = s.at("args");
    r.out_dir = s.at("out").get<std::string>();
    return r;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Alsomitra glider simulation, training and verification toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", GLIDER_VERSION);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    bool strict = false;
    std::string out_dir = ".";
    app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "random seed");
    app.add_option("--jobs", jobs, "worker threads for verification and reachability")->check(CLI::PositiveNumber);
    app.add_flag("--strict", strict, "treat angle-of-attack region violations as errors");
    app.add_option("--out", out_dir, "output directory");

    json args = json::object();
    // Option values land in typed locals and are copied into args after parsing.
    std::string net, data, controller = "pid", mode = "closed", name, manifest;
    std::optional<double> ystar, ex, holdout, goal_ystar, settle, scale, band, epsilon, lambda_lip;
    std::optional<int> property, splits, epochs;
    std::vector<double> x6;

    auto* sim = app.add_subcommand("simulate", "open- or closed-loop trajectories, CSV and SVG");
    sim->add_option("--mode", mode)->check(CLI::IsMember({"open", "closed"}));
    sim->add_option("--ex", ex, "open-loop actuation");
    sim->add_option("--controller", controller)->check(CLI::IsMember({"pid", "net"}));
    sim->add_option("--net", net)->check(CLI::ExistingFile);
    sim->add_option("--x6", x6, "initial heights (default: configured starts)");
    sim->add_option("--band", band, "goal band drawn in the SVG");

    auto* gen = app.add_subcommand("gen-data", "PID teacher dataset");

    auto* tr = app.add_subcommand("train", "behaviour cloning");
    auto* tra = app.add_subcommand("train-adv", "adversarial training with Lipschitz penalty");
    for (auto* s : {tr, tra}) {
        s->add_option("--data", data)->required()->check(CLI::ExistingFile);
        s->add_option("--name", name, "output file name");
        s->add_option("--holdout", holdout, "fraction of rows held out")->check(CLI::Range(0.0, 0.5));
        s->add_option("--epochs", epochs)->check(CLI::NonNegativeNumber);
    }
    tra->add_option("--epsilon", epsilon)->check(CLI::PositiveNumber);
    tra->add_option("--lambda", lambda_lip)->check(CLI::NonNegativeNumber);

    auto* ver = app.add_subcommand("verify", "check one trajectory property");
    ver->add_option("--net", net)->required()->check(CLI::ExistingFile);
    ver->add_option("--property", property)->required()->check(CLI::Range(1, 4));
    ver->add_option("--ystar", ystar)->required();

    auto* crit = app.add_subcommand("critical-ystar", "critical y* of properties 1-4");
    crit->add_option("--net", net)->required()->check(CLI::ExistingFile);
    crit->add_option("--property", property)->check(CLI::Range(1, 4));

    auto* sweep = app.add_subcommand("robust-sweep", "robustness success-rate grid");
    sweep->add_option("--net", net)->required()->check(CLI::ExistingFile);
    sweep->add_option("--data", data)->required()->check(CLI::ExistingFile);

    auto* reach = app.add_subcommand("reach", "closed-loop reachable sets and goal check");
    reach->add_option("--net", net)->required()->check(CLI::ExistingFile);
    reach->add_option("--splits", splits)->check(CLI::PositiveNumber);
    reach->add_option("--goal-ystar", goal_ystar)->check(CLI::PositiveNumber);

    auto* tune = app.add_subcommand("tune-pid", "grid search of PID gains on the configured starts");
    tune->add_option("--settle", settle, "time after which the error is scored");
    tune->add_option("--scale", scale, "gain grid scale")->check(CLI::PositiveNumber);

    auto* rerun = app.add_subcommand("rerun", "replay a run manifest");
    rerun->add_option("--manifest", manifest)->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        Run r;
        if (rerun->parsed()) {
            r = from_manifest(manifest);
            if (!out_dir.empty() && app.count("--out") > 0) r.out_dir = out_dir;
            return execute(r);
        }
        r.command = app.get_subcommands().front()->get_name();
        r.config_path = config_path;
        r.out_dir = out_dir;
        if (!config_path.empty()) r.cfg = load_config(config_path);
        AppConfig& c = r.cfg;
        if (seed) c.seed = *seed;
        if (jobs) c.sweep.jobs = c.reach.jobs = *jobs;
        if (strict) c.strict = true;
        if (epochs) c.train.epochs = c.robust.epochs = *epochs;
        if (epsilon) c.robust.attack.epsilon = *epsilon;
        if (lambda_lip) c.robust.lambda_lip = *lambda_lip;
        if (splits) c.reach.n_splits = *splits;
        c.robust.validate();
        c.reach.validate();

        if (!net.empty()) args["net"] = net;
        if (!data.empty()) args["data"] = data;
        if (!name.empty()) args["name"] = name;
        if (sim->parsed()) {
            args["mode"] = mode;
            args["controller"] = controller;
            if (!x6.empty()) args["x6"] = x6;
            if (ex) args["ex"] = *ex;
            if (band) args["band"] = *band;
        }
        if (ystar) args["ystar"] = *ystar;
        if (property) args["property"] = *property;
        if (holdout) args["holdout"] = *holdout;
        if (goal_ystar) args["goal_ystar"] = *goal_ystar;
        if (settle) args["settle"] = *settle;
        if (scale) args["scale"] = *scale;
        r.args = args;
        (void)gen;
        return execute(r);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    }
}
