// End-to-end acceptance run. Prints one PASS/FAIL line per criterion with the
// measured numbers, and exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "glider/closedloop.hpp"
#include "glider/config.hpp"
#include "glider/reach.hpp"
#include "glider/robust.hpp"
#include "glider/verifier.hpp"
#include "support.hpp"
#include "verifier_oracle.hpp"

using namespace glider;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Check {
    bool pass = true;
    std::ostringstream detail;

    // Records a sub-check; the criterion passes only if all of them do.
    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int g_failures = 0;

void report(int id, const std::string& title, Check& o)
{
    if (!o.pass) ++g_failures;
    std::printf("criterion %d (%s): %s%s\n", id, title.c_str(), o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
    std::fflush(stdout);
}

int worker_count() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

// Shared artifacts: dataset, both trained controllers, timings.
struct Pipeline {
    std::vector<DataRow> rows;
    NormSpec norm;
    std::vector<Sample> samples;
    Network naive;        // normalized-space core, norm attached
    Network adversarial;  // same seed and schedule
    double naive_seconds = 0.0;
    double adversarial_seconds = 0.0;
};

Pipeline& pipeline()
{
    static Pipeline p = [] {
        Pipeline q;
        q.rows = generate_dataset(SimConfig{}, PidGains{}, PlateParams::calibrated());
        q.norm = fit_norm(q.rows);
        q.samples = to_samples(q.rows, q.norm);
        auto t0 = Clock::now();
        q.naive = train(default_architecture(0), q.samples, TrainConfig{}).net;
        q.naive_seconds = seconds_since(t0);
        t0 = Clock::now();
        q.adversarial = train_adversarial(default_architecture(0), q.samples, RobustTrainConfig{}, InputBox::unit(6)).net;
        q.adversarial_seconds = seconds_since(t0);
        q.naive.norm = q.norm;
        q.adversarial.norm = q.norm;
        return q;
    }();
    return p;
}

Network strip_norm(Network n)
{
    n.norm.reset();
    return n;
}

IntervalVector data_box(const NormSpec& n)
{
    IntervalVector b;
    for (std::size_t i = 0; i < 6; ++i) b.push_back({n.in_min[i], n.in_max[i]});
    return b;
}

// 1. Integrator convergence, rotation identity.
void dynamics_fidelity()
{
    Check o;
    const auto t0 = Clock::now();
    const auto p = PlateParams::calibrated();
    const State s0 = initial_state(3.0);
    const Trace coarse = simulate_open_loop(s0, 0.187, p, 20.0, 0.01, AlphaCheck::off);
    const Trace fine = simulate_open_loop(s0, 0.187, p, 20.0, 0.001, AlphaCheck::off);
    // Relative to each state's magnitude over the trajectory, so zero
    // crossings do not divide by zero.
    std::array<double, 6> scale{}, worst{};
    for (const auto& s : fine.states) {
        for (std::size_t i = 0; i < 6; ++i) scale[i] = std::max(scale[i], std::abs(s[i]));
    }
    for (std::size_t k = 0; k < coarse.states.size(); ++k) {
        const State& a = coarse.states[k];
        const State& b = fine.states[k * 10];
        for (std::size_t i = 0; i < 6; ++i) worst[i] = std::max(worst[i], std::abs(a[i] - b[i]) / scale[i]);
    }
    const double worst_rel = *std::max_element(worst.begin(), worst.end());
    o.detail << " worst relative state error " << worst_rel;
    o.require(coarse.states.size() == 2001 && fine.states.size() == 20001, "sample counts");
    o.require(worst_rel <= 1e-3, "dt 0.01 vs 0.001 within 1e-3");

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> v(-5, 5), w(-3, 3), ang(-std::numbers::pi, std::numbers::pi), u(0.181, 0.193);
    double rot = 0.0;
    for (int k = 0; k < 100000; ++k) {
        const State s{v(rng), v(rng), w(rng), ang(rng), v(rng), v(rng)};
        const State f = state_derivative(s, u(rng), p, AlphaMode::exact);
        const double lhs = f[4] * f[4] + f[5] * f[5];
        const double rhs = s[0] * s[0] + s[1] * s[1];
        rot = std::max(rot, std::abs(lhs - rhs) / std::max(1.0, rhs));
    }
    o.detail << ", rotation identity residual " << rot;
    o.require(rot <= 1e-12, "rotation identity to 1e-12");
    const double secs = seconds_since(t0);
    o.detail << ", " << secs << " s";
    o.require(secs < 10.0, "runtime < 10 s");
    report(1, "dynamics fidelity", o);
}

// 2. Actuation changes the glide path.
void open_loop_behaviour()
{
    Check o;
    const auto p = PlateParams::calibrated();
    const Trace lo = simulate_open_loop(initial_state(3.0), kActuationMin, p, 20.0, 0.01, AlphaCheck::off);
    const Trace hi = simulate_open_loop(initial_state(3.0), kActuationMax, p, 20.0, 0.01, AlphaCheck::off);
    const double slo = glide_slope(lo, 10.0), shi = glide_slope(hi, 10.0);
    const double diff = std::abs(shi - slo) / std::max(std::abs(slo), std::abs(shi));
    o.detail << " glide slope " << slo << " at e_x=0.181, " << shi << " at e_x=0.193, relative difference " << diff;
    o.require(diff >= 0.10, "slopes differ by >= 10%");
    report(2, "open-loop behaviour", o);
}

// 3. Teacher reaches the band, clone generalizes.
void teacher_and_cloning()
{
    Check o;
    const auto t0 = Clock::now();
    const SimConfig sc;
    const auto p = PlateParams::calibrated();
    double worst = 0.0;
    for (double x6 : sc.x6_starts) {
        PidController pid(PidGains{}, sc.dt_control);
        const auto cl = simulate_closed_loop(initial_state(x6), pid, sc, p, AlphaCheck::off);
        for (std::size_t i = 0; i < cl.trace.t.size(); ++i) {
            if (cl.trace.t[i] >= 10.0) worst = std::max(worst, std::abs(target_error(cl.trace.states[i])));
        }
    }
    o.detail << " PID worst |x6+x5| for t >= 10 s: " << worst;
    o.require(worst <= 2.0, "PID within the band from all starts");

    // Every fifth row held out; normalization fitted on the rest.
    const auto rows = generate_dataset(sc, PidGains{}, p);
    std::vector<DataRow> fit, held;
    for (std::size_t i = 0; i < rows.size(); ++i) (i % 5 == 4 ? held : fit).push_back(rows[i]);
    const NormSpec n = fit_norm(fit);
    const Network net = train(default_architecture(0), to_samples(fit, n), TrainConfig{}).net;
    const double rmse = batch_loss(net, to_samples(held, n), Loss::rmse);
    o.detail << ", held-out normalized RMSE " << rmse << " on " << held.size() << " rows";
    o.require(rmse <= 0.05, "held-out RMSE <= 0.05");
    const double secs = seconds_since(t0);
    o.detail << ", " << secs << " s";
    o.require(secs < 300.0, "pipeline < 5 min");
    report(3, "teacher and cloning", o);
}

// 4. Verdicts against activation-pattern enumeration.
void verifier_soundness()
{
    Check o;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(9001);
    int verified = 0, falsified = 0, mismatches = 0, bad_witness = 0, fuzz_violations = 0, timeouts = 0;
    for (int id = 0; id < 200; ++id) {
        const testing::RandomCase rc = testing::random_case(rng, 5000 + id);
        const bool expect = testing::oracle_falsifiable(rc.net, rc.spec);
        const Verdict v = bab_verify(rc.net, rc.spec);
        if (v.outcome == Outcome::timeout) {
            ++timeouts;
            continue;
        }
        if ((v.outcome == Outcome::falsified) != expect) ++mismatches;
        if (v.outcome == Outcome::falsified) {
            ++falsified;
            if (!is_counterexample(rc.net, rc.spec, v.witness_input)) ++bad_witness;
            continue;
        }
        ++verified;
        for (int k = 0; k < 100000; ++k) {
            const Eigen::VectorXd x = testing::uniform_in(rc.spec.input_box, rng);
            const std::vector<double> xs(x.data(), x.data() + x.size());
            if (!testing::premise_holds(rc.spec, xs)) continue;
            if (testing::conclusion_violation(rc.net, rc.spec, xs) > kConclusionMargin) {
                ++fuzz_violations;
                break;
            }
        }
    }
    const double secs = seconds_since(t0);
    o.detail << " " << verified << " verified, " << falsified << " falsified, " << mismatches << " mismatches, "
             << bad_witness << " bad witnesses, " << fuzz_violations << " fuzzing violations, " << timeouts
             << " timeouts, " << secs << " s";
    o.require(mismatches == 0 && timeouts == 0, "verdicts equal the oracle");
    o.require(bad_witness == 0, "witnesses replay");
    o.require(fuzz_violations == 0, "verified specs survive fuzzing");
    o.require(secs < 600.0, "runtime < 10 min");
    report(4, "verifier soundness and completeness", o);
}

std::string ystar_text(const CriticalResult& r)
{
    if (!r.ystar) return "Failed";
    bool vacuous = false;
    for (const auto& p : r.probes) {
        if (p.ystar == *r.ystar) vacuous = p.verdict.vacuous;
    }
    std::ostringstream os;
    os << *r.ystar << (r.bound_only ? " (bound)" : "") << (vacuous ? " (vacuous)" : "");
    return os.str();
}

// 5. Critical y* table and its structure.
void critical_ystar()
{
    Check o;
    const Pipeline& pl = pipeline();
    const IntervalVector box = data_box(pl.norm);
    const PropertyThresholds th;
    const VerifyConfig vc;
    const CriticalSearch search{vc.resolution, vc.p3_max, vc.budget};
    std::printf("  critical y* table (data box of the 216-row dataset)\n  %-12s %20s %20s %20s %20s\n", "network", "P1",
                "P2", "P3", "P4");
    std::array<std::optional<double>, 2> p1{};
    int idx = 0;
    for (const auto& [name, net] : {std::pair{"naive", &pl.naive}, std::pair{"adversarial", &pl.adversarial}}) {
        const Network core = embed_normalization(*net);
        std::array<CriticalResult, 4> res;
        for (int k = 1; k <= 4; ++k) res[static_cast<std::size_t>(k - 1)] = find_critical_ystar(core, k, box, search, th);
        std::printf("  %-12s %20s %20s %20s %20s\n", name, ystar_text(res[0]).c_str(), ystar_text(res[1]).c_str(),
                    ystar_text(res[2]).c_str(), ystar_text(res[3]).c_str());
        p1[static_cast<std::size_t>(idx++)] = res[0].ystar;

        for (int k : {1, 2, 4}) {
            const CriticalResult& r = res[static_cast<std::size_t>(k - 1)];
            // Every recorded probe: verified at y implies verified at any larger probed y.
            double first_verified = std::numeric_limits<double>::infinity();
            for (const auto& pr : r.probes) {
                if (pr.verdict.outcome == Outcome::verified) first_verified = std::min(first_verified, pr.ystar);
            }
            bool mono = true;
            for (const auto& pr : r.probes) {
                if (pr.ystar >= first_verified && pr.verdict.outcome == Outcome::falsified) mono = false;
            }
            if (r.ystar) {
                const Verdict a = bab_verify(core, encode_property(k, *r.ystar, box, th), vc.budget);
                const Verdict b = bab_verify(core, encode_property(k, *r.ystar + 1.0, box, th), vc.budget);
                mono = mono && a.outcome == Outcome::verified && b.outcome == Outcome::verified;
                if (*r.ystar > 0.0) {
                    const Verdict below = bab_verify(core, encode_property(k, *r.ystar - search.resolution, box, th), vc.budget);
                    mono = mono && below.outcome != Outcome::verified;
                }
            }
            o.require(mono, std::string(name) + " P" + std::to_string(k) + " monotone");
        }

        // P4 evaluates at zero when the widest premise already holds.
        double extent = 0.0;
        for (int s : {-1, 1}) extent = std::max(extent, std::abs(s > 0 ? box[4].hi + box[5].hi : box[4].lo + box[5].lo));
        const Verdict wide = bab_verify(core, encode_property(4, extent + 1.0, box, th), vc.budget);
        if (wide.outcome == Outcome::verified) {
            o.require(res[3].ystar && *res[3].ystar == 0.0, std::string(name) + " P4 at y*=0");
        }
    }
    o.detail << " adversarial P1 " << (p1[1] ? std::to_string(*p1[1]) : "Failed") << " vs naive P1 "
             << (p1[0] ? std::to_string(*p1[0]) : "Failed") << " (reported: adversarial <= naive is "
             << (p1[1] && p1[0] ? (*p1[1] <= *p1[0] ? "true" : "false") : "undecided") << ")";
    report(5, "critical y* table", o);
}

// 6. Robustness success-rate grid.
void robustness_grid()
{
    Check o;
    const Pipeline& pl = pipeline();
    std::vector<Eigen::VectorXd> points;
    for (const auto& s : pl.samples) points.push_back(s.x);
    const IntervalVector unit(6, Interval(0.0, 1.0));
    SweepConfig cfg;
    cfg.jobs = worker_count();
    for (const auto& [name, net] : {std::pair{"naive", &pl.naive}, std::pair{"adversarial", &pl.adversarial}}) {
        const auto t0 = Clock::now();
        const auto cells = robustness_sweep(strip_norm(*net), points, unit, cfg);
        const double secs = seconds_since(t0);
        std::printf("  %s success rates (%%), rows eps, columns L*\n  %10s", name, "eps \\ L*");
        for (double l : cfg.lstar_list) std::printf(" %10g", l);
        std::printf("\n");
        auto cell = [&](double e, double l) -> const SweepCell& {
            for (const auto& c : cells) {
                if (c.eps == e && c.lstar == l) return c;
            }
            throw std::logic_error("missing sweep cell");
        };
        bool monotone = true, budget = true;
        for (double e : cfg.eps_list) {
            std::printf("  %10g", e);
            double prev = -1.0;
            for (double l : cfg.lstar_list) {
                const SweepCell& c = cell(e, l);
                if (c.complete) {
                    std::printf(" %10.1f", c.rate());
                    if (c.rate() < prev) monotone = false;
                    prev = c.rate();
                    if (c.attempted != static_cast<int>(points.size())) budget = false;
                } else {
                    std::printf(" %10s", "-");
                }
            }
            std::printf("\n");
        }
        const SweepCell& loose = cell(cfg.eps_list.front(), cfg.lstar_list.back());
        o.require(cells.size() == 16, std::string(name) + " 4x4 grid");
        o.require(loose.complete && loose.rate() == 100.0, std::string(name) + " 100% at the loosest cell");
        o.require(monotone, std::string(name) + " non-decreasing along L*");
        o.require(budget, std::string(name) + " complete cells cover every point");
        o.require(secs < 1200.0, std::string(name) + " runtime < 20 min");
        o.detail << " " << name << " " << secs << " s, loosest cell " << loose.rate() << "%;";
    }
    report(6, "robustness grid", o);
}

// Branch of r whose initial interval holds x6.
const BranchResult* owner(const ReachResult& r, double x6)
{
    for (const auto& b : r.branches) {
        if (b.x6_init.contains(x6)) return &b;
    }
    return nullptr;
}

struct ReachRun {
    std::string name;
    ReachResult result;
    double seconds = 0.0;
};

std::vector<ReachRun>& reach_runs()
{
    static std::vector<ReachRun> runs = [] {
        std::vector<ReachRun> out;
        const Pipeline& pl = pipeline();
        ReachConfig cfg;
        cfg.jobs = worker_count();
        for (const auto& [name, net] : {std::pair{"naive", &pl.naive}, std::pair{"adversarial", &pl.adversarial}}) {
            const auto t0 = Clock::now();
            ReachRun r{name, reach_full(Interval(1.43, 4.29), *net, PlateParams::calibrated(), cfg), 0.0};
            r.seconds = seconds_since(t0);
            out.push_back(std::move(r));
        }
        return out;
    }();
    return runs;
}

// 7. Sampled trajectories stay inside the branch hulls.
void reach_soundness()
{
    Check o;
    const Pipeline& pl = pipeline();
    const ReachConfig cfg;
    SimConfig sc;
    sc.t_end = cfg.t_end;
    sc.dt_model = cfg.dt;
    sc.dt_control = cfg.dt_control;
    sc.alpha_mode = cfg.alpha_mode;
    const auto p = PlateParams::calibrated();
    std::size_t i = 0;
    for (const auto* net : {&pl.naive, &pl.adversarial}) {
        const ReachRun& run = reach_runs()[i++];
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> x6d(1.43, 4.29);
        int escaped = 0, unowned = 0, failed_branches = 0;
        std::size_t checkpoints = 0;
        for (const auto& b : run.result.branches) failed_branches += b.ok ? 0 : 1;
        for (int k = 0; k < 100; ++k) {
            const double x6 = x6d(rng);
            NetworkController ctrl(*net);
            const auto cl = simulate_closed_loop(initial_state(x6), ctrl, sc, p, AlphaCheck::off);
            std::vector<State> at;
            for (const auto& q : cl.queries) at.push_back(q.state);
            at.push_back(cl.trace.states.back());
            const BranchResult* b = owner(run.result, x6);
            if (b == nullptr || !b->ok || b->checkpoints.size() != at.size()) {
                ++unowned;
                continue;
            }
            checkpoints = b->checkpoints.size();
            bool inside = true;
            for (std::size_t c = 0; c < at.size(); ++c) {
                for (std::size_t d = 0; d < 6; ++d) {
                    const Interval& h = b->checkpoints[c][d];
                    inside = inside && at[c][d] >= h.lo - 1e-6 && at[c][d] <= h.hi + 1e-6;
                }
            }
            escaped += inside ? 0 : 1;
        }
        o.detail << " " << run.name << ": " << run.result.branches.size() << " branches, " << failed_branches
                 << " failed, " << checkpoints << " checkpoints, " << escaped << " escapes, " << unowned
                 << " unchecked, " << run.seconds << " s;";
        o.require(escaped == 0 && unowned == 0, run.name + " all 100 trajectories contained");
        o.require(checkpoints == static_cast<std::size_t>(cfg.control_steps()) + 1, run.name + " checkpoint count");
        o.require(run.seconds < 1800.0, run.name + " runtime < 30 min");
    }
    report(7, "reachability soundness", o);
}

// 8. Goal band on the final sets.
void goal_check_criterion()
{
    Check o;
    std::mt19937_64 rng(41);
    double worst_gap = 0.0;
    bool samples_below = true, agrees = true;
    long sets = 0;
    for (const ReachRun& run : reach_runs()) {
        const GoalResult g = goal_check(run.result, 2.0);
        o.detail << " " << run.name << ": " << goal_name(g.verdict) << " (max |x6+x5| " << g.max_abs << ");";
        double expect = 0.0;
        for (const auto& b : run.result.branches) {
            for (const Zonotope& z : b.final_sets) {
                ++sets;
                const double up = band_max(z);
                const Zonotope neg{-z.center, -z.generators};
                expect = std::max({expect, up, band_max(neg)});
                // Closed form against the maximizing vertex.
                Eigen::VectorXd xi(z.count());
                for (int j = 0; j < z.count(); ++j) xi[j] = z.generators(4, j) + z.generators(5, j) >= 0 ? 1.0 : -1.0;
                const Eigen::VectorXd v = z.center + z.generators * xi;
                worst_gap = std::max(worst_gap, std::abs(v[4] + v[5] - up));
                std::uniform_real_distribution<double> u(-1, 1);
                for (int k = 0; k < 100000 / std::max<long>(1, static_cast<long>(b.final_sets.size() * run.result.branches.size())); ++k) {
                    for (int j = 0; j < z.count(); ++j) xi[j] = u(rng);
                    const Eigen::VectorXd x = z.center + z.generators * xi;
                    samples_below = samples_below && x[4] + x[5] <= up + 1e-9;
                }
            }
        }
        if (run.result.complete()) agrees = agrees && std::abs(expect - g.max_abs) <= 1e-9 * (1.0 + expect);
    }
    o.detail << " closed form vs vertex gap " << worst_gap << " over " << sets << " sets";
    o.require(worst_gap <= 1e-9, "closed form attained at a vertex");
    o.require(samples_below, "1e5 samples below the closed form");
    o.require(agrees, "goal maximum equals the per-set maxima");
    report(8, "goal check", o);
}

std::vector<bool> relu_pattern(const Network& net, const Eigen::VectorXd& x)
{
    std::vector<bool> out;
    const auto pre = forward_preacts(net, x);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        if (net.layers[l].act != Activation::relu) continue;
        for (Eigen::Index i = 0; i < pre[l].size(); ++i) out.push_back(pre[l][i] > 0.0);
    }
    return out;
}

// 9. Attack strength, gradients, Lipschitz ordering.
void training_properties()
{
    Check o;
    std::mt19937_64 rng(51);
    AttackConfig ac;
    ac.epsilon = 0.05;
    ac.step_size = ac.epsilon / 4;
    double worst_ratio = 1.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Network net = testing::random_network({6, 8, 1}, 700 + static_cast<std::uint64_t>(trial));
        const Eigen::VectorXd x = testing::uniform_vec(6, 0.1, 0.9, rng);
        const double y = forward_scalar(net, x) + 0.01;
        IntervalVector ball;
        for (int i = 0; i < 6; ++i) ball.push_back({x[i] - ac.epsilon, x[i] + ac.epsilon});
        double grid = 0.0;
        for (int k = 0; k < 10000; ++k) {
            const double r = forward_scalar(net, testing::uniform_in(ball, rng)) - y;
            grid = std::max(grid, r * r);
        }
        const AttackResult a = pgd_attack(net, x, y, ac, InputBox::unit(6), rng);
        if (grid > 0.0) worst_ratio = std::min(worst_ratio, a.loss / grid);
    }
    o.detail << " PGD / grid worst ratio " << worst_ratio;
    o.require(worst_ratio >= 0.95, "PGD >= 0.95 x grid");

    Network net = testing::random_network({6, 6, 4, 1, 1}, 77);
    std::vector<Sample> batch;
    for (int k = 0; k < 8; ++k) batch.push_back({testing::uniform_vec(6, 0, 1, rng), std::uniform_real_distribution<double>(0, 1)(rng)});
    const Gradient g = gradient(net, batch, Loss::mse);
    double worst_rel = 0.0;
    int checked = 0;
    const double h = 1e-6;
    auto probe = [&](double& param, double analytic) {
        const double keep = param;
        std::vector<std::vector<bool>> before;
        for (const auto& s : batch) before.push_back(relu_pattern(net, s.x));
        bool same = true;
        param = keep + h;
        const double up = batch_loss(net, batch);
        for (std::size_t i = 0; i < batch.size(); ++i) same = same && relu_pattern(net, batch[i].x) == before[i];
        param = keep - h;
        const double dn = batch_loss(net, batch);
        for (std::size_t i = 0; i < batch.size(); ++i) same = same && relu_pattern(net, batch[i].x) == before[i];
        param = keep;
        if (!same) return;
        worst_rel = std::max(worst_rel, testing::rel_err(analytic, (up - dn) / (2 * h), 1e-6));
        ++checked;
    };
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        auto& layer = net.layers[l];
        for (Eigen::Index r = 0; r < layer.w.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.w.cols(); ++c) probe(layer.w(r, c), g.dw[l](r, c));
            probe(layer.b[r], g.db[l][r]);
        }
    }
    o.detail << ", backprop vs finite differences worst relative " << worst_rel << " over " << checked << " parameters";
    o.require(worst_rel <= 1e-4 && checked > 40, "backprop matches finite differences");

    const Pipeline& pl = pipeline();
    AttackConfig lip;
    lip.epsilon = 1e-2;
    lip.step_size = lip.epsilon / 4;
    const double ln = empirical_lipschitz(strip_norm(pl.naive), pl.samples, lip, InputBox::unit(6), 99);
    const double la = empirical_lipschitz(strip_norm(pl.adversarial), pl.samples, lip, InputBox::unit(6), 99);
    o.detail << ", empirical Lipschitz naive " << ln << " adversarial " << la;
    o.require(la <= ln, "adversarial Lipschitz <= naive");
    report(9, "training properties", o);
}

}  // namespace

int main()
{
    const auto t0 = Clock::now();
    const std::vector<std::function<void()>> criteria{dynamics_fidelity, open_loop_behaviour, teacher_and_cloning,
                                                      verifier_soundness, critical_ystar,      robustness_grid,
                                                      reach_soundness,    goal_check_criterion, training_properties};
    for (const auto& c : criteria) {
        try {
            c();
        } catch (const std::exception& e) {
            ++g_failures;
            std::printf("criterion raised an exception: %s\n", e.what());
        }
    }
    const auto& pl = pipeline();
    std::printf("training: naive %.1f s, adversarial %.1f s; total %.1f s; %d criteria failed\n", pl.naive_seconds,
                pl.adversarial_seconds, seconds_since(t0), g_failures);
    return g_failures == 0 ? 0 : 1;
}
