#include "glider/reach.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "glider/dual.hpp"

namespace glider {

namespace {

constexpr int kAug = 7;  // six states and the held input

template <class T>
void eval_augmented(const std::array<T, kAug>& in, const PlateParams& p, AlphaMode mode, std::array<T, kAug>& out)
{
    StateT<T> s;
    for (int i = 0; i < 6; ++i) s[static_cast<std::size_t>(i)] = in[static_cast<std::size_t>(i)];
    const StateT<T> d = state_derivative<T>(s, in[6], p, mode);
    for (int i = 0; i < 6; ++i) out[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(i)];
    out[6] = T(0.0);
}

Interval alpha_enclosure(const IntervalVector& b, const PlateParams& p, AlphaMode mode)
{
    const StateT<Interval> s{b[0], b[1], b[2], b[3], b[4], b[5]};
    return angle_of_attack<Interval>(s, b[6], p, mode);
}

IntervalVector mat_vec(const IntervalMatrix& m, const IntervalVector& v)
{
    IntervalVector r(m.size(), Interval(0.0));
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < v.size(); ++j) r[i] += m[i][j] * v[j];
    }
    return r;
}

bool inside(const IntervalVector& a, const IntervalVector& b)
{
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!b[i].contains(a[i])) return false;
    }
    return true;
}

void check_finite(const IntervalVector& v, const char* what)
{
    for (const auto& x : v) {
        if (!x.is_finite()) throw ReachBlowUp(std::string("non-finite ") + what);
    }
}

}  // namespace

Dynamics glider_dynamics(const PlateParams& p, AlphaMode mode, double alpha_margin)
{
    Dynamics d;
    d.dim = kAug;
    d.point = [p, mode](const Eigen::VectorXd& x, Eigen::VectorXd& f, Eigen::MatrixXd& j) {
        using D = Dual<double, kAug>;
        std::array<D, kAug> in;
        for (int i = 0; i < kAug; ++i) in[static_cast<std::size_t>(i)] = D::variable(x[i], i);
        std::array<D, kAug> out;
        eval_augmented(in, p, mode, out);
        f.resize(kAug);
        j.resize(kAug, kAug);
        for (int i = 0; i < kAug; ++i) {
            f[i] = out[static_cast<std::size_t>(i)].v;
            for (int k = 0; k < kAug; ++k) j(i, k) = out[static_cast<std::size_t>(i)].d[static_cast<std::size_t>(k)];
        }
    };
    d.enclosure = [p, mode](const IntervalVector& b, IntervalVector& f, IntervalMatrix& j) {
        using D = Dual<Interval, kAug>;
        std::array<D, kAug> in;
        for (int i = 0; i < kAug; ++i) in[static_cast<std::size_t>(i)] = D::variable(b[static_cast<std::size_t>(i)], i);
        std::array<D, kAug> out;
        eval_augmented(in, p, mode, out);
        f.assign(kAug, Interval(0.0));
        j.assign(kAug, IntervalVector(kAug, Interval(0.0)));
        for (std::size_t i = 0; i < kAug; ++i) {
            f[i] = out[i].v;
            for (std::size_t k = 0; k < kAug; ++k) j[i][k] = out[i].d[k];
        }
    };
    d.domain_check = [p, mode, alpha_margin](const IntervalVector& b) {
        const Interval a = alpha_enclosure(b, p, mode);
        if (a.lo < -std::numbers::pi / 2.0 - alpha_margin || a.hi > alpha_margin) {
            std::ostringstream os;
            os << "angle of attack enclosure " << a << " leaves the modelled region";
            throw ReachDomainError(os.str());
        }
    };
    return d;
}

Dynamics linear_dynamics(const Eigen::MatrixXd& a)
{
    Dynamics d;
    d.dim = static_cast<int>(a.rows());
    d.point = [a](const Eigen::VectorXd& x, Eigen::VectorXd& f, Eigen::MatrixXd& j) {
        f = a * x;
        j = a;
    };
    d.enclosure = [a](const IntervalVector& b, IntervalVector& f, IntervalMatrix& j) {
        const auto n = static_cast<std::size_t>(a.rows());
        f.assign(n, Interval(0.0));
        j.assign(n, IntervalVector(n, Interval(0.0)));
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                const double v = a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
                j[r][c] = Interval(v);
                f[r] += v * b[c];
            }
        }
    };
    d.domain_check = [](const IntervalVector&) {};
    return d;
}

IntervalMatrix interval_jacobian(const IntervalVector& s_set, const Interval& u_set, const PlateParams& p,
                                 AlphaMode mode)
{
    if (s_set.size() != 6) throw std::invalid_argument("interval_jacobian: expected six state intervals");
    IntervalVector b = s_set;
    b.push_back(u_set);
    const Dynamics d = glider_dynamics(p, mode, 0.0);
    IntervalVector f;
    IntervalMatrix j;
    d.enclosure(b, f, j);
    j.resize(6);
    return j;
}

Zonotope reach_step(const Zonotope& z, const Dynamics& dyn, double dt, int max_order, double blowup,
                    StepDiagnostics* diag)
{
    if (z.dim() != dyn.dim) throw std::invalid_argument("reach_step: dimension mismatch");
    if (!(dt > 0.0)) throw std::invalid_argument("reach_step: dt must be positive");
    const auto n = static_cast<std::size_t>(dyn.dim);
    const IntervalVector h = zono_hull(z);
    check_finite(h, "set");
    dyn.domain_check(h);

    Eigen::VectorXd fc;
    Eigen::MatrixXd jc;
    dyn.point(z.center, fc, jc);
    IntervalVector fh;
    IntervalMatrix jh;
    dyn.enclosure(h, fh, jh);

    // Mean-value linearization error over the hull.
    IntervalVector dev(n);
    for (std::size_t i = 0; i < n; ++i) dev[i] = h[i] - z.center[static_cast<Eigen::Index>(i)];
    IntervalMatrix dj = jh;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) dj[i][k] -= jc(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    }
    IntervalVector lin = mat_vec(dj, dev);
    for (auto& v : lin) v *= Interval(dt);

    // A priori enclosure B of all trajectories over [0, dt] (Picard iteration),
    // then the second-order flow term dt^2/2 * J(B) f(B).
    const Interval tau(0.0, dt);
    IntervalVector b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Interval g = h[i] + tau * fh[i];
        const double pad = 0.02 * g.width() + 1e-9 * (1.0 + g.mag());
        b[i] = Interval(g.lo - pad, g.hi + pad);
    }
    IntervalVector fb;
    IntervalMatrix jb;
    bool found = false;
    for (int it = 0; it < 30 && !found; ++it) {
        check_finite(b, "a priori enclosure");
        dyn.domain_check(b);
        dyn.enclosure(b, fb, jb);
        IntervalVector cand(n);
        for (std::size_t i = 0; i < n; ++i) cand[i] = h[i] + tau * fb[i];
        if (inside(cand, b)) {
            b = cand;
            dyn.enclosure(b, fb, jb);
            found = true;
        } else {
            // Widen only the escaping side of each dimension.
            for (std::size_t i = 0; i < n; ++i) {
                const Interval u = hull(b[i], cand[i]);
                const double pad = 0.1 * u.width() + 1e-9 * (1.0 + u.mag());
                b[i] = Interval(cand[i].lo < b[i].lo ? u.lo - pad : u.lo, cand[i].hi > b[i].hi ? u.hi + pad : u.hi);
            }
        }
    }
    if (!found) throw ReachBlowUp("a priori enclosure did not converge");
    IntervalVector flow = mat_vec(jb, fb);
    for (auto& v : flow) v *= Interval(0.5 * dt * dt);

    IntervalVector rem(n);
    for (std::size_t i = 0; i < n; ++i) rem[i] = lin[i] + flow[i];
    check_finite(rem, "remainder");
    if (diag != nullptr) {
        diag->linearization = lin;
        diag->flow = flow;
    }

    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(dyn.dim, dyn.dim) + dt * jc;
    Zonotope lin_part{z.center + dt * fc, a * z.generators};
    Zonotope out = zono_minkowski(lin_part, Zonotope::from_box(rem));
    out = zono_reduce(out, max_order);
    const IntervalVector ho = zono_hull(out);
    for (std::size_t i = 0; i < n; ++i) {
        if (!ho[i].is_finite() || ho[i].width() > blowup) {
            std::ostringstream os;
            os << "set width in dimension " << i + 1 << " exceeds " << blowup;
            throw ReachBlowUp(os.str());
        }
    }
    return out;
}

Interval nn_output_set(const Network& net0, const Zonotope& z, ReluMode mode, double u_min, double u_max)
{
    const Network net = net0.norm ? embed_normalization(net0) : net0;
    const int n_in = net.input_dim();
    if (z.dim() < n_in) throw std::invalid_argument("nn_output_set: set has fewer rows than network inputs");
    Zonotope a{z.center.head(n_in), z.generators.topRows(n_in)};
    for (const auto& l : net.layers) {
        a = zono_translate(zono_linear_map(l.w, a), l.b);
        if (l.act != Activation::relu) continue;
        const IntervalVector h = zono_hull(a);
        if (mode == ReluMode::interval) {
            IntervalVector clipped(h.size());
            for (std::size_t i = 0; i < h.size(); ++i) clipped[i] = Interval(std::max(h[i].lo, 0.0), std::max(h[i].hi, 0.0));
            a = Zonotope::from_box(clipped);
            continue;
        }
        std::vector<std::pair<Eigen::Index, double>> fresh;
        for (Eigen::Index i = 0; i < a.center.size(); ++i) {
            const Interval zi = h[static_cast<std::size_t>(i)];
            if (zi.lo >= 0.0) continue;
            if (zi.hi <= 0.0) {
                a.center[i] = 0.0;
                a.generators.row(i).setZero();
                continue;
            }
            const double lam = zi.hi / (zi.hi - zi.lo);
            const double mu = detail::up(-lam * zi.lo / 2.0, 2);
            a.center[i] = lam * a.center[i] + mu;
            a.generators.row(i) *= lam;
            // Covers rounding in the scaled row and center.
            fresh.emplace_back(i, detail::up(mu * (1.0 + 1e-12) + 1e-15 * (1.0 + std::abs(a.center[i])), 2));
        }
        if (!fresh.empty()) {
            Eigen::MatrixXd g(a.dim(), a.count() + static_cast<Eigen::Index>(fresh.size()));
            g.leftCols(a.count()) = a.generators;
            g.rightCols(static_cast<Eigen::Index>(fresh.size())).setZero();
            for (std::size_t k = 0; k < fresh.size(); ++k) {
                g(fresh[k].first, a.count() + static_cast<Eigen::Index>(k)) = fresh[k].second;
            }
            a.generators = std::move(g);
        }
    }
    const Interval y = zono_hull(a)[0];
    return Interval(std::clamp(y.lo, u_min, u_max), std::clamp(y.hi, u_min, u_max));
}

void ReachConfig::validate() const
{
    if (!(dt > 0.0 && t_end > 0.0 && dt_control > 0.0)) throw std::invalid_argument("ReachConfig: times must be positive");
    steps_per_control();
    control_steps();
    if (n_splits < 1) throw std::invalid_argument("ReachConfig: n_splits must be at least 1");
    if (max_order < 1) throw std::invalid_argument("ReachConfig: max_order must be at least 1");
    if (max_pieces < 1) throw std::invalid_argument("ReachConfig: max_pieces must be at least 1");
    if (!(blowup > 0.0)) throw std::invalid_argument("ReachConfig: blowup must be positive");
}

namespace {

int exact_ratio(double num, double den, const char* what)
{
    const double r = num / den;
    const long k = std::lround(r);
    if (k < 1 || std::abs(r - static_cast<double>(k)) > 1e-9 * std::max(1.0, r)) {
        throw std::invalid_argument(std::string("ReachConfig: ") + what);
    }
    return static_cast<int>(k);
}

Zonotope state_part(const Zonotope& z)
{
    return {z.center.head(6), z.generators.topRows(6)};
}

IntervalVector state_hull(const std::vector<Zonotope>& pieces)
{
    IntervalVector h;
    for (const auto& z : pieces) {
        IntervalVector hz = zono_hull(z);
        hz.resize(6);
        h = h.empty() ? hz : hull(h, hz);
    }
    return h;
}

}  // namespace

int ReachConfig::steps_per_control() const
{
    return exact_ratio(dt_control, dt, "dt_control must be an integer multiple of dt");
}

int ReachConfig::control_steps() const
{
    return exact_ratio(t_end, dt_control, "t_end must be an integer multiple of dt_control");
}

Zonotope with_input(const Zonotope& z, const Interval& u_set)
{
    const Zonotope s = state_part(z);
    Zonotope r{Eigen::VectorXd(kAug), Eigen::MatrixXd::Zero(kAug, s.count() + 1)};
    r.center.head(6) = s.center;
    r.center[6] = u_set.mid();
    r.generators.topLeftCorner(6, s.count()) = s.generators;
    r.generators(6, s.count()) = detail::up(std::max(u_set.hi - r.center[6], r.center[6] - u_set.lo));
    return zono_compact(r);
}

Zonotope reach_control_cycle(const Zonotope& z, const Network& net, const PlateParams& p, const ReachConfig& cfg,
                             Interval* u_used)
{
    const Interval u = nn_output_set(net, z, cfg.relu_mode);
    if (u_used != nullptr) *u_used = u;
    Zonotope cur = with_input(z, u);
    const Dynamics dyn = glider_dynamics(p, cfg.alpha_mode, cfg.alpha_margin);
    const int n = cfg.steps_per_control();
    for (int k = 0; k < n; ++k) cur = reach_step(cur, dyn, cfg.dt, cfg.max_order, cfg.blowup);
    return cur;
}

bool ReachResult::complete() const
{
    return std::all_of(branches.begin(), branches.end(), [](const BranchResult& b) { return b.ok; });
}

namespace {

BranchResult run_branch(int index, const Interval& x6, const Network& net, const PlateParams& p,
                        const ReachConfig& cfg)
{
    BranchResult br;
    br.index = index;
    br.x6_init = x6;
    const State s0 = initial_state(0.0);
    IntervalVector box;
    for (int i = 0; i < 5; ++i) box.push_back(Interval(s0[static_cast<std::size_t>(i)]));
    box.push_back(x6);
    std::vector<Zonotope> pieces{Zonotope::from_box(box)};
    br.checkpoints.push_back(state_hull(pieces));
    const int cycles = cfg.control_steps();
    try {
        for (int k = 0; k < cycles; ++k) {
            std::vector<Zonotope> next;
            Interval u_all;
            for (std::size_t i = 0; i < pieces.size(); ++i) {
                Interval u;
                next.push_back(reach_control_cycle(pieces[i], net, p, cfg, &u));
                u_all = i == 0 ? u : hull(u_all, u);
            }
            br.inputs.push_back(u_all);
            pieces = std::move(next);
            br.checkpoints.push_back(state_hull(pieces));
            if (k + 1 == cycles) break;
            // Mid-flight refinement of pieces that grew too wide.
            std::vector<Zonotope> refined;
            for (const auto& z : pieces) {
                const IntervalVector h = zono_hull(state_part(z));
                const bool wide = std::any_of(h.begin(), h.end(), [&](const Interval& v) { return v.width() > cfg.width_resplit; });
                if (wide && pieces.size() + refined.size() < static_cast<std::size_t>(cfg.max_pieces)) {
                    auto [a, b] = zono_split(state_part(z));
                    refined.push_back(std::move(a));
                    refined.push_back(std::move(b));
                } else {
                    refined.push_back(z);
                }
            }
            pieces = std::move(refined);
        }
        br.final_sets = pieces;
    } catch (const std::exception& e) {
        br.ok = false;
        std::ostringstream os;
        os << "branch " << index << " failed at control step " << br.inputs.size() << ": " << e.what();
        br.failure = os.str();
    }
    return br;
}

}  // namespace

ReachResult reach_full(const Interval& x6_init, const Network& net, const PlateParams& p, const ReachConfig& cfg)
{
    cfg.validate();
    const Network core = net.norm ? embed_normalization(net) : net;
    ReachResult res;
    res.branches.resize(static_cast<std::size_t>(cfg.n_splits));
    const double w = x6_init.width() / cfg.n_splits;
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < cfg.n_splits; i = next.fetch_add(1)) {
            const double lo = x6_init.lo + w * i;
            const double hi = i + 1 == cfg.n_splits ? x6_init.hi : x6_init.lo + w * (i + 1);
            res.branches[static_cast<std::size_t>(i)] = run_branch(i, Interval(lo, std::max(lo, hi)), core, p, cfg);
        }
    };
    const int jobs = std::clamp(cfg.jobs, 1, cfg.n_splits);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& b : res.branches) {
        if (!b.ok) continue;
        const IntervalVector& last = b.checkpoints.back();
        res.final_hull = res.final_hull.empty() ? last : hull(res.final_hull, last);
    }
    return res;
}

std::string goal_name(GoalVerdict v)
{
    switch (v) {
    case GoalVerdict::success: return "success";
    case GoalVerdict::failure: return "failure";
    case GoalVerdict::unknown: return "unknown";
    }
    return "?";
}

double band_max(const Zonotope& z)
{
    Eigen::VectorXd l = Eigen::VectorXd::Zero(z.dim());
    l[4] = 1.0;
    l[5] = 1.0;
    return zono_support(z, l);
}

GoalResult goal_check(const ReachResult& r, double ystar)
{
    GoalResult g;
    for (const auto& b : r.branches) {
        for (const auto& z : b.final_sets) {
            const Zonotope neg{-z.center, -z.generators};
            g.max_abs = std::max({g.max_abs, band_max(z), band_max(neg)});
        }
    }
    if (!r.complete() || r.branches.empty()) {
        g.verdict = GoalVerdict::unknown;
        return g;
    }
    g.verdict = g.max_abs <= ystar ? GoalVerdict::success : GoalVerdict::failure;
    return g;
}

}  // namespace glider
