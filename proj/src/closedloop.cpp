#include "glider/closedloop.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace glider {

void PidGains::validate() const
{
    if (!std::isfinite(kp) || !std::isfinite(ki) || !std::isfinite(kd)) {
        throw std::invalid_argument("PidGains: gains must be finite");
    }
    if (!(u_min <= u_center && u_center <= u_max)) {
        throw std::invalid_argument("PidGains: require u_min <= u_center <= u_max");
    }
}

double pid_step(double e, PidState& st, const PidGains& g, double dt)
{
    if (!(dt > 0.0)) throw std::invalid_argument("pid_step: dt must be positive");
    const double deriv = st.has_prev ? (e - st.prev) / dt : 0.0;
    const double tentative = st.integral + e * dt;
    const double raw = g.u_center + g.kp * e + g.ki * tentative + g.kd * deriv;
    double u = 0.0;
    if (raw >= g.u_min && raw <= g.u_max) {
        st.integral = tentative;
        u = raw;
    } else {
        u = std::clamp(g.u_center + g.kp * e + g.ki * st.integral + g.kd * deriv, g.u_min, g.u_max);
    }
    st.prev = e;
    st.has_prev = true;
    return u;
}

PidController::PidController(PidGains gains, double dt_control, TargetLine line)
    : gains_(gains), dt_(dt_control), line_(line)
{
    gains_.validate();
    if (!(dt_ > 0.0)) throw std::invalid_argument("PidController: dt_control must be positive");
}

double PidController::act(const State& s)
{
    return pid_step(line_.error(s), state_, gains_, dt_);
}

NetworkController::NetworkController(Network net, double u_min, double u_max)
    : net_(std::move(net)), u_min_(u_min), u_max_(u_max)
{
    net_.validate();
    if (net_.input_dim() != 6 || net_.output_dim() != 1) {
        throw std::invalid_argument("NetworkController: expected a 6-input, 1-output network");
    }
}

double NetworkController::act(const State& s)
{
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(s.data(), 6);
    return std::clamp(forward_scalar(net_, x, true), u_min_, u_max_);
}

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v;
    if (n == 1) return {a};
    for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
    return v;
}

namespace {

int integral_ratio(double num, double den, const char* what)
{
    const double r = num / den;
    const long k = std::lround(r);
    if (k < 1 || std::abs(r - static_cast<double>(k)) > 1e-9 * std::max(1.0, r)) {
        throw std::invalid_argument(std::string("SimConfig: ") + what);
    }
    return static_cast<int>(k);
}

}  // namespace

void SimConfig::validate() const
{
    if (!(t_end > 0.0 && dt_model > 0.0 && dt_control > 0.0)) {
        throw std::invalid_argument("SimConfig: times must be positive");
    }
    steps_per_control();
    control_steps();
    if (n_sims < 1 || static_cast<int>(x6_starts.size()) != n_sims) {
        throw std::invalid_argument("SimConfig: x6_starts must have n_sims entries");
    }
    if (record_skip < 0 || record_skip >= control_steps()) {
        throw std::invalid_argument("SimConfig: record_skip must leave at least one query");
    }
}

int SimConfig::steps_per_control() const
{
    return integral_ratio(dt_control, dt_model, "dt_control must be an integer multiple of dt_model");
}

int SimConfig::control_steps() const
{
    return integral_ratio(t_end, dt_control, "t_end must be an integer multiple of dt_control");
}

ClosedLoopTrace simulate_closed_loop(const State& s0, Controller& ctrl, const SimConfig& cfg, const PlateParams& p,
                                     AlphaCheck check)
{
    const int n_ctrl = cfg.control_steps();
    const int n_inner = cfg.steps_per_control();
    ClosedLoopTrace out;
    Trace& tr = out.trace;
    const auto total = static_cast<std::size_t>(n_ctrl) * static_cast<std::size_t>(n_inner) + 1;
    tr.t.reserve(total);
    tr.states.reserve(total);
    tr.ex.reserve(total);

    State s = s0;
    tr.t.push_back(0.0);
    tr.states.push_back(s);
    int step = 0;
    for (int k = 0; k < n_ctrl; ++k) {
        const double tk = k * cfg.dt_control;
        const double u = ctrl.act(s);
        if (tr.ex.empty()) tr.ex.push_back(u);
        out.queries.push_back({k, tk, s, target_error(s), u});
        for (int j = 0; j < n_inner; ++j) {
            const double t = step * cfg.dt_model;
            try {
                s = rk4_step(s, u, p, cfg.dt_model, t, cfg.alpha_mode);
            } catch (const IntegrationDiverged& e) {
                std::ostringstream os;
                os << "closed loop diverged in control step " << k << " at t=" << e.time();
                throw ControlStepDiverged(k, e.time(), os.str());
            }
            ++step;
            if (check != AlphaCheck::off && !alpha_in_region(angle_of_attack(s, u, p, AlphaMode::exact))) {
                if (check == AlphaCheck::error) {
                    std::ostringstream os;
                    os << "angle of attack left [-pi/2, 0] at t=" << step * cfg.dt_model;
                    throw AlphaRegionError(os.str());
                }
                ++tr.alpha_violations;
            }
            tr.t.push_back(step * cfg.dt_model);
            tr.states.push_back(s);
            tr.ex.push_back(u);
        }
    }
    return out;
}

std::vector<DataRow> generate_dataset(const SimConfig& cfg, const PidGains& gains, const PlateParams& p)
{
    cfg.validate();
    std::vector<DataRow> rows;
    for (int i = 0; i < cfg.n_sims; ++i) {
        PidController pid(gains, cfg.dt_control);
        const ClosedLoopTrace cl =
            simulate_closed_loop(initial_state(cfg.x6_starts[static_cast<std::size_t>(i)]), pid, cfg, p);
        for (const auto& q : cl.queries) {
            if (q.index < cfg.record_skip) continue;
            rows.push_back({q.state, q.err, q.u});
        }
    }
    return rows;
}

NormSpec fit_norm(std::span<const DataRow> rows)
{
    if (rows.size() < 2) throw std::invalid_argument("fit_norm: need at least two rows");
    NormSpec n;
    n.in_min.assign(6, std::numeric_limits<double>::infinity());
    n.in_max.assign(6, -std::numeric_limits<double>::infinity());
    n.out_min = std::numeric_limits<double>::infinity();
    n.out_max = -std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < 6; ++i) {
            n.in_min[i] = std::min(n.in_min[i], r.state[i]);
            n.in_max[i] = std::max(n.in_max[i], r.state[i]);
        }
        n.out_min = std::min(n.out_min, r.actuation);
        n.out_max = std::max(n.out_max, r.actuation);
    }
    n.validate();
    return n;
}

std::vector<Sample> to_samples(std::span<const DataRow> rows, const NormSpec& norm)
{
    std::vector<Sample> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(r.state.data(), 6);
        out.push_back({norm.normalize(x), norm.normalize_output(r.actuation)});
    }
    return out;
}

}  // namespace glider
