#include "glider/aeromodel.hpp"

#include <cmath>
#include <sstream>

namespace glider {

void PlateParams::validate() const
{
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string("PlateParams: ") + name + " must be positive and finite");
        }
    };
    positive(ell, "ell");
    positive(mass, "mass");
    positive(rho_f, "rho_f");
    positive(delta_s, "delta_s");
    positive(cl1, "cl1");
    positive(cl2, "cl2");
    positive(cd0, "cd0");
    positive(cd1, "cd1");
    positive(cd90, "cd90");
    positive(ccp0, "ccp0");
    positive(ccp1, "ccp1");
    positive(ccp2, "ccp2");
    positive(cr, "cr");
    positive(a_semi, "a_semi");
    positive(b_semi, "b_semi");
    if (!std::isfinite(alpha0)) throw std::invalid_argument("PlateParams: alpha0 must be finite");
    if (!std::isfinite(g)) throw std::invalid_argument("PlateParams: g must be finite");
    if (inertia && !(*inertia > 0.0)) throw std::invalid_argument("PlateParams: inertia must be positive");
    if (!inertia && !(inertia_at(kActuationMin) > 0.0)) {
        throw std::invalid_argument("PlateParams: inertia formula is not positive");
    }
    auto unit = [](double v, const char* name) {
        if (v != 1.0 && v != -1.0) throw std::invalid_argument(std::string("PlateParams: ") + name + " must be +1 or -1");
    };
    unit(tau_r_sign, "tau_r_sign");
    unit(lift_normal_sign, "lift_normal_sign");
    unit(lever_sign, "lever_sign");
}

PlateParams PlateParams::calibrated()
{
    PlateParams p;
    p.mass = 0.04;
    p.inertia = 1.75;
    p.lift_normal_sign = -1.0;
    p.lever_sign = -1.0;
    return p;
}

AeroBreakdown aero_breakdown(const State& s, double ex, const PlateParams& p)
{
    AeroBreakdown b;
    b.alpha = angle_of_attack(s, ex, p, AlphaMode::exact);
    const Coefficients<double> c = force_coefficients(b.alpha, p);
    b.f_sel = c.f_sel;
    b.c_lift = c.c_lift;
    b.c_drag = c.c_drag;
    b.l_cp = c.l_cp;
    const Forces<double> f = aero_forces(s, ex, c, p);
    b.lift_t = f.lift_t;
    b.lift_r = f.lift_r;
    b.drag = f.drag;
    const auto tau = aero_torques(s, ex, c, p);
    b.tau_t = tau[0];
    b.tau_r = tau[1];
    return b;
}

bool alpha_in_region(double alpha, double margin)
{
    return alpha >= -std::numbers::pi / 2.0 - margin && alpha <= margin;
}

namespace {

bool all_finite(const State& s)
{
    for (double v : s) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

State axpy(const State& x, double a, const State& k)
{
    State r;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = x[i] + a * k[i];
    return r;
}

}  // namespace

State rk4_step(const State& s, double dt, const DerivativeFn& f, double t)
{
    if (dt < 0.0) throw std::invalid_argument("rk4_step: dt must be non-negative");
    if (dt == 0.0) return s;
    const State k1 = f(s);
    const State k2 = f(axpy(s, dt / 2.0, k1));
    const State k3 = f(axpy(s, dt / 2.0, k2));
    const State k4 = f(axpy(s, dt, k3));
    State r;
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if (!all_finite(r)) {
        std::ostringstream os;
        os << "integration diverged at t=" << t + dt;
        throw IntegrationDiverged(t + dt, os.str());
    }
    return r;
}

State rk4_step(const State& s, double ex, const PlateParams& p, double dt, double t, AlphaMode mode)
{
    return rk4_step(s, dt, [&](const State& x) { return state_derivative<double>(x, ex, p, mode); }, t);
}

Trace simulate_open_loop(const State& s0, double ex, const PlateParams& p, double t_end, double dt,
                         AlphaCheck check)
{
    if (!(t_end > 0.0)) throw std::invalid_argument("simulate_open_loop: t_end must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("simulate_open_loop: dt must be positive");
    const auto n = static_cast<std::size_t>(std::llround(t_end / dt));
    Trace tr;
    tr.t.reserve(n + 1);
    tr.states.reserve(n + 1);
    tr.ex.reserve(n + 1);
    State s = s0;
    tr.t.push_back(0.0);
    tr.states.push_back(s);
    tr.ex.push_back(ex);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        s = rk4_step(s, ex, p, dt, t);
        if (check != AlphaCheck::off && !alpha_in_region(angle_of_attack(s, ex, p, AlphaMode::exact))) {
            if (check == AlphaCheck::error) {
                std::ostringstream os;
                os << "angle of attack left [-pi/2, 0] at t=" << t + dt;
                throw AlphaRegionError(os.str());
            }
            ++tr.alpha_violations;
        }
        tr.t.push_back(static_cast<double>(i + 1) * dt);
        tr.states.push_back(s);
        tr.ex.push_back(ex);
    }
    return tr;
}

double glide_slope(const Trace& tr, double t_from)
{
    std::size_t first = tr.t.size();
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        if (tr.t[i] >= t_from - 1e-9) {
            first = i;
            break;
        }
    }
    if (first + 1 >= tr.t.size()) throw std::invalid_argument("glide_slope: window holds fewer than two samples");
    const State& a = tr.states[first];
    const State& b = tr.states.back();
    return (b[5] - a[5]) / (b[4] - a[4]);
}

}  // namespace glider
