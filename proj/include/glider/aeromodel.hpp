#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "glider/interval.hpp"

namespace glider {

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

// Mechanical and aerodynamic constants of the plate. Defaults are the
// published SI values; see calibrated() for the preset used by the pipeline.
struct PlateParams {
    double ell = 0.07;         // chord length [m]
    double mass = 3.175e-4;    // [kg]
    double rho_f = 1.225;      // fluid density [kg/m^3]
    double alpha0 = deg_to_rad(14.0);
    double delta_s = deg_to_rad(6.0);
    double cl1 = 0.23857;
    double cl2 = 2.8529;
    double cd0 = 0.36893;
    double cd1 = 5.1822;
    double cd90 = 0.80751;
    double ccp0 = 0.10598;
    double ccp1 = 4.9368;
    double ccp2 = 1.4996;
    double cr = 1.73;
    double a_semi = 0.03375;   // [m]
    double b_semi = 5e-4;      // [m]
    double g = 9.81;

    // m' in the translational equations. Unset means m - rho_f*pi*a*b.
    std::optional<double> m_prime;
    // Direct moment of inertia. Unset means the e_x-dependent formula.
    std::optional<double> inertia;

    double tau_r_sign = 1.0;       // selects the +/- branch of tau_R
    double lift_normal_sign = 1.0; // multiplies the y' component of the lift tuples
    double lever_sign = 1.0;       // multiplies tau_T

    double effective_mass() const
    {
        return m_prime ? *m_prime : mass - rho_f * std::numbers::pi * a_semi * b_semi;
    }
    double added_mass() const { return std::numbers::pi * rho_f * ell * ell / 4.0; }

    template <class T>
    T inertia_at(const T& ex) const
    {
        if (inertia) return T(*inertia);
        const double l4 = rho_f * std::pow(ell, 4);
        return (ex * ex + (mass * (a_semi * a_semi + b_semi * b_semi) / l4 + 1.0 / 32.0)) * l4;
    }

    // Throws std::invalid_argument naming the offending field.
    void validate() const;

    // Glide-capable preset: SI constants with a per-span mass, a direct inertia
    // constant and perpendicular lift / reversed lever conventions.
    static PlateParams calibrated();
};

// x1, x2: plate-frame velocities; x3: angular rate; x4: pitch;
// x5, x6: world position.
template <class T>
using StateT = std::array<T, 6>;
using State = StateT<double>;

enum class AlphaMode { exact, simplified };

constexpr double kActuationMin = 0.181;
constexpr double kActuationMax = 0.193;

struct AeroBreakdown {
    double alpha = 0.0;
    double f_sel = 0.0;
    double c_lift = 0.0;
    double c_drag = 0.0;
    double l_cp = 0.0;
    std::array<double, 2> lift_t{};
    std::array<double, 2> lift_r{};
    std::array<double, 2> drag{};
    double tau_t = 0.0;
    double tau_r = 0.0;
};

class IntegrationDiverged : public std::runtime_error {
public:
    IntegrationDiverged(double time, const std::string& what)
        : std::runtime_error(what), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

class AlphaRegionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- scalar-generic model ---------------------------------------------------
// T is double, Interval, or a Dual over either.

template <class T>
T angle_of_attack(const StateT<T>& s, const T& ex, const PlateParams& p, AlphaMode mode)
{
    using std::atan2;
    if (mode == AlphaMode::simplified) return atan2(s[1], s[0]);
    return atan2(s[1] - s[2] * ex * p.ell, s[0]);
}

template <class T>
T selection_fraction(const T& alpha, const PlateParams& p)
{
    using std::tanh;
    return (1.0 - tanh((alpha - p.alpha0) / p.delta_s)) / 2.0;
}

template <class T>
struct Coefficients {
    T c_lift;
    T c_drag;
    T l_cp;  // metres
    T f_sel;
};

template <class T>
Coefficients<T> force_coefficients(const T& alpha, const PlateParams& p)
{
    using std::abs;
    using std::sin;
    const T a = abs(alpha);
    const T f = selection_fraction(a, p);
    const T s1 = sin(a);
    const T s2 = sin(2.0 * a);
    const T ssq = s1 * s1;
    Coefficients<T> c{
        -(f * p.cl1 * s1 + (1.0 - f) * p.cl2 * s2),
        f * (p.cd0 + p.cd1 * ssq) + (1.0 - f) * p.cd90 * ssq,
        p.ell * (f * (p.ccp0 - p.ccp1 * (alpha * alpha))
                 + p.ccp2 * (1.0 - f) * (1.0 - a / (std::numbers::pi / 2.0))),
        f,
    };
    return c;
}

template <class T>
struct Forces {
    std::array<T, 2> lift_t;
    std::array<T, 2> lift_r;
    std::array<T, 2> drag;
};

template <class T>
Forces<T> aero_forces(const StateT<T>& s, const T& ex, const Coefficients<T>& c, const PlateParams& p)
{
    using std::sqrt;
    const T vy = s[1] - s[2] * ex * p.ell;
    const T speed = sqrt(s[0] * s[0] + vy * vy);
    const T kt = 0.5 * p.rho_f * p.ell * c.c_lift * speed;
    const T kr = -0.5 * p.rho_f * p.ell * p.ell * p.cr * s[2];
    const T kd = -0.5 * p.rho_f * p.ell * c.c_drag * speed;
    return Forces<T>{
        {kt * vy, kt * s[0] * p.lift_normal_sign},
        {kr * vy, kr * s[0] * p.lift_normal_sign},
        {kd * s[0], kd * vy},
    };
}

template <class T>
std::array<T, 2> aero_torques(const StateT<T>& s, const T& ex, const Coefficients<T>& c, const PlateParams& p)
{
    using std::abs;
    using std::sqrt;
    const T l_cm = ex * p.ell;
    const T vy = s[1] - s[2] * l_cm;
    const T speed = sqrt(s[0] * s[0] + vy * vy);
    const T tau_t = -p.lever_sign * 0.5 * p.rho_f * p.ell * speed * (c.c_lift * s[0] + c.c_drag * vy)
                    * (c.l_cp - l_cm);
    const T lead = 2.0 * ex + 1.0;
    const T trail = 2.0 * ex - 1.0;
    const T lead2 = lead * lead;
    const T trail2 = trail * trail;
    const T bracket = lead2 * lead2 + p.tau_r_sign * (trail2 * trail2);
    const T tau_r = -(p.rho_f * std::pow(p.ell, 4) * p.cd90 / 128.0) * s[2] * abs(s[2]) * bracket;
    return {tau_t, tau_r};
}

template <class T>
StateT<T> state_derivative(const StateT<T>& s, const T& ex, const PlateParams& p,
                           AlphaMode mode = AlphaMode::exact)
{
    using std::cos;
    using std::sin;
    const T alpha = angle_of_attack(s, ex, p, mode);
    const Coefficients<T> c = force_coefficients(alpha, p);
    const Forces<T> f = aero_forces(s, ex, c, p);
    const std::array<T, 2> tau = aero_torques(s, ex, c, p);

    const double m = p.mass;
    const double ma = p.added_mass();
    const double mg = p.effective_mass() * p.g;
    const T l_cm = ex * p.ell;
    const T sn = sin(s[3]);
    const T cs = cos(s[3]);

    StateT<T> d;
    d[2] = (tau[0] + tau[1]) / p.inertia_at(ex);
    d[1] = (-m * s[2] * s[0] + ma * d[2] * l_cm + f.lift_t[1] + f.lift_r[1] + f.drag[1] - mg * cs) / (m + ma);
    d[0] = ((m + ma) * s[2] * s[1] - ma * s[2] * s[2] * l_cm + f.lift_t[0] + f.lift_r[0] + f.drag[0] - mg * sn) / m;
    d[3] = s[2];
    d[4] = s[0] * cs - s[1] * sn;
    d[5] = s[0] * sn + s[1] * cs;
    return d;
}

// ---- double-precision API ---------------------------------------------------

AeroBreakdown aero_breakdown(const State& s, double ex, const PlateParams& p);

bool alpha_in_region(double alpha, double margin = 0.0);

using DerivativeFn = std::function<State(const State&)>;

// Classical RK4 with u held constant. t is the step start time, used only to
// tag the divergence error.
State rk4_step(const State& s, double dt, const DerivativeFn& f, double t = 0.0);
State rk4_step(const State& s, double ex, const PlateParams& p, double dt, double t = 0.0,
               AlphaMode mode = AlphaMode::exact);

enum class AlphaCheck { off, warn, error };

struct Trace {
    std::vector<double> t;
    std::vector<State> states;
    std::vector<double> ex;
    std::size_t alpha_violations = 0;
};

Trace simulate_open_loop(const State& s0, double ex, const PlateParams& p, double t_end, double dt,
                         AlphaCheck check = AlphaCheck::warn);

// Mean glide slope dx6/dx5 over the samples with t >= t_from.
double glide_slope(const Trace& tr, double t_from);

}  // namespace glider
