#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "glider/aeromodel.hpp"
#include "glider/closedloop.hpp"
#include "glider/interval.hpp"
#include "glider/mlp.hpp"
#include "glider/zonotope.hpp"

namespace glider {

using IntervalMatrix = std::vector<IntervalVector>;  // row-major

class ReachDomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ReachBlowUp : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Vector field with point and enclosure Jacobians.
struct Dynamics {
    int dim = 0;
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&, Eigen::MatrixXd&)> point;
    std::function<void(const IntervalVector&, IntervalVector&, IntervalMatrix&)> enclosure;
    std::function<void(const IntervalVector&)> domain_check;  // may throw ReachDomainError
};

// Glider on the augmented state (x1..x6, u) with du/dt = 0.
Dynamics glider_dynamics(const PlateParams& p, AlphaMode mode, double alpha_margin);
Dynamics linear_dynamics(const Eigen::MatrixXd& a);

// Enclosure of d(state_derivative)/d(x, u) over s_set x u_set: 6 rows, 7 columns.
IntervalMatrix interval_jacobian(const IntervalVector& s_set, const Interval& u_set, const PlateParams& p,
                                 AlphaMode mode = AlphaMode::simplified);

struct StepDiagnostics {
    IntervalVector linearization;  // dt * (J(H) - J(c)) (H - c)
    IntervalVector flow;           // dt^2 / 2 * J(B) f(B)
};

// One step of conservative linearization. The result encloses the exact flow
// of every point of z over dt.
Zonotope reach_step(const Zonotope& z, const Dynamics& dyn, double dt, int max_order,
                    double blowup = 1e3, StepDiagnostics* diag = nullptr);

enum class ReluMode { zonotope, interval };

// Output enclosure of net over the first net.input_dim() rows of z, clamped to
// [u_min, u_max].
Interval nn_output_set(const Network& net, const Zonotope& z, ReluMode mode = ReluMode::zonotope,
                       double u_min = kActuationMin, double u_max = kActuationMax);

struct ReachConfig {
    // At 0.01 the second-order flow remainder compounds through the early
    // low-speed transient and the sets blow up within half a second.
    double dt = 0.002;
    double t_end = 20.0;
    double dt_control = 0.5;
    int n_splits = 16;
    int max_order = 20;
    double width_resplit = std::numeric_limits<double>::infinity();
    int max_pieces = 8;
    ReluMode relu_mode = ReluMode::zonotope;
    AlphaMode alpha_mode = AlphaMode::simplified;
    double alpha_margin = 0.05;
    double blowup = 1e3;
    int jobs = 1;

    void validate() const;
    int steps_per_control() const;
    int control_steps() const;
};

// Augments a 6-dim set with the input row set to u_set, uncorrelated.
Zonotope with_input(const Zonotope& z, const Interval& u_set);

// One control period: query the controller enclosure, then integrate.
Zonotope reach_control_cycle(const Zonotope& z, const Network& net, const PlateParams& p, const ReachConfig& cfg,
                             Interval* u_used = nullptr);

struct BranchResult {
    int index = 0;
    Interval x6_init;
    bool ok = true;
    std::string failure;
    std::vector<IntervalVector> checkpoints;  // state hull at each control instant, t = 0 .. t_end
    std::vector<Interval> inputs;             // controller enclosure per cycle
    std::vector<Zonotope> final_sets;         // pieces at t_end (augmented)
};

struct ReachResult {
    std::vector<BranchResult> branches;
    IntervalVector final_hull;  // union over branches of the state hull at t_end

    bool complete() const;
};

ReachResult reach_full(const Interval& x6_init, const Network& net, const PlateParams& p, const ReachConfig& cfg);

enum class GoalVerdict { success, failure, unknown };

struct GoalResult {
    GoalVerdict verdict = GoalVerdict::unknown;
    double max_abs = 0.0;  // max |x5 + x6| over the final sets
};

std::string goal_name(GoalVerdict v);

// Band |x5 + x6| <= ystar on the final sets, exact on each zonotope.
GoalResult goal_check(const ReachResult& r, double ystar = 2.0);

// Exact max of x5 + x6 over z.
double band_max(const Zonotope& z);

}  // namespace glider
