#pragma once

#include <memory>
#include <span>
#include <vector>

#include "glider/aeromodel.hpp"
#include "glider/mlp.hpp"
#include "glider/norm.hpp"

namespace glider {

// Defaults were picked on the calibrated plate so the teacher's commands span
// the actuation range without saturating (see `glider tune-pid`).
struct PidGains {
    double kp = -1.5e-4;
    double ki = -2e-6;
    double kd = -2e-3;
    double u_center = 0.187;
    double u_min = kActuationMin;
    double u_max = kActuationMax;

    void validate() const;
};

// Caller-owned controller memory.
struct PidState {
    double integral = 0.0;
    double prev = 0.0;
    bool has_prev = false;
};

// One PID update. The integral is committed only when the resulting command
// is unsaturated (conditional-integration anti-windup).
double pid_step(double e, PidState& st, const PidGains& g, double dt);

// Reference line x6 = slope * x5 + intercept.
struct TargetLine {
    double slope = -1.0;
    double intercept = 0.0;

    double error(const State& s) const { return s[5] - slope * s[4] - intercept; }
};

// Signed distance surrogate from the line x6 = -x5; positive above.
inline double target_error(const State& s) { return s[5] + s[4]; }

class Controller {
public:
    virtual ~Controller() = default;
    virtual double act(const State& s) = 0;
    virtual void reset() {}
    virtual std::unique_ptr<Controller> clone() const = 0;
};

class PidController final : public Controller {
public:
    PidController(PidGains gains, double dt_control, TargetLine line = {});
    double act(const State& s) override;
    void reset() override { state_ = {}; }
    std::unique_ptr<Controller> clone() const override { return std::make_unique<PidController>(*this); }

private:
    PidGains gains_;
    double dt_;
    TargetLine line_;
    PidState state_;
};

// Raw 6-state in, clamped actuation out. A network carrying a NormSpec is
// evaluated through it.
class NetworkController final : public Controller {
public:
    explicit NetworkController(Network net, double u_min = kActuationMin, double u_max = kActuationMax);
    double act(const State& s) override;
    std::unique_ptr<Controller> clone() const override { return std::make_unique<NetworkController>(*this); }

private:
    Network net_;
    double u_min_;
    double u_max_;
};

class ConstantController final : public Controller {
public:
    explicit ConstantController(double u) : u_(u) {}
    double act(const State&) override { return u_; }
    std::unique_ptr<Controller> clone() const override { return std::make_unique<ConstantController>(*this); }

private:
    double u_;
};

std::vector<double> linspace(double a, double b, int n);

struct SimConfig {
    double t_end = 20.0;
    double dt_model = 0.01;
    double dt_control = 0.5;
    int n_sims = 9;
    std::vector<double> x6_starts = linspace(1.43, 4.29, 9);
    int record_skip = 16;
    AlphaMode alpha_mode = AlphaMode::exact;  // reachability uses the simplified form

    void validate() const;
    int steps_per_control() const;
    int control_steps() const;
};

// Initial condition used throughout: unit forward speed at the origin, raised by x6.
inline State initial_state(double x6) { return {1.0, 0.0, 0.0, 0.0, 0.0, x6}; }

struct ControlQuery {
    int index = 0;
    double t = 0.0;
    State state{};
    double err = 0.0;
    double u = 0.0;
};

struct ClosedLoopTrace {
    Trace trace;
    std::vector<ControlQuery> queries;
};

class ControlStepDiverged : public std::runtime_error {
public:
    ControlStepDiverged(int control_index, double time, const std::string& what)
        : std::runtime_error(what), control_index_(control_index), time_(time) {}
    int control_index() const { return control_index_; }
    double time() const { return time_; }

private:
    int control_index_;
    double time_;
};

ClosedLoopTrace simulate_closed_loop(const State& s0, Controller& ctrl, const SimConfig& cfg, const PlateParams& p,
                                     AlphaCheck check = AlphaCheck::warn);

struct DataRow {
    State state{};
    double err = 0.0;
    double actuation = 0.0;
};

std::vector<DataRow> generate_dataset(const SimConfig& cfg, const PidGains& gains, const PlateParams& p);

NormSpec fit_norm(std::span<const DataRow> rows);

// Rows mapped into normalized training samples.
std::vector<Sample> to_samples(std::span<const DataRow> rows, const NormSpec& norm);

}  // namespace glider
