#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "glider/interval.hpp"
#include "glider/lp.hpp"
#include "glider/mlp.hpp"

namespace glider {

// Linear property over a network with n_in inputs and n_out outputs. Constraint
// coefficients index the inputs first, then the outputs. Premise rows may only
// touch inputs.
struct PropertySpec {
    std::string name;
    IntervalVector input_box;
    std::vector<LinConstraint> premise;
    std::vector<LinConstraint> conclusion;
    std::map<std::string, double> params;

    std::size_t num_inputs() const { return input_box.size(); }
    void validate(std::size_t n_out) const;
};

// Thresholds of the four trajectory properties, raw units.
struct PropertyThresholds {
    double u_mid = 0.187;
    double u_low = 0.184;
    double u_high = 0.19;
    double pitch_low = -0.786;
    double pitch_high = -0.747;
    double omega_max = -0.12;
    double vy_max = -0.3;
};

// kind 1..4; box is the raw data box of the six states.
PropertySpec encode_property(int kind, double ystar, const IntervalVector& box,
                             const PropertyThresholds& th = {});

// |f(x) - f(x0)| <= lstar / eps over the eps-ball around x0 inside box, with
// f(x0) folded in as a constant.
PropertySpec encode_robustness(const Network& net, const Eigen::VectorXd& x0, double eps, double lstar,
                               const IntervalVector& box);

// Same query against double_network(net) with copy B pinned to x0 by its box.
PropertySpec encode_robustness_doubled(const Network& net, const Eigen::VectorXd& x0, double eps, double lstar,
                                       const IntervalVector& box);

nlohmann::json property_to_json(const PropertySpec& spec);
PropertySpec property_from_json(const nlohmann::json& j);

// Per-neuron phase decided by branching: 0 free, +1 active, -1 inactive.
using SplitMap = std::vector<std::vector<std::int8_t>>;

struct NetworkBounds {
    bool empty = false;           // premise and box are inconsistent
    IntervalVector inputs;        // box after premise tightening
    std::vector<IntervalVector> pre;  // pre-activation bounds per layer
};

NetworkBounds interval_bounds(const Network& net, std::span<const Interval> box,
                              std::span<const LinConstraint> premise, const SplitMap* splits = nullptr);

// Interval consistency passes over input-only rows. Returns false if empty.
bool tighten_box(IntervalVector& box, std::span<const LinConstraint> rows, int passes = 8);

struct Budget {
    std::int64_t max_nodes = 200000;
    double max_seconds = 60.0;
};

enum class Outcome { verified, falsified, timeout };

struct Verdict {
    Outcome outcome = Outcome::timeout;
    bool vacuous = false;    // premise and box have no common point
    bool unresolved = false; // timeout caused by a leaf the LP could not settle
    std::vector<double> witness_input;
    std::vector<double> witness_output;
    std::int64_t nodes = 0;
    std::int64_t lp_calls = 0;
    double seconds = 0.0;
};

std::string outcome_name(Outcome o);
std::string verdict_label(const Verdict& v);  // "verified", "vacuous", "falsified", "timeout"

constexpr double kConclusionMargin = 1e-7;
constexpr double kReplayTolerance = 1e-9;
constexpr int kMaxRelus = 32;

// Replays a candidate input: true when it satisfies box and premise within
// kReplayTolerance and violates some conclusion row by more than it.
bool is_counterexample(const Network& net, const PropertySpec& spec, std::span<const double> x,
                       std::vector<double>* outputs = nullptr);

Verdict bab_verify(const Network& net, const PropertySpec& spec, const Budget& budget = {});

struct CriticalProbe {
    double ystar = 0.0;
    Verdict verdict;
};

struct CriticalResult {
    std::optional<double> ystar;  // empty means Failed
    bool bound_only = false;      // some probe timed out
    std::vector<CriticalProbe> probes;
};

struct CriticalSearch {
    double resolution = 0.01;
    double p3_max = 50.0;
    Budget budget;
};

CriticalResult find_critical_ystar(const Network& net, int kind, const IntervalVector& box,
                                   const CriticalSearch& search = {}, const PropertyThresholds& th = {});

struct SweepCell {
    double eps = 0.0;
    double lstar = 0.0;
    bool complete = false;  // false mirrors an absent cell
    int attempted = 0;
    int verified = 0;
    double seconds = 0.0;

    double rate() const { return attempted > 0 ? 100.0 * verified / attempted : 0.0; }
};

struct SweepConfig {
    std::vector<double> eps_list{1e-5, 1e-4, 1e-3, 1e-2};
    std::vector<double> lstar_list{1e-5, 1e-4, 1e-3, 1e-2};
    Budget per_query{20000, 5.0};
    double cell_seconds = 60.0;  // a cell that spends this long before 100 points is absent
    int jobs = 1;
};

// Success rates of the robustness query over the data points. points and box
// live in the network's own input space.
std::vector<SweepCell> robustness_sweep(const Network& net, std::span<const Eigen::VectorXd> points,
                                        const IntervalVector& box, const SweepConfig& cfg);

}  // namespace glider
