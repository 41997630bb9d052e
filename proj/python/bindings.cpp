// Python module _glider: thin wrappers returning numpy arrays and plain dicts.

#include <optional>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "glider/config.hpp"
#include "glider/io.hpp"

namespace py = pybind11;
using namespace glider;

namespace {

#ifndef GLIDER_VERSION
#define GLIDER_VERSION "0.1.0"
#endif

State to_state(const Eigen::VectorXd& v)
{
    if (v.size() != 6) throw std::invalid_argument("state must have 6 entries");
    State s;
    for (int i = 0; i < 6; ++i) s[static_cast<std::size_t>(i)] = v[i];
    return s;
}

AlphaMode alpha_mode(const std::string& s)
{
    if (s == "exact") return AlphaMode::exact;
    if (s == "simplified") return AlphaMode::simplified;
    throw std::invalid_argument("alpha_mode must be 'exact' or 'simplified'");
}

Eigen::MatrixXd states_matrix(const std::vector<State>& states)
{
    Eigen::MatrixXd m(static_cast<Eigen::Index>(states.size()), 6);
    for (std::size_t r = 0; r < states.size(); ++r) {
        for (std::size_t c = 0; c < 6; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = states[r][c];
    }
    return m;
}

py::dict trace_dict(const Trace& tr)
{
    py::dict d;
    d["t"] = Eigen::Map<const Eigen::VectorXd>(tr.t.data(), static_cast<Eigen::Index>(tr.t.size())).eval();
    d["states"] = states_matrix(tr.states);
    d["ex"] = Eigen::Map<const Eigen::VectorXd>(tr.ex.data(), static_cast<Eigen::Index>(tr.ex.size())).eval();
    d["alpha_violations"] = tr.alpha_violations;
    return d;
}

std::vector<DataRow> rows_from(const Eigen::MatrixXd& states, const Eigen::VectorXd& actions)
{
    if (states.cols() != 6 || states.rows() != actions.size()) {
        throw std::invalid_argument("states must be (N, 6) and actions (N,)");
    }
    std::vector<DataRow> rows(static_cast<std::size_t>(states.rows()));
    for (Eigen::Index r = 0; r < states.rows(); ++r) {
        auto& row = rows[static_cast<std::size_t>(r)];
        for (int c = 0; c < 6; ++c) row.state[static_cast<std::size_t>(c)] = states(r, c);
        row.err = target_error(row.state);
        row.actuation = actions[r];
    }
    return rows;
}

IntervalVector data_box(const Network& net)
{
    if (!net.norm) throw std::invalid_argument("network has no normalization; pass box explicitly");
    IntervalVector b;
    for (std::size_t i = 0; i < net.norm->input_dim(); ++i) b.emplace_back(net.norm->in_min[i], net.norm->in_max[i]);
    return b;
}

IntervalVector box_from(const std::optional<Eigen::MatrixXd>& box, const Network& net)
{
    if (!box) return data_box(net);
    if (box->cols() != 2) throw std::invalid_argument("box must be (n, 2) rows of [lo, hi]");
    IntervalVector b;
    for (Eigen::Index i = 0; i < box->rows(); ++i) b.emplace_back((*box)(i, 0), (*box)(i, 1));
    return b;
}

py::dict verdict_dict(const Verdict& v)
{
    py::dict d;
    d["label"] = verdict_label(v);
    d["outcome"] = outcome_name(v.outcome);
    d["vacuous"] = v.vacuous;
    d["witness_input"] = v.witness_input;
    d["witness_output"] = v.witness_output;
    d["nodes"] = v.nodes;
    d["lp_calls"] = v.lp_calls;
    d["seconds"] = v.seconds;
    return d;
}

std::pair<Network, double> fit(const Eigen::MatrixXd& states, const Eigen::VectorXd& actions, bool adversarial,
                               int epochs, double lr, int batch, std::uint64_t seed, double epsilon, double lambda_lip)
{
    const auto rows = rows_from(states, actions);
    const NormSpec norm = fit_norm(rows);
    const auto samples = to_samples(rows, norm);
    TrainResult res;
    if (adversarial) {
        RobustTrainConfig rc;
        rc.epochs = epochs;
        rc.lr = lr;
        rc.batch = batch;
        rc.seed = seed;
        rc.attack.epsilon = epsilon;
        rc.attack.step_size = epsilon / 4;
        rc.lambda_lip = lambda_lip;
        res = train_adversarial(default_architecture(seed), samples, rc, InputBox::unit(6));
    } else {
        res = train(default_architecture(seed), samples, TrainConfig{epochs, lr, batch, seed});
    }
    res.net.norm = norm;
    return {std::move(res.net), res.train_rmse};
}

}  // namespace

PYBIND11_MODULE(_glider, m)
{
    m.doc() = "Alsomitra glider toolkit";
    m.attr("__version__") = GLIDER_VERSION;
    m.attr("ACTUATION_MIN") = kActuationMin;
    m.attr("ACTUATION_MAX") = kActuationMax;

    py::register_exception<TrainingDiverged>(m, "TrainingDiverged", PyExc_RuntimeError);
    py::register_exception<ControlStepDiverged>(m, "ControlStepDiverged", PyExc_RuntimeError);

    py::class_<PlateParams>(m, "PlateParams")
        .def_static("calibrated", &PlateParams::calibrated)
        .def_static("published", [] { return PlateParams{}; })
        .def_readwrite("mass", &PlateParams::mass)
        .def_readwrite("ell", &PlateParams::ell)
        .def_readwrite("inertia", &PlateParams::inertia)
        .def("to_dict", [](const PlateParams& p) { return py::module_::import("json").attr("loads")(plate_to_json(p).dump()); });

    py::class_<PidGains>(m, "PidGains")
        .def(py::init<>())
        .def_readwrite("kp", &PidGains::kp)
        .def_readwrite("ki", &PidGains::ki)
        .def_readwrite("kd", &PidGains::kd)
        .def_readwrite("u_center", &PidGains::u_center);

    m.def(
        "state_derivative",
        [](const Eigen::VectorXd& s, double ex, const PlateParams& p, const std::string& mode) {
            const State f = state_derivative(to_state(s), ex, p, alpha_mode(mode));
            return Eigen::Map<const Eigen::VectorXd>(f.data(), 6).eval();
        },
        py::arg("state"), py::arg("ex"), py::arg("plate") = PlateParams::calibrated(), py::arg("alpha_mode") = "exact");

    m.def("initial_state", [](double x6) { const State s = initial_state(x6); return Eigen::Map<const Eigen::VectorXd>(s.data(), 6).eval(); },
          py::arg("x6"));

    m.def(
        "simulate_open_loop",
        [](double x6, double ex, double t_end, double dt, const PlateParams& p) {
            return trace_dict(simulate_open_loop(initial_state(x6), ex, p, t_end, dt, AlphaCheck::off));
        },
        py::arg("x6"), py::arg("ex"), py::arg("t_end") = 20.0, py::arg("dt") = 0.01,
        py::arg("plate") = PlateParams::calibrated());

    py::class_<Network>(m, "Network")
        .def_static("load", &load_network, py::arg("path"))
        .def_static("from_json", [](const std::string& s) { return network_from_json(nlohmann::json::parse(s)); })
        .def("save", [](const Network& n, const std::string& path) { save_network(n, path); }, py::arg("path"))
        .def("to_json", [](const Network& n) { return network_to_json(n).dump(); })
        .def_property_readonly("widths", &Network::widths)
        .def_property_readonly("relu_count", &Network::relu_count)
        .def_property_readonly("has_norm", [](const Network& n) { return n.norm.has_value(); })
        .def(
            "__call__",
            [](const Network& n, const Eigen::VectorXd& x) { return forward_scalar(n, x, n.norm.has_value()); },
            py::arg("x"), "Scalar output; a network with normalization takes raw states.");

    m.def(
        "simulate_closed_loop",
        [](double x6, std::optional<Network> net, const PidGains& gains, double t_end, double dt_model,
           double dt_control, const std::string& mode, const PlateParams& p) {
            SimConfig sc;
            sc.t_end = t_end;
            sc.dt_model = dt_model;
            sc.dt_control = dt_control;
            sc.alpha_mode = alpha_mode(mode);
            std::unique_ptr<Controller> c;
            if (net) {
                c = std::make_unique<NetworkController>(*net);
            } else {
                c = std::make_unique<PidController>(gains, dt_control);
            }
            return trace_dict(simulate_closed_loop(initial_state(x6), *c, sc, p, AlphaCheck::off).trace);
        },
        py::arg("x6"), py::arg("net") = py::none(), py::arg("gains") = PidGains{}, py::arg("t_end") = 20.0,
        py::arg("dt_model") = 0.01, py::arg("dt_control") = 0.5, py::arg("alpha_mode") = "exact",
        py::arg("plate") = PlateParams::calibrated(), "PID teacher when net is None, else the network controller.");

    m.def(
        "generate_dataset",
        [](const PlateParams& p) {
            const auto rows = generate_dataset(SimConfig{}, PidGains{}, p);
            std::vector<State> states;
            Eigen::VectorXd u(static_cast<Eigen::Index>(rows.size()));
            for (std::size_t i = 0; i < rows.size(); ++i) {
                states.push_back(rows[i].state);
                u[static_cast<Eigen::Index>(i)] = rows[i].actuation;
            }
            return py::make_tuple(states_matrix(states), u);
        },
        py::arg("plate") = PlateParams::calibrated(), "PID teacher rows as (states (N, 6), actions (N,)).");

    m.def(
        "train",
        [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int epochs, double lr, int batch, std::uint64_t seed) {
            return fit(x, y, false, epochs, lr, batch, seed, 0.0, 0.0);
        },
        py::arg("states"), py::arg("actions"), py::arg("epochs") = 2000, py::arg("lr") = 0.05, py::arg("batch") = 32,
        py::arg("seed") = 0, "Behaviour cloning; returns (network with normalization, train RMSE).");

    m.def(
        "train_adversarial",
        [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int epochs, double lr, int batch, std::uint64_t seed,
           double epsilon, double lambda_lip) { return fit(x, y, true, epochs, lr, batch, seed, epsilon, lambda_lip); },
        py::arg("states"), py::arg("actions"), py::arg("epochs") = 2000, py::arg("lr") = 0.05, py::arg("batch") = 32,
        py::arg("seed") = 0, py::arg("epsilon") = 0.01, py::arg("lambda_lip") = 0.1);

    m.def(
        "verify",
        [](const Network& net, int kind, double ystar, std::optional<Eigen::MatrixXd> box, std::int64_t max_nodes,
           double max_seconds) {
            const auto spec = encode_property(kind, ystar, box_from(box, net));
            const Network core = net.norm ? embed_normalization(net) : net;
            return verdict_dict(bab_verify(core, spec, Budget{max_nodes, max_seconds}));
        },
        py::arg("net"), py::arg("kind"), py::arg("ystar"), py::arg("box") = py::none(), py::arg("max_nodes") = 200000,
        py::arg("max_seconds") = 60.0, "Trajectory property 1..4 over the data box (or box, raw units).");

    m.def(
        "critical_ystar",
        [](const Network& net, int kind, double resolution, std::optional<Eigen::MatrixXd> box) -> py::object {
            const Network core = net.norm ? embed_normalization(net) : net;
            CriticalSearch s;
            s.resolution = resolution;
            const auto r = find_critical_ystar(core, kind, box_from(box, net), s);
            if (!r.ystar) return py::none();
            return py::float_(*r.ystar);
        },
        py::arg("net"), py::arg("kind"), py::arg("resolution") = 0.01, py::arg("box") = py::none(),
        "Smallest verified y* on the search grid, or None when the search fails.");

    m.def(
        "reach",
        [](const Network& net, double x6_lo, double x6_hi, double t_end, int n_splits, double goal_ystar, int jobs) {
            ReachConfig cfg;
            cfg.t_end = t_end;
            cfg.n_splits = n_splits;
            cfg.jobs = jobs;
            cfg.validate();
            const ReachResult r = reach_full(Interval(x6_lo, x6_hi), net, PlateParams::calibrated(), cfg);
            const GoalResult g = goal_check(r, goal_ystar);
            // (branch, checkpoint, state, lo/hi)
            const std::size_t nb = r.branches.size();
            const std::size_t nc = nb ? r.branches.front().checkpoints.size() : 0;
            py::array_t<double> hulls({nb, nc, std::size_t{6}, std::size_t{2}});
            auto h = hulls.mutable_unchecked<4>();
            for (std::size_t b = 0; b < nb; ++b) {
                for (std::size_t c = 0; c < nc; ++c) {
                    const bool have = c < r.branches[b].checkpoints.size();
                    for (std::size_t d = 0; d < 6; ++d) {
                        h(b, c, d, 0) = have ? r.branches[b].checkpoints[c][d].lo : std::nan("");
                        h(b, c, d, 1) = have ? r.branches[b].checkpoints[c][d].hi : std::nan("");
                    }
                }
            }
            py::dict d;
            d["hulls"] = hulls;
            d["complete"] = r.complete();
            d["goal"] = goal_name(g.verdict);
            d["max_abs"] = g.max_abs;
            return d;
        },
        py::arg("net"), py::arg("x6_lo") = 1.43, py::arg("x6_hi") = 4.29, py::arg("t_end") = 20.0,
        py::arg("n_splits") = 16, py::arg("goal_ystar") = 2.0, py::arg("jobs") = 1);

    m.def("config_json", [](const std::string& path) { return config_to_json(load_config(path)).dump(); }, py::arg("path"));
}
