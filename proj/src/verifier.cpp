#include "glider/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace glider {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

LinConstraint row(std::size_t width, std::initializer_list<std::pair<std::size_t, double>> terms, Relation rel,
                  double rhs)
{
    LinConstraint c;
    c.coeffs.assign(width, 0.0);
    for (const auto& [i, v] : terms) c.coeffs[i] = v;
    c.rel = rel;
    c.rhs = rhs;
    return c;
}

const char* relation_name(Relation r)
{
    switch (r) {
    case Relation::le: return "<=";
    case Relation::ge: return ">=";
    case Relation::eq: return "==";
    }
    return "?";
}

Relation relation_from(const std::string& s, const std::string& path)
{
    if (s == "<=") return Relation::le;
    if (s == ">=") return Relation::ge;
    if (s == "==") return Relation::eq;
    throw std::runtime_error(path + ": unknown relation '" + s + "'");
}

}  // namespace

void PropertySpec::validate(std::size_t n_out) const
{
    const std::size_t width = num_inputs() + n_out;
    for (const auto& b : input_box) {
        if (!b.is_finite()) throw std::invalid_argument("PropertySpec " + name + ": input box must be bounded");
    }
    auto check = [&](const std::vector<LinConstraint>& rows, const char* what, bool inputs_only) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& c = rows[i];
            const std::string where = "PropertySpec " + name + ": " + what + " row " + std::to_string(i);
            if (c.coeffs.size() != width) throw std::invalid_argument(where + " has the wrong width");
            if (std::all_of(c.coeffs.begin(), c.coeffs.end(), [](double v) { return v == 0.0; })) {
                throw std::invalid_argument(where + " has no nonzero coefficient");
            }
            if (inputs_only) {
                for (std::size_t k = num_inputs(); k < width; ++k) {
                    if (c.coeffs[k] != 0.0) throw std::invalid_argument(where + " refers to an output");
                }
            }
        }
    };
    check(premise, "premise", true);
    check(conclusion, "conclusion", false);
    if (conclusion.empty()) throw std::invalid_argument("PropertySpec " + name + ": empty conclusion");
}

PropertySpec encode_property(int kind, double ystar, const IntervalVector& box, const PropertyThresholds& th)
{
    if (box.size() != 6) throw std::invalid_argument("encode_property: expected a 6-dimensional box");
    constexpr std::size_t w = 7;  // six states, one output
    constexpr std::size_t x2 = 1, x3 = 2, x4 = 3, x5 = 4, x6 = 5, out = 6;
    PropertySpec s;
    s.input_box = box;
    s.params["ystar"] = ystar;
    switch (kind) {
    case 1:
        s.name = "P1";
        s.premise.push_back(row(w, {{x5, 1.0}, {x6, 1.0}}, Relation::ge, ystar));
        s.conclusion.push_back(row(w, {{out, 1.0}}, Relation::ge, th.u_mid));
        break;
    case 2:
        s.name = "P2";
        s.premise.push_back(row(w, {{x5, 1.0}, {x6, 1.0}}, Relation::le, -ystar));
        s.conclusion.push_back(row(w, {{out, 1.0}}, Relation::le, th.u_mid));
        break;
    case 3:
        s.name = "P3";
        s.premise.push_back(row(w, {{x5, 1.0}, {x6, 1.0}}, Relation::ge, -ystar));
        s.premise.push_back(row(w, {{x5, 1.0}, {x6, 1.0}}, Relation::le, ystar));
        s.premise.push_back(row(w, {{x4, 1.0}}, Relation::ge, th.pitch_low));
        s.premise.push_back(row(w, {{x4, 1.0}}, Relation::le, th.pitch_high));
        s.conclusion.push_back(row(w, {{out, 1.0}}, Relation::ge, th.u_low));
        s.conclusion.push_back(row(w, {{out, 1.0}}, Relation::le, th.u_high));
        break;
    case 4:
        s.name = "P4";
        s.premise.push_back(row(w, {{x5, 1.0}, {x6, 1.0}}, Relation::ge, 0.0));
        s.premise.push_back(row(w, {{x5, 1.0}, {x6, 1.0}}, Relation::le, ystar));
        s.premise.push_back(row(w, {{x3, 1.0}}, Relation::le, th.omega_max));
        s.premise.push_back(row(w, {{x2, 1.0}}, Relation::le, th.vy_max));
        s.conclusion.push_back(row(w, {{out, 1.0}}, Relation::le, th.u_mid));
        break;
    default:
        throw std::invalid_argument("encode_property: kind must be 1..4");
    }
    return s;
}

PropertySpec encode_robustness(const Network& net, const Eigen::VectorXd& x0, double eps, double lstar,
                               const IntervalVector& box)
{
    if (!(eps > 0.0) || !(lstar > 0.0)) throw std::invalid_argument("encode_robustness: eps and lstar must be positive");
    const std::size_t n = box.size();
    if (static_cast<std::size_t>(x0.size()) != n || net.input_dim() != static_cast<int>(n) || net.output_dim() != 1) {
        throw std::invalid_argument("encode_robustness: dimension mismatch");
    }
    const std::size_t w = n + 1;
    PropertySpec s;
    s.name = "P5";
    s.input_box = box;
    s.params["eps"] = eps;
    s.params["lstar"] = lstar;
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        s.premise.push_back(row(w, {{i, 1.0}}, Relation::ge, x0[k] - eps));
        s.premise.push_back(row(w, {{i, 1.0}}, Relation::le, x0[k] + eps));
    }
    const double f0 = forward_scalar(net, x0);
    const double bound = lstar / eps;
    s.params["f0"] = f0;
    s.conclusion.push_back(row(w, {{n, 1.0}}, Relation::le, f0 + bound));
    s.conclusion.push_back(row(w, {{n, 1.0}}, Relation::ge, f0 - bound));
    return s;
}

PropertySpec encode_robustness_doubled(const Network& net, const Eigen::VectorXd& x0, double eps, double lstar,
                                       const IntervalVector& box)
{
    if (!(eps > 0.0) || !(lstar > 0.0)) throw std::invalid_argument("encode_robustness: eps and lstar must be positive");
    const std::size_t n = box.size();
    if (static_cast<std::size_t>(x0.size()) != n || net.input_dim() != static_cast<int>(n) || net.output_dim() != 1) {
        throw std::invalid_argument("encode_robustness_doubled: dimension mismatch");
    }
    const std::size_t w = 2 * n + 2;
    PropertySpec s;
    s.name = "P5-doubled";
    s.params["eps"] = eps;
    s.params["lstar"] = lstar;
    s.input_box = box;
    for (std::size_t i = 0; i < n; ++i) s.input_box.push_back(Interval(x0[static_cast<Eigen::Index>(i)]));
    // Perturbed copy A relative to pinned copy B.
    for (std::size_t i = 0; i < n; ++i) {
        s.premise.push_back(row(w, {{i, 1.0}, {n + i, -1.0}}, Relation::ge, -eps));
        s.premise.push_back(row(w, {{i, 1.0}, {n + i, -1.0}}, Relation::le, eps));
    }
    const double bound = lstar / eps;
    s.conclusion.push_back(row(w, {{2 * n, 1.0}, {2 * n + 1, -1.0}}, Relation::le, bound));
    s.conclusion.push_back(row(w, {{2 * n, 1.0}, {2 * n + 1, -1.0}}, Relation::ge, -bound));
    return s;
}

nlohmann::json property_to_json(const PropertySpec& spec)
{
    nlohmann::json j;
    j["name"] = spec.name;
    nlohmann::json box = nlohmann::json::array();
    for (const auto& b : spec.input_box) box.push_back({b.lo, b.hi});
    j["input_box"] = box;
    auto rows = [](const std::vector<LinConstraint>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& c : v) a.push_back({{"coeffs", c.coeffs}, {"rel", relation_name(c.rel)}, {"rhs", c.rhs}});
        return a;
    };
    j["premise"] = rows(spec.premise);
    j["conclusion"] = rows(spec.conclusion);
    j["params"] = spec.params;
    return j;
}

PropertySpec property_from_json(const nlohmann::json& j)
{
    auto need = [](const nlohmann::json& o, const char* key, const std::string& path) -> const nlohmann::json& {
        if (!o.is_object() || !o.contains(key)) throw std::runtime_error(path + "." + key + ": missing field");
        return o.at(key);
    };
    PropertySpec s;
    try {
        s.name = need(j, "name", "property").get<std::string>();
        const auto& box = need(j, "input_box", "property");
        for (std::size_t i = 0; i < box.size(); ++i) {
            const auto& b = box.at(i);
            s.input_box.push_back(Interval(b.at(0).get<double>(), b.at(1).get<double>()));
        }
        auto rows = [&](const char* key) {
            std::vector<LinConstraint> v;
            const auto& a = need(j, key, "property");
            for (std::size_t i = 0; i < a.size(); ++i) {
                const std::string path = std::string("property.") + key + "[" + std::to_string(i) + "]";
                LinConstraint c;
                c.coeffs = need(a[i], "coeffs", path).get<std::vector<double>>();
                c.rel = relation_from(need(a[i], "rel", path).get<std::string>(), path + ".rel");
                c.rhs = need(a[i], "rhs", path).get<double>();
                v.push_back(std::move(c));
            }
            return v;
        };
        s.premise = rows("premise");
        s.conclusion = rows("conclusion");
        if (j.contains("params")) s.params = j.at("params").get<std::map<std::string, double>>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("property: ") + e.what());
    }
    return s;
}

// ---- bounds -----------------------------------------------------------------

bool tighten_box(IntervalVector& box, std::span<const LinConstraint> rows, int passes)
{
    const std::size_t n = box.size();
    for (int pass = 0; pass < passes; ++pass) {
        bool changed = false;
        for (const auto& c : rows) {
            // Split into le-type pieces: sum a_j x_j <= r.
            auto apply = [&](double sign) {
                for (std::size_t j = 0; j < n; ++j) {
                    const double aj = sign * c.coeffs[j];
                    if (aj == 0.0) continue;
                    Interval rest(0.0);
                    for (std::size_t k = 0; k < n; ++k) {
                        if (k != j && c.coeffs[k] != 0.0) rest += sign * c.coeffs[k] * box[k];
                    }
                    // aj * xj <= sign*rhs - rest, so xj bounded by (sign*rhs - rest.lo) / aj.
                    const double lim = detail::up(sign * c.rhs - rest.lo, 2);
                    Interval& b = box[j];
                    if (aj > 0.0) {
                        const double hi = detail::up(lim / aj, 2);
                        if (hi < b.hi) {
                            if (hi < b.lo) return false;
                            changed = changed || (b.hi - hi) > 1e-12 * std::max(1.0, std::abs(b.hi));
                            b.hi = hi;
                        }
                    } else {
                        const double lo = detail::down(lim / aj, 2);
                        if (lo > b.lo) {
                            if (lo > b.hi) return false;
                            changed = changed || (lo - b.lo) > 1e-12 * std::max(1.0, std::abs(b.lo));
                            b.lo = lo;
                        }
                    }
                }
                return true;
            };
            if (c.rel != Relation::ge && !apply(1.0)) return false;
            if (c.rel != Relation::le && !apply(-1.0)) return false;
        }
        if (!changed) break;
    }
    return true;
}

NetworkBounds interval_bounds(const Network& net, std::span<const Interval> box,
                              std::span<const LinConstraint> premise, const SplitMap* splits)
{
    NetworkBounds nb;
    nb.inputs.assign(box.begin(), box.end());
    std::vector<LinConstraint> input_rows;
    for (const auto& c : premise) {
        LinConstraint t = c;
        t.coeffs.resize(box.size());
        input_rows.push_back(std::move(t));
    }
    if (!tighten_box(nb.inputs, input_rows)) {
        nb.empty = true;
        return nb;
    }
    IntervalVector a = nb.inputs;
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        const Layer& l = net.layers[k];
        IntervalVector z(static_cast<std::size_t>(l.out_dim()));
        for (int r = 0; r < l.out_dim(); ++r) {
            Interval acc(l.b[r]);
            for (int c = 0; c < l.in_dim(); ++c) acc += l.w(r, c) * a[static_cast<std::size_t>(c)];
            auto& zr = z[static_cast<std::size_t>(r)];
            zr = acc;
            if (splits != nullptr && l.act == Activation::relu) {
                const std::int8_t ph = (*splits)[k][static_cast<std::size_t>(r)];
                if (ph > 0) zr.lo = std::max(zr.lo, 0.0);
                if (ph < 0) zr.hi = std::min(zr.hi, 0.0);
                if (zr.lo > zr.hi) {
                    nb.empty = true;
                    return nb;
                }
            }
        }
        a = z;
        if (l.act == Activation::relu) {
            for (auto& v : a) v = Interval(std::max(v.lo, 0.0), std::max(v.hi, 0.0));
        }
        nb.pre.push_back(std::move(z));
    }
    return nb;
}

// ---- branch and bound -------------------------------------------------------

std::string outcome_name(Outcome o)
{
    switch (o) {
    case Outcome::verified: return "verified";
    case Outcome::falsified: return "falsified";
    case Outcome::timeout: return "timeout";
    }
    return "?";
}

std::string verdict_label(const Verdict& v)
{
    if (v.outcome == Outcome::verified && v.vacuous) return "vacuous";
    return outcome_name(v.outcome);
}

bool is_counterexample(const Network& net, const PropertySpec& spec, std::span<const double> x,
                       std::vector<double>* outputs)
{
    const std::size_t n = spec.num_inputs();
    for (std::size_t i = 0; i < n; ++i) {
        const Interval& b = spec.input_box[i];
        if (x[i] < b.lo - kReplayTolerance || x[i] > b.hi + kReplayTolerance) return false;
    }
    std::vector<double> full(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
    for (const auto& c : spec.premise) {
        LinConstraint t = c;
        t.coeffs.resize(n);
        if (t.violation(full) > kReplayTolerance) return false;
    }
    const Eigen::VectorXd y = forward(net, Eigen::Map<const Eigen::VectorXd>(full.data(), static_cast<Eigen::Index>(n)));
    for (Eigen::Index k = 0; k < y.size(); ++k) full.push_back(y[k]);
    if (outputs != nullptr) outputs->assign(y.data(), y.data() + y.size());
    return std::any_of(spec.conclusion.begin(), spec.conclusion.end(),
                       [&](const LinConstraint& c) { return c.violation(full) > kReplayTolerance; });
}

namespace {

struct Encoder {
    const Network& net;
    const PropertySpec& spec;
    std::size_t n_in;
    std::vector<std::size_t> offset;  // first LP variable of each layer's outputs
    std::size_t n_vars;

    Encoder(const Network& n, const PropertySpec& s) : net(n), spec(s), n_in(s.num_inputs())
    {
        std::size_t o = n_in;
        for (const auto& l : net.layers) {
            offset.push_back(o);
            o += static_cast<std::size_t>(l.out_dim());
        }
        n_vars = o;
    }

    std::size_t input_var(std::size_t layer, int c) const
    {
        return layer == 0 ? static_cast<std::size_t>(c) : offset[layer - 1] + static_cast<std::size_t>(c);
    }

    // Affine encoding of the network under the given bounds and phases.
    LpProblem base(const NetworkBounds& nb, const SplitMap& splits) const
    {
        LpProblem p;
        p.lo.resize(n_vars);
        p.hi.resize(n_vars);
        for (std::size_t i = 0; i < n_in; ++i) {
            p.lo[i] = nb.inputs[i].lo;
            p.hi[i] = nb.inputs[i].hi;
        }
        for (const auto& c : spec.premise) {
            LinConstraint t;
            t.coeffs.assign(n_vars, 0.0);
            std::copy(c.coeffs.begin(), c.coeffs.begin() + static_cast<std::ptrdiff_t>(n_in), t.coeffs.begin());
            t.rel = c.rel;
            t.rhs = c.rhs;
            p.rows.push_back(std::move(t));
        }
        for (std::size_t k = 0; k < net.layers.size(); ++k) {
            const Layer& l = net.layers[k];
            for (int r = 0; r < l.out_dim(); ++r) {
                const auto ru = static_cast<std::size_t>(r);
                const Interval z = nb.pre[k][ru];
                const std::size_t v = offset[k] + ru;
                // w.p - a, as a row template.
                LinConstraint aff;
                aff.coeffs.assign(n_vars, 0.0);
                for (int c = 0; c < l.in_dim(); ++c) aff.coeffs[input_var(k, c)] = l.w(r, c);
                const double b = l.b[r];
                if (l.act == Activation::identity) {
                    p.lo[v] = z.lo;
                    p.hi[v] = z.hi;
                    aff.coeffs[v] = -1.0;
                    aff.rel = Relation::eq;
                    aff.rhs = -b;
                    p.rows.push_back(std::move(aff));
                    continue;
                }
                const std::int8_t ph = splits[k][ru];
                const bool active = ph > 0 || z.lo >= 0.0;
                const bool inactive = ph < 0 || z.hi <= 0.0;
                if (inactive) {
                    p.lo[v] = 0.0;
                    p.hi[v] = 0.0;
                    aff.rel = Relation::le;
                    aff.rhs = -b;
                    p.rows.push_back(std::move(aff));
                } else if (active) {
                    p.lo[v] = std::max(z.lo, 0.0);
                    p.hi[v] = std::max(z.hi, 0.0);
                    LinConstraint nonneg = aff;
                    nonneg.rel = Relation::ge;
                    nonneg.rhs = -b;
                    p.rows.push_back(std::move(nonneg));
                    aff.coeffs[v] = -1.0;
                    aff.rel = Relation::eq;
                    aff.rhs = -b;
                    p.rows.push_back(std::move(aff));
                } else {
                    // Triangle relaxation: a >= z, a <= u (z - l) / (u - l), a >= 0.
                    p.lo[v] = 0.0;
                    p.hi[v] = z.hi;
                    LinConstraint above = aff;
                    above.coeffs[v] = -1.0;
                    above.rel = Relation::le;
                    above.rhs = -b;
                    p.rows.push_back(std::move(above));
                    const double lam = z.hi / (z.hi - z.lo);
                    LinConstraint upper;
                    upper.coeffs.assign(n_vars, 0.0);
                    for (int c = 0; c < l.in_dim(); ++c) upper.coeffs[input_var(k, c)] = -lam * l.w(r, c);
                    upper.coeffs[v] = 1.0;
                    upper.rel = Relation::le;
                    upper.rhs = lam * (b - z.lo);
                    p.rows.push_back(std::move(upper));
                }
            }
        }
        return p;
    }

    // Conclusion row c lifted to LP variables and negated with a margin.
    std::vector<LinConstraint> negations(const LinConstraint& c) const
    {
        LinConstraint t;
        t.coeffs.assign(n_vars, 0.0);
        for (std::size_t i = 0; i < n_in; ++i) t.coeffs[i] = c.coeffs[i];
        const std::size_t out0 = offset.back();
        for (std::size_t k = n_in; k < c.coeffs.size(); ++k) t.coeffs[out0 + (k - n_in)] = c.coeffs[k];
        std::vector<LinConstraint> out;
        if (c.rel != Relation::ge) {
            LinConstraint g = t;
            g.rel = Relation::ge;
            g.rhs = c.rhs + kConclusionMargin;
            out.push_back(std::move(g));
        }
        if (c.rel != Relation::le) {
            LinConstraint l = t;
            l.rel = Relation::le;
            l.rhs = c.rhs - kConclusionMargin;
            out.push_back(std::move(l));
        }
        return out;
    }
};

// Interval test: true when the output bounds alone entail the conclusion row.
bool entailed_by_bounds(const LinConstraint& c, const NetworkBounds& nb, std::size_t n_in)
{
    Interval s(0.0);
    for (std::size_t i = 0; i < n_in; ++i) {
        if (c.coeffs[i] != 0.0) s += c.coeffs[i] * nb.inputs[i];
    }
    const IntervalVector& out = nb.pre.back();
    for (std::size_t k = n_in; k < c.coeffs.size(); ++k) {
        if (c.coeffs[k] != 0.0) s += c.coeffs[k] * out[k - n_in];
    }
    switch (c.rel) {
    case Relation::le: return s.hi <= c.rhs;
    case Relation::ge: return s.lo >= c.rhs;
    case Relation::eq: return s.lo == c.rhs && s.hi == c.rhs;
    }
    return false;
}

struct Neuron {
    std::size_t layer;
    std::size_t index;
};

std::optional<Neuron> pick_split(const Network& net, const NetworkBounds& nb, const SplitMap& splits)
{
    std::optional<Neuron> best;
    double width = -1.0;
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        if (net.layers[k].act != Activation::relu) continue;
        for (std::size_t r = 0; r < nb.pre[k].size(); ++r) {
            const Interval z = nb.pre[k][r];
            if (splits[k][r] != 0 || !(z.lo < 0.0 && z.hi > 0.0)) continue;
            if (z.width() > width) {
                width = z.width();
                best = Neuron{k, r};
            }
        }
    }
    return best;
}

}  // namespace

Verdict bab_verify(const Network& net, const PropertySpec& spec, const Budget& budget)
{
    net.validate();
    if (static_cast<int>(spec.num_inputs()) != net.input_dim()) {
        throw std::invalid_argument("bab_verify: property and network input widths differ");
    }
    spec.validate(static_cast<std::size_t>(net.output_dim()));
    if (net.relu_count() > kMaxRelus) {
        throw std::invalid_argument("bab_verify: network has more than " + std::to_string(kMaxRelus) + " ReLUs");
    }
    const auto t0 = Clock::now();
    Verdict v;
    const Encoder enc(net, spec);

    // Vacuity: does premise and box admit any input at all?
    {
        IntervalVector box = spec.input_box;
        std::vector<LinConstraint> rows;
        for (const auto& c : spec.premise) {
            LinConstraint t = c;
            t.coeffs.resize(spec.num_inputs());
            rows.push_back(std::move(t));
        }
        bool empty = !tighten_box(box, rows);
        if (!empty) {
            LpProblem p;
            for (const auto& b : box) {
                p.lo.push_back(b.lo);
                p.hi.push_back(b.hi);
            }
            p.rows = rows;
            ++v.lp_calls;
            empty = !lp_feasible(p).feasible;
        }
        if (empty) {
            v.outcome = Outcome::verified;
            v.vacuous = true;
            v.seconds = seconds_since(t0);
            return v;
        }
    }

    SplitMap root;
    for (const auto& l : net.layers) root.emplace_back(static_cast<std::size_t>(l.out_dim()), 0);
    std::vector<SplitMap> stack{root};
    bool unresolved = false;

    while (!stack.empty()) {
        if (v.nodes >= budget.max_nodes || seconds_since(t0) > budget.max_seconds) {
            v.outcome = Outcome::timeout;
            v.seconds = seconds_since(t0);
            return v;
        }
        SplitMap splits = std::move(stack.back());
        stack.pop_back();
        ++v.nodes;

        const NetworkBounds nb = interval_bounds(net, spec.input_box, spec.premise, &splits);
        if (nb.empty) continue;

        bool need_split = false;
        const LpProblem base = enc.base(nb, splits);
        for (const auto& c : spec.conclusion) {
            if (entailed_by_bounds(c, nb, enc.n_in)) continue;
            for (auto& neg : enc.negations(c)) {
                LpProblem p = base;
                p.rows.push_back(std::move(neg));
                ++v.lp_calls;
                const LpResult r = lp_feasible(p);
                if (!r.feasible) continue;
                std::vector<double> x(r.point.begin(), r.point.begin() + static_cast<std::ptrdiff_t>(enc.n_in));
                for (std::size_t i = 0; i < x.size(); ++i) {
                    x[i] = std::clamp(x[i], spec.input_box[i].lo, spec.input_box[i].hi);
                }
                std::vector<double> y;
                if (is_counterexample(net, spec, x, &y)) {
                    v.outcome = Outcome::falsified;
                    v.witness_input = std::move(x);
                    v.witness_output = std::move(y);
                    v.seconds = seconds_since(t0);
                    return v;
                }
                need_split = true;
            }
        }
        if (!need_split) continue;

        const auto pick = pick_split(net, nb, splits);
        if (!pick) {
            // Every neuron is fixed, so the LP is exact, yet its point does not
            // replay. Leave the leaf open rather than guess.
            unresolved = true;
            continue;
        }
        SplitMap active = splits;
        active[pick->layer][pick->index] = 1;
        splits[pick->layer][pick->index] = -1;
        stack.push_back(std::move(active));
        stack.push_back(std::move(splits));  // inactive branch explored first
    }
    v.outcome = unresolved ? Outcome::timeout : Outcome::verified;
    v.unresolved = unresolved;
    v.seconds = seconds_since(t0);
    return v;
}

// ---- critical y* ------------------------------------------------------------

namespace {

bool passes(const Verdict& v) { return v.outcome == Outcome::verified; }

}  // namespace

CriticalResult find_critical_ystar(const Network& net, int kind, const IntervalVector& box,
                                   const CriticalSearch& search, const PropertyThresholds& th)
{
    if (!(search.resolution > 0.0)) throw std::invalid_argument("find_critical_ystar: resolution must be positive");
    CriticalResult res;
    std::map<long, bool> cache;  // grid index -> verified
    const double step = search.resolution;
    auto probe = [&](long idx) {
        if (auto it = cache.find(idx); it != cache.end()) return it->second;
        const double y = static_cast<double>(idx) * step;
        Verdict v = bab_verify(net, encode_property(kind, y, box, th), search.budget);
        if (v.outcome == Outcome::timeout) res.bound_only = true;
        const bool ok = passes(v);
        res.probes.push_back({y, std::move(v)});
        cache[idx] = ok;
        return ok;
    };
    const long per_unit = std::lround(1.0 / step);
    if (std::abs(per_unit * step - 1.0) > 1e-9) {
        throw std::invalid_argument("find_critical_ystar: resolution must divide 1");
    }

    if (kind == 3) {
        // Largest verified y* in (0, p3_max].
        const long top = static_cast<long>(std::floor(search.p3_max + 1e-9));
        long last = -1;
        for (long k = 1; k <= top; ++k) {
            if (!probe(k * per_unit)) break;
            last = k;
        }
        long lo = 0;
        long hi = 0;
        if (last < 0) {
            if (!probe(1)) return res;  // Failed
            lo = 1;
            hi = per_unit;
        } else if (last == top) {
            res.ystar = static_cast<double>(top);
            return res;
        } else {
            lo = last * per_unit;
            hi = (last + 1) * per_unit;
        }
        // Invariant: lo verified, hi not.
        while (hi - lo > 1) {
            const long mid = lo + (hi - lo) / 2;
            (probe(mid) ? lo : hi) = mid;
        }
        res.ystar = static_cast<double>(lo) * step;
        return res;
    }

    // P1, P2, P4: smallest verified y*. The premise of P1/P2 becomes empty
    // beyond the box, so the sweep is bounded by the box extent of x5 + x6.
    const double reach = std::max(std::abs(box[4].lo + box[5].lo), std::abs(box[4].hi + box[5].hi));
    const long top = static_cast<long>(std::ceil(reach)) + 1;
    long first = -1;
    for (long k = 0; k <= top; ++k) {
        if (probe(k * per_unit)) {
            first = k;
            break;
        }
    }
    if (first < 0) return res;
    if (first == 0) {
        res.ystar = 0.0;
        return res;
    }
    long lo = (first - 1) * per_unit;  // not verified
    long hi = first * per_unit;        // verified
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        (probe(mid) ? hi : lo) = mid;
    }
    res.ystar = static_cast<double>(hi) * step;
    return res;
}

// ---- robustness grid --------------------------------------------------------

std::vector<SweepCell> robustness_sweep(const Network& net, std::span<const Eigen::VectorXd> points,
                                        const IntervalVector& box, const SweepConfig& cfg)
{
    std::vector<SweepCell> cells;
    const int need = static_cast<int>(std::min<std::size_t>(100, points.size()));
    const int jobs = std::max(1, cfg.jobs);
    for (double eps : cfg.eps_list) {
        for (double lstar : cfg.lstar_list) {
            SweepCell cell;
            cell.eps = eps;
            cell.lstar = lstar;
            const auto t0 = Clock::now();
            std::vector<std::int8_t> result(points.size(), -1);  // -1 not run, 0 failed, 1 verified
            std::atomic<std::size_t> next{0};
            std::atomic<bool> stop{false};
            auto worker = [&] {
                while (!stop.load()) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= points.size()) return;
                    const PropertySpec spec = encode_robustness(net, points[i], eps, lstar, box);
                    const Verdict v = bab_verify(net, spec, cfg.per_query);
                    result[i] = passes(v) ? 1 : 0;
                    if (seconds_since(t0) > cfg.cell_seconds) stop.store(true);
                }
            };
            if (jobs == 1) {
                worker();
            } else {
                std::vector<std::thread> pool;
                for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
                for (auto& t : pool) t.join();
            }
            // Count the finished prefix so the tally does not depend on thread timing.
            for (std::size_t i = 0; i < points.size() && result[i] >= 0; ++i) {
                ++cell.attempted;
                cell.verified += result[i];
            }
            cell.seconds = seconds_since(t0);
            cell.complete = cell.attempted >= need;
            cells.push_back(cell);
        }
    }
    return cells;
}

}  // namespace glider
