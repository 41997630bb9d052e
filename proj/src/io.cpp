#include "glider/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace glider {

std::string fmt17(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

namespace {

std::ofstream open_out(const std::string& path)
{
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    return os;
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& where)
{
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw std::runtime_error(where + ": bad number '" + s + "'");
    return v;
}

}  // namespace

void write_trace_csv(const std::string& path, const Trace& tr)
{
    auto os = open_out(path);
    os << "t,x1,x2,x3,x4,x5,x6,e_x\n";
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        os << fmt17(tr.t[i]);
        for (double v : tr.states[i]) os << ',' << fmt17(v);
        os << ',' << fmt17(tr.ex[i]) << '\n';
    }
}

void write_dataset_csv(const std::string& path, std::span<const DataRow> rows)
{
    auto os = open_out(path);
    os << "x1,x2,x3,x4,x5,x6,err,e_x_cmd\n";
    for (const auto& r : rows) {
        for (double v : r.state) os << fmt17(v) << ',';
        os << fmt17(r.err) << ',' << fmt17(r.actuation) << '\n';
    }
}

std::vector<DataRow> read_dataset_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(is, line) || line != "x1,x2,x3,x4,x5,x6,err,e_x_cmd") {
        throw std::runtime_error(path + ": unexpected header");
    }
    std::vector<DataRow> rows;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        const std::string where = path + ":" + std::to_string(lineno);
        if (f.size() != 8) throw std::runtime_error(where + ": expected 8 fields");
        DataRow r;
        for (std::size_t i = 0; i < 6; ++i) r.state[i] = parse_double(f[i], where);
        r.err = parse_double(f[6], where);
        r.actuation = parse_double(f[7], where);
        rows.push_back(r);
    }
    return rows;
}

void write_json(const std::string& path, const nlohmann::json& j)
{
    auto os = open_out(path);
    os << j.dump(1) << '\n';
}

nlohmann::json read_json(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    try {
        return nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void write_results_csv(const std::string& path, std::span<const ResultRecord> records)
{
    auto os = open_out(path);
    os << "property,param,verdict,witness,nodes,lp_calls,seconds\n";
    for (const auto& r : records) {
        os << r.property << ',' << fmt17(r.param) << ',' << verdict_label(r.verdict) << ',';
        for (std::size_t i = 0; i < r.verdict.witness_input.size(); ++i) {
            if (i > 0) os << ';';
            os << fmt17(r.verdict.witness_input[i]);
        }
        os << ',' << r.verdict.nodes << ',' << r.verdict.lp_calls << ',' << fmt17(r.verdict.seconds) << '\n';
    }
}

void write_reach_csv(const std::string& path, const ReachResult& r, double dt_control)
{
    auto os = open_out(path);
    os << "branch,t,dim,lo,hi\n";
    for (const auto& b : r.branches) {
        for (std::size_t k = 0; k < b.checkpoints.size(); ++k) {
            for (std::size_t d = 0; d < b.checkpoints[k].size(); ++d) {
                os << b.index << ',' << fmt17(static_cast<double>(k) * dt_control) << ',' << d + 1 << ','
                   << fmt17(b.checkpoints[k][d].lo) << ',' << fmt17(b.checkpoints[k][d].hi) << '\n';
            }
        }
    }
}

std::string render_svg(std::span<const Polyline> lines, double band, const std::string& title)
{
    double xmin = 0.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;
    bool first = true;
    for (const auto& l : lines) {
        for (const auto& [x, y] : l.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if (first) {
                xmin = xmax = x;
                ymin = ymax = y;
                first = false;
            }
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    const double padx = 0.05 * std::max(xmax - xmin, 1e-6);
    const double pady = 0.05 * std::max(ymax - ymin, 1e-6);
    xmin -= padx;
    xmax += padx;
    ymin -= pady;
    ymax += pady;
    constexpr double W = 800.0, H = 600.0, M = 50.0;
    auto sx = [&](double x) { return M + (x - xmin) / (xmax - xmin) * (W - 2 * M); };
    auto sy = [&](double y) { return H - M - (y - ymin) / (ymax - ymin) * (H - 2 * M); };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << ' ' << H << "\">\n"
       << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
       << "<text x=\"" << M << "\" y=\"30\" font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n"
       << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" font-family=\"sans-serif\" font-size=\"12\">x5 [m]</text>\n"
       << "<text x=\"10\" y=\"" << H / 2 << "\" font-family=\"sans-serif\" font-size=\"12\">x6 [m]</text>\n";
    if (band > 0.0) {
        os << "<polygon fill=\"#2ca02c\" fill-opacity=\"0.15\" stroke=\"none\" points=\"" << sx(xmin) << ',' << sy(-xmin + band)
           << ' ' << sx(xmax) << ',' << sy(-xmax + band) << ' ' << sx(xmax) << ',' << sy(-xmax - band) << ' ' << sx(xmin)
           << ',' << sy(-xmin - band) << "\"/>\n";
    }
    os << "<line x1=\"" << sx(xmin) << "\" y1=\"" << sy(-xmin) << "\" x2=\"" << sx(xmax) << "\" y2=\"" << sy(-xmax)
       << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
    for (const auto& l : lines) {
        os << (l.closed ? "<polygon" : "<polyline") << " fill=\"none\" stroke=\"" << l.stroke
           << "\" stroke-width=\"1\" points=\"";
        for (const auto& [x, y] : l.points) os << sx(x) << ',' << sy(y) << ' ';
        os << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_text(const std::string& path, const std::string& text)
{
    auto os = open_out(path);
    os << text;
}

std::vector<Polyline> trace_polylines(std::span<const Trace> traces)
{
    std::vector<Polyline> out;
    for (const auto& tr : traces) {
        Polyline l;
        for (const auto& s : tr.states) l.points.emplace_back(s[4], s[5]);
        out.push_back(std::move(l));
    }
    return out;
}

std::vector<Polyline> reach_polylines(const ReachResult& r)
{
    // One closed outline per checkpoint hull, drawn as a polyline.
    std::vector<Polyline> out;
    for (const auto& b : r.branches) {
        for (const auto& h : b.checkpoints) {
            Polyline l;
            l.stroke = b.ok ? "#d62728" : "#7f7f7f";
            l.points = {{h[4].lo, h[5].lo}, {h[4].hi, h[5].lo}, {h[4].hi, h[5].hi}, {h[4].lo, h[5].hi}, {h[4].lo, h[5].lo}};
            out.push_back(std::move(l));
        }
    }
    return out;
}

nlohmann::json RunManifest::to_json() const
{
    return {{"command", command},   {"config", config_path}, {"seed", seed},
            {"inputs", inputs},     {"outputs", outputs},    {"tool_version", tool_version},
            {"wall_seconds", wall_seconds}, {"settings", settings}};
}

}  // namespace glider
