#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "glider/closedloop.hpp"
#include "glider/reach.hpp"
#include "glider/verifier.hpp"

namespace glider {

// 17 significant digits, lossless for doubles.
std::string fmt17(double v);

void write_trace_csv(const std::string& path, const Trace& tr);

void write_dataset_csv(const std::string& path, std::span<const DataRow> rows);
std::vector<DataRow> read_dataset_csv(const std::string& path);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

struct ResultRecord {
    std::string property;
    double param = 0.0;
    Verdict verdict;
};

void write_results_csv(const std::string& path, std::span<const ResultRecord> records);

// branch,t,dim,lo,hi per checkpoint.
void write_reach_csv(const std::string& path, const ReachResult& r, double dt_control);

struct Polyline {
    std::vector<std::pair<double, double>> points;
    std::string stroke = "#1f77b4";
    bool closed = false;
};

// Static (x5, x6) plot with the target line x6 = -x5 and, when band > 0, the
// goal band |x5 + x6| <= band.
std::string render_svg(std::span<const Polyline> lines, double band, const std::string& title);
void write_text(const std::string& path, const std::string& text);

std::vector<Polyline> trace_polylines(std::span<const Trace> traces);
std::vector<Polyline> reach_polylines(const ReachResult& r);

struct RunManifest {
    std::string command;
    std::string config_path;
    std::uint64_t seed = 0;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::string tool_version;
    double wall_seconds = 0.0;
    nlohmann::json settings = nlohmann::json::object();

    nlohmann::json to_json() const;
};

}  // namespace glider
