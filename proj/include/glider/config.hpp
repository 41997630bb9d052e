#pragma once

#include <string>

#include <json.hpp>

#include "glider/aeromodel.hpp"
#include "glider/closedloop.hpp"
#include "glider/mlp.hpp"
#include "glider/reach.hpp"
#include "glider/robust.hpp"
#include "glider/verifier.hpp"

namespace glider {

struct VerifyConfig {
    PropertyThresholds thresholds;
    Budget budget;
    double resolution = 0.01;
    double p3_max = 50.0;
};

// Everything a pipeline run needs. Missing keys keep their defaults.
struct AppConfig {
    std::string plate_preset = "calibrated";  // or "published"
    PlateParams plate = PlateParams::calibrated();
    PidGains pid;
    SimConfig sim;
    TrainConfig train;
    RobustTrainConfig robust;
    VerifyConfig verify;
    SweepConfig sweep;
    ReachConfig reach;
    std::uint64_t seed = 0;
    bool strict = false;
};

AppConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const AppConfig& c);
AppConfig load_config(const std::string& path);

nlohmann::json plate_to_json(const PlateParams& p);

}  // namespace glider
