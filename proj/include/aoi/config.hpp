#pragma once

// JSON configuration documents and policy serialization.
//
// Schema:
//   {"p": number, "e_max": number, "M": int,
//    "sensors": {"q": [numbers]} | {"pmf": [numbers]},
//    "distortion": {"breakpoints": [ints], "levels": [ints]}}

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aoi/lagrange.hpp"
#include "aoi/model.hpp"

namespace aoi {

struct ConfigDoc {
    double p = 0.0;
    std::optional<double> e_max;
    int sensor_count = 0;
    std::optional<std::vector<double>> erasures;  // "sensors.q"
    std::optional<std::vector<double>> pmf;       // "sensors.pmf"
    std::vector<Age> breakpoints;
    std::vector<int> levels;

    /// Validated parameters; e_max defaults to 1 when absent.
    SystemParams to_params() const;
};

/// Throws Error(config) on schema violations.
ConfigDoc parse_config(const nlohmann::json& j);
ConfigDoc load_config(const std::filesystem::path& path);

nlohmann::json to_json(const ConfigDoc& doc);
nlohmann::json to_json(const MixturePolicy& policy);
MixturePolicy mixture_from_json(const nlohmann::json& j);

}  // namespace aoi
