#include "aoi/config.hpp"

#include <fstream>

namespace aoi {

namespace {

[[noreturn]] void bad_config(const std::string& what) { throw Error(ErrorCode::config, what); }

template <typename T>
T field(const nlohmann::json& j, const char* name) {
    if (!j.contains(name)) bad_config(std::string("missing field \"") + name + "\"");
    try {
        return j.at(name).get<T>();
    } catch (const nlohmann::json::exception& e) {
        bad_config(std::string("field \"") + name + "\": " + e.what());
    }
}

}  // namespace

ConfigDoc parse_config(const nlohmann::json& j) {
    if (!j.is_object()) bad_config("configuration must be a JSON object");
    ConfigDoc doc;
    doc.p = field<double>(j, "p");
    if (j.contains("e_max")) doc.e_max = field<double>(j, "e_max");
    doc.sensor_count = field<int>(j, "M");

    const auto sensors = field<nlohmann::json>(j, "sensors");
    if (!sensors.is_object()) bad_config("\"sensors\" must be an object");
    const bool has_q = sensors.contains("q");
    const bool has_pmf = sensors.contains("pmf");
    if (has_q == has_pmf) bad_config("\"sensors\" must contain exactly one of \"q\" or \"pmf\"");
    if (has_q) {
        doc.erasures = field<std::vector<double>>(sensors, "q");
        if (static_cast<int>(doc.erasures->size()) != doc.sensor_count)
            bad_config("\"sensors.q\" must list one erasure probability per sensor (M entries)");
    } else {
        doc.pmf = field<std::vector<double>>(sensors, "pmf");
    }

    const auto distortion = field<nlohmann::json>(j, "distortion");
    doc.breakpoints = field<std::vector<Age>>(distortion, "breakpoints");
    doc.levels = field<std::vector<int>>(distortion, "levels");
    return doc;
}

ConfigDoc load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot open config file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        bad_config("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

SystemParams ConfigDoc::to_params() const {
    DistortionSpec spec(breakpoints, levels, sensor_count);
    std::vector<double> dist = erasures ? pmf_from_erasures(*erasures) : *pmf;
    return SystemParams(p, std::move(dist), std::move(spec), e_max.value_or(1.0));
}

nlohmann::json to_json(const ConfigDoc& doc) {
    nlohmann::json j;
    j["p"] = doc.p;
    if (doc.e_max) j["e_max"] = *doc.e_max;
    j["M"] = doc.sensor_count;
    if (doc.erasures)
        j["sensors"] = {{"q", *doc.erasures}};
    else if (doc.pmf)
        j["sensors"] = {{"pmf", *doc.pmf}};
    j["distortion"] = {{"breakpoints", doc.breakpoints}, {"levels", doc.levels}};
    return j;
}

nlohmann::json to_json(const MixturePolicy& policy) {
    return {{"low_threshold", policy.low_policy.threshold},
            {"high_threshold", policy.high_policy.threshold},
            {"mix_prob", policy.mix_prob},
            {"beta_minus", policy.beta_minus},
            {"beta_plus", policy.beta_plus}};
}

MixturePolicy mixture_from_json(const nlohmann::json& j) {
    MixturePolicy m;
    m.low_policy.threshold = field<Age>(j, "low_threshold");
    m.high_policy.threshold = field<Age>(j, "high_threshold");
    m.mix_prob = field<double>(j, "mix_prob");
    m.beta_minus = field<double>(j, "beta_minus");
    m.beta_plus = field<double>(j, "beta_plus");
    m.validate();
    return m;
}

}  // namespace aoi
