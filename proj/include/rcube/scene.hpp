#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rcube/config.hpp"

namespace rcube {

enum class TargetClass : int { pedestrian = 0, cyclist = 1, car = 2 };

inline constexpr std::size_t kNumClasses = 3;

inline const char* class_name(TargetClass c) {
    switch (c) {
        case TargetClass::pedestrian: return "pedestrian";
        case TargetClass::cyclist: return "cyclist";
        case TargetClass::car: return "car";
    }
    return "?";
}

inline TargetClass class_from_string(const std::string& s) {
    if (s == "pedestrian") return TargetClass::pedestrian;
    if (s == "cyclist") return TargetClass::cyclist;
    if (s == "car") return TargetClass::car;
    throw schema_error("unknown target class '" + s + "'");
}

// A point scatterer in polar scene coordinates.
struct PointTarget {
    double range = 0;            // m
    double azimuth = 0;          // rad, positive to the right of boresight
    double radial_velocity = 0;  // m/s, positive = receding
    double amplitude = 1.0;
    TargetClass cls = TargetClass::pedestrian;

    void validate(const RadarConfig& cfg) const {
        if (range <= 0 || range > cfg.max_range()) throw domain_error("target range outside (0, max_range]");
        if (std::abs(azimuth) > cfg.max_angle()) throw domain_error("target azimuth outside +-max_angle");
        if (std::abs(radial_velocity) >= cfg.max_velocity())
            throw domain_error("target radial velocity outside +-max_velocity");
        if (amplitude < 0) throw domain_error("target amplitude must be non-negative");
    }
};

// Per-frame target lists. Frame-to-frame motion is explicit: the author of
// the scene places each target per frame.
struct Scene {
    std::vector<std::vector<PointTarget>> frames;

    std::size_t num_frames() const { return frames.size(); }

    void validate(const RadarConfig& cfg) const {
        for (const auto& frame : frames)
            for (const auto& t : frame) t.validate(cfg);
    }
};

inline PointTarget target_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw schema_error("target entry must be a JSON object");
    PointTarget t;
    if (!j.contains("r") || !j.at("r").is_number()) throw schema_error("target missing numeric 'r'");
    t.range = j.at("r").get<double>();
    if (j.contains("theta_deg"))
        t.azimuth = deg_to_rad(j.at("theta_deg").get<double>());
    else if (j.contains("theta"))
        t.azimuth = j.at("theta").get<double>();
    else
        throw schema_error("target missing 'theta' or 'theta_deg'");
    if (j.contains("v")) t.radial_velocity = j.at("v").get<double>();
    if (j.contains("amp")) t.amplitude = j.at("amp").get<double>();
    if (!j.contains("class") || !j.at("class").is_string())
        throw schema_error("target missing string 'class'");
    t.cls = class_from_string(j.at("class").get<std::string>());
    return t;
}

inline Scene scene_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("frames")) throw schema_error("scene document needs a 'frames' array");
    const auto& frames = j.at("frames");
    if (!frames.is_array()) throw schema_error("scene 'frames' must be an array");
    Scene s;
    for (const auto& frame : frames) {
        if (!frame.is_array()) throw schema_error("each scene frame must be an array of targets");
        std::vector<PointTarget> list;
        for (const auto& tj : frame) list.push_back(target_from_json(tj));
        s.frames.push_back(std::move(list));
    }
    return s;
}

inline nlohmann::json scene_to_json(const Scene& s) {
    nlohmann::json frames = nlohmann::json::array();
    for (const auto& frame : s.frames) {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& t : frame) {
            list.push_back({{"r", t.range},
                            {"theta_deg", rad_to_deg(t.azimuth)},
                            {"v", t.radial_velocity},
                            {"amp", t.amplitude},
                            {"class", class_name(t.cls)}});
        }
        frames.push_back(std::move(list));
    }
    return nlohmann::json{{"frames", std::move(frames)}};
}

}  // namespace rcube
