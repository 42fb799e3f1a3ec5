#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "windtrip/logio.hpp"
#include "windtrip/mission.hpp"

namespace windtrip {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

namespace cfg {

using nlohmann::json;

struct Errors {
    std::vector<std::string> items;

    void add(const std::string& path, const std::string& msg) {
        items.push_back(path + ": " + msg);
    }

    void raise_if_any() const {
        if (items.empty()) return;
        std::ostringstream ss;
        ss << "invalid configuration (" << items.size() << " problem"
           << (items.size() > 1 ? "s" : "") << "):";
        for (const auto& i : items) {
            ss << "\n  - " << i;
        }
        throw ConfigError(ss.str());
    }
};

inline void check_keys(const json& j, const std::string& path,
                       std::initializer_list<const char*> allowed, Errors& errors) {
    if (!j.is_object()) {
        errors.add(path, "expected an object");
        return;
    }
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            if (item.key() == a) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            errors.add(path + "." + item.key(), "unknown key");
        }
    }
}

inline void read_number(const json& j, const char* key, const std::string& path, double& out,
                        Errors& errors) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number()) {
        errors.add(path + "." + key, "expected a number");
        return;
    }
    out = j.at(key).get<double>();
}

inline void read_int(const json& j, const char* key, const std::string& path, int& out,
                     Errors& errors) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number_integer()) {
        errors.add(path + "." + key, "expected an integer");
        return;
    }
    out = j.at(key).get<int>();
}

inline void read_u64(const json& j, const char* key, const std::string& path, std::uint64_t& out,
                     Errors& errors) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number_unsigned() && !j.at(key).is_number_integer()) {
        errors.add(path + "." + key, "expected a non-negative integer");
        return;
    }
    out = j.at(key).get<std::uint64_t>();
}

inline void read_bool(const json& j, const char* key, const std::string& path, bool& out,
                      Errors& errors) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_boolean()) {
        errors.add(path + "." + key, "expected a boolean");
        return;
    }
    out = j.at(key).get<bool>();
}

inline void read_string(const json& j, const char* key, const std::string& path, std::string& out,
                        Errors& errors) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_string()) {
        errors.add(path + "." + key, "expected a string");
        return;
    }
    out = j.at(key).get<std::string>();
}

inline void read_vec3(const json& j, const char* key, const std::string& path, Vec3& out,
                      Errors& errors) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
        !v[2].is_number()) {
        errors.add(path + "." + key, "expected an array of 3 numbers");
        return;
    }
    out = {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

// Per-axis gains accept a scalar (applied to all axes) or a 3-array.
inline void read_axis_gain(const json& j, const char* key, const std::string& path, Vec3& out,
                           Errors& errors) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (v.is_number()) {
        const double s = v.get<double>();
        out = {s, s, s};
        return;
    }
    read_vec3(j, key, path, out, errors);
}

inline json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

}  // namespace cfg

// Full run description: everything needed to reproduce a mission.
struct ScenarioConfig {
    std::string name = "custom";
    std::uint64_t seed = 42;
    std::string output_dir;

    VehicleParams vehicle{};
    ControllerGains gains{};
    RateSchedule rates{};
    NoiseParams noise{};
    EstimatorConfig estimator{};
    double fallback_distance = 0.5;

    nlohmann::json field_config = {{"type", "none"}};
    std::optional<InjectedWrench> injected;

    std::string mission_type = "roundtrip";  // roundtrip | hover
    MissionPlan plan{};
    Vec3 hover_point{1.0, 0.0, 1.0};
    double hover_duration = 10.0;
    LegMode hover_mode = LegMode::Feedback;
};

// ---------------------------------------------------------------------------
// Wind-field construction from its JSON description.
// ---------------------------------------------------------------------------

inline void validate_field_config(const nlohmann::json& j, const std::string& path,
                                  cfg::Errors& errors);

inline std::shared_ptr<const WindField> build_field(const nlohmann::json& j) {
    cfg::Errors errors;
    validate_field_config(j, "field", errors);
    errors.raise_if_any();

    const std::string type = j.at("type").get<std::string>();
    if (type == "none") {
        return nullptr;
    }
    if (type == "uniform") {
        Vec3 v{};
        cfg::read_vec3(j, "velocity", "field", v, errors);
        return std::make_shared<UniformFlow>(v);
    }
    if (type == "jet") {
        JetParams p;
        cfg::read_vec3(j, "center", "field", p.nozzle_center, errors);
        cfg::read_vec3(j, "axis", "field", p.axis, errors);
        cfg::read_number(j, "ref_speed", "field", p.ref_speed, errors);
        cfg::read_number(j, "ref_distance", "field", p.ref_distance, errors);
        cfg::read_number(j, "core_radius", "field", p.core_radius, errors);
        cfg::read_number(j, "half_width", "field", p.half_width, errors);
        if (j.contains("mask")) {
            const auto& m = j.at("mask");
            cfg::read_bool(m, "enabled", "field.mask", p.mask.enabled, errors);
            double start_deg = 0.0, width_deg = 0.0;
            cfg::read_number(m, "start_deg", "field.mask", start_deg, errors);
            cfg::read_number(m, "width_deg", "field.mask", width_deg, errors);
            p.mask.start_rad = start_deg * M_PI / 180.0;
            p.mask.width_rad = width_deg * M_PI / 180.0;
            cfg::read_vec3(m, "reference", "field.mask", p.mask.reference, errors);
        }
        if (j.contains("turbulence")) {
            const auto& tb = j.at("turbulence");
            cfg::read_bool(tb, "enabled", "field.turbulence", p.turbulence.enabled, errors);
            cfg::read_number(tb, "intensity", "field.turbulence", p.turbulence.intensity, errors);
            cfg::read_u64(tb, "seed", "field.turbulence", p.turbulence.seed, errors);
        }
        errors.raise_if_any();
        return std::make_shared<JetFlow>(p);
    }
    if (type == "composite") {
        std::vector<std::shared_ptr<const WindField>> parts;
        for (const auto& c : j.at("components")) {
            parts.push_back(build_field(c));
        }
        return std::make_shared<CompositeFlow>(std::move(parts));
    }
    if (type == "time_varying") {
        auto base = build_field(j.at("base"));
        TemporalGain gain;
        const auto& g = j.at("gain");
        const std::string kind = g.at("kind").get<std::string>();
        if (kind == "constant") {
            gain.kind = TemporalGain::Kind::Constant;
            cfg::read_number(g, "value", "field.gain", gain.constant, errors);
        } else if (kind == "sine") {
            gain.kind = TemporalGain::Kind::Sine;
            cfg::read_number(g, "mean", "field.gain", gain.mean, errors);
            cfg::read_number(g, "amplitude", "field.gain", gain.amplitude, errors);
            cfg::read_number(g, "frequency_hz", "field.gain", gain.frequency_hz, errors);
            cfg::read_number(g, "phase", "field.gain", gain.phase, errors);
        } else {
            gain.kind = TemporalGain::Kind::Steps;
            gain.times = g.at("times").get<std::vector<double>>();
            gain.values = g.at("values").get<std::vector<double>>();
        }
        errors.raise_if_any();
        return std::make_shared<TimeVaryingFlow>(std::move(base), std::move(gain));
    }
    throw ConfigError("field: unknown type '" + type + "'");
}

inline void validate_field_config(const nlohmann::json& j, const std::string& path,
                                  cfg::Errors& errors) {
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
        errors.add(path, "expected an object with a 'type' string");
        return;
    }
    const std::string type = j.at("type").get<std::string>();
    if (type == "none") {
        cfg::check_keys(j, path, {"type"}, errors);
    } else if (type == "uniform") {
        cfg::check_keys(j, path, {"type", "velocity"}, errors);
    } else if (type == "jet") {
        cfg::check_keys(j, path,
                        {"type", "center", "axis", "ref_speed", "ref_distance", "core_radius",
                         "half_width", "mask", "turbulence"},
                        errors);
        if (j.contains("mask")) {
            cfg::check_keys(j.at("mask"), path + ".mask",
                            {"enabled", "start_deg", "width_deg", "reference"}, errors);
        }
        if (j.contains("turbulence")) {
            cfg::check_keys(j.at("turbulence"), path + ".turbulence",
                            {"enabled", "intensity", "seed"}, errors);
        }
    } else if (type == "composite") {
        cfg::check_keys(j, path, {"type", "components"}, errors);
        if (!j.contains("components") || !j.at("components").is_array()) {
            errors.add(path + ".components", "expected an array of field objects");
        } else {
            int i = 0;
            for (const auto& c : j.at("components")) {
                validate_field_config(c, path + ".components[" + std::to_string(i) + "]", errors);
                ++i;
            }
        }
    } else if (type == "time_varying") {
        cfg::check_keys(j, path, {"type", "base", "gain"}, errors);
        if (j.contains("base")) {
            validate_field_config(j.at("base"), path + ".base", errors);
        } else {
            errors.add(path + ".base", "missing base field");
        }
        if (!j.contains("gain") || !j.at("gain").is_object() || !j.at("gain").contains("kind")) {
            errors.add(path + ".gain", "expected an object with a 'kind'");
        } else {
            const auto& g = j.at("gain");
            const std::string kind = g.at("kind").is_string() ? g.at("kind").get<std::string>() : "";
            if (kind == "constant") {
                cfg::check_keys(g, path + ".gain", {"kind", "value"}, errors);
            } else if (kind == "sine") {
                cfg::check_keys(g, path + ".gain",
                                {"kind", "mean", "amplitude", "frequency_hz", "phase"}, errors);
            } else if (kind == "steps") {
                cfg::check_keys(g, path + ".gain", {"kind", "times", "values"}, errors);
            } else {
                errors.add(path + ".gain.kind", "unknown gain kind '" + kind + "'");
            }
        }
    } else {
        errors.add(path + ".type", "unknown field type '" + type + "'");
    }
}

// ---------------------------------------------------------------------------
// ScenarioConfig <-> JSON
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const ScenarioConfig& sc) {
    using cfg::vec3_to_json;
    nlohmann::json j;
    j["name"] = sc.name;
    j["seed"] = sc.seed;
    if (!sc.output_dir.empty()) {
        j["output_dir"] = sc.output_dir;
    }
    j["vehicle"] = {{"mass", sc.vehicle.mass},
                    {"arm_length", sc.vehicle.arm_length},
                    {"inertia", vec3_to_json(sc.vehicle.inertia)},
                    {"motor_max_force", sc.vehicle.motor_max_force},
                    {"gravity", sc.vehicle.gravity},
                    {"motor_torque_coeff", sc.vehicle.motor_torque_coeff},
                    {"drag_coeff", sc.vehicle.drag_coeff},
                    {"drag_coeff_linear", sc.vehicle.drag_coeff_linear}};
    j["gains"] = {{"position_p", vec3_to_json(sc.gains.position_p)},
                  {"position_d", vec3_to_json(sc.gains.position_d)},
                  {"tau_tilt", sc.gains.tau_tilt},
                  {"tau_yaw", sc.gains.tau_yaw}};
    j["rates"] = {{"simulation_hz", sc.rates.simulation_hz},
                  {"imu_hz", sc.rates.imu_hz},
                  {"position_hz", sc.rates.position_hz},
                  {"command_hz", sc.rates.command_hz}};
    j["noise"] = {{"accel_sigma", sc.noise.accel_sigma},
                  {"gyro_sigma", sc.noise.gyro_sigma},
                  {"accel_bias", vec3_to_json(sc.noise.accel_bias)},
                  {"gyro_bias", vec3_to_json(sc.noise.gyro_bias)},
                  {"position_sigma", sc.noise.position_sigma},
                  {"velocity_sigma", sc.noise.velocity_sigma}};
    j["estimator"] = {{"tau_force", sc.estimator.tau_force},
                      {"tau_torque", sc.estimator.tau_torque},
                      {"tau_diff", sc.estimator.tau_diff},
                      {"tau_residual", sc.estimator.tau_residual},
                      {"thrust_mismatch", sc.estimator.thrust_mismatch}};
    j["recorder"] = {{"fallback_distance", sc.fallback_distance}};
    j["field"] = sc.field_config;
    if (sc.injected) {
        j["injected_wrench"] = {{"force", vec3_to_json(sc.injected->wrench.force)},
                                {"torque", vec3_to_json(sc.injected->wrench.torque)},
                                {"t_start", sc.injected->t_start},
                                {"t_end", sc.injected->t_end}};
    }
    j["mission_type"] = sc.mission_type;
    j["plan"] = {{"origin", vec3_to_json(sc.plan.origin)},
                 {"target", vec3_to_json(sc.plan.target)},
                 {"outbound_speed", sc.plan.outbound_speed},
                 {"return_speed", sc.plan.return_speed},
                 {"accel_limit", sc.plan.accel_limit},
                 {"preroll", sc.plan.preroll},
                 {"settle", sc.plan.settle},
                 {"dwell", sc.plan.dwell},
                 {"outbound_mode", to_string(sc.plan.outbound_mode)},
                 {"return_mode", to_string(sc.plan.return_mode)},
                 {"yaw", sc.plan.yaw_reference}};
    j["hover"] = {{"point", vec3_to_json(sc.hover_point)},
                  {"duration", sc.hover_duration},
                  {"mode", to_string(sc.hover_mode)}};
    return j;
}

inline ScenarioConfig scenario_by_name(const std::string& name);

inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
    cfg::Errors errors;
    cfg::check_keys(j, "config",
                    {"name", "scenario", "seed", "output_dir", "vehicle", "gains", "rates",
                     "noise", "estimator", "recorder", "field", "injected_wrench", "mission_type",
                     "plan", "hover"},
                    errors);
    errors.raise_if_any();

    ScenarioConfig sc;
    if (j.contains("scenario")) {
        // Start from a named preset, then apply overrides from the file.
        sc = scenario_by_name(j.at("scenario").get<std::string>());
    }
    cfg::read_string(j, "name", "config", sc.name, errors);
    cfg::read_u64(j, "seed", "config", sc.seed, errors);
    cfg::read_string(j, "output_dir", "config", sc.output_dir, errors);

    if (j.contains("vehicle")) {
        const auto& v = j.at("vehicle");
        cfg::check_keys(v, "vehicle",
                        {"mass", "arm_length", "inertia", "motor_max_force", "gravity",
                         "motor_torque_coeff", "drag_coeff", "drag_coeff_linear"},
                        errors);
        cfg::read_number(v, "mass", "vehicle", sc.vehicle.mass, errors);
        cfg::read_number(v, "arm_length", "vehicle", sc.vehicle.arm_length, errors);
        cfg::read_vec3(v, "inertia", "vehicle", sc.vehicle.inertia, errors);
        cfg::read_number(v, "motor_max_force", "vehicle", sc.vehicle.motor_max_force, errors);
        cfg::read_number(v, "gravity", "vehicle", sc.vehicle.gravity, errors);
        cfg::read_number(v, "motor_torque_coeff", "vehicle", sc.vehicle.motor_torque_coeff,
                         errors);
        cfg::read_number(v, "drag_coeff", "vehicle", sc.vehicle.drag_coeff, errors);
        cfg::read_number(v, "drag_coeff_linear", "vehicle", sc.vehicle.drag_coeff_linear, errors);
    }
    if (j.contains("gains")) {
        const auto& g = j.at("gains");
        cfg::check_keys(g, "gains", {"position_p", "position_d", "tau_tilt", "tau_yaw"}, errors);
        cfg::read_axis_gain(g, "position_p", "gains", sc.gains.position_p, errors);
        cfg::read_axis_gain(g, "position_d", "gains", sc.gains.position_d, errors);
        cfg::read_number(g, "tau_tilt", "gains", sc.gains.tau_tilt, errors);
        cfg::read_number(g, "tau_yaw", "gains", sc.gains.tau_yaw, errors);
    }
    if (j.contains("rates")) {
        const auto& r = j.at("rates");
        cfg::check_keys(r, "rates", {"simulation_hz", "imu_hz", "position_hz", "command_hz"},
                        errors);
        cfg::read_int(r, "simulation_hz", "rates", sc.rates.simulation_hz, errors);
        cfg::read_int(r, "imu_hz", "rates", sc.rates.imu_hz, errors);
        cfg::read_int(r, "position_hz", "rates", sc.rates.position_hz, errors);
        cfg::read_int(r, "command_hz", "rates", sc.rates.command_hz, errors);
    }
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        cfg::check_keys(n, "noise",
                        {"accel_sigma", "gyro_sigma", "accel_bias", "gyro_bias", "position_sigma",
                         "velocity_sigma"},
                        errors);
        cfg::read_number(n, "accel_sigma", "noise", sc.noise.accel_sigma, errors);
        cfg::read_number(n, "gyro_sigma", "noise", sc.noise.gyro_sigma, errors);
        cfg::read_vec3(n, "accel_bias", "noise", sc.noise.accel_bias, errors);
        cfg::read_vec3(n, "gyro_bias", "noise", sc.noise.gyro_bias, errors);
        cfg::read_number(n, "position_sigma", "noise", sc.noise.position_sigma, errors);
        cfg::read_number(n, "velocity_sigma", "noise", sc.noise.velocity_sigma, errors);
    }
    if (j.contains("estimator")) {
        const auto& e = j.at("estimator");
        cfg::check_keys(e, "estimator",
                        {"tau_force", "tau_torque", "tau_diff", "tau_residual", "thrust_mismatch"},
                        errors);
        cfg::read_number(e, "tau_force", "estimator", sc.estimator.tau_force, errors);
        cfg::read_number(e, "tau_torque", "estimator", sc.estimator.tau_torque, errors);
        cfg::read_number(e, "tau_diff", "estimator", sc.estimator.tau_diff, errors);
        cfg::read_number(e, "tau_residual", "estimator", sc.estimator.tau_residual, errors);
        cfg::read_number(e, "thrust_mismatch", "estimator", sc.estimator.thrust_mismatch, errors);
    }
    if (j.contains("recorder")) {
        const auto& r = j.at("recorder");
        cfg::check_keys(r, "recorder", {"fallback_distance"}, errors);
        cfg::read_number(r, "fallback_distance", "recorder", sc.fallback_distance, errors);
    }
    if (j.contains("field")) {
        validate_field_config(j.at("field"), "field", errors);
        if (errors.items.empty()) {
            sc.field_config = j.at("field");
        }
    }
    if (j.contains("injected_wrench")) {
        const auto& w = j.at("injected_wrench");
        cfg::check_keys(w, "injected_wrench", {"force", "torque", "t_start", "t_end"}, errors);
        InjectedWrench iw;
        if (sc.injected) iw = *sc.injected;
        cfg::read_vec3(w, "force", "injected_wrench", iw.wrench.force, errors);
        cfg::read_vec3(w, "torque", "injected_wrench", iw.wrench.torque, errors);
        cfg::read_number(w, "t_start", "injected_wrench", iw.t_start, errors);
        cfg::read_number(w, "t_end", "injected_wrench", iw.t_end, errors);
        sc.injected = iw;
    }
    cfg::read_string(j, "mission_type", "config", sc.mission_type, errors);
    if (sc.mission_type != "roundtrip" && sc.mission_type != "hover") {
        errors.add("config.mission_type", "expected 'roundtrip' or 'hover'");
    }
    if (j.contains("plan")) {
        const auto& p = j.at("plan");
        cfg::check_keys(p, "plan",
                        {"origin", "target", "outbound_speed", "return_speed", "accel_limit",
                         "preroll", "settle", "dwell", "outbound_mode", "return_mode", "yaw"},
                        errors);
        cfg::read_vec3(p, "origin", "plan", sc.plan.origin, errors);
        cfg::read_vec3(p, "target", "plan", sc.plan.target, errors);
        cfg::read_number(p, "outbound_speed", "plan", sc.plan.outbound_speed, errors);
        cfg::read_number(p, "return_speed", "plan", sc.plan.return_speed, errors);
        cfg::read_number(p, "accel_limit", "plan", sc.plan.accel_limit, errors);
        cfg::read_number(p, "preroll", "plan", sc.plan.preroll, errors);
        cfg::read_number(p, "settle", "plan", sc.plan.settle, errors);
        cfg::read_number(p, "dwell", "plan", sc.plan.dwell, errors);
        std::string om = to_string(sc.plan.outbound_mode), rm = to_string(sc.plan.return_mode);
        cfg::read_string(p, "outbound_mode", "plan", om, errors);
        cfg::read_string(p, "return_mode", "plan", rm, errors);
        try {
            sc.plan.outbound_mode = leg_mode_from_string(om);
            sc.plan.return_mode = leg_mode_from_string(rm);
        } catch (const std::invalid_argument& e) {
            errors.add("plan", e.what());
        }
        cfg::read_number(p, "yaw", "plan", sc.plan.yaw_reference, errors);
    }
    if (j.contains("hover")) {
        const auto& h = j.at("hover");
        cfg::check_keys(h, "hover", {"point", "duration", "mode"}, errors);
        cfg::read_vec3(h, "point", "hover", sc.hover_point, errors);
        cfg::read_number(h, "duration", "hover", sc.hover_duration, errors);
        std::string hm = to_string(sc.hover_mode);
        cfg::read_string(h, "mode", "hover", hm, errors);
        try {
            sc.hover_mode = leg_mode_from_string(hm);
        } catch (const std::invalid_argument& e) {
            errors.add("hover.mode", e.what());
        }
    }
    errors.raise_if_any();

    // Semantic validation via the domain types.
    try {
        sc.vehicle.validate();
        sc.gains.validate();
        sc.rates.validate();
        if (sc.mission_type == "roundtrip") {
            sc.plan.validate();
        }
        if (!(sc.fallback_distance > 0.0)) {
            throw std::invalid_argument("recorder.fallback_distance must be > 0");
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
    return sc;
}

inline ScenarioConfig load_config_file(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("cannot parse " + path + ": " + e.what());
    }
    return scenario_from_json(j);
}

inline MissionSetup make_setup(const ScenarioConfig& sc) {
    MissionSetup s;
    s.vehicle = sc.vehicle;
    s.gains = sc.gains;
    s.rates = sc.rates;
    s.noise = sc.noise;
    s.estimator = sc.estimator;
    s.fallback_distance = sc.fallback_distance;
    s.field = build_field(sc.field_config);
    s.injected = sc.injected;
    s.seed = sc.seed;
    s.scenario_name = sc.name;
    return s;
}

inline std::string vehicle_hash(const VehicleParams& v) {
    const nlohmann::json j = {{"mass", v.mass},
                              {"arm_length", v.arm_length},
                              {"inertia", cfg::vec3_to_json(v.inertia)},
                              {"motor_max_force", v.motor_max_force},
                              {"gravity", v.gravity},
                              {"motor_torque_coeff", v.motor_torque_coeff},
                              {"drag_coeff", v.drag_coeff},
                              {"drag_coeff_linear", v.drag_coeff_linear}};
    const std::string s = j.dump();
    return hex64(fnv1a64_bytes(s.data(), s.size()));
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

// Straight 2 m line with a jet crossing it at right angles: 6 m/s on the
// flight path, 0.30 m from the nozzle.
inline nlohmann::json jet_field_config() {
    return {{"type", "jet"},
            {"center", {1.0, -0.3, 1.0}},
            {"axis", {0.0, 1.0, 0.0}},
            {"ref_speed", 6.0},
            {"ref_distance", 0.3},
            {"core_radius", 0.12},
            {"half_width", 0.04}};
}

// Same jet with one quadrant shadowed by an obstacle, plus an upward floor
// fan downstream of the crossing.
inline nlohmann::json complex_field_config() {
    nlohmann::json jet = jet_field_config();
    jet["mask"] = {{"enabled", true},
                   {"start_deg", 45.0},
                   {"width_deg", 90.0},
                   {"reference", {0.0, 0.0, 1.0}}};
    nlohmann::json fan = {{"type", "jet"},
                          {"center", {1.4, 0.0, 0.0}},
                          {"axis", {0.0, 0.0, 1.0}},
                          {"ref_speed", 7.0},
                          {"ref_distance", 0.3},
                          {"core_radius", 0.18},
                          {"half_width", 0.10}};
    return {{"type", "composite"}, {"components", {jet, fan}}};
}

inline ScenarioConfig scenario_by_name(const std::string& name) {
    ScenarioConfig sc;
    sc.name = name;
    if (name == "jet") {
        sc.field_config = jet_field_config();
        return sc;
    }
    if (name == "complex") {
        sc.field_config = complex_field_config();
        return sc;
    }
    if (name == "slow") {
        // Both legs at the recording speed; isolates the controller-mode
        // comparison from the speed increase.
        sc.field_config = jet_field_config();
        sc.plan.return_speed = 0.1;
        return sc;
    }
    if (name == "hover") {
        sc.field_config = jet_field_config();
        sc.mission_type = "hover";
        sc.hover_point = {0.92, 0.0, 1.0};  // at the jet boundary
        sc.hover_duration = 12.0;
        return sc;
    }
    if (name == "calm") {
        sc.field_config = {{"type", "none"}};
        return sc;
    }
    throw ConfigError("unknown scenario preset '" + name +
                      "' (jet|complex|slow|hover|calm)");
}

// Hover missions: a short preroll then a long hold at the point of interest.
inline std::vector<PhaseSpec> make_hover_phases(const ScenarioConfig& sc) {
    const double cdt = sc.rates.command_dt();
    const auto snap = [cdt](double d) { return std::ceil(d / cdt - 1e-9) * cdt; };
    std::vector<PhaseSpec> phases;
    PhaseSpec pre;
    pre.name = "preroll";
    pre.trajectory = Trajectory::hold(sc.hover_point, 1.0);
    pre.duration = snap(1.0);
    pre.mode = sc.hover_mode == LegMode::Feedforward ? LegMode::Feedback : sc.hover_mode;
    phases.push_back(std::move(pre));
    PhaseSpec hold;
    hold.name = "hold";
    hold.trajectory = Trajectory::hold(sc.hover_point, sc.hover_duration);
    hold.duration = snap(sc.hover_duration);
    hold.mode = sc.hover_mode;
    hold.lookup = sc.hover_mode == LegMode::Feedforward;
    phases.push_back(std::move(hold));
    return phases;
}

}  // namespace windtrip
