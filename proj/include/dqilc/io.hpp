#pragma once

// Config, tick-log and campaign-summary serialization. Configs and summaries
// are JSON; tick logs are CSV with shortest round-trip decimal numbers, so a
// re-read log reproduces the in-memory values bit for bit.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "dqilc/error.hpp"
#include "dqilc/experiment.hpp"

namespace dqilc {

inline constexpr int config_schema_version = 1;
inline constexpr int summary_schema_version = 1;

inline constexpr std::string_view csv_header =
    "t,dP_x,dP_y,dP_z,dq_x,dq_y,dq_z,dP_norm,angle_rad,f_x,f_y,f_z,tau_x,tau_y,tau_z,theta_hat";
inline constexpr std::size_t csv_columns = 16;

inline std::string to_string(UpdateLaw law)
{
    return law == UpdateLaw::saturated ? "saturated" : "unsaturated";
}

/// Accepts "saturated"/"unsaturated" and the equation labels "eq56"/"eq35".
inline UpdateLaw parse_update_law(std::string_view s)
{
    if (s == "saturated" || s == "eq56") {
        return UpdateLaw::saturated;
    }
    if (s == "unsaturated" || s == "eq35") {
        return UpdateLaw::unsaturated;
    }
    throw ArgumentError("unknown update law '" + std::string(s) + "'");
}

namespace detail {

using nlohmann::json;

inline json to_json(const Vector3& v)
{
    return json::array({v.x(), v.y(), v.z()});
}

inline json to_json(const Matrix3& m)
{
    json rows = json::array();
    for (int i = 0; i < 3; ++i) {
        rows.push_back(json::array({m(i, 0), m(i, 1), m(i, 2)}));
    }
    return rows;
}

inline json to_json(const MassProperties& p)
{
    return {{"mass", p.mass}, {"inertia", to_json(p.inertia)}};
}

inline Vector3 vec3(const json& j, const char* what)
{
    if (!j.is_array() || j.size() != 3) {
        throw ArgumentError(std::string("config: ") + what + " must be an array of 3 numbers");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline std::array<double, 3> arr3(const json& j, const char* what)
{
    const Vector3 v = vec3(j, what);
    return {v.x(), v.y(), v.z()};
}

inline Matrix3 mat3(const json& j, const char* what)
{
    if (!j.is_array() || j.size() != 3) {
        throw ArgumentError(std::string("config: ") + what + " must be a 3x3 array");
    }
    Matrix3 m;
    for (int i = 0; i < 3; ++i) {
        m.row(i) = vec3(j[i], what).transpose();
    }
    return m;
}

inline void read_mass(const json& j, MassProperties& p, const char* what)
{
    if (j.contains("mass")) {
        p.mass = j["mass"].get<double>();
    }
    if (j.contains("inertia")) {
        p.inertia = mat3(j["inertia"], what);
    }
}

inline void append_number(std::string& out, double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

inline double parse_number(std::string_view field, std::size_t line)
{
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw IoError("csv line " + std::to_string(line) + ": bad number '" + std::string(field) + "'");
    }
    return v;
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& data)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << data;
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

} // namespace detail

inline nlohmann::json config_to_json(const ExperimentConfig& cfg)
{
    using detail::to_json;
    nlohmann::json j;
    j["schema_version"] = config_schema_version;
    j["horizon_s"] = cfg.horizon;
    j["frequency_hz"] = cfg.frequency;
    j["iterations"] = cfg.iterations;
    j["segments"]["count"] = cfg.segments;
    j["segments"]["boundaries"] = cfg.segment_boundaries;
    auto& g = j["gains"];
    g["k_p"] = cfg.gains.k_p;
    g["k_d"] = cfg.gains.k_d;
    g["k_c"] = cfg.gains.k_c;
    g["k_theta"] = cfg.gains.k_theta;
    g["k_l"] = cfg.gains.k_l ? nlohmann::json(*cfg.gains.k_l) : nlohmann::json(nullptr);
    g["boundary_layer"] = cfg.gains.boundary_layer;
    j["update_law"] = to_string(cfg.law);
    j["plant"] = to_json(cfg.plant);
    j["nominal"] = to_json(cfg.nominal);
    j["nominal_gravity_feedforward"] = cfg.nominal_gravity_feedforward;
    auto& d = j["disturbance"];
    d["torque"]["periods_s"] = cfg.disturbance.torque_periods;
    d["torque"]["magnitudes_nm"] = cfg.disturbance.torque_magnitudes;
    d["torque"]["phases_rad"] = cfg.disturbance.torque_phases;
    d["force"]["periods_s"] = cfg.disturbance.force_periods;
    d["force"]["magnitudes_n"] = cfg.disturbance.force_magnitudes;
    d["force"]["phase_max_rad"] = cfg.disturbance.force_phase_max;
    d["gravity"]["enabled"] = cfg.disturbance.gravity;
    d["gravity"]["mu"] = cfg.disturbance.mu;
    d["seed"] = cfg.disturbance.seed;
    auto& t = j["trajectory"];
    t["kind"] = cfg.trajectory.kind == DesiredTrajectory::Kind::hold ? "hold" : "proximity";
    t["orbit_rate"] = cfg.trajectory.orbit_rate;
    t["roll_amplitude"] = cfg.trajectory.roll_amplitude;
    t["roll_frequency"] = cfg.trajectory.roll_frequency;
    t["speed"] = cfg.trajectory.speed;
    t["initial_attitude"] = cfg.initial_attitude;
    t["initial_position_m"] = to_json(cfg.initial_position);
    j["output_dir"] = cfg.output_dir;
    return j;
}

/// Missing keys keep their defaults, so a partial file overrides only what
/// it names.
inline ExperimentConfig config_from_json(const nlohmann::json& j)
{
    ExperimentConfig cfg;
    try {
        if (!j.is_object()) {
            throw ArgumentError("config: top level must be an object");
        }
        if (j.contains("schema_version") && j["schema_version"].get<int>() != config_schema_version) {
            throw ArgumentError("config: unsupported schema_version " + j["schema_version"].dump());
        }
        auto get = [](const nlohmann::json& o, const char* key, auto& dst) {
            if (o.contains(key)) {
                o.at(key).get_to(dst);
            }
        };
        get(j, "horizon_s", cfg.horizon);
        get(j, "frequency_hz", cfg.frequency);
        get(j, "iterations", cfg.iterations);
        if (j.contains("segments")) {
            get(j["segments"], "count", cfg.segments);
            get(j["segments"], "boundaries", cfg.segment_boundaries);
        }
        if (j.contains("gains")) {
            const auto& g = j["gains"];
            get(g, "k_p", cfg.gains.k_p);
            get(g, "k_d", cfg.gains.k_d);
            get(g, "k_c", cfg.gains.k_c);
            get(g, "k_theta", cfg.gains.k_theta);
            if (g.contains("k_l")) {
                cfg.gains.k_l = g["k_l"].is_null() ? std::nullopt : std::optional<double>(g["k_l"].get<double>());
            }
            get(g, "boundary_layer", cfg.gains.boundary_layer);
        }
        if (j.contains("update_law")) {
            cfg.law = parse_update_law(j["update_law"].get<std::string>());
        }
        if (j.contains("plant")) {
            detail::read_mass(j["plant"], cfg.plant, "plant.inertia");
        }
        if (j.contains("nominal")) {
            detail::read_mass(j["nominal"], cfg.nominal, "nominal.inertia");
        }
        get(j, "nominal_gravity_feedforward", cfg.nominal_gravity_feedforward);
        if (j.contains("disturbance")) {
            const auto& d = j["disturbance"];
            auto& c = cfg.disturbance;
            if (d.contains("torque")) {
                const auto& s = d["torque"];
                if (s.contains("periods_s")) c.torque_periods = detail::arr3(s["periods_s"], "torque periods");
                if (s.contains("magnitudes_nm")) c.torque_magnitudes = detail::arr3(s["magnitudes_nm"], "torque magnitudes");
                if (s.contains("phases_rad")) c.torque_phases = detail::arr3(s["phases_rad"], "torque phases");
            }
            if (d.contains("force")) {
                const auto& f = d["force"];
                if (f.contains("periods_s")) c.force_periods = detail::arr3(f["periods_s"], "force periods");
                if (f.contains("magnitudes_n")) c.force_magnitudes = detail::arr3(f["magnitudes_n"], "force magnitudes");
                get(f, "phase_max_rad", c.force_phase_max);
            }
            if (d.contains("gravity")) {
                get(d["gravity"], "enabled", c.gravity);
                get(d["gravity"], "mu", c.mu);
            }
            get(d, "seed", c.seed);
        }
        if (j.contains("trajectory")) {
            const auto& t = j["trajectory"];
            if (t.contains("kind")) {
                const auto kind = t["kind"].get<std::string>();
                if (kind == "hold") {
                    cfg.trajectory.kind = DesiredTrajectory::Kind::hold;
                } else if (kind == "proximity") {
                    cfg.trajectory.kind = DesiredTrajectory::Kind::proximity;
                } else {
                    throw ArgumentError("config: unknown trajectory kind '" + kind + "'");
                }
            }
            get(t, "orbit_rate", cfg.trajectory.orbit_rate);
            get(t, "roll_amplitude", cfg.trajectory.roll_amplitude);
            get(t, "roll_frequency", cfg.trajectory.roll_frequency);
            get(t, "speed", cfg.trajectory.speed);
            get(t, "initial_attitude", cfg.initial_attitude);
            if (t.contains("initial_position_m")) {
                cfg.initial_position = detail::vec3(t["initial_position_m"], "initial position");
            }
        }
        get(j, "output_dir", cfg.output_dir);
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("config: ") + e.what());
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(detail::read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ArgumentError(path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

inline void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path)
{
    detail::write_file(path, config_to_json(cfg).dump(2) + "\n");
}

inline std::string tick_log_csv(const std::vector<TickRecord>& ticks)
{
    std::string out(csv_header);
    out += '\n';
    out.reserve(out.size() + ticks.size() * 200);
    for (const auto& r : ticks) {
        const double row[csv_columns] = {r.t,          r.e_position.x(), r.e_position.y(), r.e_position.z(),
                                         r.e_qvec.x(), r.e_qvec.y(),     r.e_qvec.z(),     r.e_position_norm,
                                         r.angle,      r.force.x(),      r.force.y(),      r.force.z(),
                                         r.torque.x(), r.torque.y(),     r.torque.z(),     r.theta_hat};
        for (std::size_t c = 0; c < csv_columns; ++c) {
            if (c) {
                out += ',';
            }
            detail::append_number(out, row[c]);
        }
        out += '\n';
    }
    return out;
}

/// Inverse of tick_log_csv. Energy is not part of the schema and reads as 0.
inline std::vector<TickRecord> parse_tick_log(std::string_view text)
{
    std::vector<TickRecord> ticks;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        if (!header_seen) {
            std::string compact;
            for (char ch : line) {
                if (ch != ' ') {
                    compact += ch;
                }
            }
            if (compact != csv_header) {
                throw IoError("csv: unexpected header");
            }
            header_seen = true;
            continue;
        }
        double v[csv_columns];
        std::size_t c = 0;
        while (true) {
            const auto comma = line.find(',');
            std::string_view field = line.substr(0, comma);
            while (!field.empty() && field.front() == ' ') {
                field.remove_prefix(1);
            }
            if (c >= csv_columns) {
                throw IoError("csv line " + std::to_string(line_no) + ": too many columns");
            }
            v[c++] = detail::parse_number(field, line_no);
            if (comma == std::string_view::npos) {
                break;
            }
            line.remove_prefix(comma + 1);
        }
        if (c != csv_columns) {
            throw IoError("csv line " + std::to_string(line_no) + ": expected " + std::to_string(csv_columns) +
                          " columns, got " + std::to_string(c));
        }
        TickRecord r;
        r.t = v[0];
        r.e_position = {v[1], v[2], v[3]};
        r.e_qvec = {v[4], v[5], v[6]};
        r.e_position_norm = v[7];
        r.angle = v[8];
        r.force = {v[9], v[10], v[11]};
        r.torque = {v[12], v[13], v[14]};
        r.theta_hat = v[15];
        ticks.push_back(r);
    }
    if (!header_seen) {
        throw IoError("csv: missing header");
    }
    return ticks;
}

inline void write_tick_log(const std::vector<TickRecord>& ticks, const std::filesystem::path& path)
{
    detail::write_file(path, tick_log_csv(ticks));
}

inline std::vector<TickRecord> read_tick_log(const std::filesystem::path& path)
{
    try {
        return parse_tick_log(detail::read_file(path));
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

inline std::string iteration_log_name(std::size_t k)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "iteration_%03zu.csv", k);
    return buf;
}

/// Recovers k from a file named by iteration_log_name.
inline std::size_t iteration_from_log_name(const std::filesystem::path& path)
{
    const std::string stem = path.stem().string();
    const std::string prefix = "iteration_";
    if (stem.rfind(prefix, 0) != 0) {
        throw ArgumentError("log name '" + path.filename().string() + "' does not encode an iteration index");
    }
    const std::string_view digits = std::string_view(stem).substr(prefix.size());
    std::size_t k = 0;
    const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (digits.empty() || res.ec != std::errc() || res.ptr != digits.data() + digits.size()) {
        throw ArgumentError("log name '" + path.filename().string() + "' does not encode an iteration index");
    }
    return k;
}

inline nlohmann::json summary_to_json(const CampaignReport& report)
{
    nlohmann::json j;
    j["schema_version"] = summary_schema_version;
    nlohmann::json its = nlohmann::json::array();
    for (const auto& s : report.iterations) {
        its.push_back({{"k", s.k},
                       {"max_dP_norm_m", s.max_position_error},
                       {"final_dP_norm_m", s.final_position_error},
                       {"max_angle_deg", rad_to_deg(s.max_angle)},
                       {"max_theta_hat", s.max_theta_hat},
                       {"max_V", s.max_energy},
                       {"final_V", s.final_energy}});
    }
    j["iterations"] = std::move(its);
    j["monitors"] = {{"energy_bounded", report.monitors.energy_bounded},
                     {"increments_valid", report.monitors.increments_valid},
                     {"max_theta_hat", report.monitors.max_theta_hat}};
    return j;
}

inline void save_summary(const CampaignReport& report, const std::filesystem::path& path)
{
    detail::write_file(path, summary_to_json(report).dump(2) + "\n");
}

/// Runs a campaign, writing config.json, one CSV per iteration and
/// summary.json into `dir`.
inline CampaignReport run_campaign_to_dir(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                                          const IterationObserver& observer = {})
{
    cfg.validate();
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }
    save_config(cfg, dir / "config.json");
    CampaignReport report = run_campaign(cfg, [&](const IterationResult& res, const EstimateProfile& projected) {
        write_tick_log(res.log.ticks, dir / iteration_log_name(res.log.k));
        if (observer) {
            observer(res, projected);
        }
    });
    save_summary(report, dir / "summary.json");
    return report;
}

} // namespace dqilc
