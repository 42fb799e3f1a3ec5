#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "windtrip/logio.hpp"
#include "windtrip/mission.hpp"
#include "windtrip/scenario.hpp"

namespace windtrip {

namespace fs = std::filesystem;

/**
 * Persist a mission: one CSV per rate group, the recorded track with its
 * metadata sidecar, the exact configuration echo, a status file, and a
 * summary. The summary is always computed by reading the files back, so
 * `report` on the same directory regenerates it byte for byte.
 */
inline nlohmann::json compute_summary(const fs::path& dir);

inline void write_mission_outputs(const MissionLog& log, const ScenarioConfig& config,
                                  const fs::path& dir) {
    fs::create_directories(dir);

    write_text_file(dir / "config.json", to_json(config).dump(2) + "\n");

    {
        CsvWriter w(dir / "phases.csv",
                    {"index", "mode", "record", "lookup", "start_tick", "end_tick",
                     "trajectory_duration"});
        // Phase names go in a sidecar column file to keep the CSV numeric.
        std::string names;
        for (std::size_t i = 0; i < log.phases.size(); ++i) {
            const auto& p = log.phases[i];
            w.row({static_cast<double>(i), static_cast<double>(static_cast<int>(p.mode)),
                   p.record ? 1.0 : 0.0, p.lookup ? 1.0 : 0.0,
                   static_cast<double>(p.start_tick), static_cast<double>(p.end_tick),
                   p.trajectory_duration});
            names += p.name;
            names += '\n';
        }
        write_text_file(dir / "phase_names.txt", names);
    }

    {
        CsvWriter w(dir / "truth_1000hz.csv",
                    {"t", "phase", "px", "py", "pz", "vx", "vy", "vz", "qw", "qx", "qy", "qz",
                     "wx", "wy", "wz", "dist_fx", "dist_fy", "dist_fz", "dist_tx", "dist_ty",
                     "dist_tz"});
        for (const auto& r : log.truth) {
            w.row({r.t, static_cast<double>(r.phase), r.position.x, r.position.y, r.position.z,
                   r.velocity.x, r.velocity.y, r.velocity.z, r.qw, r.qx, r.qy, r.qz,
                   r.angular_velocity.x, r.angular_velocity.y, r.angular_velocity.z,
                   r.disturbance_force.x, r.disturbance_force.y, r.disturbance_force.z,
                   r.disturbance_torque.x, r.disturbance_torque.y, r.disturbance_torque.z});
        }
    }

    {
        CsvWriter w(dir / "estimates_500hz.csv",
                    {"t", "phase", "fhat_x", "fhat_y", "fhat_z", "tauhat_x", "tauhat_y",
                     "tauhat_z", "accel_x", "accel_y", "accel_z", "gyro_x", "gyro_y", "gyro_z",
                     "c_sigma"});
        for (const auto& r : log.estimates) {
            w.row({r.t, static_cast<double>(r.phase), r.force_estimate.x, r.force_estimate.y,
                   r.force_estimate.z, r.torque_estimate.x, r.torque_estimate.y,
                   r.torque_estimate.z, r.specific_force.x, r.specific_force.y,
                   r.specific_force.z, r.angular_rate.x, r.angular_rate.y, r.angular_rate.z,
                   r.c_sigma_commanded});
        }
    }

    {
        CsvWriter w(dir / "pose_200hz.csv", {"t", "px", "py", "pz", "vx", "vy", "vz"});
        for (const auto& r : log.poses) {
            w.row({r.t, r.position.x, r.position.y, r.position.z, r.velocity.x, r.velocity.y,
                   r.velocity.z});
        }
    }

    {
        CsvWriter w(
            dir / "commands_50hz.csv",
            {"t",         "phase",      "mode",       "ref_px",     "ref_py",    "ref_pz",
             "ref_vx",    "ref_vy",     "ref_vz",     "ref_ax",     "ref_ay",    "ref_az",
             "ref_yaw",   "px",         "py",         "pz",         "meas_px",   "meas_py",
             "meas_pz",   "fcomp_x",    "fcomp_y",    "fcomp_z",    "tcomp_x",   "tcomp_y",
             "tcomp_z",   "from_record", "fallback",  "lookup_index", "lookup_distance",
             "thrust",    "tau_x",      "tau_y",      "tau_z",      "m0",        "m1",
             "m2",        "m3",         "thrust_sat", "mix_sat",    "tilt_degen", "true_fx",
             "true_fy",   "true_fz",    "true_tx",    "true_ty",    "true_tz",   "corr_x",
             "corr_y",    "corr_z"});
        for (const auto& r : log.commands) {
            w.row({r.t,
                   static_cast<double>(r.phase),
                   static_cast<double>(r.mode),
                   r.setpoint.position.x,
                   r.setpoint.position.y,
                   r.setpoint.position.z,
                   r.setpoint.velocity.x,
                   r.setpoint.velocity.y,
                   r.setpoint.velocity.z,
                   r.setpoint.acceleration.x,
                   r.setpoint.acceleration.y,
                   r.setpoint.acceleration.z,
                   r.setpoint.yaw,
                   r.position_true.x,
                   r.position_true.y,
                   r.position_true.z,
                   r.position_meas.x,
                   r.position_meas.y,
                   r.position_meas.z,
                   r.force_comp.x,
                   r.force_comp.y,
                   r.force_comp.z,
                   r.torque_comp.x,
                   r.torque_comp.y,
                   r.torque_comp.z,
                   r.from_record ? 1.0 : 0.0,
                   r.fallback ? 1.0 : 0.0,
                   r.lookup_index,
                   r.lookup_distance,
                   r.thrust,
                   r.torque_cmd.x,
                   r.torque_cmd.y,
                   r.torque_cmd.z,
                   r.motor_force[0],
                   r.motor_force[1],
                   r.motor_force[2],
                   r.motor_force[3],
                   r.thrust_saturated ? 1.0 : 0.0,
                   r.mix_saturated ? 1.0 : 0.0,
                   r.tilt_degenerate ? 1.0 : 0.0,
                   r.true_force.x,
                   r.true_force.y,
                   r.true_force.z,
                   r.true_torque.x,
                   r.true_torque.y,
                   r.true_torque.z,
                   r.position_correction.x,
                   r.position_correction.y,
                   r.position_correction.z});
        }
    }

    if (!log.track.empty()) {
        DisturbanceTrack track = log.track;
        track.metadata.scenario = config.name;
        track.metadata.record_hz = config.rates.command_hz;
        track.metadata.estimate_hz = config.rates.imu_hz;
        track.metadata.tau_force = config.estimator.tau_force;
        track.metadata.tau_torque = config.estimator.tau_torque;
        track.metadata.tau_diff = config.estimator.tau_diff;
        track.metadata.tau_residual = config.estimator.tau_residual;
        track.metadata.fallback_distance = config.fallback_distance;
        track.metadata.vehicle_hash = vehicle_hash(config.vehicle);
        track.metadata.seed = config.seed;
        track.metadata.leg_start_time = log.track.empty() ? 0.0 : log.track[0].t;
        track.save(dir / "track.csv");
    }

    const nlohmann::json status = {{"diverged", log.diverged},
                                   {"message", log.divergence_message}};
    write_text_file(dir / "run_status.json", status.dump(2) + "\n");

    write_text_file(dir / "summary.json", compute_summary(dir).dump(2) + "\n");
}

inline nlohmann::json compute_summary(const fs::path& dir) {
    const fs::path commands_path = dir / "commands_50hz.csv";
    if (!fs::exists(commands_path)) {
        throw std::runtime_error("no logs found in " + dir.string());
    }
    const CsvTable cmd = read_csv(commands_path);
    const CsvTable phases = read_csv(dir / "phases.csv");

    std::vector<std::string> phase_names;
    {
        std::istringstream in(read_text_file(dir / "phase_names.txt"));
        std::string line;
        while (std::getline(in, line)) {
            phase_names.push_back(line);
        }
    }

    const nlohmann::json config = nlohmann::json::parse(read_text_file(dir / "config.json"));
    nlohmann::json status = {{"diverged", false}, {"message", ""}};
    if (fs::exists(dir / "run_status.json")) {
        status = nlohmann::json::parse(read_text_file(dir / "run_status.json"));
    }

    const auto c = [&cmd](const char* name) { return cmd.column(name); };
    const std::size_t c_phase = c("phase");
    const std::size_t c_px = c("px"), c_py = c("py"), c_pz = c("pz");
    const std::size_t c_rx = c("ref_px"), c_ry = c("ref_py"), c_rz = c("ref_pz");
    const std::size_t c_fcx = c("fcomp_x"), c_fcy = c("fcomp_y"), c_fcz = c("fcomp_z");
    const std::size_t c_tcx = c("tcomp_x"), c_tcy = c("tcomp_y"), c_tcz = c("tcomp_z");
    const std::size_t c_tfx = c("true_fx"), c_tfy = c("true_fy"), c_tfz = c("true_fz");
    const std::size_t c_ttx = c("true_tx"), c_tty = c("true_ty"), c_ttz = c("true_tz");
    const std::size_t c_tsat = c("thrust_sat"), c_msat = c("mix_sat");
    const std::size_t c_rec = c("from_record"), c_fb = c("fallback");
    const std::size_t c_mode = c("mode");

    nlohmann::json phase_summaries = nlohmann::json::object();
    for (std::size_t pi = 0; pi < phases.rows.size(); ++pi) {
        double se = 0.0, sex = 0.0, sey = 0.0, sez = 0.0, max_e = 0.0;
        double sf = 0.0, st = 0.0;
        long n = 0, sat = 0, rec = 0, fallback = 0;
        double mode = 0.0;
        for (const auto& row : cmd.rows) {
            if (static_cast<std::size_t>(row[c_phase]) != pi) continue;
            const double ex = row[c_px] - row[c_rx];
            const double ey = row[c_py] - row[c_ry];
            const double ez = row[c_pz] - row[c_rz];
            const double e2 = ex * ex + ey * ey + ez * ez;
            se += e2;
            sex += ex * ex;
            sey += ey * ey;
            sez += ez * ez;
            max_e = std::max(max_e, e2);
            const double fx = row[c_fcx] - row[c_tfx];
            const double fy = row[c_fcy] - row[c_tfy];
            const double fz = row[c_fcz] - row[c_tfz];
            sf += fx * fx + fy * fy + fz * fz;
            const double tx = row[c_tcx] - row[c_ttx];
            const double ty = row[c_tcy] - row[c_tty];
            const double tz = row[c_tcz] - row[c_ttz];
            st += tx * tx + ty * ty + tz * tz;
            sat += (row[c_tsat] != 0.0 || row[c_msat] != 0.0) ? 1 : 0;
            rec += (row[c_rec] != 0.0) ? 1 : 0;
            fallback += (row[c_fb] != 0.0) ? 1 : 0;
            mode = row[c_mode];
            ++n;
        }
        if (n == 0) continue;
        const double dn = static_cast<double>(n);
        const std::string name =
            pi < phase_names.size() ? phase_names[pi] : ("phase" + std::to_string(pi));
        phase_summaries[name] = {
            {"samples", n},
            {"mode", to_string(static_cast<LegMode>(static_cast<int>(mode)))},
            {"rmse_m", std::sqrt(se / dn)},
            {"rmse_x_m", std::sqrt(sex / dn)},
            {"rmse_y_m", std::sqrt(sey / dn)},
            {"rmse_z_m", std::sqrt(sez / dn)},
            {"max_error_m", std::sqrt(max_e)},
            {"force_comp_rms_error_N", std::sqrt(sf / dn)},
            {"torque_comp_rms_error_Nm", std::sqrt(st / dn)},
            {"saturation_steps", sat},
            {"record_steps", rec},
            {"fallback_steps", fallback},
        };
    }

    const std::string config_text = read_text_file(dir / "config.json");
    const std::uint64_t seed = config.at("seed").get<std::uint64_t>();
    nlohmann::json summary = {
        {"scenario", config.at("name").get<std::string>()},
        {"seed", seed},
        {"config_hash", hex64(fnv1a64_bytes(config_text.data(), config_text.size()))},
        {"streams",
         {{"imu", derive_seed(seed, "imu")}, {"pose", derive_seed(seed, "pose")}}},
        {"phases", phase_summaries},
        {"diverged", status.at("diverged").get<bool>()},
    };
    return summary;
}

// Regenerate summary.json from the persisted logs; used by the `report`
// subcommand and by tests that check bit-exact reproduction.
inline nlohmann::json regenerate_summary(const fs::path& dir) {
    const nlohmann::json summary = compute_summary(dir);
    write_text_file(dir / "summary.json", summary.dump(2) + "\n");
    return summary;
}

}  // namespace windtrip
