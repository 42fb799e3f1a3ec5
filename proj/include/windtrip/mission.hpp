#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "windtrip/control.hpp"
#include "windtrip/estimation.hpp"
#include "windtrip/recorder.hpp"
#include "windtrip/rng.hpp"
#include "windtrip/sensing.hpp"
#include "windtrip/trajectory.hpp"
#include "windtrip/vehicle.hpp"
#include "windtrip/windfield.hpp"

namespace windtrip {

enum class LegMode { PdOnly, Feedback, Feedforward };

inline const char* to_string(LegMode m) {
    switch (m) {
        case LegMode::PdOnly: return "pd";
        case LegMode::Feedback: return "feedback";
        case LegMode::Feedforward: return "feedforward";
    }
    return "?";
}

inline LegMode leg_mode_from_string(const std::string& s) {
    if (s == "pd") return LegMode::PdOnly;
    if (s == "feedback") return LegMode::Feedback;
    if (s == "feedforward") return LegMode::Feedforward;
    throw std::invalid_argument("unknown controller mode '" + s + "' (pd|feedback|feedforward)");
}

// A constant wrench switched on over [t_start, t_end), for estimator
// identity and settling studies.
struct InjectedWrench {
    Wrench wrench{};
    double t_start = 0.0;
    double t_end = std::numeric_limits<double>::infinity();

    bool active(double t) const { return t >= t_start && t < t_end; }
};

struct MissionSetup {
    VehicleParams vehicle{};
    ControllerGains gains{};
    RateSchedule rates{};
    NoiseParams noise{};
    EstimatorConfig estimator{};
    double fallback_distance = 0.5;
    std::shared_ptr<const WindField> field;     // null -> no aerodynamic disturbance
    std::optional<InjectedWrench> injected;
    std::uint64_t seed = 1;
    std::string scenario_name = "custom";

    void validate() const {
        vehicle.validate();
        gains.validate();
        rates.validate();
        if (!(fallback_distance > 0.0)) {
            throw std::invalid_argument("MissionSetup: fallback distance must be > 0");
        }
    }
};

struct MissionPlan {
    Vec3 origin{0.0, 0.0, 1.0};
    Vec3 target{2.0, 0.0, 1.0};
    double outbound_speed = 0.1;  // m/s
    double return_speed = 1.0;    // m/s
    double accel_limit = 1.0;     // m/s²
    double preroll = 1.0;         // s of hover before the outbound leg
    double settle = 0.6;          // s appended to each leg after the profile ends
    double dwell = 2.0;           // s at the target between legs
    LegMode outbound_mode = LegMode::Feedback;
    LegMode return_mode = LegMode::Feedforward;
    double yaw_reference = 0.0;

    void validate() const {
        if ((target - origin).norm() < 1e-9) {
            throw std::invalid_argument("MissionPlan: origin and target coincide");
        }
        if (!(outbound_speed > 0.0) || !(return_speed > 0.0) || !(accel_limit > 0.0)) {
            throw std::invalid_argument("MissionPlan: speeds and acceleration must be > 0");
        }
        if (preroll < 0.0 || settle < 0.0 || dwell < 0.0) {
            throw std::invalid_argument("MissionPlan: durations must be >= 0");
        }
        if (outbound_mode == LegMode::Feedforward) {
            throw std::invalid_argument(
                "MissionPlan: feedforward is only available on the return leg");
        }
    }
};

struct PhaseSpec {
    std::string name;
    Trajectory trajectory;
    double duration = 0.0;  // >= trajectory duration, snapped to the command grid
    LegMode mode = LegMode::Feedback;
    bool record = false;    // append (position, estimate) records at command rate
    bool lookup = false;    // consult the recorded track (return flight)
    double yaw_reference = 0.0;
};

struct TruthRow {
    double t;
    int phase;
    Vec3 position, velocity;
    double qw, qx, qy, qz;
    Vec3 angular_velocity;
    Vec3 disturbance_force, disturbance_torque;
};

struct EstimateRow {
    double t;
    int phase;
    Vec3 force_estimate, torque_estimate;
    Vec3 specific_force, angular_rate;
    double c_sigma_commanded;
};

struct PoseRow {
    double t;
    Vec3 position, velocity;
};

struct CommandRow {
    double t;
    int phase;
    int mode;
    Setpoint setpoint;
    Vec3 position_true, position_meas;
    Vec3 force_comp, torque_comp;
    bool from_record = false;
    bool fallback = false;
    double lookup_index = -1.0;
    double lookup_distance = -1.0;
    double thrust;
    Vec3 torque_cmd;
    std::array<double, 4> motor_force{};
    bool thrust_saturated = false;
    bool mix_saturated = false;
    bool tilt_degenerate = false;
    Vec3 true_force, true_torque;
    Vec3 position_correction;  // double-integrated force-update correction, diagnostic only
};

struct PhaseInfo {
    std::string name;
    LegMode mode;
    bool record = false;
    bool lookup = false;
    long start_tick = 0;
    long end_tick = 0;
    double trajectory_duration = 0.0;
};

struct MissionLog {
    std::vector<PhaseInfo> phases;
    std::vector<TruthRow> truth;        // simulation rate
    std::vector<EstimateRow> estimates; // imu rate
    std::vector<PoseRow> poses;         // position rate
    std::vector<CommandRow> commands;   // command rate
    DisturbanceTrack track{0.5};
    bool diverged = false;
    std::string divergence_message;
    std::uint64_t seed = 0;
    std::string scenario_name;

    int phase_index(const std::string& name) const {
        for (std::size_t i = 0; i < phases.size(); ++i) {
            if (phases[i].name == name) return static_cast<int>(i);
        }
        throw std::invalid_argument("MissionLog: no phase named '" + name + "'");
    }
};

// Round-trip stages: hover at the origin, recorded outbound leg, dwell at the
// target, return leg in the requested mode.
inline std::vector<PhaseSpec> make_roundtrip_phases(const MissionPlan& plan,
                                                    const RateSchedule& rates) {
    plan.validate();
    const double cdt = rates.command_dt();
    const auto snap = [cdt](double d) { return std::ceil(d / cdt - 1e-9) * cdt; };

    std::vector<PhaseSpec> phases;
    if (plan.preroll > 0.0) {
        PhaseSpec p;
        p.name = "preroll";
        p.trajectory = Trajectory::hold(plan.origin, plan.preroll);
        p.duration = snap(plan.preroll);
        p.mode = plan.outbound_mode;
        p.yaw_reference = plan.yaw_reference;
        phases.push_back(std::move(p));
    }
    {
        PhaseSpec p;
        p.name = "outbound";
        p.trajectory = Trajectory::line(plan.origin, plan.target, plan.outbound_speed,
                                        plan.accel_limit);
        p.duration = snap(p.trajectory.duration() + plan.settle);
        p.mode = plan.outbound_mode;
        p.record = true;
        p.yaw_reference = plan.yaw_reference;
        phases.push_back(std::move(p));
    }
    if (plan.dwell > 0.0) {
        PhaseSpec p;
        p.name = "dwell";
        p.trajectory = Trajectory::hold(plan.target, plan.dwell);
        p.duration = snap(plan.dwell);
        p.mode = plan.outbound_mode;
        p.yaw_reference = plan.yaw_reference;
        phases.push_back(std::move(p));
    }
    {
        PhaseSpec p;
        p.name = "return";
        p.trajectory =
            Trajectory::line(plan.target, plan.origin, plan.return_speed, plan.accel_limit);
        p.duration = snap(p.trajectory.duration() + plan.settle);
        p.mode = plan.return_mode;
        p.lookup = (plan.return_mode == LegMode::Feedforward);
        p.yaw_reference = plan.yaw_reference;
        phases.push_back(std::move(p));
    }
    return phases;
}

/**
 * Fixed-step multi-rate closed-loop executor.
 *
 * Within one simulation tick the order is: evaluate the true disturbance and
 * the resulting acceleration under the currently applied command, sample
 * sensors and update the observers, then (on command ticks) record, look up,
 * and compute the next command, and finally integrate the dynamics. Sensors
 * therefore always see the actuation that was applied over the interval
 * ending at the sample instant, which is what the observers assume.
 */
inline MissionLog run_phases(const MissionSetup& setup, const std::vector<PhaseSpec>& phases,
                             std::optional<DisturbanceTrack> preloaded_track = std::nullopt) {
    setup.validate();
    if (phases.empty()) {
        throw std::invalid_argument("run_phases: no phases");
    }
    const RateSchedule& rates = setup.rates;
    const double sim_dt = rates.sim_dt();
    const VehicleParams& veh = setup.vehicle;

    MissionLog log;
    log.seed = setup.seed;
    log.scenario_name = setup.scenario_name;
    log.track = preloaded_track ? std::move(*preloaded_track)
                                : DisturbanceTrack(setup.fallback_distance);

    // Phase tick table.
    long tick_cursor = 0;
    for (const auto& p : phases) {
        PhaseInfo info;
        info.name = p.name;
        info.mode = p.mode;
        info.record = p.record;
        info.lookup = p.lookup;
        info.start_tick = tick_cursor;
        info.end_tick = tick_cursor + std::lround(p.duration / sim_dt);
        info.trajectory_duration = p.trajectory.duration();
        tick_cursor = info.end_tick;
        log.phases.push_back(info);
    }
    const long total_ticks = tick_cursor;

    // Initial condition: hover at the first reference point.
    VehicleState state;
    state.position = phases.front().trajectory.sample(0.0).position;

    MotorCommand held = mix(veh.weight(), Vec3::zero(), veh).command;
    auto [c_commanded, tau_commanded] = unmix(held, veh);

    ImuSampler imu(setup.noise, derive_seed(setup.seed, "imu"));
    PoseSampler pose(setup.noise, derive_seed(setup.seed, "pose"));
    ForceObserver force_obs(veh.mass, setup.estimator.tau_force, rates.imu_dt());
    TorqueObserver torque_obs(veh.inertia, setup.estimator.tau_diff, setup.estimator.tau_torque,
                              rates.imu_dt());
    FusedForceEstimator fusion(setup.estimator.tau_residual, rates.command_dt());

    Vec3 f_hat{}, tau_hat{};
    Vec3 latest_gyro{};
    PoseSample latest_pose;
    latest_pose.position = state.position;

    Vec3 prev_fused{};
    bool have_prev_fused = false;
    int last_phase = -1;
    Vec3 vel_corr{}, pos_corr{};

    const double mismatch = setup.estimator.thrust_mismatch;
    const auto apply_mismatch = [mismatch](const MotorCommand& cmd) {
        MotorCommand actual = cmd;
        if (mismatch != 1.0) {
            for (auto& f : actual.force) f *= mismatch;
        }
        return actual;
    };
    MotorCommand held_actual = apply_mismatch(held);

    log.truth.reserve(static_cast<std::size_t>(total_ticks));
    log.estimates.reserve(static_cast<std::size_t>(total_ticks / rates.imu_divisor() + 1));
    log.poses.reserve(static_cast<std::size_t>(total_ticks / rates.position_divisor() + 1));
    log.commands.reserve(static_cast<std::size_t>(total_ticks / rates.command_divisor() + 1));

    int phase_idx = 0;
    for (long tick = 0; tick < total_ticks; ++tick) {
        while (tick >= log.phases[static_cast<std::size_t>(phase_idx)].end_tick) {
            ++phase_idx;
        }
        const PhaseInfo& phase = log.phases[static_cast<std::size_t>(phase_idx)];
        const PhaseSpec& spec = phases[static_cast<std::size_t>(phase_idx)];
        if (phase_idx != last_phase) {
            // Per-phase reset of return-flight bookkeeping.
            have_prev_fused = false;
            vel_corr = pos_corr = Vec3::zero();
            last_phase = phase_idx;
        }
        const double t = static_cast<double>(tick) * sim_dt;

        // True disturbance acting over this step.
        Wrench disturbance{};
        if (setup.field) {
            disturbance = drag_wrench(state, *setup.field, t, veh);
        }
        if (setup.injected && setup.injected->active(t)) {
            disturbance = disturbance + setup.injected->wrench;
        }

        const Vec3 accel_true = world_acceleration(state, held_actual, disturbance, veh);

        log.truth.push_back({t, phase_idx, state.position, state.velocity, state.attitude.w(),
                             state.attitude.x(), state.attitude.y(), state.attitude.z(),
                             state.angular_velocity, disturbance.force, disturbance.torque});

        if (tick % rates.imu_divisor() == 0) {
            const ImuSample s = imu.sample(state, accel_true, veh, t);
            f_hat = force_obs.observe(s, state.attitude, c_commanded);
            tau_hat = torque_obs.observe(s.angular_rate, tau_commanded);
            latest_gyro = s.angular_rate;
            log.estimates.push_back(
                {t, phase_idx, f_hat, tau_hat, s.specific_force, s.angular_rate, c_commanded});
        }

        if (tick % rates.position_divisor() == 0) {
            latest_pose = pose.sample(state, t);
            log.poses.push_back({t, latest_pose.position, latest_pose.velocity});
        }

        if (tick % rates.command_divisor() == 0) {
            const double t_phase = static_cast<double>(tick - phase.start_tick) * sim_dt;
            Setpoint sp = spec.trajectory.sample(t_phase);
            sp.yaw = spec.yaw_reference;

            if (spec.record) {
                log.track.append({t, latest_pose.position, f_hat, tau_hat});
            }

            CommandRow row;
            row.t = t;
            row.phase = phase_idx;
            row.mode = static_cast<int>(spec.mode);
            row.setpoint = sp;
            row.position_true = state.position;
            row.position_meas = latest_pose.position;

            Vec3 f_comp{}, tau_comp{};
            switch (spec.mode) {
                case LegMode::PdOnly:
                    break;
                case LegMode::Feedback:
                    f_comp = f_hat;
                    tau_comp = tau_hat;
                    break;
                case LegMode::Feedforward: {
                    if (!spec.lookup || log.track.empty()) {
                        f_comp = f_hat;
                        tau_comp = tau_hat;
                        row.fallback = true;
                        break;
                    }
                    const LookupResult lr = log.track.lookup_nearest(latest_pose.position);
                    row.lookup_index = static_cast<double>(lr.index);
                    row.lookup_distance = lr.distance;
                    if (!have_prev_fused) {
                        prev_fused = f_hat;
                        have_prev_fused = true;
                    }
                    const FeedforwardTerms ff = compose_feedforward(
                        lr.found, lr.record.force, lr.record.torque, fusion, prev_fused, f_hat,
                        tau_hat);
                    f_comp = ff.force;
                    tau_comp = ff.torque;
                    row.from_record = ff.from_record;
                    row.fallback = !lr.found;
                    if (ff.from_record) {
                        prev_fused = ff.force;
                    } else {
                        prev_fused = f_hat;  // re-anchor on fallback
                    }
                    break;
                }
            }
            row.force_comp = f_comp;
            row.torque_comp = tau_comp;

            const Vec3 f_des = position_loop(latest_pose.position, latest_pose.velocity, sp,
                                             f_comp, veh, setup.gains);
            ControlOutput out =
                attitude_loop(state.attitude, latest_gyro, f_des, sp.yaw, veh, setup.gains);
            out.torque -= tau_comp;

            const MixResult mr = mix(out.thrust, out.torque, veh);
            held = mr.command;
            held_actual = apply_mismatch(held);
            std::tie(c_commanded, tau_commanded) = unmix(held, veh);

            // Diagnostic: double-integrate the force-update correction.
            if (spec.lookup) {
                vel_corr += ((f_comp - f_hat) / veh.mass) * rates.command_dt();
                pos_corr += vel_corr * rates.command_dt();
            }

            row.thrust = out.thrust;
            row.torque_cmd = out.torque;
            row.motor_force = held.force;
            row.thrust_saturated = out.thrust_saturated;
            row.mix_saturated = mr.saturated;
            row.tilt_degenerate = out.tilt_degenerate;
            row.true_force = disturbance.force;
            row.true_torque = disturbance.torque;
            row.position_correction = pos_corr;
            log.commands.push_back(row);
        }

        try {
            state = step_dynamics(state, held_actual, disturbance, veh, sim_dt);
        } catch (const SimulationDiverged& e) {
            log.diverged = true;
            log.divergence_message = e.what();
            break;
        }
    }
    return log;
}

inline MissionLog run_roundtrip(const MissionSetup& setup, const MissionPlan& plan) {
    return run_phases(setup, make_roundtrip_phases(plan, setup.rates));
}

// Root-mean-square position tracking error over one phase's command-rate
// samples. The axis mask selects which components enter the norm.
inline double rmse(const MissionLog& log, const std::string& phase_name,
                   const std::array<bool, 3>& axes = {true, true, true}) {
    const int idx = log.phase_index(phase_name);
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& row : log.commands) {
        if (row.phase != idx) continue;
        const Vec3 e = row.position_true - row.setpoint.position;
        sum += (axes[0] ? e.x * e.x : 0.0) + (axes[1] ? e.y * e.y : 0.0) +
               (axes[2] ? e.z * e.z : 0.0);
        ++n;
    }
    if (n == 0) {
        throw std::invalid_argument("rmse: phase '" + phase_name + "' has no command samples");
    }
    return std::sqrt(sum / static_cast<double>(n));
}

inline double reduction_percent(double rmse_baseline, double rmse_improved) {
    return 100.0 * (1.0 - rmse_improved / rmse_baseline);
}

}  // namespace windtrip
