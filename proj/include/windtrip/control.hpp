#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "windtrip/estimation.hpp"
#include "windtrip/rotation.hpp"
#include "windtrip/vec3.hpp"
#include "windtrip/vehicle.hpp"

namespace windtrip {

struct ControllerGains {
    Vec3 position_p{4.0, 4.0, 4.0};   // 1/s²
    Vec3 position_d{2.8, 2.8, 2.8};   // 1/s
    double tau_tilt = 0.05;           // s, roll/pitch error time constant
    double tau_yaw = 0.2;             // s

    void validate() const {
        if (!(position_p.x > 0.0 && position_p.y > 0.0 && position_p.z > 0.0) ||
            !(position_d.x > 0.0 && position_d.y > 0.0 && position_d.z > 0.0) ||
            !(tau_tilt > 0.0) || !(tau_yaw > 0.0)) {
            throw std::invalid_argument("ControllerGains: all gains must be positive");
        }
        // The inner loop has to be well separated from the position loop.
        const double wn_max = std::sqrt(std::max({position_p.x, position_p.y, position_p.z}));
        if (tau_tilt > 0.25 / wn_max) {
            throw std::invalid_argument(
                "ControllerGains: attitude loop must be at least 4x faster than position loop");
        }
    }
};

struct Setpoint {
    Vec3 position{};
    Vec3 velocity{};
    Vec3 acceleration{};
    double yaw = 0.0;
};

struct ControlOutput {
    double thrust = 0.0;          // N, collective
    Vec3 torque{};                // N·m, body
    bool thrust_saturated = false;
    bool tilt_degenerate = false; // desired force (anti)parallel handling kicked in
};

/**
 * Outer position loop: PD on position/velocity error plus reference
 * acceleration feedforward, gravity, and subtraction of the estimated
 * disturbance force. Output is the desired total force in the world frame.
 */
inline Vec3 position_loop(const Vec3& position, const Vec3& velocity, const Setpoint& sp,
                          const Vec3& disturbance_force_est, const VehicleParams& params,
                          const ControllerGains& gains) {
    const Vec3 ep = sp.position - position;
    const Vec3 ev = sp.velocity - velocity;
    const Vec3 accel_cmd = sp.acceleration + gains.position_p.cwise(ep) + gains.position_d.cwise(ev);
    return params.mass * accel_cmd - params.mass * params.gravity_vec() - disturbance_force_est;
}

/**
 * Inner attitude loop. Thrust is the projection of the desired force onto the
 * current body z axis, so the achievable component is produced immediately.
 * The torque command drives the body z axis toward the desired force
 * direction along the geodesic (tilt first), with yaw handled separately and
 * more slowly; per-axis first-order error dynamics with time constants
 * tau_tilt / tau_yaw give, at zero rate, torque J*e/tau².
 */
inline ControlOutput attitude_loop(const Rotation& attitude, const Vec3& angular_rate,
                                   const Vec3& desired_force, double desired_yaw,
                                   const VehicleParams& params, const ControllerGains& gains) {
    ControlOutput out;

    const double force_norm = desired_force.norm();
    Vec3 tilt_error{};   // body frame, z component zero
    double yaw_error = 0.0;
    Rotation tilt_to_desired = Rotation::identity();

    if (force_norm < 1e-9) {
        // Degenerate request: keep attitude, no thrust, damp rotation below.
        out.tilt_degenerate = true;
    } else {
        const Vec3 z_des = desired_force / force_norm;
        const Vec3 z_body = attitude.body_z();
        const Vec3 axis_world = z_body.cross(z_des);
        const double sin_angle = axis_world.norm();
        const double cos_angle = z_body.dot(z_des);
        if (sin_angle < 1e-12) {
            if (cos_angle < 0.0) {
                // Anti-parallel: tilt about body x, deterministically.
                tilt_error = Vec3{M_PI, 0.0, 0.0};
                tilt_to_desired = Rotation::from_axis_angle(attitude.rotate(Vec3::unit_x()), M_PI);
                out.tilt_degenerate = true;
            }
        } else {
            const double angle = std::atan2(sin_angle, cos_angle);
            const Vec3 axis_body = attitude.inverse().rotate(axis_world / sin_angle);
            tilt_error = angle * axis_body;
            tilt_error.z = 0.0;
            tilt_to_desired = Rotation::from_axis_angle(axis_world / sin_angle, angle);
        }

        // Yaw error about the desired thrust axis, evaluated after the tilt
        // correction has notionally been applied.
        const Vec3 x_c{std::cos(desired_yaw), std::sin(desired_yaw), 0.0};
        Vec3 y_des = z_des.cross(x_c);
        const double y_norm = y_des.norm();
        if (y_norm > 1e-9) {
            y_des = y_des / y_norm;
            const Vec3 x_des = y_des.cross(z_des);
            const Vec3 x_tilted = tilt_to_desired.rotate(attitude.rotate(Vec3::unit_x()));
            yaw_error = std::atan2(x_tilted.cross(x_des).dot(z_des), x_tilted.dot(x_des));
        }

        double thrust = desired_force.dot(z_body);
        if (thrust < 0.0) {
            thrust = 0.0;
            out.thrust_saturated = true;
        } else if (thrust > params.max_total_thrust()) {
            thrust = params.max_total_thrust();
            out.thrust_saturated = true;
        }
        out.thrust = thrust;
    }

    const Vec3 inv_tau{1.0 / gains.tau_tilt, 1.0 / gains.tau_tilt, 1.0 / gains.tau_yaw};
    const Vec3 error{tilt_error.x, tilt_error.y, yaw_error};
    const Vec3 rate_des = error.cwise(inv_tau);
    const Vec3 accel_des = (rate_des - angular_rate).cwise(inv_tau);
    out.torque = params.inertia.cwise(accel_des) +
                 angular_rate.cross(params.inertia.cwise(angular_rate));
    return out;
}

struct FeedforwardTerms {
    Vec3 force{};        // replaces the feedback force estimate
    Vec3 torque{};       // added to the torque command as feedforward
    bool from_record = false;
};

/**
 * Return-flight composition: when the track lookup succeeded, the position
 * loop receives the fused force estimate and the recorded torque becomes a
 * feedforward torque term. On a fallback (query too far from the track) the
 * controller behaves exactly like the outbound feedback-only controller.
 */
inline FeedforwardTerms compose_feedforward(bool lookup_ok, const Vec3& recorded_force,
                                            const Vec3& recorded_torque,
                                            const FusedForceEstimator& fusion,
                                            const Vec3& prev_fused, const Vec3& live_force_est,
                                            const Vec3& live_torque_est) {
    FeedforwardTerms ff;
    if (lookup_ok) {
        ff.force = fusion.fuse(prev_fused, recorded_force);
        ff.torque = recorded_torque;
        ff.from_record = true;
    } else {
        ff.force = live_force_est;
        ff.torque = live_torque_est;
        ff.from_record = false;
    }
    return ff;
}

}  // namespace windtrip
