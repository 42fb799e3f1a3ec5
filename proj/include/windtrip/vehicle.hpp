#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "windtrip/rotation.hpp"
#include "windtrip/vec3.hpp"
#include "windtrip/windfield.hpp"

namespace windtrip {

class SimulationDiverged : public std::runtime_error {
public:
    explicit SimulationDiverged(const std::string& what) : std::runtime_error(what) {}
};

struct VehicleParams {
    double mass = 0.154;        // kg
    double arm_length = 0.0585; // m, hub to motor
    Vec3 inertia{8.0e-5, 8.0e-5, 1.4e-4};  // kg·m², diagonal
    double motor_max_force = 1.15;         // N per motor
    double gravity = 9.81;                 // m/s², world -z
    double motor_torque_coeff = 0.01;      // N·m of yaw per N of thrust
    double drag_coeff = 0.0042;            // N/(m/s)², quadratic body drag
    double drag_coeff_linear = 0.0;        // N/(m/s), optional linear term

    double max_total_thrust() const { return 4.0 * motor_max_force; }
    double weight() const { return mass * gravity; }
    Vec3 gravity_vec() const { return {0.0, 0.0, -gravity}; }

    void validate() const {
        if (!(mass > 0.0)) throw std::invalid_argument("VehicleParams: mass must be > 0");
        if (!(arm_length > 0.0)) throw std::invalid_argument("VehicleParams: arm length must be > 0");
        if (!(inertia.x > 0.0 && inertia.y > 0.0 && inertia.z > 0.0)) {
            throw std::invalid_argument("VehicleParams: inertia diagonal must be > 0");
        }
        if (!(motor_max_force > 0.0)) {
            throw std::invalid_argument("VehicleParams: motor max force must be > 0");
        }
        if (!(motor_torque_coeff > 0.0)) {
            throw std::invalid_argument("VehicleParams: motor torque coefficient must be > 0");
        }
        if (!(max_total_thrust() > weight())) {
            throw std::invalid_argument("VehicleParams: thrust-to-weight must exceed 1");
        }
        if (drag_coeff < 0.0 || drag_coeff_linear < 0.0) {
            throw std::invalid_argument("VehicleParams: drag coefficients must be >= 0");
        }
    }
};

struct VehicleState {
    Vec3 position{};            // m, world
    Vec3 velocity{};            // m/s, world
    Rotation attitude{};        // body -> world
    Vec3 angular_velocity{};    // rad/s, body

    bool finite() const {
        return position.finite() && velocity.finite() && attitude.finite() &&
               angular_velocity.finite();
    }
};

// Force in the world frame, torque in the body frame.
struct Wrench {
    Vec3 force{};
    Vec3 torque{};

    Wrench operator+(const Wrench& o) const { return {force + o.force, torque + o.torque}; }
};

struct MotorCommand {
    std::array<double, 4> force{};  // N, individual propellers

    double total() const { return force[0] + force[1] + force[2] + force[3]; }
};

// X configuration, body frame x forward / y left / z up:
//   motor 0: (+a, -a)  spin +    motor 1: (-a, +a)  spin +
//   motor 2: (+a, +a)  spin -    motor 3: (-a, -a)  spin -
// with a = arm_length / sqrt(2). Spin sign is the yaw torque direction per
// newton of thrust.
inline std::array<Vec3, 4> motor_positions(const VehicleParams& p) {
    const double a = p.arm_length / std::sqrt(2.0);
    return {Vec3{a, -a, 0.0}, Vec3{-a, a, 0.0}, Vec3{a, a, 0.0}, Vec3{-a, -a, 0.0}};
}

inline constexpr std::array<double, 4> motor_spin_sign = {1.0, 1.0, -1.0, -1.0};

// (total thrust, body torque) produced by a motor command.
inline std::pair<double, Vec3> unmix(const MotorCommand& cmd, const VehicleParams& p) {
    const double a = p.arm_length / std::sqrt(2.0);
    const auto& f = cmd.force;
    const double thrust = cmd.total();
    const Vec3 torque{a * (-f[0] + f[1] + f[2] - f[3]),
                      a * (-f[0] + f[1] - f[2] + f[3]),
                      p.motor_torque_coeff * (f[0] + f[1] - f[2] - f[3])};
    return {thrust, torque};
}

struct MixResult {
    MotorCommand command{};
    bool saturated = false;
};

/**
 * Allocate total thrust and body torque to the four motors.
 *
 * When the exact allocation violates a motor limit, thrust is preserved and
 * the differential (torque) part is scaled down until all motors are within
 * [0, motor_max_force]; the result is flagged.
 */
inline MixResult mix(double total_thrust, const Vec3& torque, const VehicleParams& p) {
    if (total_thrust < 0.0) {
        throw std::invalid_argument("mix: total thrust must be >= 0");
    }
    MixResult out;
    double thrust = total_thrust;
    if (thrust > p.max_total_thrust()) {
        thrust = p.max_total_thrust();
        out.saturated = true;
    }

    const double a = p.arm_length / std::sqrt(2.0);
    const double base = thrust / 4.0;
    const double tx = torque.x / (4.0 * a);
    const double ty = torque.y / (4.0 * a);
    const double tz = torque.z / (4.0 * p.motor_torque_coeff);
    const std::array<double, 4> diff = {-tx - ty + tz, tx + ty + tz, tx - ty - tz, -tx + ty - tz};

    double scale = 1.0;
    for (double d : diff) {
        const double f = base + d;
        if (f > p.motor_max_force && d > 0.0) {
            scale = std::min(scale, (p.motor_max_force - base) / d);
        } else if (f < 0.0 && d < 0.0) {
            scale = std::min(scale, -base / d);
        }
    }
    if (scale < 1.0) {
        out.saturated = true;
    }
    for (int i = 0; i < 4; ++i) {
        out.command.force[i] = base + scale * diff[i];
    }
    return out;
}

// World-frame translational acceleration for a given attitude, total thrust,
// and world disturbance force. Shared by the integrator and the IMU model so
// measured and simulated accelerations agree exactly.
inline Vec3 translational_accel(const Rotation& attitude, double total_thrust,
                                const Vec3& disturbance_force, const VehicleParams& p) {
    const Vec3 thrust_world = attitude.rotate(Vec3{0.0, 0.0, total_thrust});
    return (thrust_world + disturbance_force) / p.mass + p.gravity_vec();
}

inline Vec3 world_acceleration(const VehicleState& state, const MotorCommand& cmd,
                               const Wrench& disturbance, const VehicleParams& p) {
    return translational_accel(state.attitude, cmd.total(), disturbance.force, p);
}

// Body-frame angular acceleration: J w' = tau_p + tau_d - w x (J w).
inline Vec3 angular_accel(const Vec3& omega, const Vec3& tau_p, const Vec3& tau_d,
                          const VehicleParams& p) {
    const Vec3 momentum = p.inertia.cwise(omega);
    return (tau_p + tau_d - omega.cross(momentum)).cwise_quotient(p.inertia);
}

namespace detail {

struct RigidBodyDeriv {
    Vec3 dp, dv;
    std::array<double, 4> dq;
    Vec3 domega;
};

struct RigidBodyRaw {
    Vec3 p, v;
    std::array<double, 4> q;  // w, x, y, z
    Vec3 omega;
};

inline RigidBodyDeriv rigid_body_deriv(const RigidBodyRaw& s, double thrust, const Vec3& tau_p,
                                       const Wrench& disturbance, const VehicleParams& p) {
    const Rotation att = Rotation::from_quaternion(s.q[0], s.q[1], s.q[2], s.q[3]);
    RigidBodyDeriv d;
    d.dp = s.v;
    d.dv = translational_accel(att, thrust, disturbance.force, p);
    // qdot = 0.5 * q  (0, omega), on the raw (unnormalized) quaternion
    const auto& q = s.q;
    const Vec3& w = s.omega;
    d.dq = {0.5 * (-q[1] * w.x - q[2] * w.y - q[3] * w.z),
            0.5 * (q[0] * w.x + q[2] * w.z - q[3] * w.y),
            0.5 * (q[0] * w.y - q[1] * w.z + q[3] * w.x),
            0.5 * (q[0] * w.z + q[1] * w.y - q[2] * w.x)};
    d.domega = angular_accel(s.omega, tau_p, disturbance.torque, p);
    return d;
}

inline RigidBodyRaw advance(const RigidBodyRaw& s, const RigidBodyDeriv& d, double h) {
    RigidBodyRaw r;
    r.p = s.p + h * d.dp;
    r.v = s.v + h * d.dv;
    for (int i = 0; i < 4; ++i) {
        r.q[i] = s.q[i] + h * d.dq[i];
    }
    r.omega = s.omega + h * d.domega;
    return r;
}

}  // namespace detail

/**
 * Advance the rigid body one step with classical RK4 and renormalize the
 * attitude quaternion. The motor command and disturbance wrench are held
 * constant over the step.
 */
inline VehicleState step_dynamics(const VehicleState& state, const MotorCommand& cmd,
                                  const Wrench& disturbance, const VehicleParams& p, double dt) {
    if (!(dt > 0.0) || dt > 0.01) {
        throw std::invalid_argument("step_dynamics: dt must be in (0, 0.01] s");
    }
    if (!state.finite()) {
        throw SimulationDiverged("step_dynamics: non-finite input state");
    }
    if (!disturbance.force.finite() || !disturbance.torque.finite()) {
        throw SimulationDiverged("step_dynamics: non-finite disturbance wrench");
    }

    const auto [thrust, tau_p] = unmix(cmd, p);

    detail::RigidBodyRaw s0;
    s0.p = state.position;
    s0.v = state.velocity;
    s0.q = {state.attitude.w(), state.attitude.x(), state.attitude.y(), state.attitude.z()};
    s0.omega = state.angular_velocity;

    const auto f = [&](const detail::RigidBodyRaw& s) {
        return detail::rigid_body_deriv(s, thrust, tau_p, disturbance, p);
    };

    const auto k1 = f(s0);
    const auto k2 = f(detail::advance(s0, k1, 0.5 * dt));
    const auto k3 = f(detail::advance(s0, k2, 0.5 * dt));
    const auto k4 = f(detail::advance(s0, k3, dt));

    VehicleState next;
    next.position = s0.p + (dt / 6.0) * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
    next.velocity = s0.v + (dt / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
    std::array<double, 4> q;
    for (int i = 0; i < 4; ++i) {
        q[i] = s0.q[i] + (dt / 6.0) * (k1.dq[i] + 2.0 * k2.dq[i] + 2.0 * k3.dq[i] + k4.dq[i]);
    }
    next.angular_velocity =
        s0.omega + (dt / 6.0) * (k1.domega + 2.0 * k2.domega + 2.0 * k3.domega + k4.domega);

    if (!next.position.finite() || !next.velocity.finite() || !next.angular_velocity.finite() ||
        !std::isfinite(q[0] + q[1] + q[2] + q[3])) {
        throw SimulationDiverged("step_dynamics: state diverged (non-finite result)");
    }
    next.attitude = Rotation::from_quaternion(q[0], q[1], q[2], q[3]);
    return next;
}

/**
 * Aerodynamic drag wrench from relative wind, world-frame force and
 * body-frame torque.
 *
 * The airframe is represented by four sample points at +-arm_length along the
 * body x and y axes, each carrying a quarter of the drag coefficient. A
 * velocity gradient across the span (e.g. the edge of a jet) then loads the
 * sides unevenly and produces torque, dominated by yaw for a horizontal jet
 * boundary.
 */
template <typename FieldFn>
inline Wrench drag_wrench_field(const VehicleState& state, FieldFn&& air_velocity_at,
                                const VehicleParams& p) {
    const double L = p.arm_length;
    const std::array<Vec3, 4> offsets = {Vec3{L, 0.0, 0.0}, Vec3{-L, 0.0, 0.0},
                                         Vec3{0.0, L, 0.0}, Vec3{0.0, -L, 0.0}};
    const Rotation inv = state.attitude.inverse();
    Wrench out;
    for (const Vec3& r_body : offsets) {
        const Vec3 r_world = state.attitude.rotate(r_body);
        const Vec3 point_velocity =
            state.velocity + state.attitude.rotate(state.angular_velocity.cross(r_body));
        const Vec3 v_rel = air_velocity_at(state.position + r_world) - point_velocity;
        const double speed = v_rel.norm();
        const Vec3 f_world = (0.25 * (p.drag_coeff * speed + p.drag_coeff_linear)) * v_rel;
        out.force += f_world;
        out.torque += r_body.cross(inv.rotate(f_world));
    }
    return out;
}

inline Wrench drag_wrench(const VehicleState& state, const WindField& field, double t,
                          const VehicleParams& p) {
    return drag_wrench_field(state, [&](const Vec3& pos) { return field.air_velocity(pos, t); },
                             p);
}

// Uniform-field shortcut: identical air velocity at all sample points.
inline Wrench drag_wrench(const VehicleState& state, const Vec3& air_velocity,
                          const VehicleParams& p) {
    return drag_wrench_field(state, [&](const Vec3&) { return air_velocity; }, p);
}

}  // namespace windtrip
