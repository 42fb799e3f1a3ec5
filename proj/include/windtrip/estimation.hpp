#pragma once

#include "windtrip/filters.hpp"
#include "windtrip/rotation.hpp"
#include "windtrip/sensing.hpp"
#include "windtrip/vec3.hpp"

namespace windtrip {

struct EstimatorConfig {
    double tau_force = 0.1;      // s, force estimate low-pass
    double tau_torque = 0.05;    // s, torque estimate low-pass
    double tau_diff = 0.025;     // s, smoothing inside the gyro differentiator
    double tau_residual = 0.1;   // s, return-flight residual filter
    double thrust_mismatch = 1.0;  // actual/commanded motor force, stress knob
};

/**
 * IMU-based disturbance force observer.
 *
 * The accelerometer measures specific force, so the mass-scaled measurement
 * rotated into the world frame minus the commanded collective thrust along
 * the body z axis is exactly the external force; a low-pass filter rejects
 * the measurement noise:
 *
 *   f_hat = F( m R alpha - c_sigma R e3 )
 *
 * Output is in the world frame.
 */
class ForceObserver {
public:
    ForceObserver(double mass, double tau_force, double sample_period)
        : mass_(mass), lpf_(tau_force, sample_period) {}

    Vec3 observe(const ImuSample& imu, const Rotation& attitude, double c_sigma) {
        const Vec3 raw =
            mass_ * attitude.rotate(imu.specific_force) - c_sigma * attitude.body_z();
        estimate_ = lpf_.step(raw);
        return estimate_;
    }

    const Vec3& estimate() const { return estimate_; }
    double tau() const { return lpf_.time_constant(); }

    void reset() {
        lpf_.reset();
        estimate_ = Vec3::zero();
    }

private:
    double mass_;
    LowPassFilter lpf_;
    Vec3 estimate_{};
};

/**
 * Rate-gyro based disturbance torque observer (body frame):
 *
 *   tau_hat = F( J d/dt(omega) + omega x (J omega) - tau_p )
 *
 * The angular acceleration comes from a filtered backward difference of the
 * gyro stream; tau_p must be the propeller torque that was actually applied
 * over the differentiation interval.
 */
class TorqueObserver {
public:
    TorqueObserver(const Vec3& inertia, double tau_diff, double tau_torque, double sample_period)
        : inertia_(inertia), diff_(tau_diff, sample_period), lpf_(tau_torque, sample_period) {}

    Vec3 observe(const Vec3& gyro, const Vec3& tau_p) {
        const Vec3 omega_dot = diff_.step(gyro);
        const Vec3 raw = inertia_.cwise(omega_dot) + gyro.cross(inertia_.cwise(gyro)) - tau_p;
        estimate_ = lpf_.step(raw);
        return estimate_;
    }

    const Vec3& estimate() const { return estimate_; }
    bool primed() const { return diff_.primed(); }

    void reset() {
        diff_.reset();
        lpf_.reset();
        estimate_ = Vec3::zero();
    }

private:
    Vec3 inertia_;
    FilteredDifferentiator diff_;
    LowPassFilter lpf_;
    Vec3 estimate_{};
};

/**
 * Return-flight fusion of the running force estimate with the recorded one:
 *
 *   f[k] = F( f[k-1] - f_rec[k] ) + f_rec[k]
 *
 * The recursion itself carries the filter memory through f[k-1], so F is a
 * single zero-state update, i.e. multiplication of the residual by
 * dt/(tau+dt). A repeated record value is an exact fixed point: if
 * prev == recorded the output is recorded, bit for bit, whatever the gain.
 */
class FusedForceEstimator {
public:
    FusedForceEstimator(double tau_residual, double sample_period)
        : gain_(LowPassFilter(tau_residual, sample_period).alpha()) {}

    Vec3 fuse(const Vec3& prev, const Vec3& recorded) const {
        return recorded + gain_ * (prev - recorded);
    }

    // Residual pass-through gain dt/(tau+dt); 1 means the record is ignored.
    double residual_gain() const { return gain_; }

private:
    double gain_;
};

}  // namespace windtrip
