#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "windtrip/rng.hpp"
#include "windtrip/vehicle.hpp"

namespace windtrip {

// Loop rates in Hz. Every rate must divide the simulation rate so all streams
// stay phase-aligned to t = 0.
struct RateSchedule {
    int simulation_hz = 1000;
    int imu_hz = 500;       // gyro / onboard estimation rate
    int position_hz = 200;  // localization rate
    int command_hz = 50;    // control + disturbance record rate

    double sim_dt() const { return 1.0 / simulation_hz; }
    double imu_dt() const { return 1.0 / imu_hz; }
    double position_dt() const { return 1.0 / position_hz; }
    double command_dt() const { return 1.0 / command_hz; }

    int imu_divisor() const { return simulation_hz / imu_hz; }
    int position_divisor() const { return simulation_hz / position_hz; }
    int command_divisor() const { return simulation_hz / command_hz; }

    void validate() const {
        if (simulation_hz <= 0 || imu_hz <= 0 || position_hz <= 0 || command_hz <= 0) {
            throw std::invalid_argument("RateSchedule: rates must be positive");
        }
        if (simulation_hz % imu_hz != 0 || simulation_hz % position_hz != 0 ||
            simulation_hz % command_hz != 0) {
            throw std::invalid_argument("RateSchedule: all rates must divide the simulation rate");
        }
        if (command_hz > imu_hz || command_hz > position_hz) {
            throw std::invalid_argument("RateSchedule: record/command rate must be the slowest");
        }
    }
};

struct NoiseParams {
    double accel_sigma = 0.05;     // m/s² per axis
    double gyro_sigma = 0.002;     // rad/s per axis
    Vec3 accel_bias{};             // m/s²
    Vec3 gyro_bias{};              // rad/s
    double position_sigma = 0.001; // m per axis (motion-capture analog)
    double velocity_sigma = 0.0;   // m/s per axis (reference-grade mocap velocity)

    static NoiseParams noiseless() {
        NoiseParams n;
        n.accel_sigma = 0.0;
        n.gyro_sigma = 0.0;
        n.position_sigma = 0.0;
        n.velocity_sigma = 0.0;
        return n;
    }
};

struct ImuSample {
    Vec3 specific_force{};   // m/s², body frame
    Vec3 angular_rate{};     // rad/s, body frame
    double t = 0.0;
};

/**
 * IMU model: the accelerometer reads specific force R^-1 (a - g) in the body
 * frame, the rate gyro reads body angular velocity, both plus bias and white
 * noise. With zero noise parameters the sample is exact. Noise draws are
 * consumed every call regardless of sigma, so enabling or disabling one
 * sensor's noise never shifts another stream.
 */
class ImuSampler {
public:
    ImuSampler(const NoiseParams& noise, std::uint64_t seed) : noise_(noise), rng_(seed) {}

    ImuSample sample(const VehicleState& state, const Vec3& world_accel,
                     const VehicleParams& params, double t) {
        const Vec3 na{rng_.next(), rng_.next(), rng_.next()};
        const Vec3 ng{rng_.next(), rng_.next(), rng_.next()};
        ImuSample s;
        s.t = t;
        s.specific_force = state.attitude.inverse().rotate(world_accel - params.gravity_vec()) +
                           noise_.accel_bias + noise_.accel_sigma * na;
        s.angular_rate = state.angular_velocity + noise_.gyro_bias + noise_.gyro_sigma * ng;
        return s;
    }

private:
    NoiseParams noise_;
    GaussianStream rng_;
};

struct PoseSample {
    Vec3 position{};
    Vec3 velocity{};
    double t = 0.0;
};

class PoseSampler {
public:
    PoseSampler(const NoiseParams& noise, std::uint64_t seed) : noise_(noise), rng_(seed) {}

    PoseSample sample(const VehicleState& state, double t) {
        const Vec3 np{rng_.next(), rng_.next(), rng_.next()};
        const Vec3 nv{rng_.next(), rng_.next(), rng_.next()};
        PoseSample s;
        s.t = t;
        s.position = state.position + noise_.position_sigma * np;
        s.velocity = state.velocity + noise_.velocity_sigma * nv;
        return s;
    }

private:
    NoiseParams noise_;
    GaussianStream rng_;
};

// Keep every (rate_from/rate_to)-th element, phase-aligned to the first.
template <typename T>
std::vector<T> downsample(const std::vector<T>& stream, int rate_from, int rate_to) {
    if (rate_from <= 0 || rate_to <= 0 || rate_from % rate_to != 0) {
        throw std::invalid_argument("downsample: target rate must divide source rate");
    }
    const std::size_t step = static_cast<std::size_t>(rate_from / rate_to);
    std::vector<T> out;
    out.reserve(stream.size() / step + 1);
    for (std::size_t i = 0; i < stream.size(); i += step) {
        out.push_back(stream[i]);
    }
    return out;
}

}  // namespace windtrip
