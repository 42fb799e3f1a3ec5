#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "windtrip/rng.hpp"
#include "windtrip/vec3.hpp"

namespace windtrip {

// Maps (position, time) to air velocity in the world frame. Implementations
// are immutable after construction; concurrent evaluation is safe.
class WindField {
public:
    virtual ~WindField() = default;
    virtual Vec3 air_velocity(const Vec3& position, double t) const = 0;
};

class UniformFlow final : public WindField {
public:
    explicit UniformFlow(const Vec3& velocity) : velocity_(velocity) {}

    Vec3 air_velocity(const Vec3&, double) const override { return velocity_; }

private:
    Vec3 velocity_;
};

struct SectorMask {
    bool enabled = false;
    // Azimuth around the jet axis, measured from the projection of
    // `reference` onto the nozzle plane, positive toward axis x reference.
    double start_rad = 0.0;
    double width_rad = 0.0;
    Vec3 reference{0.0, 0.0, 1.0};
};

struct BoundaryTurbulence {
    bool enabled = false;
    double intensity = 0.02;  // meters; noise sigma = intensity * |d speed / d radius|
    std::uint64_t seed = 0;
};

struct JetParams {
    Vec3 nozzle_center{0.0, 0.0, 0.0};
    Vec3 axis{0.0, 1.0, 0.0};
    double ref_speed = 6.0;     // m/s on the centerline at ref_distance
    double ref_distance = 0.3;  // m from the nozzle exit
    double core_radius = 0.10;  // m, flat-profile core
    double half_width = 0.05;   // m beyond the core where speed halves
    SectorMask mask{};
    BoundaryTurbulence turbulence{};
};

/**
 * Round jet issuing from a nozzle.
 *
 * Radial profile: flat core of radius core_radius, then a Gaussian skirt that
 * reaches half the local centerline speed half_width beyond the core edge.
 * Axial decay: constant up to ref_distance, then ref_distance/axial_distance.
 * An optional angular sector mask zeroes the flow (obstacle shadow), and
 * optional boundary turbulence adds position-hashed zero-mean noise scaled by
 * the local radial speed gradient.
 */
class JetFlow final : public WindField {
public:
    explicit JetFlow(const JetParams& p) : p_(p), axis_(p.axis.normalized()) {
        if (p.ref_speed < 0.0 || p.ref_distance <= 0.0 || p.core_radius < 0.0 ||
            p.half_width <= 0.0) {
            throw std::invalid_argument("JetFlow: invalid geometry parameters");
        }
        if (p.mask.enabled) {
            const Vec3 ref_rej = p.mask.reference - p.mask.reference.dot(axis_) * axis_;
            if (ref_rej.norm() < 1e-9) {
                throw std::invalid_argument("JetFlow: mask reference parallel to axis");
            }
            mask_u_ = ref_rej.normalized();
            mask_v_ = axis_.cross(mask_u_);
        }
    }

    Vec3 air_velocity(const Vec3& position, double t) const override {
        const Vec3 rel = position - p_.nozzle_center;
        const double axial = rel.dot(axis_);
        if (axial < 0.0) {
            return Vec3::zero();
        }
        const Vec3 radial_vec = rel - axial * axis_;
        const double radius = radial_vec.norm();

        if (p_.mask.enabled && in_blocked_sector(radial_vec)) {
            return Vec3::zero();
        }

        double speed = centerline_speed(axial) * radial_gain(radius);
        Vec3 v = speed * axis_;

        if (p_.turbulence.enabled) {
            v += turbulence_sample(position, t, axial, radius);
        }
        return v;
    }

    double centerline_speed(double axial_distance) const {
        if (axial_distance < 0.0) {
            return 0.0;
        }
        return p_.ref_speed * (p_.ref_distance / std::max(axial_distance, p_.ref_distance));
    }

    double radial_gain(double radius) const {
        if (radius <= p_.core_radius) {
            return 1.0;
        }
        const double s = (radius - p_.core_radius) / p_.half_width;
        return std::exp(-kLn2 * s * s);
    }

private:
    static constexpr double kLn2 = 0.6931471805599453;

    bool in_blocked_sector(const Vec3& radial_vec) const {
        if (radial_vec.norm() < 1e-12) {
            return false;
        }
        double theta = std::atan2(radial_vec.dot(mask_v_), radial_vec.dot(mask_u_));
        double off = theta - p_.mask.start_rad;
        const double two_pi = 2.0 * M_PI;
        off -= two_pi * std::floor(off / two_pi);
        return off < p_.mask.width_rad;
    }

    Vec3 turbulence_sample(const Vec3& position, double t, double axial, double radius) const {
        // Central difference of the radial profile, 1 cm step.
        const double d = 0.01;
        const double u = centerline_speed(axial);
        const double grad = u * (radial_gain(radius + d) - radial_gain(std::max(0.0, radius - d))) /
                            (2.0 * d);
        const double sigma = p_.turbulence.intensity * std::abs(grad);
        if (sigma == 0.0) {
            return Vec3::zero();
        }
        // Position/time-hashed draws keep the field a pure function.
        const auto q = [](double v) { return static_cast<std::uint64_t>(std::llround(v * 1000.0)); };
        std::uint64_t h = p_.turbulence.seed;
        h = splitmix64(h ^ q(position.x));
        h = splitmix64(h ^ q(position.y));
        h = splitmix64(h ^ q(position.z));
        h = splitmix64(h ^ q(t));
        const auto uniform = [&h]() {
            h = splitmix64(h);
            return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
        };
        const double u1 = uniform(), u2 = uniform(), u3 = uniform(), u4 = uniform();
        const double r1 = std::sqrt(-2.0 * std::log(u1));
        const double r2 = std::sqrt(-2.0 * std::log(u3));
        return sigma * Vec3{r1 * std::cos(2.0 * M_PI * u2), r1 * std::sin(2.0 * M_PI * u2),
                            r2 * std::cos(2.0 * M_PI * u4)};
    }

    JetParams p_;
    Vec3 axis_;
    Vec3 mask_u_{};
    Vec3 mask_v_{};
};

// Vector sum of component fields.
class CompositeFlow final : public WindField {
public:
    explicit CompositeFlow(std::vector<std::shared_ptr<const WindField>> components)
        : components_(std::move(components)) {}

    Vec3 air_velocity(const Vec3& position, double t) const override {
        Vec3 v = Vec3::zero();
        for (const auto& c : components_) {
            v += c->air_velocity(position, t);
        }
        return v;
    }

    std::size_t component_count() const { return components_.size(); }
    const WindField& component(std::size_t i) const { return *components_.at(i); }

private:
    std::vector<std::shared_ptr<const WindField>> components_;
};

struct TemporalGain {
    enum class Kind { Constant, Sine, Steps };
    Kind kind = Kind::Constant;
    double constant = 1.0;
    // Sine: gain = mean + amplitude * sin(2*pi*frequency*t + phase)
    double mean = 1.0;
    double amplitude = 0.0;
    double frequency_hz = 0.0;
    double phase = 0.0;
    // Steps: gain = values[i] for t >= times[i], last one holds.
    std::vector<double> times;
    std::vector<double> values;

    double eval(double t) const {
        switch (kind) {
            case Kind::Constant:
                return constant;
            case Kind::Sine:
                return mean + amplitude * std::sin(2.0 * M_PI * frequency_hz * t + phase);
            case Kind::Steps: {
                double g = values.empty() ? 1.0 : values.front();
                for (std::size_t i = 0; i < times.size() && i < values.size(); ++i) {
                    if (t >= times[i]) {
                        g = values[i];
                    }
                }
                return g;
            }
        }
        return 1.0;
    }
};

// Base field scaled by a temporal gain; gain == 1 reproduces the base field
// exactly (the multiplication is skipped).
class TimeVaryingFlow final : public WindField {
public:
    TimeVaryingFlow(std::shared_ptr<const WindField> base, TemporalGain gain)
        : base_(std::move(base)), gain_(std::move(gain)) {
        if (!base_) {
            throw std::invalid_argument("TimeVaryingFlow: null base field");
        }
    }

    Vec3 air_velocity(const Vec3& position, double t) const override {
        const Vec3 v = base_->air_velocity(position, t);
        const double g = gain_.eval(t);
        if (g == 1.0) {
            return v;
        }
        return g * v;
    }

private:
    std::shared_ptr<const WindField> base_;
    TemporalGain gain_;
};

}  // namespace windtrip
