#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "windtrip/vec3.hpp"

namespace windtrip {

/**
 * Rigid-body attitude as a unit quaternion (body -> world).
 *
 * The quaternion is normalized on every construction path, so instances are
 * always unit-norm. Inputs that deviate from unit norm by more than 1e-9 are
 * counted in a diagnostic (see renormalization_count) to surface integration
 * or data-handling bugs without aborting a run.
 */
class Rotation {
public:
    Rotation() = default;

    static Rotation identity() { return {}; }

    static Rotation from_quaternion(double w, double x, double y, double z) {
        const double n2 = w * w + x * x + y * y + z * z;
        if (!std::isfinite(n2) || n2 < 1e-24) {
            throw std::invalid_argument("Rotation: degenerate quaternion");
        }
        const double n = std::sqrt(n2);
        if (std::abs(n - 1.0) > 1e-9) {
            renorm_count_.fetch_add(1, std::memory_order_relaxed);
        }
        Rotation r;
        r.w_ = w / n;
        r.x_ = x / n;
        r.y_ = y / n;
        r.z_ = z / n;
        return r;
    }

    static Rotation from_axis_angle(const Vec3& axis, double angle) {
        const Vec3 a = axis.normalized();
        const double h = 0.5 * angle;
        const double s = std::sin(h);
        Rotation r;
        r.w_ = std::cos(h);
        r.x_ = a.x * s;
        r.y_ = a.y * s;
        r.z_ = a.z * s;
        return r;
    }

    static Rotation from_yaw(double yaw) { return from_axis_angle(Vec3::unit_z(), yaw); }

    double w() const { return w_; }
    double x() const { return x_; }
    double y() const { return y_; }
    double z() const { return z_; }

    // v' = q v q*
    Vec3 rotate(const Vec3& v) const {
        const Vec3 qv{x_, y_, z_};
        const Vec3 t = 2.0 * qv.cross(v);
        return v + w_ * t + qv.cross(t);
    }

    Rotation inverse() const {
        Rotation r;
        r.w_ = w_;
        r.x_ = -x_;
        r.y_ = -y_;
        r.z_ = -z_;
        return r;
    }

    // Composition: (a * b).rotate(v) == a.rotate(b.rotate(v))
    Rotation operator*(const Rotation& o) const {
        return from_quaternion(w_ * o.w_ - x_ * o.x_ - y_ * o.y_ - z_ * o.z_,
                               w_ * o.x_ + x_ * o.w_ + y_ * o.z_ - z_ * o.y_,
                               w_ * o.y_ - x_ * o.z_ + y_ * o.w_ + z_ * o.x_,
                               w_ * o.z_ + x_ * o.y_ - y_ * o.x_ + z_ * o.w_);
    }

    // Thrust axis expressed in the world frame.
    Vec3 body_z() const { return rotate(Vec3::unit_z()); }

    std::array<std::array<double, 3>, 3> to_matrix() const {
        const double ww = w_ * w_, xx = x_ * x_, yy = y_ * y_, zz = z_ * z_;
        const double wx = w_ * x_, wy = w_ * y_, wz = w_ * z_;
        const double xy = x_ * y_, xz = x_ * z_, yz = y_ * z_;
        return {{{ww + xx - yy - zz, 2.0 * (xy - wz), 2.0 * (xz + wy)},
                 {2.0 * (xy + wz), ww - xx + yy - zz, 2.0 * (yz - wx)},
                 {2.0 * (xz - wy), 2.0 * (yz + wx), ww - xx - yy + zz}}};
    }

    double norm() const { return std::sqrt(w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_); }

    bool finite() const {
        return std::isfinite(w_) && std::isfinite(x_) && std::isfinite(y_) && std::isfinite(z_);
    }

    static std::uint64_t renormalization_count() {
        return renorm_count_.load(std::memory_order_relaxed);
    }
    static void reset_renormalization_count() {
        renorm_count_.store(0, std::memory_order_relaxed);
    }

private:
    double w_ = 1.0;
    double x_ = 0.0;
    double y_ = 0.0;
    double z_ = 0.0;

    static inline std::atomic<std::uint64_t> renorm_count_{0};
};

}  // namespace windtrip
