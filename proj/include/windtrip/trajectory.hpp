#pragma once

#include <cmath>
#include <stdexcept>

#include "windtrip/control.hpp"
#include "windtrip/vec3.hpp"

namespace windtrip {

/**
 * Reference trajectory for one mission phase: either a hold at a fixed point
 * or a straight line flown with a trapezoidal (or triangular, when the
 * segment is too short to reach cruise) speed profile. Sampling beyond the
 * profile duration holds the end point, which gives the settle portion of a
 * leg for free.
 */
class Trajectory {
public:
    // Default: zero-duration hold at the origin.
    Trajectory() : is_hold_(true) {}

    static Trajectory hold(const Vec3& point, double duration) {
        if (!(duration >= 0.0)) {
            throw std::invalid_argument("Trajectory::hold: negative duration");
        }
        Trajectory t;
        t.start_ = point;
        t.end_ = point;
        t.duration_ = duration;
        t.is_hold_ = true;
        return t;
    }

    static Trajectory line(const Vec3& from, const Vec3& to, double speed, double accel) {
        if (!(speed > 0.0) || !(accel > 0.0)) {
            throw std::invalid_argument("Trajectory::line: speed and acceleration must be > 0");
        }
        const double length = (to - from).norm();
        if (length < 1e-9) {
            throw std::invalid_argument("Trajectory::line: degenerate segment (from == to)");
        }
        Trajectory t;
        t.is_hold_ = false;
        t.start_ = from;
        t.end_ = to;
        t.dir_ = (to - from) / length;
        t.length_ = length;
        t.accel_ = accel;
        const double ramp_dist = speed * speed / accel;  // both ramps together
        if (ramp_dist >= length) {
            // Triangular profile: never reaches the requested cruise speed.
            t.cruise_speed_ = std::sqrt(accel * length);
            t.ramp_time_ = t.cruise_speed_ / accel;
            t.cruise_time_ = 0.0;
        } else {
            t.cruise_speed_ = speed;
            t.ramp_time_ = speed / accel;
            t.cruise_time_ = (length - ramp_dist) / speed;
        }
        t.duration_ = 2.0 * t.ramp_time_ + t.cruise_time_;
        return t;
    }

    Setpoint sample(double t) const {
        Setpoint sp;
        if (is_hold_ || t >= duration_) {
            sp.position = end_;
            return sp;
        }
        if (t <= 0.0) {
            sp.position = start_;
            return sp;
        }
        double s, v, a;
        if (t < ramp_time_) {
            a = accel_;
            v = accel_ * t;
            s = 0.5 * accel_ * t * t;
        } else if (t < ramp_time_ + cruise_time_) {
            a = 0.0;
            v = cruise_speed_;
            s = 0.5 * cruise_speed_ * ramp_time_ + cruise_speed_ * (t - ramp_time_);
        } else {
            const double td = duration_ - t;  // time to go
            a = -accel_;
            v = accel_ * td;
            s = length_ - 0.5 * accel_ * td * td;
        }
        sp.position = start_ + s * dir_;
        sp.velocity = v * dir_;
        sp.acceleration = a * dir_;
        return sp;
    }

    double duration() const { return duration_; }
    double cruise_time() const { return cruise_time_; }
    double ramp_time() const { return ramp_time_; }
    double cruise_speed() const { return cruise_speed_; }
    const Vec3& start_point() const { return start_; }
    const Vec3& end_point() const { return end_; }
    bool is_hold() const { return is_hold_; }

private:
    Vec3 start_{};
    Vec3 end_{};
    Vec3 dir_{};
    double length_ = 0.0;
    double accel_ = 0.0;
    double cruise_speed_ = 0.0;
    double ramp_time_ = 0.0;
    double cruise_time_ = 0.0;
    double duration_ = 0.0;
    bool is_hold_ = false;
};

}  // namespace windtrip
