#pragma once

#include <stdexcept>

#include "windtrip/vec3.hpp"

namespace windtrip {

/**
 * First-order discrete low-pass filter on Vec3 signals.
 *
 *   y[k] = y[k-1] + dt/(tau+dt) * (u[k] - y[k-1])
 *
 * A time constant of zero makes the filter an exact pass-through. DC gain is
 * one for any tau, and the output never leaves the hull of the inputs seen
 * so far (plus the initial state).
 */
class LowPassFilter {
public:
    LowPassFilter(double time_constant, double sample_period)
        : tau_(time_constant), dt_(sample_period) {
        if (!(sample_period > 0.0)) {
            throw std::invalid_argument("LowPassFilter: sample period must be > 0");
        }
        if (time_constant < 0.0) {
            throw std::invalid_argument("LowPassFilter: time constant must be >= 0");
        }
        alpha_ = (tau_ == 0.0) ? 1.0 : dt_ / (tau_ + dt_);
    }

    Vec3 step(const Vec3& input) {
        if (!input.finite()) {
            throw std::invalid_argument("LowPassFilter: non-finite input");
        }
        if (tau_ == 0.0) {
            state_ = input;
        } else {
            state_ += alpha_ * (input - state_);
        }
        return state_;
    }

    void reset(const Vec3& state = Vec3::zero()) { state_ = state; }

    const Vec3& output() const { return state_; }
    double time_constant() const { return tau_; }
    double sample_period() const { return dt_; }
    // Per-step blend weight dt/(tau+dt).
    double alpha() const { return alpha_; }

private:
    double tau_;
    double dt_;
    double alpha_;
    Vec3 state_{};
};

/**
 * Backward-difference differentiator with a low-pass filter on the output.
 * The first call has no history and returns zero; primed() reports whether
 * the output is real or warm-up.
 */
class FilteredDifferentiator {
public:
    FilteredDifferentiator(double filter_time_constant, double sample_period)
        : dt_(sample_period), lpf_(filter_time_constant, sample_period) {
        if (!(sample_period > 0.0)) {
            throw std::invalid_argument("FilteredDifferentiator: sample period must be > 0");
        }
    }

    Vec3 step(const Vec3& input) {
        if (!input.finite()) {
            throw std::invalid_argument("FilteredDifferentiator: non-finite input");
        }
        if (!primed_) {
            prev_ = input;
            primed_ = true;
            return Vec3::zero();
        }
        const Vec3 raw = (input - prev_) / dt_;
        prev_ = input;
        return lpf_.step(raw);
    }

    bool primed() const { return primed_; }

    void reset() {
        primed_ = false;
        prev_ = Vec3::zero();
        lpf_.reset();
    }

    double sample_period() const { return dt_; }
    double filter_time_constant() const { return lpf_.time_constant(); }

private:
    double dt_;
    LowPassFilter lpf_;
    Vec3 prev_{};
    bool primed_ = false;
};

}  // namespace windtrip
