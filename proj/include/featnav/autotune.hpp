#pragma once

// Lambda scheduling from the tracked-feature count and first-order low-pass
// smoothing of the feature-velocity command.

#include <stdexcept>

#include "featnav/vec2.hpp"

namespace featnav {

// Piecewise-linear schedule: lambda_min below t_min, lambda_max above t_max,
// linear in between with coefficients chosen for continuity at both knots.
struct LambdaSchedule {
    double lambda_min = 0.1;
    double lambda_max = 0.9;
    double t_min = 25.0;
    double t_max = 90.0;
    double alpha = (0.9 - 0.1) / (90.0 - 25.0);
    double beta = 0.1 - (0.9 - 0.1) / (90.0 - 25.0) * 25.0;

    static LambdaSchedule make(double lambda_min, double lambda_max, double t_min, double t_max) {
        if (!(lambda_min >= 0.0 && lambda_max <= 1.0 && lambda_min <= lambda_max))
            throw std::invalid_argument("LambdaSchedule: need 0 <= lambda_min <= lambda_max <= 1");
        if (!(t_min > 0.0 && t_min < t_max))
            throw std::invalid_argument("LambdaSchedule: need 0 < t_min < t_max");
        LambdaSchedule s;
        s.lambda_min = lambda_min;
        s.lambda_max = lambda_max;
        s.t_min = t_min;
        s.t_max = t_max;
        s.alpha = (lambda_max - lambda_min) / (t_max - t_min);
        s.beta = lambda_min - s.alpha * t_min;
        return s;
    }
};

inline LambdaSchedule default_lambda_schedule() { return LambdaSchedule::make(0.1, 0.9, 25.0, 90.0); }

inline double lambda_of(const LambdaSchedule& s, double n_f) {
    if (!(n_f >= 0.0)) throw std::invalid_argument("lambda_of: feature count must be >= 0");
    if (n_f < s.t_min) return s.lambda_min;
    if (n_f > s.t_max) return s.lambda_max;
    const double v = s.alpha * n_f + s.beta;
    return std::min(std::max(v, s.lambda_min), s.lambda_max);
}

// One-pole low-pass on a 2-vector. The first sample passes through unchanged.
struct LowPassFilter {
    PixelVec last;
    bool initialized = false;

    void reset() { initialized = false; last = {}; }
};

inline PixelVec filter_step(LowPassFilter& state, PixelVec sample, double dt, double cutoff_hz) {
    if (!(dt > 0.0)) throw std::invalid_argument("filter_step: dt must be > 0");
    if (!(cutoff_hz > 0.0)) throw std::invalid_argument("filter_step: cutoff_hz must be > 0");
    if (!state.initialized) {
        state.last = sample;
        state.initialized = true;
        return sample;
    }
    const double rc = 1.0 / (2.0 * kPi * cutoff_hz);
    const double a = dt / (dt + rc);
    state.last = state.last + a * (sample - state.last);
    return state.last;
}

}  // namespace featnav
