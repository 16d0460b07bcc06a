/**
 * @file subject_model.hpp
 * @brief Simulated wearer: baseline ankle gait, target task and stride-to-stride adaptation.
 *
 * Within a stride the wearer commands baseline + a(phi) + motor noise; the
 * assistive torque, computed from the commanded error, shifts the measured
 * angle through a quasi-static compliance. Between strides the learned
 * adjustment a(phi) follows an iterative-learning rule with forgetting,
 * driven by the error the wearer actually experienced. Assistance that hides
 * error therefore starves learning, and forgetting lets a(phi) decay.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pi2aan/error.hpp"
#include "pi2aan/force_field.hpp"
#include "pi2aan/phase_kernel.hpp"
#include "pi2aan/stride.hpp"

namespace pi2aan {

/// Uniform sample phases (q + 0.5) * 2*pi / Q.
inline std::vector<double> sample_phases(int Q) {
    if (Q < 1) throw ConfigError("sample count must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(Q));
    for (int q = 0; q < Q; ++q) out[static_cast<std::size_t>(q)] = (q + 0.5) * kTwoPi / Q;
    return out;
}

namespace detail {

// Sum of wrapped Gaussians in phase fraction x; exactly periodic with period 1.
inline double wrapped_bump(double x, double amplitude, double center, double width) {
    double v = 0.0;
    for (int shift = -2; shift <= 2; ++shift) {
        const double d = x - center + shift;
        v += amplitude * std::exp(-0.5 * d * d / (width * width));
    }
    return v;
}

}  // namespace detail

/// Synthetic able-bodied ankle angle (deg, dorsiflexion positive) at phase
/// fraction x: loading-response plantarflexion, stance dorsiflexion, push-off
/// and a swing dorsiflexion peak near 77 % of the cycle.
inline double default_ankle_angle(double x) {
    x -= std::floor(x);
    return detail::wrapped_bump(x, -5.0, 0.07, 0.04) + detail::wrapped_bump(x, 8.0, 0.40, 0.08) +
           detail::wrapped_bump(x, -15.0, 0.62, 0.045) + detail::wrapped_bump(x, 8.0, 0.77, 0.06);
}

struct BaselineGait {
    std::vector<double> phase;  // rad, Q uniform midpoints
    std::vector<double> angle;  // deg

    int samples() const { return static_cast<int>(phase.size()); }

    static BaselineGait preset(const std::string& name, int Q) {
        if (name != "default") throw ConfigError("unknown baseline preset '" + name + "'");
        BaselineGait gait;
        gait.phase = sample_phases(Q);
        gait.angle.reserve(gait.phase.size());
        for (double phi : gait.phase) gait.angle.push_back(default_ankle_angle(phi / kTwoPi));
        return gait;
    }

    /// Reads "phase_fraction angle_deg" pairs (whitespace or comma separated,
    /// '#' comments) and resamples them onto Q points by periodic linear
    /// interpolation.
    static BaselineGait from_stream(std::istream& in, int Q) {
        std::vector<double> xs;
        std::vector<double> ys;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream fields(line);
            double x = 0.0;
            double y = 0.0;
            if (!(fields >> x)) continue;
            std::string rest;
            if (!(fields >> y) || (fields >> rest)) {
                throw FormatError("baseline line " + std::to_string(lineno) + ": expected 'phase angle'");
            }
            if (!(x >= 0.0 && x < 1.0)) throw FormatError("baseline line " + std::to_string(lineno) + ": phase outside [0, 1)");
            if (!xs.empty() && !(x > xs.back())) {
                throw FormatError("baseline line " + std::to_string(lineno) + ": phase not strictly increasing");
            }
            xs.push_back(x);
            ys.push_back(y);
        }
        if (xs.size() < 4) throw FormatError("baseline file needs at least 4 samples");

        // Periodicity: the step across the stride boundary must look like an
        // interior step.
        double max_step = 0.0;
        for (std::size_t i = 1; i < ys.size(); ++i) max_step = std::max(max_step, std::abs(ys[i] - ys[i - 1]));
        const double wrap_step = std::abs(ys.front() - ys.back());
        if (wrap_step > 3.0 * max_step + 1e-9) {
            throw FormatError("baseline samples are not periodic: wrap-around step " + std::to_string(wrap_step) +
                              " deg exceeds 3x the largest interior step");
        }

        BaselineGait gait;
        gait.phase = sample_phases(Q);
        gait.angle.reserve(gait.phase.size());
        const std::size_t n = xs.size();
        for (double phi : gait.phase) {
            const double x = phi / kTwoPi;
            const auto hi = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
            const std::size_t i1 = hi % n;
            const std::size_t i0 = (hi + n - 1) % n;
            double x0 = xs[i0];
            double x1 = xs[i1];
            if (hi == 0) x0 -= 1.0;
            if (hi == n) x1 += 1.0;
            const double t = (x - x0) / (x1 - x0);
            gait.angle.push_back(ys[i0] + t * (ys[i1] - ys[i0]));
        }
        return gait;
    }

    static BaselineGait from_file(const std::string& path, int Q) {
        std::ifstream in(path);
        if (!in) throw FormatError("cannot open baseline file '" + path + "'");
        return from_stream(in, Q);
    }
};

/// Phase (rad) of the largest angle in the swing half [pi, 2*pi).
inline double swing_peak_phase(const BaselineGait& gait) {
    double best_phase = -1.0;
    double best = -1e300;
    for (std::size_t q = 0; q < gait.phase.size(); ++q) {
        if (gait.phase[q] < std::numbers::pi) continue;
        if (gait.angle[q] > best) {
            best = gait.angle[q];
            best_phase = gait.phase[q];
        }
    }
    if (best_phase < 0.0) throw ShapeError("baseline has no samples in the swing half");
    return best_phase;
}

struct TargetTask {
    double amplitude = 5.0;               // deg
    std::optional<double> center;         // rad; defaults to the baseline swing peak
    double width = 0.07 * kTwoPi;         // rad, Gaussian standard deviation
};

/// Baseline plus a Gaussian bump; returns the target on the baseline's sample grid.
inline std::vector<double> make_target(const BaselineGait& baseline, const TargetTask& task) {
    const double center = task.center.value_or(swing_peak_phase(baseline));
    if (center < std::numbers::pi || center >= kTwoPi) throw DomainError("bump center must lie in the swing half");
    if (!(task.width > 0.0)) throw ConfigError("bump width must be > 0");
    std::vector<double> target(baseline.angle);
    for (std::size_t q = 0; q < target.size(); ++q) {
        const double d = baseline.phase[q] - center;
        target[q] += task.amplitude * std::exp(-0.5 * d * d / (task.width * task.width));
    }
    return target;
}

struct SubjectParams {
    double learning_gain = 0.1;      // l_h
    double forgetting = 0.99;        // f_h
    double torque_compliance = 0.4;  // c_tau, deg per N*m
    double motor_noise = 0.3;        // sigma_m, deg

    void validate() const {
        if (!(learning_gain >= 0.0)) throw ConfigError("learning gain must be >= 0");
        if (!(forgetting > 0.0 && forgetting <= 1.0)) throw ConfigError("forgetting factor must lie in (0, 1]");
        if (!(torque_compliance >= 0.0)) throw ConfigError("torque compliance must be >= 0");
        if (!(motor_noise >= 0.0)) throw ConfigError("motor noise must be >= 0");
    }
};

struct SubjectState {
    std::vector<double> adjustment;  // a(phi_q), deg

    static SubjectState zero(int Q) { return {std::vector<double>(static_cast<std::size_t>(Q), 0.0)}; }
};

enum class AssistMode { Aan, Transparent };

/// Simulates one stride. `g_at(phase)` returns the actuated impedance.
template <class ImpedanceFn, class URBG>
StrideOutcome simulate_stride(const std::vector<double>& target, const BaselineGait& baseline,
                              ImpedanceFn&& g_at, const SubjectParams& params, const SubjectState& state,
                              AssistMode mode, const ForceFieldConfig& field, int N, URBG& rng) {
    const auto Q = baseline.phase.size();
    if (target.size() != Q || state.adjustment.size() != Q) throw ShapeError("stride grids differ in sample count");

    StrideOutcome out;
    out.phase = baseline.phase;
    out.theta_m.resize(Q);
    out.torque.resize(Q);
    out.g.resize(Q);
    out.raw_error.resize(Q);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t q = 0; q < Q; ++q) {
        double command = baseline.angle[q] + state.adjustment[q];
        if (params.motor_noise > 0.0) command += params.motor_noise * noise(rng);
        double g = 0.0;
        double tau = 0.0;
        if (mode == AssistMode::Aan) {
            g = g_at(baseline.phase[q]);
            tau = assist_torque(deadband_error(target[q], command, field.deadband), g, field);
        }
        out.g[q] = g;
        out.torque[q] = tau;
        out.theta_m[q] = command + params.torque_compliance * tau;
        out.raw_error[q] = target[q] - out.theta_m[q];
    }
    out.seg_rms = segment_rms(out.phase, out.raw_error, N);
    return out;
}

/// a <- f_h * a + l_h * error, pointwise.
inline SubjectState subject_update(const SubjectState& state, const std::vector<double>& raw_error,
                                   const SubjectParams& params) {
    if (raw_error.size() != state.adjustment.size()) throw ShapeError("error samples do not match the subject grid");
    SubjectState next = state;
    for (std::size_t q = 0; q < raw_error.size(); ++q) {
        next.adjustment[q] = params.forgetting * state.adjustment[q] + params.learning_gain * raw_error[q];
    }
    return next;
}

/// Stateful wearer: runs strides against a schedule and adapts after each one.
class SubjectPlant {
public:
    SubjectPlant(BaselineGait baseline, std::vector<double> target, SubjectParams params, ForceFieldConfig field,
                 int N, std::uint64_t seed)
        : baseline_(std::move(baseline)),
          target_(std::move(target)),
          params_(params),
          field_(field),
          N_(N),
          state_(SubjectState::zero(baseline_.samples())),
          rng_(seed) {
        params_.validate();
        field_.validate();
        if (static_cast<int>(target_.size()) != baseline_.samples()) throw ShapeError("target and baseline grids differ");
    }

    StrideOutcome run_stride(const ImpedanceSchedule& schedule) {
        const AssistMode mode = schedule.assists() ? AssistMode::Aan : AssistMode::Transparent;
        StrideOutcome out = simulate_stride(
            target_, baseline_, [&](double phase) { return schedule.g(phase); }, params_, state_, mode, field_, N_,
            rng_);
        if (learning_) state_ = subject_update(state_, out.raw_error, params_);
        return out;
    }

    StrideOutcome run_transparent() { return run_stride(ImpedanceSchedule::transparent()); }

    void set_target(std::vector<double> target) {
        if (target.size() != target_.size()) throw ShapeError("target grid differs");
        target_ = std::move(target);
    }
    void set_learning(bool enabled) { learning_ = enabled; }

    const std::vector<double>& target() const { return target_; }
    const BaselineGait& baseline() const { return baseline_; }
    const SubjectState& state() const { return state_; }
    SubjectState& state() { return state_; }
    const SubjectParams& params() const { return params_; }

private:
    BaselineGait baseline_;
    std::vector<double> target_;
    SubjectParams params_;
    ForceFieldConfig field_;
    int N_;
    SubjectState state_;
    std::mt19937_64 rng_;
    bool learning_ = true;
};

}  // namespace pi2aan
