#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <string_view>
#include <vector>

#include "pi2aan/error.hpp"
#include "pi2aan/phase_kernel.hpp"

namespace pi2aan {

enum class StrideKind { Explore, Eval, Transparent };

inline std::string_view to_string(StrideKind kind) {
    switch (kind) {
        case StrideKind::Explore: return "explore";
        case StrideKind::Eval: return "eval";
        case StrideKind::Transparent: return "transparent";
    }
    return "?";
}

/// The impedance a plant sees during one stride.
///
/// Exploration strides perturb the policy segment-wise: inside cost segment j
/// the landscape is evaluated with w + eps(j). Transparent strides have no
/// landscape at all and report g = 0.
class ImpedanceSchedule {
public:
    static ImpedanceSchedule transparent() { return ImpedanceSchedule(); }

    ImpedanceSchedule(const BasisSet& basis, Eigen::VectorXd w, double g_max, StrideKind kind,
                      Eigen::MatrixXd noise = {})
        : basis_(&basis), w_(std::move(w)), g_max_(g_max), kind_(kind), noise_(std::move(noise)) {
        if (noise_.size() != 0 && (noise_.rows() != w_.size() || noise_.cols() != basis.grid().instants)) {
            throw ShapeError("schedule noise must be P x N");
        }
    }

    StrideKind kind() const { return kind_; }
    bool assists() const { return basis_ != nullptr; }
    int instants() const { return basis_ ? basis_->grid().instants : 0; }

    Eigen::VectorXd weights_at(double phase) const {
        if (noise_.size() == 0) return w_;
        return w_ + noise_.col(segment_of(phase, instants()) - 1);
    }

    LandscapeValue eval(double phase) const {
        if (!basis_) return {};
        return landscape_eval(weights_at(phase), g_max_, phase, *basis_);
    }

    double g(double phase) const { return eval(phase).clamped; }

private:
    ImpedanceSchedule() = default;

    const BasisSet* basis_ = nullptr;
    Eigen::VectorXd w_;
    double g_max_ = 0.0;
    StrideKind kind_ = StrideKind::Transparent;
    Eigen::MatrixXd noise_;
};

/// One simulated stride, sampled on a uniform phase grid.
struct StrideOutcome {
    std::vector<double> phase;      // rad
    std::vector<double> theta_m;    // deg
    std::vector<double> torque;     // N*m
    std::vector<double> g;          // deg^-2, as actuated
    std::vector<double> raw_error;  // desired - measured, deg
    std::vector<double> seg_rms;    // RMS of raw_error per cost segment, deg
};

/// RMS of `error` over the samples falling in each of N phase segments.
/// Segments without samples report 0.
inline std::vector<double> segment_rms(const std::vector<double>& phase, const std::vector<double>& error, int N) {
    if (phase.size() != error.size()) throw ShapeError("phase and error sample counts differ");
    std::vector<double> sum(static_cast<std::size_t>(N), 0.0);
    std::vector<int> count(static_cast<std::size_t>(N), 0);
    for (std::size_t q = 0; q < phase.size(); ++q) {
        const auto n = static_cast<std::size_t>(segment_of(phase[q], N) - 1);
        sum[n] += error[q] * error[q];
        ++count[n];
    }
    for (std::size_t n = 0; n < sum.size(); ++n) sum[n] = count[n] ? std::sqrt(sum[n] / count[n]) : 0.0;
    return sum;
}

/// RMS over the samples whose segment index (1-based, out of N) is in `mask`.
/// An empty mask means all samples.
inline double masked_rms(const std::vector<double>& phase, const std::vector<double>& error,
                         const std::vector<int>& mask, int N) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t q = 0; q < phase.size(); ++q) {
        const int n = segment_of(phase[q], N);
        bool in = mask.empty();
        for (int m : mask) in = in || m == n;
        if (!in) continue;
        sum += error[q] * error[q];
        ++count;
    }
    return count ? std::sqrt(sum / static_cast<double>(count)) : 0.0;
}

template <class P>
concept StridePlant = requires(P& plant, const ImpedanceSchedule& schedule) {
    { plant.run_stride(schedule) } -> std::convertible_to<StrideOutcome>;
};

}  // namespace pi2aan
