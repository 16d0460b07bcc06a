/**
 * @file phase_kernel.hpp
 * @brief Gait-phase grids, Gaussian basis functions and the impedance landscape.
 *
 * Phases are in radians on [0, 2*pi). The stride is split two ways: P equal
 * segments whose midpoints carry the Gaussian kernels of the policy, and N
 * equal segments whose midpoints are the instants at which rollout costs are
 * accumulated. The two counts are independent.
 */
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "pi2aan/error.hpp"

namespace pi2aan {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Midpoints (2i-1)*pi/count of `count` equal segments of [0, 2*pi).
inline std::vector<double> kernel_centers(int count) {
    if (count < 1) {
        throw ConfigError("segment count must be >= 1, got " + std::to_string(count));
    }
    std::vector<double> centers(static_cast<std::size_t>(count));
    for (int i = 1; i <= count; ++i) {
        centers[static_cast<std::size_t>(i - 1)] = (2.0 * i - 1.0) * std::numbers::pi / count;
    }
    return centers;
}

/// 1-based index of the half-open segment [lo, hi) of width 2*pi/N containing `phase`.
inline int segment_of(double phase, int N) {
    if (N < 1) throw ConfigError("segment count must be >= 1");
    if (!(phase >= 0.0 && phase < kTwoPi)) {
        throw DomainError("phase " + std::to_string(phase) + " outside [0, 2*pi)");
    }
    const int idx = static_cast<int>(std::floor(phase / (kTwoPi / N)));
    return std::clamp(idx, 0, N - 1) + 1;
}

struct PhaseGrid {
    int kernels = 10;   // P
    int instants = 10;  // N
    std::vector<double> kernel_phases;
    std::vector<double> instant_phases;

    PhaseGrid() : PhaseGrid(10, 10) {}
    PhaseGrid(int P, int N)
        : kernels(P), instants(N), kernel_phases(kernel_centers(P)), instant_phases(kernel_centers(N)) {}

    double segment_width() const { return kTwoPi / instants; }
};

/// Gaussian kernels exp(-0.5*mu*(phi - phi_i)^2) on the kernel midpoints of a grid.
///
/// Distances are taken on the linear phase axis; kernels do not wrap around the
/// stride boundary.
class BasisSet {
public:
    BasisSet() = default;
    BasisSet(double mu, PhaseGrid grid) : mu_(mu), grid_(std::move(grid)) {
        if (!(mu_ > 0.0)) throw ConfigError("kernel width mu must be > 0");
    }

    double mu() const { return mu_; }
    const PhaseGrid& grid() const { return grid_; }
    int size() const { return grid_.kernels; }

    Eigen::VectorXd eval(double phase) const {
        Eigen::VectorXd psi(grid_.kernels);
        for (int i = 0; i < grid_.kernels; ++i) {
            const double d = phase - grid_.kernel_phases[static_cast<std::size_t>(i)];
            psi[i] = std::exp(-0.5 * mu_ * d * d);
        }
        return psi;
    }

    /// Basis vectors at each of the N cost instants, one column per instant.
    Eigen::MatrixXd at_instants() const {
        Eigen::MatrixXd out(grid_.kernels, grid_.instants);
        for (int n = 0; n < grid_.instants; ++n) {
            out.col(n) = eval(grid_.instant_phases[static_cast<std::size_t>(n)]);
        }
        return out;
    }

private:
    double mu_ = 5.0;
    PhaseGrid grid_;
};

/// Shape parameters of the landscape. Entries of `w` may go negative while
/// learning; only the actuated value is clamped to [0, g_max].
struct ImpedancePolicy {
    Eigen::VectorXd w;
    double g_max = 10.0;

    ImpedancePolicy() = default;
    ImpedancePolicy(Eigen::VectorXd weights, double clamp) : w(std::move(weights)), g_max(clamp) {
        if (!(g_max > 0.0)) throw ConfigError("g_max must be > 0");
    }

    static ImpedancePolicy flat(int P, double value = 0.0, double clamp = 10.0) {
        return {Eigen::VectorXd::Constant(P, value), clamp};
    }
};

struct LandscapeValue {
    double raw = 0.0;
    double clamped = 0.0;
};

/// Normalized kernel-weighted average of `w` at `phase`.
inline double landscape_raw(const Eigen::VectorXd& w, const Eigen::VectorXd& psi) {
    return psi.dot(w) / psi.sum();
}

inline LandscapeValue landscape_eval(const Eigen::VectorXd& w, double g_max, double phase,
                                     const BasisSet& basis) {
    if (w.size() != basis.size()) {
        throw ShapeError("policy has " + std::to_string(w.size()) + " weights, basis has " +
                         std::to_string(basis.size()) + " kernels");
    }
    const double raw = landscape_raw(w, basis.eval(phase));
    return {raw, std::clamp(raw, 0.0, g_max)};
}

inline LandscapeValue landscape_eval(const ImpedancePolicy& policy, double phase, const BasisSet& basis) {
    return landscape_eval(policy.w, policy.g_max, phase, basis);
}

}  // namespace pi2aan
