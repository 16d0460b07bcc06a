/**
 * @file pi2_core.hpp
 * @brief Phase-indexed policy improvement with path integrals.
 *
 * One update consumes K exploration strides. Each stride k carries a noise
 * vector eps(j,k) per cost instant j, the RMS tracking error of every phase
 * segment and the impedance evaluated at every instant. Costs-to-go are
 * suffix sums over the instants, turned into per-instant rollout
 * probabilities, and the projected noise is averaged first over rollouts and
 * then over instants (weighted by (N - n) * psi_i(phi_n)) to give dw.
 */
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pi2aan/error.hpp"
#include "pi2aan/phase_kernel.hpp"

namespace pi2aan {

/// {lambda_theta, lambda_g}: weights on squared segment error and squared impedance.
struct CostWeights {
    double error = 80.0;
    double impedance = 5.0;

    bool operator==(const CostWeights&) const = default;
};

struct PI2Config {
    int rollouts = 4;                       // K
    double discrimination = 10.0;           // h
    double sigma0 = 0.03;                   // initial noise std, deg^-2
    double decay = 0.992;                   // gamma, applied once per stride
    double control_cost_scale = 1e-6;       // rho in R = rho * I
    bool constant_noise_per_stride = false; // eps(j,k) = eps(1,k) for all j

    void validate() const {
        if (rollouts < 1) throw ConfigError("rollouts K must be >= 1");
        if (!(discrimination > 0.0)) throw ConfigError("discrimination h must be > 0");
        if (!(sigma0 > 0.0)) throw ConfigError("sigma0 must be > 0");
        if (!(decay > 0.0 && decay <= 1.0)) throw ConfigError("decay gamma must lie in (0, 1]");
        if (!(control_cost_scale >= 0.0)) throw ConfigError("control cost scale rho must be >= 0");
    }
};

/// Exploration standard deviation after `strides` strides since the last reset.
inline double sigma_effective(double sigma0, double decay, long strides) {
    if (strides < 0) throw DomainError("stride count must be >= 0");
    return sigma0 * std::pow(decay, static_cast<double>(strides));
}

/// One P x N matrix per rollout; column j is eps(j,k).
using NoiseTable = std::vector<Eigen::MatrixXd>;

template <class URBG>
NoiseTable draw_noise(URBG& rng, double sigma, int K, int N, int P) {
    if (sigma < 0.0) throw DomainError("noise sigma must be >= 0");
    NoiseTable table(static_cast<std::size_t>(K), Eigen::MatrixXd::Zero(P, N));
    if (sigma == 0.0) return table;
    std::normal_distribution<double> normal(0.0, sigma);
    for (auto& m : table) {
        for (int j = 0; j < N; ++j) {
            for (int i = 0; i < P; ++i) m(i, j) = normal(rng);
        }
    }
    return table;
}

/// R^-1 psi psi^T / (psi^T R^-1 psi) with R = rho * I; rho = 0 takes the
/// rho-independent limit psi psi^T / (psi^T psi).
inline Eigen::MatrixXd projection_matrix(const Eigen::VectorXd& psi, double rho) {
    if (psi.squaredNorm() == 0.0) throw DomainError("singular basis vector: psi = 0");
    if (rho < 0.0) throw DomainError("rho must be >= 0");
    if (rho == 0.0) return psi * psi.transpose() / psi.squaredNorm();
    const Eigen::MatrixXd r_inv = Eigen::MatrixXd::Identity(psi.size(), psi.size()) / rho;
    const Eigen::VectorXd r_inv_psi = r_inv * psi;
    return r_inv_psi * psi.transpose() / psi.dot(r_inv_psi);
}

inline double immediate_cost(double seg_rms_error, double g, const CostWeights& weights) {
    return weights.error * seg_rms_error * seg_rms_error + weights.impedance * g * g;
}

struct ExplorationBatch {
    NoiseTable noise;               // K entries of P x N
    Eigen::MatrixXd seg_rms_err;    // K x N, deg
    Eigen::MatrixXd g_at_instants;  // K x N, deg^-2
    Eigen::VectorXd base_policy;    // w at sampling time

    int rollouts() const { return static_cast<int>(noise.size()); }
    int instants() const { return static_cast<int>(seg_rms_err.cols()); }

    void validate(int P) const {
        const int K = rollouts();
        if (K < 1) throw ShapeError("exploration batch is empty");
        const int N = instants();
        if (seg_rms_err.rows() != K || g_at_instants.rows() != K || g_at_instants.cols() != N) {
            throw ShapeError("exploration batch tables must all be K x N");
        }
        if (base_policy.size() != P) throw ShapeError("base policy length differs from kernel count");
        for (const auto& m : noise) {
            if (m.rows() != P || m.cols() != N) throw ShapeError("noise entries must be P x N");
        }
    }
};

/// S(n, k) stored as an N x K matrix.
struct CostTable {
    Eigen::MatrixXd S;
};

inline CostTable cost_to_go_table(const ExplorationBatch& batch, const BasisSet& basis, double rho,
                                  const CostWeights& weights) {
    batch.validate(basis.size());
    const int K = batch.rollouts();
    const int N = batch.instants();
    if (N != basis.grid().instants) throw ShapeError("batch instant count differs from grid");

    std::vector<Eigen::MatrixXd> projections;
    projections.reserve(static_cast<std::size_t>(N));
    const Eigen::MatrixXd psi = basis.at_instants();
    for (int j = 0; j < N; ++j) projections.push_back(projection_matrix(psi.col(j), rho));

    CostTable table{Eigen::MatrixXd::Zero(N, K)};
    for (int k = 0; k < K; ++k) {
        double suffix = 0.0;
        for (int j = N - 1; j >= 0; --j) {
            const Eigen::VectorXd W =
                batch.base_policy + projections[static_cast<std::size_t>(j)] * batch.noise[static_cast<std::size_t>(k)].col(j);
            suffix += immediate_cost(batch.seg_rms_err(k, j), batch.g_at_instants(k, j), weights);
            suffix += 0.5 * rho * W.squaredNorm();
            table.S(j, k) = suffix;
        }
    }
    return table;
}

/// Softmax of -h * (S - min) / (max - min); uniform when all costs coincide.
inline std::vector<double> rollout_probabilities(std::span<const double> costs, double h) {
    if (costs.empty()) throw DomainError("need at least one rollout cost");
    const auto [lo_it, hi_it] = std::minmax_element(costs.begin(), costs.end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    const auto K = costs.size();
    std::vector<double> p(K, 1.0 / static_cast<double>(K));
    if (!(range > 0.0)) return p;
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        p[k] = std::exp(-h * (costs[k] - lo) / range);
        total += p[k];
    }
    for (auto& v : p) v /= total;
    return p;
}

/// Row n holds the rollout probabilities at instant n.
inline Eigen::MatrixXd probability_table(const CostTable& costs, double h) {
    const auto N = costs.S.rows();
    const auto K = costs.S.cols();
    Eigen::MatrixXd probs(N, K);
    std::vector<double> row(static_cast<std::size_t>(K));
    for (Eigen::Index n = 0; n < N; ++n) {
        for (Eigen::Index k = 0; k < K; ++k) row[static_cast<std::size_t>(k)] = costs.S(n, k);
        const auto p = rollout_probabilities(row, h);
        for (Eigen::Index k = 0; k < K; ++k) probs(n, k) = p[static_cast<std::size_t>(k)];
    }
    return probs;
}

/// Per-instant updates dw_n = sum_k P(n,k) M_n eps(n,k), one column per instant.
inline Eigen::MatrixXd instant_updates(const Eigen::MatrixXd& probs, const NoiseTable& noise,
                                       const BasisSet& basis, double rho) {
    const int N = basis.grid().instants;
    const int P = basis.size();
    const auto K = static_cast<Eigen::Index>(noise.size());
    if (probs.rows() != N || probs.cols() != K) throw ShapeError("probability table must be N x K");
    const Eigen::MatrixXd psi = basis.at_instants();
    Eigen::MatrixXd dw = Eigen::MatrixXd::Zero(P, N);
    for (int n = 0; n < N; ++n) {
        const Eigen::MatrixXd M = projection_matrix(psi.col(n), rho);
        Eigen::VectorXd avg = Eigen::VectorXd::Zero(P);
        for (Eigen::Index k = 0; k < K; ++k) avg += probs(n, k) * noise[static_cast<std::size_t>(k)].col(n);
        dw.col(n) = M * avg;
    }
    return dw;
}

/// Second averaging stage: dw_i = sum_n (N - n) psi_i(phi_n) dw_n[i] / sum_n (N - n) psi_i(phi_n).
/// Instant N carries zero weight, so at least two instants are required.
inline Eigen::VectorXd collapse_instant_updates(const Eigen::MatrixXd& dw_n, const BasisSet& basis) {
    const int N = basis.grid().instants;
    const int P = basis.size();
    if (N < 2) throw ConfigError("parameter update needs N >= 2 cost instants");
    if (dw_n.rows() != P || dw_n.cols() != N) throw ShapeError("instant updates must be P x N");
    const Eigen::MatrixXd psi = basis.at_instants();
    Eigen::VectorXd dw(P);
    for (int i = 0; i < P; ++i) {
        double num = 0.0;
        double den = 0.0;
        for (int n = 0; n < N; ++n) {
            const double weight = static_cast<double>(N - 1 - n) * psi(i, n);
            num += weight * dw_n(i, n);
            den += weight;
        }
        dw[i] = num / den;
    }
    return dw;
}

/// The step dw applied as w <- w + dw.
inline Eigen::VectorXd parameter_update(const Eigen::MatrixXd& probs, const NoiseTable& noise,
                                        const BasisSet& basis, double rho) {
    if (basis.grid().instants < 2) throw ConfigError("parameter update needs N >= 2 cost instants");
    return collapse_instant_updates(instant_updates(probs, noise, basis, rho), basis);
}

}  // namespace pi2aan
