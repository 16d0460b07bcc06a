/**
 * @file aan_supervisor.hpp
 * @brief Two-level assist-as-needed supervisor around the PI2 update.
 *
 * An epoch is K exploration strides, one policy update and one noiseless
 * evaluation stride whose masked RMS error is the epoch cost J. Every M
 * epochs the mean of the last M costs is compared with the error bounds and
 * may flip the learning mode, which swaps the cost weights and restarts the
 * exploration-noise decay.
 */
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pi2aan/error.hpp"
#include "pi2aan/phase_kernel.hpp"
#include "pi2aan/pi2_core.hpp"
#include "pi2aan/stride.hpp"

namespace pi2aan {

enum class LearningMode { Intervention, Compliance };

inline std::string_view to_string(LearningMode mode) {
    return mode == LearningMode::Intervention ? "intervention" : "compliance";
}

struct SupervisorConfig {
    double upper_bound = 1.5;  // beta_u, deg
    double lower_bound = 0.5;  // beta_l, deg
    int epochs_per_window = 4; // M
    CostWeights intervention{80.0, 5.0};
    CostWeights compliance{5.0, 80.0};
    std::vector<int> eval_mask{6, 7, 8, 9, 10};  // 1-based cost segments used by J
    double initial_cost = 2.5;                   // J_init, deg

    const CostWeights& weights(LearningMode mode) const {
        return mode == LearningMode::Intervention ? intervention : compliance;
    }

    void validate(int N) const {
        if (!(lower_bound > 0.0 && lower_bound < upper_bound)) {
            throw ConfigError("error bounds must satisfy 0 < beta_l < beta_u");
        }
        if (epochs_per_window < 1) throw ConfigError("epochs per window M must be >= 1");
        if (eval_mask.empty()) throw ConfigError("evaluation mask must not be empty");
        for (int n : eval_mask) {
            if (n < 1 || n > N) throw ConfigError("evaluation mask index " + std::to_string(n) + " outside 1..N");
        }
        if (!(initial_cost >= 0.0)) throw ConfigError("initial cost must be >= 0");
    }
};

/// RMS raw error of a noiseless stride over the masked segments.
inline double epoch_cost(const StrideOutcome& eval_stride, const std::vector<int>& mask, int N) {
    if (mask.empty()) throw ConfigError("evaluation mask must not be empty");
    return masked_rms(eval_stride.phase, eval_stride.raw_error, mask, N);
}

/// Mean of exactly M epoch costs; empty while the window is incomplete.
inline std::optional<double> high_level_cost(std::span<const double> costs, int M) {
    if (M < 1 || static_cast<int>(costs.size()) != M) return std::nullopt;
    return std::accumulate(costs.begin(), costs.end(), 0.0) / M;
}

inline LearningMode mode_transition(double mean_cost, LearningMode current, double upper, double lower) {
    if (current == LearningMode::Compliance && mean_cost > upper) return LearningMode::Intervention;
    if (current == LearningMode::Intervention && mean_cost < lower) return LearningMode::Compliance;
    return current;
}

struct StrideRecord {
    StrideKind kind = StrideKind::Explore;
    LearningMode mode = LearningMode::Intervention;
    double sigma = 0.0;                 // exploration std used for this stride (0 when noiseless)
    std::vector<double> g_at_kernels;   // actuated g at each kernel center
    StrideOutcome outcome;
    std::optional<double> epoch_cost;   // set on evaluation strides
};

struct EpochRecord {
    long index = 0;  // 1-based over the supervisor's lifetime
    double cost = 0.0;
    LearningMode mode = LearningMode::Intervention;
    Eigen::VectorXd w;                 // after the update
    std::vector<double> g_at_kernels;  // from the evaluation stride
    std::vector<StrideRecord> strides; // K exploration strides then the evaluation stride
};

struct ModeDecision {
    long after_epoch = 0;  // 0 for the initial decision from J_init
    double mean_cost = 0.0;
    LearningMode from = LearningMode::Intervention;
    LearningMode to = LearningMode::Intervention;

    bool switched() const { return from != to; }
};

struct SessionState {
    ImpedancePolicy policy;
    LearningMode mode = LearningMode::Intervention;
    long strides_since_reset = 0;
    std::vector<double> window_costs;  // costs of the current, incomplete window
    long total_strides = 0;
    long total_epochs = 0;
    bool initialized = false;          // initial J_init decision taken
};

struct SessionLog {
    std::vector<EpochRecord> epochs;
    std::vector<ModeDecision> decisions;
    bool partial_window = false;  // the session ended mid-window, no decision for it yet
};

class AanSupervisor {
public:
    AanSupervisor(BasisSet basis, PI2Config pi2, SupervisorConfig sup, ImpedancePolicy initial)
        : basis_(std::move(basis)), pi2_(pi2), sup_(std::move(sup)) {
        pi2_.validate();
        sup_.validate(basis_.grid().instants);
        if (initial.w.size() != basis_.size()) throw ShapeError("initial policy length differs from kernel count");
        if (basis_.grid().instants < 2) throw ConfigError("need N >= 2 cost instants");
        state_.policy = std::move(initial);
    }

    const SessionState& state() const { return state_; }
    SessionState& state() { return state_; }
    const BasisSet& basis() const { return basis_; }
    const PI2Config& pi2_config() const { return pi2_; }
    const SupervisorConfig& config() const { return sup_; }

    double current_sigma() const {
        return sigma_effective(pi2_.sigma0, pi2_.decay, state_.strides_since_reset);
    }

    /// Applies the bound test to `mean_cost`; a mode change swaps the weights
    /// and restarts the noise decay.
    ModeDecision decide(double mean_cost) {
        ModeDecision d{state_.total_epochs, mean_cost, state_.mode,
                       mode_transition(mean_cost, state_.mode, sup_.upper_bound, sup_.lower_bound)};
        if (d.switched()) {
            state_.mode = d.to;
            state_.strides_since_reset = 0;
        }
        return d;
    }

    std::vector<double> actuated_at_kernels(const ImpedanceSchedule& schedule) const {
        std::vector<double> out;
        out.reserve(basis_.grid().kernel_phases.size());
        for (double phase : basis_.grid().kernel_phases) out.push_back(schedule.g(phase));
        return out;
    }

    template <StridePlant Plant, class URBG>
    EpochRecord run_epoch(Plant& plant, URBG& rng) {
        const int K = pi2_.rollouts;
        const int N = basis_.grid().instants;
        const int P = basis_.size();
        const CostWeights weights = sup_.weights(state_.mode);
        const Eigen::MatrixXd psi = basis_.at_instants();

        EpochRecord record;
        record.index = state_.total_epochs + 1;
        record.mode = state_.mode;

        ExplorationBatch batch;
        batch.base_policy = state_.policy.w;
        batch.noise.reserve(static_cast<std::size_t>(K));
        batch.seg_rms_err.resize(K, N);
        batch.g_at_instants.resize(K, N);

        for (int k = 0; k < K; ++k) {
            const double sigma = current_sigma();
            Eigen::MatrixXd eps = draw_noise(rng, sigma, 1, N, P).front();
            if (pi2_.constant_noise_per_stride) eps = eps.col(0).replicate(1, N);

            const ImpedanceSchedule schedule(basis_, state_.policy.w, state_.policy.g_max, StrideKind::Explore, eps);
            StrideOutcome outcome = plant.run_stride(schedule);
            if (static_cast<int>(outcome.seg_rms.size()) != N) throw ShapeError("plant returned wrong segment count");

            for (int j = 0; j < N; ++j) {
                batch.seg_rms_err(k, j) = outcome.seg_rms[static_cast<std::size_t>(j)];
                batch.g_at_instants(k, j) = landscape_raw(state_.policy.w + eps.col(j), psi.col(j));
            }
            record.strides.push_back({StrideKind::Explore, state_.mode, sigma, actuated_at_kernels(schedule),
                                      std::move(outcome), std::nullopt});
            batch.noise.push_back(std::move(eps));
            advance_stride();
        }

        const CostTable costs = cost_to_go_table(batch, basis_, pi2_.control_cost_scale, weights);
        const Eigen::MatrixXd probs = probability_table(costs, pi2_.discrimination);
        state_.policy.w += parameter_update(probs, batch.noise, basis_, pi2_.control_cost_scale);

        const ImpedanceSchedule eval(basis_, state_.policy.w, state_.policy.g_max, StrideKind::Eval);
        StrideOutcome outcome = plant.run_stride(eval);
        record.cost = epoch_cost(outcome, sup_.eval_mask, N);
        record.w = state_.policy.w;
        record.g_at_kernels = actuated_at_kernels(eval);
        record.strides.push_back({StrideKind::Eval, state_.mode, 0.0, record.g_at_kernels, std::move(outcome),
                                  record.cost});
        advance_stride();

        state_.window_costs.push_back(record.cost);
        ++state_.total_epochs;
        return record;
    }

    /// Runs `n_epochs` epochs, taking a mode decision whenever a window of M
    /// epoch costs completes. State (including an unfinished window) carries
    /// over to the next call.
    template <StridePlant Plant, class URBG>
    SessionLog run_session(Plant& plant, int n_epochs, URBG& rng) {
        SessionLog log;
        if (!state_.initialized) {
            log.decisions.push_back(decide(sup_.initial_cost));
            state_.initialized = true;
        }
        for (int e = 0; e < n_epochs; ++e) {
            log.epochs.push_back(run_epoch(plant, rng));
            if (auto mean = high_level_cost(state_.window_costs, sup_.epochs_per_window)) {
                log.decisions.push_back(decide(*mean));
                state_.window_costs.clear();
            }
        }
        log.partial_window = !state_.window_costs.empty();
        return log;
    }

private:
    void advance_stride() {
        ++state_.strides_since_reset;
        ++state_.total_strides;
    }

    BasisSet basis_;
    PI2Config pi2_;
    SupervisorConfig sup_;
    SessionState state_;
};

}  // namespace pi2aan
