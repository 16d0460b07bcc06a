/**
 * @file metrics.hpp
 * @brief Session statistics recomputed from a stride log.
 *
 * Everything here is a function of the parsed CSV (plus the analysis
 * options), so a summary rebuilt from a saved log matches the one written at
 * run time exactly.
 */
#pragma once

#include <json.hpp>

#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pi2aan/config.hpp"
#include "pi2aan/stride_log.hpp"

namespace pi2aan {

struct SessionSummary {
    std::string name;
    bool assisted = false;
    long strides = 0;
    long analyzed = 0;
    double rms_masked_mean = 0.0;
    double rms_masked_se = 0.0;
    double rms_full_mean = 0.0;
    double rms_full_se = 0.0;
    // assisted sessions only
    std::optional<double> on_time_pct;
    std::optional<double> g_swing_mean;
    std::optional<double> epoch_cost_mean;
    std::optional<long> mode_switches;
    std::vector<std::optional<double>> g_intervention_means;  // per kernel
};

struct SummaryMetrics {
    std::vector<SessionSummary> sessions;
    std::optional<double> b1;  // slope of swing-phase g means across training sessions
    std::optional<double> b2;  // slope of intervention on-time across training sessions
    double baseline_rms = 0.0;
    std::optional<double> post_training_rms;
    std::optional<double> post_over_baseline;
};

/// Least-squares slope of y against x = 1..n; empty for fewer than two points.
inline std::optional<double> ols_slope(std::span<const double> y) {
    const auto n = static_cast<double>(y.size());
    if (y.size() < 2) return std::nullopt;
    const double x_mean = (n + 1.0) / 2.0;
    const double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double dx = static_cast<double>(i + 1) - x_mean;
        sxy += dx * (y[i] - y_mean);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

namespace detail {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
    if (xs.empty()) return {};
    const auto n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

inline std::optional<double> mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return std::nullopt;
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace detail

inline SummaryMetrics compute_metrics(const StrideLog& log, const AnalysisOptions& opts) {
    if (log.rows.empty()) throw FormatError("stride log has no rows");
    const int P = log.kernels;
    // kernels centred in the swing half: (2i - 1) * pi / P >= pi
    const int first_swing_kernel = (P + 2) / 2;

    // group rows by session, preserving first-appearance order
    std::vector<std::vector<const StrideRow*>> groups;
    std::vector<std::string> names;
    for (const auto& row : log.rows) {
        if (names.empty() || names.back() != row.session) {
            for (const auto& n : names) {
                if (n == row.session) throw FormatError("session " + row.session + " is not contiguous in the stride log");
            }
            names.push_back(row.session);
            groups.emplace_back();
        }
        groups.back().push_back(&row);
    }

    SummaryMetrics m;
    for (std::size_t s = 0; s < groups.size(); ++s) {
        const auto& rows = groups[s];
        SessionSummary out;
        out.name = names[s];
        out.strides = static_cast<long>(rows.size());
        out.assisted = rows.front()->kind != StrideKind::Transparent;
        const auto skip = static_cast<long>(std::floor(opts.skip_fraction * static_cast<double>(out.strides)));

        std::vector<double> masked;
        std::vector<double> full;
        std::vector<double> swing;
        std::vector<double> costs;
        std::vector<std::vector<double>> g_int(static_cast<std::size_t>(P));
        long intervention = 0;
        long switches = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const StrideRow& r = *rows[i];
            if (r.mode == LearningMode::Intervention) ++intervention;
            if (i > 0 && rows[i - 1]->mode != r.mode) ++switches;
            if (r.stride_idx <= skip) continue;
            masked.push_back(r.rms_masked);
            full.push_back(r.rms_full);
            if (r.kind != StrideKind::Eval) continue;
            if (r.epoch_cost) costs.push_back(*r.epoch_cost);
            double sw = 0.0;
            for (int k = first_swing_kernel; k <= P; ++k) sw += r.g[static_cast<std::size_t>(k - 1)];
            swing.push_back(sw / (P - first_swing_kernel + 1));
            if (r.mode == LearningMode::Intervention) {
                for (int k = 0; k < P; ++k) g_int[static_cast<std::size_t>(k)].push_back(r.g[static_cast<std::size_t>(k)]);
            }
        }
        out.analyzed = static_cast<long>(masked.size());
        const auto ms = detail::mean_se(masked);
        const auto fs = detail::mean_se(full);
        out.rms_masked_mean = ms.mean;
        out.rms_masked_se = ms.se;
        out.rms_full_mean = fs.mean;
        out.rms_full_se = fs.se;
        if (out.assisted) {
            out.on_time_pct = 100.0 * static_cast<double>(intervention) / static_cast<double>(out.strides);
            out.g_swing_mean = detail::mean_of(swing);
            out.epoch_cost_mean = detail::mean_of(costs);
            out.mode_switches = switches;
            for (const auto& g : g_int) out.g_intervention_means.push_back(detail::mean_of(g));
        }
        m.sessions.push_back(std::move(out));
    }

    std::vector<double> on_time;
    std::vector<double> g_swing;
    std::size_t last_assisted = 0;
    bool any_assisted = false;
    for (std::size_t s = 0; s < m.sessions.size(); ++s) {
        const auto& ss = m.sessions[s];
        if (!ss.assisted) continue;
        any_assisted = true;
        last_assisted = s;
        on_time.push_back(*ss.on_time_pct);
        if (ss.g_swing_mean) g_swing.push_back(*ss.g_swing_mean);
    }
    m.b1 = ols_slope(g_swing);
    m.b2 = ols_slope(on_time);
    m.baseline_rms = m.sessions.front().rms_masked_mean;
    if (any_assisted) {
        std::vector<double> post;
        for (std::size_t s = last_assisted + 1; s < m.sessions.size(); ++s) post.push_back(m.sessions[s].rms_masked_mean);
        m.post_training_rms = detail::mean_of(post);
        if (m.post_training_rms && m.baseline_rms > 0.0) m.post_over_baseline = *m.post_training_rms / m.baseline_rms;
    }
    return m;
}

namespace detail {

template <class T>
nlohmann::ordered_json opt_json(const std::optional<T>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace detail

inline nlohmann::ordered_json summary_json(const SummaryMetrics& m, const RunConfig& cfg) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["run_id"] = cfg.run_id;
    j["seed"] = cfg.seed;
    ordered_json sessions = ordered_json::array();
    for (const auto& s : m.sessions) {
        ordered_json o;
        o["name"] = s.name;
        o["kind"] = s.assisted ? "aan" : "transparent";
        o["strides"] = s.strides;
        o["analyzed_strides"] = s.analyzed;
        o["rms_masked_mean"] = s.rms_masked_mean;
        o["rms_masked_se"] = s.rms_masked_se;
        o["rms_full_mean"] = s.rms_full_mean;
        o["rms_full_se"] = s.rms_full_se;
        if (s.assisted) {
            o["intervention_on_time_pct"] = detail::opt_json(s.on_time_pct);
            o["g_swing_mean"] = detail::opt_json(s.g_swing_mean);
            o["epoch_cost_mean"] = detail::opt_json(s.epoch_cost_mean);
            o["mode_switches"] = detail::opt_json(s.mode_switches);
            ordered_json gi = ordered_json::array();
            for (const auto& g : s.g_intervention_means) gi.push_back(detail::opt_json(g));
            o["g_intervention_means"] = gi;
        }
        sessions.push_back(o);
    }
    j["sessions"] = sessions;
    j["B1"] = detail::opt_json(m.b1);
    j["B2"] = detail::opt_json(m.b2);
    j["baseline_rms"] = m.baseline_rms;
    j["post_training_rms"] = detail::opt_json(m.post_training_rms);
    j["post_over_baseline"] = detail::opt_json(m.post_over_baseline);
    ordered_json echo;
    for (const auto& [k, v] : cfg.to_kv()) echo[k] = v;
    j["config"] = echo;
    return j;
}

}  // namespace pi2aan
