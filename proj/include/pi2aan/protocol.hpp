/**
 * @file protocol.hpp
 * @brief Runs a full session protocol and produces the stride log and summary.
 *
 * The first (transparent) session records the wearer's unassisted gait; the
 * mean of its trailing strides plus the target bump defines the desired
 * trajectory, and its strides are scored against that target afterwards.
 * The wearer does not adapt during it. Assisted sessions share one
 * supervisor, so policy, mode and decay counter carry across them.
 */
#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pi2aan/aan_supervisor.hpp"
#include "pi2aan/config.hpp"
#include "pi2aan/metrics.hpp"
#include "pi2aan/stride_log.hpp"
#include "pi2aan/subject_model.hpp"

namespace pi2aan {

/// Independent 64-bit seed for a named stream of a run.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

struct RunArtifacts {
    std::string csv;
    std::string summary;  // pretty-printed JSON
    SummaryMetrics metrics;
    std::vector<std::string> notes;
};

inline BaselineGait load_baseline(const RunConfig& cfg) {
    if (cfg.baseline.rfind("preset:", 0) == 0) return BaselineGait::preset(cfg.baseline.substr(7), cfg.samples);
    return BaselineGait::from_file(cfg.baseline.substr(5), cfg.samples);
}

/// Builds the summary from CSV text, the same path `metrics` takes on saved output.
inline std::string summarize_csv(const std::string& csv, const RunConfig& cfg, SummaryMetrics* out = nullptr) {
    std::istringstream in(csv);
    const StrideLog log = parse_stride_log(in);
    SummaryMetrics m = compute_metrics(log, cfg.analysis);
    std::string text = summary_json(m, cfg).dump(2) + "\n";
    if (out) *out = std::move(m);
    return text;
}

inline RunArtifacts run_protocol(const RunConfig& cfg) {
    if (const auto errs = cfg.validate(); !errs.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : errs) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    const int P = cfg.kernels;
    const int N = cfg.instants;
    const int Q = cfg.samples;
    const auto& mask = cfg.supervisor.eval_mask;

    const BaselineGait baseline = load_baseline(cfg);
    SubjectPlant plant(baseline, baseline.angle, cfg.subject, cfg.field, N, derive_seed(cfg.seed, 1));
    std::mt19937_64 explore_rng(derive_seed(cfg.seed, 2));
    AanSupervisor supervisor(BasisSet(cfg.mu, PhaseGrid(P, N)), cfg.pi2, cfg.supervisor,
                             ImpedancePolicy(cfg.initial_weights(), cfg.g_max));

    RunArtifacts art;
    std::ostringstream csv;
    csv << csv_header(P, N) << "\n";
    const std::vector<double> zeros(static_cast<std::size_t>(P), 0.0);

    auto transparent_row = [&](const std::string& session, long idx, const StrideOutcome& o) {
        StrideRow r;
        r.run_id = cfg.run_id;
        r.session = session;
        r.stride_idx = idx;
        r.kind = StrideKind::Transparent;
        r.rms_full = masked_rms(o.phase, o.raw_error, {}, N);
        r.rms_masked = masked_rms(o.phase, o.raw_error, mask, N);
        r.g = zeros;
        r.seg_rms = o.seg_rms;
        return r;
    };

    const auto& sessions = cfg.protocol.sessions;

    // Baseline session: record unassisted gait, then derive the target from its tail.
    {
        const auto& first = sessions.front();
        plant.set_learning(false);
        std::vector<std::vector<double>> measured;
        measured.reserve(static_cast<std::size_t>(first.strides));
        for (int s = 0; s < first.strides; ++s) measured.push_back(plant.run_transparent().theta_m);

        const int window = std::max(1, static_cast<int>(std::ceil(cfg.analysis.baseline_window * first.strides)));
        BaselineGait mean_gait{baseline.phase, std::vector<double>(static_cast<std::size_t>(Q), 0.0)};
        for (int s = first.strides - window; s < first.strides; ++s) {
            for (int q = 0; q < Q; ++q) mean_gait.angle[static_cast<std::size_t>(q)] += measured[static_cast<std::size_t>(s)][static_cast<std::size_t>(q)];
        }
        for (auto& v : mean_gait.angle) v /= window;
        plant.set_target(make_target(mean_gait, cfg.task));
        plant.set_learning(true);

        for (int s = 0; s < first.strides; ++s) {
            StrideOutcome o;
            o.phase = baseline.phase;
            o.theta_m = measured[static_cast<std::size_t>(s)];
            o.raw_error.resize(static_cast<std::size_t>(Q));
            for (int q = 0; q < Q; ++q) {
                o.raw_error[static_cast<std::size_t>(q)] = plant.target()[static_cast<std::size_t>(q)] - o.theta_m[static_cast<std::size_t>(q)];
            }
            o.seg_rms = segment_rms(o.phase, o.raw_error, N);
            csv << format_row(transparent_row(first.name, s + 1, o)) << "\n";
        }
    }

    const int block = cfg.pi2.rollouts + 1;
    for (std::size_t si = 1; si < sessions.size(); ++si) {
        const auto& session = sessions[si];
        if (session.mode == AssistMode::Transparent) {
            for (int s = 0; s < session.strides; ++s) {
                csv << format_row(transparent_row(session.name, s + 1, plant.run_transparent())) << "\n";
            }
            continue;
        }
        const SessionLog log = supervisor.run_session(plant, session.strides / block, explore_rng);
        long idx = 0;
        long epoch = 0;
        for (const auto& rec : log.epochs) {
            ++epoch;
            for (const auto& st : rec.strides) {
                StrideRow r;
                r.run_id = cfg.run_id;
                r.session = session.name;
                r.stride_idx = ++idx;
                r.epoch_idx = epoch;
                r.kind = st.kind;
                r.mode = st.mode;
                r.sigma = st.sigma;
                r.epoch_cost = st.epoch_cost;
                r.rms_full = masked_rms(st.outcome.phase, st.outcome.raw_error, {}, N);
                r.rms_masked = masked_rms(st.outcome.phase, st.outcome.raw_error, mask, N);
                r.g = st.g_at_kernels;
                r.seg_rms = st.outcome.seg_rms;
                csv << format_row(r) << "\n";
            }
        }
        for (const auto& d : log.decisions) {
            if (d.switched()) {
                art.notes.push_back(session.name + ": " + std::string(to_string(d.from)) + " -> " +
                                    std::string(to_string(d.to)) + " after epoch " + std::to_string(d.after_epoch) +
                                    " (mean cost " + format_real(d.mean_cost) + ")");
            }
        }
        if (log.partial_window) {
            art.notes.push_back(session.name + ": ended mid-window; its epochs join the next window without a decision here");
        }
    }

    art.csv = csv.str();
    art.summary = summarize_csv(art.csv, cfg, &art.metrics);
    return art;
}

inline void write_artifacts(const RunArtifacts& art, const RunConfig& cfg, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
    auto write = [&dir](const char* name, const std::string& text) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + (dir / name).string() + "'");
        out << text;
        if (!out) throw std::runtime_error("write failed for '" + (dir / name).string() + "'");
    };
    write("strides.csv", art.csv);
    write("summary.json", art.summary);
    write("run.cfg", cfg.serialize());
}

/// Recomputes summary.json from a run directory's strides.csv and run.cfg.
inline std::string recompute_summary(const std::filesystem::path& dir) {
    const RunConfig cfg = RunConfig::from_file((dir / "run.cfg").string());
    std::ifstream in(dir / "strides.csv", std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + (dir / "strides.csv").string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return summarize_csv(text.str(), cfg);
}

}  // namespace pi2aan
