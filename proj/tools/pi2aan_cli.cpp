// Command-line front end: run, sweep, metrics, validate.
//
// Exit codes: 0 success, 1 validation or runtime failure, 2 usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pi2aan/pi2aan.hpp"

namespace fs = std::filesystem;
using namespace pi2aan;

namespace {

struct CommonArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_out) {
    cmd->add_option("--config", args.config, "Run configuration file (defaults apply when omitted)");
    cmd->add_option("--seed", args.seed, "Override the configured seed");
    if (with_out) cmd->add_option("--out", args.out, "Output directory");
    cmd->add_flag("--quiet", args.quiet, "Suppress progress output");
}

RunConfig load_config(const CommonArgs& args) {
    RunConfig cfg = args.config.empty() ? RunConfig{} : RunConfig::from_file(args.config);
    if (args.seed) cfg.seed = *args.seed;
    return cfg;
}

bool report_invalid(const RunConfig& cfg) {
    const auto errs = cfg.validate();
    if (errs.empty()) return false;
    std::cerr << "configuration is invalid:\n";
    for (const auto& e : errs) std::cerr << "  - " << e << "\n";
    return true;
}

int cmd_validate(const CommonArgs& args) {
    const RunConfig cfg = load_config(args);
    if (report_invalid(cfg)) return 1;
    if (!args.quiet) std::cout << "configuration is valid\n";
    return 0;
}

int cmd_run(const CommonArgs& args) {
    const RunConfig cfg = load_config(args);
    if (report_invalid(cfg)) return 1;
    const fs::path out = args.out.empty() ? fs::path("out") : fs::path(args.out);
    const RunArtifacts art = run_protocol(cfg);
    write_artifacts(art, cfg, out);
    if (!args.quiet) {
        for (const auto& note : art.notes) std::cerr << note << "\n";
        std::cout << "wrote " << (out / "strides.csv").string() << " and " << (out / "summary.json").string() << "\n";
    }
    return 0;
}

int cmd_metrics(const CommonArgs& args, const std::string& run_dir) {
    const std::string text = recompute_summary(run_dir);
    if (args.out.empty()) {
        std::cout << text;
        return 0;
    }
    fs::create_directories(args.out);
    std::ofstream out(fs::path(args.out) / "summary.json", std::ios::binary);
    if (!(out << text)) throw std::runtime_error("cannot write summary to '" + args.out + "'");
    return 0;
}

int cmd_sweep(const CommonArgs& args, const std::vector<std::string>& overrides) {
    const RunConfig base = load_config(args);
    std::vector<SweepAxis> axes;
    for (const auto& o : overrides) axes.push_back(parse_sweep_axis(o, base));
    const auto cells = sweep_cells(axes);

    std::vector<RunConfig> configs;
    bool invalid = false;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        RunConfig cfg = base;
        for (const auto& [k, v] : cells[i]) cfg.set(k, v);
        cfg.run_id = cell_name(i);
        if (const auto errs = cfg.validate(); !errs.empty()) {
            invalid = true;
            std::cerr << cfg.run_id << " is invalid:\n";
            for (const auto& e : errs) std::cerr << "  - " << e << "\n";
        }
        configs.push_back(std::move(cfg));
    }
    if (invalid) return 1;

    const fs::path out = args.out.empty() ? fs::path("sweep") : fs::path(args.out);
    fs::create_directories(out);
    {
        std::ofstream index(out / "sweep_index.csv");
        index << "cell";
        for (const auto& a : axes) index << "," << a.key;
        index << "\n";
        for (std::size_t i = 0; i < cells.size(); ++i) {
            index << cell_name(i);
            for (const auto& kv : cells[i]) index << ",\"" << kv.second << "\"";
            index << "\n";
        }
    }

    // cells share nothing, so they run concurrently in batches
    const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t start = 0; start < configs.size(); start += width) {
        std::vector<std::future<std::string>> jobs;
        for (std::size_t i = start; i < std::min(configs.size(), start + width); ++i) {
            jobs.push_back(std::async(std::launch::async, [&cfg = configs[i], &out] {
                write_artifacts(run_protocol(cfg), cfg, out / cfg.run_id);
                return cfg.run_id;
            }));
        }
        for (auto& job : jobs) {
            const auto id = job.get();
            if (!args.quiet) std::cout << "finished " << id << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive assist-as-needed gait-training simulator"};
    app.require_subcommand(1);

    CommonArgs run_args, sweep_args, metrics_args, validate_args;
    std::vector<std::string> overrides;
    std::string run_dir;

    auto* run = app.add_subcommand("run", "Execute the protocol described by a config file");
    add_common(run, run_args, true);
    auto* sweep = app.add_subcommand("sweep", "Run the cartesian product of parameter overrides");
    add_common(sweep, sweep_args, true);
    sweep->add_option("--set", overrides, "Override axis key=v1,v2 (repeatable)")->required();
    auto* metrics = app.add_subcommand("metrics", "Recompute summary.json from a run directory");
    metrics->add_option("--out", metrics_args.out, "Write summary.json here instead of stdout");
    metrics->add_flag("--quiet", metrics_args.quiet, "Suppress progress output");
    metrics->add_option("run_dir", run_dir, "Directory holding strides.csv and run.cfg")->required();
    auto* validate = app.add_subcommand("validate", "Check a config without simulating");
    add_common(validate, validate_args, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (*run) return cmd_run(run_args);
        if (*sweep) return cmd_sweep(sweep_args, overrides);
        if (*metrics) return cmd_metrics(metrics_args, run_dir);
        if (*validate) return cmd_validate(validate_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
