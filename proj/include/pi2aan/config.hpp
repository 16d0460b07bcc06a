/**
 * @file config.hpp
 * @brief Run configuration: a flat "key = value" text file.
 *
 * Every knob of a run lives under one dotted key. Lists are comma separated,
 * '#' starts a comment, unknown keys are rejected. Serializing a config and
 * parsing it back yields the same config.
 */
#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pi2aan/aan_supervisor.hpp"
#include "pi2aan/error.hpp"
#include "pi2aan/force_field.hpp"
#include "pi2aan/pi2_core.hpp"
#include "pi2aan/subject_model.hpp"

namespace pi2aan {

struct SessionSpec {
    std::string name;
    AssistMode mode = AssistMode::Transparent;
    int strides = 0;

    bool operator==(const SessionSpec&) const = default;
};

/// BSLN, four training sessions and three post-training sessions.
struct ProtocolSpec {
    std::vector<SessionSpec> sessions{
        {"BSLN", AssistMode::Transparent, 270}, {"T-1", AssistMode::Aan, 500},
        {"T-2", AssistMode::Aan, 500},          {"T-3", AssistMode::Aan, 500},
        {"T-4", AssistMode::Aan, 500},          {"PT-1", AssistMode::Transparent, 55},
        {"PT-2", AssistMode::Transparent, 55},  {"PT-3", AssistMode::Transparent, 55},
    };
};

struct AnalysisOptions {
    double skip_fraction = 0.1;    // leading share of each session excluded from RMS and g statistics
    double baseline_window = 0.2;  // trailing share of the first session averaged into the baseline gait
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

/// Shortest text that parses back to the same double.
inline std::string format_shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) throw ConfigError(key + ": '" + text + "' is not a number");
    return v;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& text) {
    Int v{};
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) throw ConfigError(key + ": '" + text + "' is not an integer");
    return v;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F&& fmt) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += fmt(xs[i]);
    }
    return out;
}

}  // namespace detail

struct RunConfig {
    std::uint64_t seed = 1;
    std::string run_id = "run";

    int kernels = 10;   // P
    int instants = 10;  // N
    double mu = 5.0;
    double g_max = 10.0;
    std::vector<double> w_init{0.0};  // one value broadcasts to all kernels

    ForceFieldConfig field;
    PI2Config pi2;
    SupervisorConfig supervisor;
    SubjectParams subject;
    int samples = 200;                       // Q per stride
    std::string baseline = "preset:default"; // or file:<path>
    TargetTask task;
    ProtocolSpec protocol;
    AnalysisOptions analysis;

    struct Field {
        std::string key;
        std::function<std::string()> get;
        std::function<void(const std::string&)> set;
        bool list_valued = false;
    };

    /// The complete key table, in serialization order.
    std::vector<Field> fields() {
        using namespace detail;
        std::vector<Field> f;
        auto num = [&f](std::string key, double& ref) {
            f.push_back({key, [&ref] { return format_shortest(ref); },
                         [&ref, key](const std::string& v) { ref = parse_double(key, v); }});
        };
        auto integer = [&f](std::string key, int& ref) {
            f.push_back({key, [&ref] { return std::to_string(ref); },
                         [&ref, key](const std::string& v) { ref = parse_int<int>(key, v); }});
        };
        auto weights = [&f](std::string key, CostWeights& ref) {
            f.push_back({key, [&ref] { return format_shortest(ref.error) + ", " + format_shortest(ref.impedance); },
                         [&ref, key](const std::string& v) {
                             const auto parts = split(v, ',');
                             if (parts.size() != 2) throw ConfigError(key + ": expected 'lambda_theta, lambda_g'");
                             ref = {parse_double(key, parts[0]), parse_double(key, parts[1])};
                         },
                         true});
        };

        f.push_back({"seed", [this] { return std::to_string(seed); },
                     [this](const std::string& v) { seed = parse_int<std::uint64_t>("seed", v); }});
        f.push_back({"run_id", [this] { return run_id; }, [this](const std::string& v) { run_id = v; }});
        integer("grid.kernels", kernels);
        integer("grid.instants", instants);
        num("basis.mu", mu);
        num("policy.g_max", g_max);
        f.push_back({"policy.w_init", [this] { return join(w_init, format_shortest); },
                     [this](const std::string& v) {
                         w_init.clear();
                         for (const auto& p : split(v, ',')) w_init.push_back(parse_double("policy.w_init", p));
                     },
                     true});
        num("force.tau_max", field.tau_max);
        num("force.deadband", field.deadband);
        integer("pi2.rollouts", pi2.rollouts);
        num("pi2.h", pi2.discrimination);
        num("pi2.sigma0", pi2.sigma0);
        num("pi2.decay", pi2.decay);
        num("pi2.rho", pi2.control_cost_scale);
        f.push_back({"pi2.constant_noise", [this] { return std::string(pi2.constant_noise_per_stride ? "true" : "false"); },
                     [this](const std::string& v) { pi2.constant_noise_per_stride = parse_bool("pi2.constant_noise", v); }});
        num("supervisor.beta_upper", supervisor.upper_bound);
        num("supervisor.beta_lower", supervisor.lower_bound);
        integer("supervisor.epochs_per_window", supervisor.epochs_per_window);
        weights("supervisor.lambda_intervention", supervisor.intervention);
        weights("supervisor.lambda_compliance", supervisor.compliance);
        f.push_back({"supervisor.eval_mask",
                     [this] { return join(supervisor.eval_mask, [](int n) { return std::to_string(n); }); },
                     [this](const std::string& v) {
                         supervisor.eval_mask.clear();
                         for (const auto& p : split(v, ',')) {
                             supervisor.eval_mask.push_back(parse_int<int>("supervisor.eval_mask", p));
                         }
                     },
                     true});
        num("supervisor.initial_cost", supervisor.initial_cost);
        num("subject.learning_gain", subject.learning_gain);
        num("subject.forgetting", subject.forgetting);
        num("subject.torque_compliance", subject.torque_compliance);
        num("subject.motor_noise", subject.motor_noise);
        integer("subject.samples", samples);
        f.push_back({"subject.baseline", [this] { return baseline; }, [this](const std::string& v) { baseline = v; }});
        num("task.amplitude", task.amplitude);
        num("task.width", task.width);
        f.push_back({"task.center", [this] { return task.center ? format_shortest(*task.center) : std::string("auto"); },
                     [this](const std::string& v) {
                         if (v == "auto") task.center.reset();
                         else task.center = parse_double("task.center", v);
                     }});
        f.push_back({"protocol.sessions",
                     [this] {
                         return join(protocol.sessions, [](const SessionSpec& s) {
                             return s.name + ":" + (s.mode == AssistMode::Aan ? "aan" : "transparent") + ":" +
                                    std::to_string(s.strides);
                         });
                     },
                     [this](const std::string& v) {
                         protocol.sessions.clear();
                         for (const auto& item : split(v, ',')) {
                             const auto parts = split(item, ':');
                             if (parts.size() != 3) throw ConfigError("protocol.sessions: expected name:mode:strides, got '" + item + "'");
                             SessionSpec s;
                             s.name = parts[0];
                             if (parts[1] == "aan") s.mode = AssistMode::Aan;
                             else if (parts[1] == "transparent") s.mode = AssistMode::Transparent;
                             else throw ConfigError("protocol.sessions: mode must be aan or transparent, got '" + parts[1] + "'");
                             s.strides = parse_int<int>("protocol.sessions", parts[2]);
                             protocol.sessions.push_back(std::move(s));
                         }
                     },
                     true});
        num("analysis.skip_fraction", analysis.skip_fraction);
        num("analysis.baseline_window", analysis.baseline_window);
        return f;
    }

    std::vector<std::pair<std::string, std::string>> to_kv() const {
        auto copy = *this;
        std::vector<std::pair<std::string, std::string>> out;
        for (auto& field : copy.fields()) out.emplace_back(field.key, field.get());
        return out;
    }

    void set(const std::string& key, const std::string& value) {
        for (auto& field : fields()) {
            if (field.key == key) {
                field.set(value);
                return;
            }
        }
        throw ConfigError("unknown config key '" + key + "'");
    }

    bool is_list_valued(const std::string& key) const {
        auto copy = *this;
        for (auto& field : copy.fields()) {
            if (field.key == key) return field.list_valued;
        }
        throw ConfigError("unknown config key '" + key + "'");
    }

    std::string serialize() const {
        std::string out;
        for (const auto& [k, v] : to_kv()) out += k + " = " + v + "\n";
        return out;
    }

    static RunConfig parse(std::istream& in) {
        RunConfig cfg;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const auto body = detail::trim(line);
            if (body.empty()) continue;
            const auto eq = body.find('=');
            if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
            cfg.set(detail::trim(std::string_view(body).substr(0, eq)), detail::trim(std::string_view(body).substr(eq + 1)));
        }
        return cfg;
    }

    static RunConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        return parse(in);
    }

    Eigen::VectorXd initial_weights() const {
        if (w_init.size() == 1) return Eigen::VectorXd::Constant(kernels, w_init.front());
        return Eigen::Map<const Eigen::VectorXd>(w_init.data(), static_cast<Eigen::Index>(w_init.size()));
    }

    /// Every violated invariant, one message each; empty when the config is usable.
    std::vector<std::string> validate() const {
        std::vector<std::string> errs;
        auto check = [&errs](bool ok, std::string msg) {
            if (!ok) errs.push_back(std::move(msg));
        };
        auto guarded = [&errs](auto&& fn) {
            try {
                fn();
            } catch (const std::exception& e) {
                errs.emplace_back(e.what());
            }
        };
        check(!run_id.empty() && run_id.find_first_of(",\n\r") == std::string::npos,
              "run_id must be non-empty and free of commas and newlines");
        check(kernels >= 1, "grid.kernels (P) must be >= 1");
        check(instants >= 2, "grid.instants (N) must be >= 2");
        check(mu > 0.0, "basis.mu must be > 0");
        check(g_max > 0.0, "policy.g_max must be > 0");
        check(w_init.size() == 1 || static_cast<int>(w_init.size()) == kernels,
              "policy.w_init must hold 1 or grid.kernels values");
        guarded([&] { field.validate(); });
        guarded([&] { pi2.validate(); });
        guarded([&] { supervisor.validate(instants); });
        guarded([&] { subject.validate(); });
        check(samples >= 2 * instants, "subject.samples must be >= 2 * grid.instants");
        check(baseline.rfind("preset:", 0) == 0 || baseline.rfind("file:", 0) == 0,
              "subject.baseline must be preset:<name> or file:<path>");
        check(task.amplitude >= 0.0, "task.amplitude must be >= 0");
        check(task.width > 0.0, "task.width must be > 0");
        if (task.center) {
            check(*task.center >= std::numbers::pi && *task.center < kTwoPi, "task.center must lie in [pi, 2*pi)");
        }
        check(analysis.skip_fraction >= 0.0 && analysis.skip_fraction < 1.0, "analysis.skip_fraction must lie in [0, 1)");
        check(analysis.baseline_window > 0.0 && analysis.baseline_window <= 1.0,
              "analysis.baseline_window must lie in (0, 1]");

        const auto& sessions = protocol.sessions;
        check(!sessions.empty(), "protocol.sessions must not be empty");
        if (!sessions.empty()) {
            check(sessions.front().mode == AssistMode::Transparent,
                  "the first session must be transparent (it defines the baseline gait)");
        }
        const int stride_block = pi2.rollouts + 1;
        for (std::size_t i = 0; i < sessions.size(); ++i) {
            const auto& s = sessions[i];
            check(!s.name.empty() && s.name.find_first_of(",:\n\r") == std::string::npos,
                  "session names must be non-empty and free of ',' and ':'");
            check(s.strides > 0, "session " + s.name + ": stride count must be > 0");
            if (s.mode == AssistMode::Aan && stride_block > 1) {
                check(s.strides % stride_block == 0,
                      "session " + s.name + ": aan stride count must be a multiple of K + 1 = " + std::to_string(stride_block));
            }
            for (std::size_t j = 0; j < i; ++j) {
                check(sessions[j].name != s.name, "duplicate session name " + s.name);
            }
        }
        return errs;
    }
};

}  // namespace pi2aan
