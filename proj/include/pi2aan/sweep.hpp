#pragma once

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "pi2aan/config.hpp"
#include "pi2aan/error.hpp"

namespace pi2aan {

struct SweepAxis {
    std::string key;
    std::vector<std::string> values;
};

/// Parses "key=v1,v2,..." into one sweep axis. List-valued keys separate
/// their alternatives with ';' instead ("supervisor.eval_mask=6,7;7,8").
inline SweepAxis parse_sweep_axis(const std::string& spec, const RunConfig& base) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw ConfigError("sweep override '" + spec + "' must look like key=v1,v2");
    SweepAxis axis{detail::trim(std::string_view(spec).substr(0, eq)), {}};
    const std::string rest = spec.substr(eq + 1);
    const bool list = base.is_list_valued(axis.key);
    const char sep = list || rest.find(';') != std::string::npos ? ';' : ',';
    for (auto& v : detail::split(rest, sep)) {
        if (v.empty()) throw ConfigError("sweep override '" + spec + "' has an empty value");
        axis.values.push_back(std::move(v));
    }
    return axis;
}

using SweepCell = std::vector<std::pair<std::string, std::string>>;

/// Cartesian product of the axes; the last axis varies fastest.
inline std::vector<SweepCell> sweep_cells(const std::vector<SweepAxis>& axes) {
    std::vector<SweepCell> cells{{}};
    for (const auto& axis : axes) {
        std::vector<SweepCell> next;
        next.reserve(cells.size() * axis.values.size());
        for (const auto& cell : cells) {
            for (const auto& v : axis.values) {
                auto c = cell;
                c.emplace_back(axis.key, v);
                next.push_back(std::move(c));
            }
        }
        cells = std::move(next);
    }
    return cells;
}

inline std::string cell_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "cell_%03zu", index);
    return buf;
}

}  // namespace pi2aan
