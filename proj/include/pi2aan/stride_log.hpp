/**
 * @file stride_log.hpp
 * @brief One CSV row per simulated stride.
 *
 * Columns: run_id, session, stride_idx, epoch_idx, stride_kind, mode,
 * sigma_eff, J_epoch, rms_raw_error_full, rms_raw_error_masked,
 * g_at_phi_1..P, seg_rms_err_1..N. Empty cells mean "not applicable".
 * Reals are written with 9 significant digits.
 */
#pragma once

#include <charconv>
#include <cstdio>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "pi2aan/aan_supervisor.hpp"
#include "pi2aan/config.hpp"
#include "pi2aan/error.hpp"
#include "pi2aan/stride.hpp"

namespace pi2aan {

struct StrideRow {
    std::string run_id;
    std::string session;
    long stride_idx = 0;             // 1-based within the session
    std::optional<long> epoch_idx;   // 1-based within the session, aan strides only
    StrideKind kind = StrideKind::Transparent;
    std::optional<LearningMode> mode;
    std::optional<double> sigma;
    std::optional<double> epoch_cost;
    double rms_full = 0.0;
    double rms_masked = 0.0;
    std::vector<double> g;        // P values
    std::vector<double> seg_rms;  // N values
};

inline std::string format_real(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::string csv_header(int P, int N) {
    std::string h =
        "run_id,session,stride_idx,epoch_idx,stride_kind,mode,sigma_eff,J_epoch,rms_raw_error_full,rms_raw_error_masked";
    for (int i = 1; i <= P; ++i) h += ",g_at_phi_" + std::to_string(i);
    for (int n = 1; n <= N; ++n) h += ",seg_rms_err_" + std::to_string(n);
    return h;
}

inline std::string format_row(const StrideRow& r) {
    std::string s = r.run_id + "," + r.session + "," + std::to_string(r.stride_idx) + ",";
    if (r.epoch_idx) s += std::to_string(*r.epoch_idx);
    s += ",";
    s += to_string(r.kind);
    s += ",";
    s += r.mode ? std::string(to_string(*r.mode)) : std::string("none");
    s += ",";
    if (r.sigma) s += format_real(*r.sigma);
    s += ",";
    if (r.epoch_cost) s += format_real(*r.epoch_cost);
    s += "," + format_real(r.rms_full) + "," + format_real(r.rms_masked);
    for (double v : r.g) s += "," + format_real(v);
    for (double v : r.seg_rms) s += "," + format_real(v);
    return s;
}

namespace detail {

inline double csv_real(const std::string& cell, int lineno) {
    double v = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto res = std::from_chars(cell.data(), end, v);
    if (cell.empty() || res.ec != std::errc() || res.ptr != end) {
        throw FormatError("stride log line " + std::to_string(lineno) + ": bad number '" + cell + "'");
    }
    return v;
}

inline std::optional<double> csv_opt_real(const std::string& cell, int lineno) {
    if (cell.empty()) return std::nullopt;
    return csv_real(cell, lineno);
}

inline long csv_long(const std::string& cell, int lineno) {
    long v = 0;
    const auto* end = cell.data() + cell.size();
    const auto res = std::from_chars(cell.data(), end, v);
    if (cell.empty() || res.ec != std::errc() || res.ptr != end) {
        throw FormatError("stride log line " + std::to_string(lineno) + ": bad integer '" + cell + "'");
    }
    return v;
}

}  // namespace detail

struct StrideLog {
    int kernels = 0;
    int instants = 0;
    std::vector<StrideRow> rows;
};

inline StrideLog parse_stride_log(std::istream& in) {
    StrideLog log;
    std::string line;
    if (!std::getline(in, line)) throw FormatError("stride log is empty");
    const auto header = detail::split(line, ',');
    for (const auto& h : header) {
        if (h.rfind("g_at_phi_", 0) == 0) ++log.kernels;
        if (h.rfind("seg_rms_err_", 0) == 0) ++log.instants;
    }
    if (line != csv_header(log.kernels, log.instants)) throw FormatError("stride log header does not match the expected columns");

    const std::size_t width = 10 + static_cast<std::size_t>(log.kernels + log.instants);
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto c = detail::split(line, ',');
        if (c.size() != width) {
            throw FormatError("stride log line " + std::to_string(lineno) + ": expected " + std::to_string(width) + " columns");
        }
        StrideRow r;
        r.run_id = c[0];
        r.session = c[1];
        r.stride_idx = detail::csv_long(c[2], lineno);
        if (!c[3].empty()) r.epoch_idx = detail::csv_long(c[3], lineno);
        if (c[4] == "explore") r.kind = StrideKind::Explore;
        else if (c[4] == "eval") r.kind = StrideKind::Eval;
        else if (c[4] == "transparent") r.kind = StrideKind::Transparent;
        else throw FormatError("stride log line " + std::to_string(lineno) + ": bad stride_kind '" + c[4] + "'");
        if (c[5] == "intervention") r.mode = LearningMode::Intervention;
        else if (c[5] == "compliance") r.mode = LearningMode::Compliance;
        else if (c[5] != "none") throw FormatError("stride log line " + std::to_string(lineno) + ": bad mode '" + c[5] + "'");
        r.sigma = detail::csv_opt_real(c[6], lineno);
        r.epoch_cost = detail::csv_opt_real(c[7], lineno);
        r.rms_full = detail::csv_real(c[8], lineno);
        r.rms_masked = detail::csv_real(c[9], lineno);
        for (int i = 0; i < log.kernels; ++i) r.g.push_back(detail::csv_real(c[10 + static_cast<std::size_t>(i)], lineno));
        for (int n = 0; n < log.instants; ++n) {
            r.seg_rms.push_back(detail::csv_real(c[10 + static_cast<std::size_t>(log.kernels + n)], lineno));
        }
        log.rows.push_back(std::move(r));
    }
    return log;
}

}  // namespace pi2aan
