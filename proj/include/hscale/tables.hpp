#pragma once

// Renders study results as CSV (RFC-4180, CRLF line endings), Markdown, or
// JSON.  All serialization is deterministic: fixed key order, fixed row
// order, floating point printed with 17 significant digits.

#include <cstdio>
#include <string>
#include <vector>

#include "hscale/study.hpp"

namespace hscale {

enum class TableFormat { csv, markdown, json };

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace detail {

inline std::string flag_of(const RateStudyResult& res, const NormFit& nf) {
    (void)res;
    return nf.covered ? "ok" : "outside-theory";
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
            out += c;
        } else if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out += buf;
        } else {
            out += c;
        }
    }
    return out;
}

inline void json_number_array(std::string& out, const std::vector<double>& v) {
    out += '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_double(v[i]);
    }
    out += ']';
}

}  // namespace detail

/// One row per (study, report norm): s,u,rule,r,kappa_hat,r_squared,
/// alpha_exponent,flag — the flat form of the paper-style (s, u) grids.
inline std::string emit_tables(const std::vector<RateStudyResult>& results, TableFormat format) {
    if (format == TableFormat::csv) {
        std::string out = "s,u,rule,r,kappa_hat,r_squared,alpha_exponent,flag\r\n";
        for (const auto& res : results)
            for (const auto& nf : res.fits) {
                out += format_double(res.s) + "," + format_double(res.u) + "," +
                       rule_name(res.rule) + "," + format_double(nf.r) + "," +
                       format_double(nf.kappa_hat) + "," + format_double(nf.r_squared) + "," +
                       format_double(res.alpha_exponent) + "," + detail::flag_of(res, nf) +
                       "\r\n";
            }
        return out;
    }
    if (format == TableFormat::markdown) {
        std::string out =
            "| s | u | rule | r | kappa_hat | R^2 | alpha_exponent | flag |\n"
            "|---|---|------|---|-----------|-----|----------------|------|\n";
        for (const auto& res : results)
            for (const auto& nf : res.fits) {
                char buf[256];
                std::snprintf(buf, sizeof(buf),
                              "| %g | %g | %s | %g | %.2f | %.3f | %.3f | %s |\n", res.s, res.u,
                              rule_name(res.rule).c_str(), nf.r, nf.kappa_hat, nf.r_squared,
                              res.alpha_exponent, detail::flag_of(res, nf).c_str());
                out += buf;
            }
        return out;
    }
    if (format == TableFormat::json) {
        std::string out = "{\"schema_version\":1,\"results\":[";
        for (std::size_t i = 0; i < results.size(); ++i) {
            const auto& res = results[i];
            if (i) out += ',';
            out += "{\"problem\":\"";
            out += res.problem == ProblemKind::smoothing ? "smoothing" : "param-id";
            out += "\",\"reference\":\"" + detail::json_escape(res.reference) + "\"";
            out += ",\"rule\":\"" + rule_name(res.rule) + "\"";
            out += ",\"s\":" + format_double(res.s);
            out += ",\"u\":" + format_double(res.u);
            out += ",\"a\":" + format_double(res.a);
            out += ",\"gamma\":" + format_double(res.gamma);
            out += ",\"deltas\":";
            detail::json_number_array(out, res.deltas);
            out += ",\"alphas\":";
            detail::json_number_array(out, res.alphas);
            out += ",\"alpha_exponent\":" + format_double(res.alpha_exponent);
            out += ",\"alpha_r_squared\":" + format_double(res.alpha_r_squared);
            out += ",\"alpha_exponent_fitted\":";
            out += res.alpha_exponent_fitted ? "true" : "false";
            out += ",\"fits\":[";
            for (std::size_t k = 0; k < res.fits.size(); ++k) {
                const auto& nf = res.fits[k];
                if (k) out += ',';
                out += "{\"r\":" + format_double(nf.r);
                out += ",\"kappa_hat\":" + format_double(nf.kappa_hat);
                out += ",\"r_squared\":" + format_double(nf.r_squared);
                out += ",\"points\":" + std::to_string(nf.points);
                out += ",\"flag\":\"" + detail::flag_of(res, nf) + "\"";
                out += ",\"errors\":";
                detail::json_number_array(out, res.errors[k]);
                out += '}';
            }
            out += "],\"cells\":" + std::to_string(res.cells);
            out += ",\"failures\":" + std::to_string(res.failures);
            out += ",\"warnings\":[";
            for (std::size_t k = 0; k < res.warnings.size(); ++k) {
                if (k) out += ',';
                out += "\"" + detail::json_escape(res.warnings[k]) + "\"";
            }
            out += "]}";
        }
        out += "]}";
        return out;
    }
    throw InvalidArgument("emit_tables: unknown format");
}

inline std::string emit_tables(const RateStudyResult& result, TableFormat format) {
    return emit_tables(std::vector<RateStudyResult>{result}, format);
}

}  // namespace hscale
