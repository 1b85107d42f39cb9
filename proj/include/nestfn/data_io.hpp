#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "nestfn/audit.hpp"
#include "nestfn/diagnostics.hpp"
#include "nestfn/estimation.hpp"
#include "nestfn/panel.hpp"

namespace nestfn {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kPanelCsvHeader = "industry_code,year,K,L,V";
inline constexpr const char* kSchemaVersion = "1.0";

// Panel CSV. First line must be exactly `industry_code,year,K,L,V`; one
// observation per subsequent non-empty line; decimal-point numbers; LF or
// CRLF. Errors: HeaderMismatch, RowParseError(line, column),
// NonPositiveValue(line). Lines are 1-based.
Panel parse_panel_csv(std::string_view bytes);

// Exact header then rows, LF-terminated, numbers in shortest round-trip form
// (<= 17 significant digits); parse(write(p)) reproduces p bit-exactly.
std::string write_panel_csv(const Panel& panel);

// K, L drawn log-uniform via the counter generator (4 counters per attempt:
// K, L, and a Box-Muller pair); V = model value * exp(noise_sd*z - noise_sd^2/2).
// Rows hitting NonPositiveBracket are resampled; UnsatisfiableRegion after
// 100*n failed draws.
Panel synth_panel(const SynthSpec& spec);

/// One serializable report. kind is "fit", "diagnostics" or "audit" for the
/// document schemas below, or a point-op kind ("eval", "gradient",
/// "elasticity", "hessian", "reduction", "synth") for CLI outputs.
struct ReportDocument {
    std::string kind;
    ordered_json payload;  // flattened after "kind"; ends with schema_version
    std::string schema_version = kSchemaVersion;
};

// Single-line JSON with stable key order: {"kind": ..., <payload>, ...}.
// Non-finite numbers are rendered as null and their key paths collected in a
// trailing "nonfinite_fields" array (omitted when empty). Trailing newline.
std::string write_report_json(const ReportDocument& doc);

ReportDocument parse_report_json(std::string_view bytes);

/// Values behind one fit-report row. Optional fields serialize as null
/// (Table-1-style rows publish only seven of the columns).
struct FitReportValues {
    std::string industry_code;
    std::optional<double> r_squared;
    std::optional<double> std_error;
    std::optional<double> substitution_elasticity;
    std::optional<double> delta;
    std::optional<double> sigma;
    std::optional<double> p;
    std::optional<double> q;
    std::optional<double> A;
    std::optional<double> rss;
    bool converged = false;
    std::optional<long long> n_obs;
    std::optional<long long> n_iterations;
    std::optional<long long> best_start_index;
    std::optional<std::uint64_t> seed;
};

FitReportValues fit_report_values(const FitResult& result, const std::string& industry_code,
                                  std::uint64_t seed);

// Key order is fixed: industry_code, r_squared, std_error,
// substitution_elasticity, delta, sigma, p, q, A, rss, converged, n_obs,
// n_iterations, best_start_index, seed, schema_version.
ordered_json fit_payload(const FitReportValues& values);

ordered_json diagnostics_payload(const Parameters& params, const ScanConfig& cfg,
                                 const DiagnosticsReport& report);

ordered_json audit_payload(const Parameters& params, const InputPoint& x,
                           const FormulaAudit& audit);

}  // namespace nestfn
