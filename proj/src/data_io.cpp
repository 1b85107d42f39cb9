#include "nestfn/data_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <vector>

#include "nestfn/rng.hpp"

namespace nestfn {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

double parse_double_field(std::string_view field, std::size_t line, std::size_t column) {
    double value = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        throw RowParseError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                                ": cannot parse number from '" + std::string(field) + "'",
                            line, column);
    return value;
}

int parse_year_field(std::string_view field, std::size_t line) {
    int value = 0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        throw RowParseError("line " + std::to_string(line) +
                                ", column 2: cannot parse year from '" + std::string(field) + "'",
                            line, 2);
    if (value < 1900 || value > 2200)
        throw RowParseError("line " + std::to_string(line) + ", column 2: year " +
                                std::to_string(value) + " outside [1900, 2200]",
                            line, 2);
    return value;
}

}  // namespace

Panel parse_panel_csv(std::string_view bytes) {
    Panel panel;
    std::size_t line_number = 0;
    std::size_t pos = 0;
    bool saw_header = false;

    while (pos <= bytes.size()) {
        std::size_t end = bytes.find('\n', pos);
        std::string_view line;
        if (end == std::string_view::npos) {
            if (pos == bytes.size()) break;
            line = bytes.substr(pos);
            pos = bytes.size() + 1;
        } else {
            line = bytes.substr(pos, end - pos);
            pos = end + 1;
        }
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_number;

        if (!saw_header) {
            if (line != kPanelCsvHeader)
                throw HeaderMismatch("expected header '" + std::string(kPanelCsvHeader) +
                                     "', got '" + std::string(line) + "'");
            saw_header = true;
            continue;
        }
        if (line.empty()) continue;

        const auto fields = split_fields(line);
        if (fields.size() != 5)
            throw RowParseError("line " + std::to_string(line_number) + ": expected 5 fields, got " +
                                    std::to_string(fields.size()),
                                line_number, fields.size() < 5 ? fields.size() + 1 : 6);

        Observation obs;
        obs.industry_code = std::string(fields[0]);
        obs.year = parse_year_field(fields[1], line_number);
        obs.K = parse_double_field(fields[2], line_number, 3);
        obs.L = parse_double_field(fields[3], line_number, 4);
        obs.V = parse_double_field(fields[4], line_number, 5);
        if (!(obs.K > 0.0) || !(obs.L > 0.0) || !(obs.V > 0.0) || !std::isfinite(obs.K) ||
            !std::isfinite(obs.L) || !std::isfinite(obs.V))
            throw NonPositiveValue("line " + std::to_string(line_number) +
                                       ": K, L, V must all be positive",
                                   line_number);
        panel.observations.push_back(std::move(obs));
    }
    if (!saw_header) throw HeaderMismatch("empty input: missing header line");
    return panel;
}

std::string write_panel_csv(const Panel& panel) {
    std::string out(kPanelCsvHeader);
    out.push_back('\n');
    for (const Observation& obs : panel.observations) {
        out += obs.industry_code;
        out.push_back(',');
        out += std::to_string(obs.year);
        out.push_back(',');
        out += format_double(obs.K);
        out.push_back(',');
        out += format_double(obs.L);
        out.push_back(',');
        out += format_double(obs.V);
        out.push_back('\n');
    }
    return out;
}

Panel synth_panel(const SynthSpec& spec) {
    validate_parameters(spec.true_params);
    if (spec.n < 1) throw InvalidParameter("synth spec requires n >= 1");
    if (!(spec.noise_sd >= 0.0)) throw InvalidParameter("noise_sd must be >= 0");
    auto check_interval = [](const Interval& r, const char* name) {
        if (!(r.lo > 0.0) || !(r.hi >= r.lo))
            throw InvalidParameter(std::string(name) + " must be a positive interval");
    };
    check_interval(spec.k_range, "k_range");
    check_interval(spec.l_range, "l_range");

    const CounterRng rng(spec.seed);
    Panel panel;
    panel.source_label = "synthetic";
    panel.observations.reserve(static_cast<std::size_t>(spec.n));

    long long failed_budget = 100 * spec.n;
    std::uint64_t attempt = 0;
    for (long long i = 0; i < spec.n; ++i) {
        while (true) {
            const std::uint64_t c = 4 * attempt++;
            const double K = rng.log_uniform(c, spec.k_range.lo, spec.k_range.hi);
            const double L = rng.log_uniform(c + 1, spec.l_range.lo, spec.l_range.hi);
            const double z = rng.normal(c + 2, c + 3);
            double v;
            try {
                v = eval_v(spec.true_params, InputPoint{K, L}).v;
            } catch (const NonPositiveBracket&) {
                if (--failed_budget <= 0)
                    throw UnsatisfiableRegion(
                        "synth_panel: exceeded 100*n failed draws; the region is not "
                        "evaluable under the given parameters");
                continue;
            }
            // Mean-preserving multiplicative lognormal noise.
            const double v_obs =
                v * std::exp(spec.noise_sd * z - 0.5 * spec.noise_sd * spec.noise_sd);
            panel.observations.push_back(Observation{"000", 2010, K, L, v_obs});
            break;
        }
    }
    return panel;
}

namespace {

// Replace non-finite numbers with null, collecting dotted key paths.
void scrub_nonfinite(ordered_json& node, const std::string& path,
                     std::vector<std::string>& nonfinite) {
    if (node.is_number_float()) {
        const double v = node.get<double>();
        if (!std::isfinite(v)) {
            nonfinite.push_back(path);
            node = nullptr;
        }
    } else if (node.is_object()) {
        for (auto& [key, value] : node.items())
            scrub_nonfinite(value, path.empty() ? key : path + "." + key, nonfinite);
    } else if (node.is_array()) {
        std::size_t i = 0;
        for (auto& value : node)
            scrub_nonfinite(value, path + "[" + std::to_string(i++) + "]", nonfinite);
    }
}

}  // namespace

std::string write_report_json(const ReportDocument& doc) {
    ordered_json root;
    root["kind"] = doc.kind;
    if (doc.payload.is_object())
        for (const auto& [key, value] : doc.payload.items()) root[key] = value;
    else if (!doc.payload.is_null())
        root["payload"] = doc.payload;
    if (!root.contains("schema_version")) root["schema_version"] = doc.schema_version;

    std::vector<std::string> nonfinite;
    std::string path;
    scrub_nonfinite(root, path, nonfinite);
    if (!nonfinite.empty()) root["nonfinite_fields"] = nonfinite;
    return root.dump() + "\n";
}

ReportDocument parse_report_json(std::string_view bytes) {
    ordered_json root = ordered_json::parse(bytes);
    ReportDocument doc;
    if (!root.is_object() || !root.contains("kind"))
        throw Error("report document must be a JSON object with a 'kind' key");
    doc.kind = root["kind"].get<std::string>();
    if (root.contains("schema_version") && root["schema_version"].is_string())
        doc.schema_version = root["schema_version"].get<std::string>();
    root.erase("kind");
    doc.payload = std::move(root);
    return doc;
}

FitReportValues fit_report_values(const FitResult& result, const std::string& industry_code,
                                  std::uint64_t seed) {
    FitReportValues v;
    v.industry_code = industry_code;
    if (result.r_squared_defined) v.r_squared = result.r_squared;
    if (result.std_error_defined) v.std_error = result.std_error;
    if (result.substitution_elasticity_defined)
        v.substitution_elasticity = result.substitution_elasticity;
    v.delta = result.params.delta;
    v.sigma = result.params.sigma;
    v.p = result.params.p;
    v.q = result.params.q;
    v.A = result.params.A;
    v.rss = result.rss;
    v.converged = result.converged;
    v.n_obs = result.n_obs;
    v.n_iterations = result.n_iterations;
    v.best_start_index = result.best_start_index;
    v.seed = seed;
    return v;
}

namespace {

template <typename T>
ordered_json opt_json(const std::optional<T>& value) {
    if (value.has_value()) return ordered_json(*value);
    return ordered_json(nullptr);
}

}  // namespace

ordered_json fit_payload(const FitReportValues& v) {
    ordered_json payload;
    payload["industry_code"] = v.industry_code;
    payload["r_squared"] = opt_json(v.r_squared);
    payload["std_error"] = opt_json(v.std_error);
    payload["substitution_elasticity"] = opt_json(v.substitution_elasticity);
    payload["delta"] = opt_json(v.delta);
    payload["sigma"] = opt_json(v.sigma);
    payload["p"] = opt_json(v.p);
    payload["q"] = opt_json(v.q);
    payload["A"] = opt_json(v.A);
    payload["rss"] = opt_json(v.rss);
    payload["converged"] = v.converged;
    payload["n_obs"] = opt_json(v.n_obs);
    payload["n_iterations"] = opt_json(v.n_iterations);
    payload["best_start_index"] = opt_json(v.best_start_index);
    payload["seed"] = opt_json(v.seed);
    payload["schema_version"] = kSchemaVersion;
    return payload;
}

namespace {

ordered_json params_json(const Parameters& params) {
    ordered_json j;
    j["A"] = params.A;
    j["sigma"] = params.sigma;
    j["delta"] = params.delta;
    j["p"] = params.p;
    j["q"] = params.q;
    return j;
}

}  // namespace

ordered_json diagnostics_payload(const Parameters& params, const ScanConfig& cfg,
                                 const DiagnosticsReport& report) {
    ordered_json payload;
    payload["params"] = params_json(params);

    ordered_json scan;
    scan["k_range"] = ordered_json::array({cfg.k_range.lo, cfg.k_range.hi});
    scan["l_range"] = ordered_json::array({cfg.l_range.lo, cfg.l_range.hi});
    scan["grid"] = cfg.grid;
    scan["samples"] = cfg.samples;
    scan["seed"] = cfg.seed;
    scan["log_spacing"] = cfg.log_spacing;
    payload["scan"] = scan;

    ordered_json positivity;
    positivity["checked"] = report.positivity.checked;
    positivity["violations"] = report.positivity.violations;
    if (report.positivity.first_violation.has_value()) {
        positivity["first_violation"] =
            ordered_json{{"K", report.positivity.first_violation->K},
                         {"L", report.positivity.first_violation->L}};
    } else {
        positivity["first_violation"] = nullptr;
    }
    payload["positivity"] = positivity;

    ordered_json homogeneity;
    homogeneity["degree_min"] = report.homogeneity.degree_min;
    homogeneity["degree_max"] = report.homogeneity.degree_max;
    homogeneity["is_homogeneous"] = report.homogeneity.is_homogeneous;
    homogeneity["claimed_degree_one"] = report.homogeneity.claimed_degree_one;
    payload["homogeneity"] = homogeneity;

    ordered_json concavity;
    concavity["points_checked"] = report.concavity.points_checked;
    concavity["negative_semidefinite_count"] = report.concavity.negative_semidefinite_count;
    concavity["breakdowns"] = report.concavity.breakdown_count;
    concavity["max_eig_over_region"] = report.concavity.max_eig_over_region;
    concavity["closed_form_eigs_at_unit"] =
        ordered_json::array({report.concavity.closed_form_eig1_at_unit,
                             report.concavity.closed_form_eig2_at_unit});
    concavity["measured_eigs_at_unit"] = ordered_json::array(
        {report.concavity.measured_eig1_at_unit, report.concavity.measured_eig2_at_unit});
    payload["concavity"] = concavity;

    ordered_json monotonicity;
    monotonicity["share_dVdK_positive"] = report.monotonicity.share_dVdK_positive;
    monotonicity["share_dVdL_positive"] = report.monotonicity.share_dVdL_positive;
    monotonicity["points_checked"] = report.monotonicity.points_checked;
    monotonicity["points_failed"] = report.monotonicity.points_failed;
    payload["monotonicity"] = monotonicity;

    payload["euler_identity_max_abs_err"] = report.euler_identity_max_abs_err;
    payload["schema_version"] = kSchemaVersion;
    return payload;
}

ordered_json audit_payload(const Parameters& params, const InputPoint& x,
                           const FormulaAudit& audit) {
    ordered_json payload;
    payload["params"] = params_json(params);
    payload["point"] = ordered_json{{"K", x.K}, {"L", x.L}};
    ordered_json checks;
    for (const FormulaCheck& c : audit.checks) {
        ordered_json entry;
        entry["closed_form_value"] = c.closed_form_value;
        entry["computed_value"] = c.computed_value;
        entry["abs_deviation"] = c.abs_deviation;
        entry["defined"] = c.defined;
        if (!c.note.empty()) entry["note"] = c.note;
        checks[c.id] = entry;
    }
    payload["checks"] = checks;
    payload["schema_version"] = kSchemaVersion;
    return payload;
}

}  // namespace nestfn
