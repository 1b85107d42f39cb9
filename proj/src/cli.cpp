#include "nestfn/cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "nestfn/audit.hpp"
#include "nestfn/data_io.hpp"
#include "nestfn/diagnostics.hpp"
#include "nestfn/estimation.hpp"
#include "nestfn/model.hpp"
#include "nestfn/special_cases.hpp"

namespace nestfn::cli {

namespace {

bool strict_mode_enabled() {
    const char* env = std::getenv("NESTFN_STRICT");
    return env != nullptr && std::string_view(env) == "1";
}

struct ParamFlags {
    double A = 0, sigma = 0, delta = 0, p = 0, q = 0;
    std::string params_file;
    CLI::Option *opt_A = nullptr, *opt_sigma = nullptr, *opt_delta = nullptr, *opt_p = nullptr,
                *opt_q = nullptr;

    void attach(CLI::App* cmd) {
        opt_A = cmd->add_option("--A", A, "total factor productivity (> 0)");
        opt_sigma = cmd->add_option("--sigma", sigma, "outer nest weight in [0, 2]");
        opt_delta = cmd->add_option("--delta", delta, "inner nest weight in [0, 2]");
        opt_p = cmd->add_option("--p", p, "outer curvature, |p| >= 1e-3");
        opt_q = cmd->add_option("--q", q, "inner curvature, |q| >= 1e-3");
        cmd->add_option("--params", params_file,
                        "JSON file with {A, sigma, delta, p, q}; explicit flags take precedence");
    }

    Parameters resolve() const {
        double a = A, s = sigma, d = delta, pp = p, qq = q;
        bool have_a = opt_A->count() > 0, have_s = opt_sigma->count() > 0,
             have_d = opt_delta->count() > 0, have_p = opt_p->count() > 0,
             have_q = opt_q->count() > 0;
        if (!params_file.empty()) {
            std::ifstream in(params_file);
            if (!in) throw InvalidParameter("cannot open params file '" + params_file + "'");
            nlohmann::json j = nlohmann::json::parse(in);
            auto fill = [&](const char* key, double& slot, bool& have) {
                if (!have && j.contains(key)) {
                    slot = j.at(key).get<double>();
                    have = true;
                }
            };
            fill("A", a, have_a);
            fill("sigma", s, have_s);
            fill("delta", d, have_d);
            fill("p", pp, have_p);
            fill("q", qq, have_q);
        }
        if (!(have_a && have_s && have_d && have_p && have_q))
            throw InvalidParameter(
                "all of --A --sigma --delta --p --q are required (flags or --params file)");
        return make_parameters(a, s, d, pp, qq, strict_mode_enabled());
    }
};

struct PointFlags {
    double K = 1.0, L = 1.0;
    void attach(CLI::App* cmd) {
        cmd->add_option("--K", K, "capital input (> 0), default 1");
        cmd->add_option("--L", L, "labor input (> 0), default 1");
    }
    InputPoint resolve() const { return make_input(K, L); }
};

void emit_report(std::ostream& out, bool as_json, const std::string& kind,
                 const ordered_json& payload, const std::string& human) {
    if (as_json) {
        out << write_report_json(ReportDocument{kind, payload});
    } else {
        out << human;
    }
}

ordered_json point_payload(const Parameters& P, const InputPoint& x) {
    ordered_json j;
    j["params"] = ordered_json{{"A", P.A}, {"sigma", P.sigma}, {"delta", P.delta}, {"p", P.p},
                               {"q", P.q}};
    j["point"] = ordered_json{{"K", x.K}, {"L", x.L}};
    return j;
}

int cmd_eval(const ParamFlags& pf, const PointFlags& xf, bool as_json, std::ostream& out) {
    const Parameters P = pf.resolve();
    const InputPoint x = xf.resolve();
    const EvalBreakdown b = eval_v(P, x);
    ordered_json payload = point_payload(P, x);
    payload["h_value"] = b.h_value;
    payload["ratio_term"] = b.ratio_term;
    payload["bracket"] = b.bracket;
    payload["v"] = b.v;
    emit_report(out, as_json, "eval", payload, format_double(b.v) + "\n");
    return 0;
}

int cmd_grad(const ParamFlags& pf, const PointFlags& xf, bool as_json, std::ostream& out) {
    const Parameters P = pf.resolve();
    const InputPoint x = xf.resolve();
    const Gradient g = gradient(P, x);
    ordered_json payload = point_payload(P, x);
    payload["dV_dK"] = g.dV_dK;
    payload["dV_dL"] = g.dV_dL;
    emit_report(out, as_json, "gradient", payload,
                "dV_dK " + format_double(g.dV_dK) + "\ndV_dL " + format_double(g.dV_dL) + "\n");
    return 0;
}

int cmd_elasticity(const ParamFlags& pf, const PointFlags& xf, bool as_json, std::ostream& out) {
    const Parameters P = pf.resolve();
    const InputPoint x = xf.resolve();
    const double ek = elasticity_k(P, x);
    const double el = elasticity_l(P, x);
    double sub = std::numeric_limits<double>::quiet_NaN();
    bool degenerate = false;
    std::string sub_note;
    try {
        const SubstitutionElasticity se = substitution_elasticity(P, x);
        sub = se.value;
        degenerate = se.degenerate_direction;
    } catch (const ZeroMarginalProduct& e) {
        sub_note = e.what();
        degenerate = true;
    }
    ordered_json payload = point_payload(P, x);
    payload["elasticity_k"] = ek;
    payload["elasticity_l"] = el;
    payload["substitution_elasticity"] = sub;
    payload["degenerate_direction"] = degenerate;
    std::string human = "elasticity_k " + format_double(ek) + "\nelasticity_l " +
                        format_double(el) + "\nsubstitution_elasticity " + format_double(sub);
    if (degenerate) human += sub_note.empty() ? " (degenerate direction)" : " (" + sub_note + ")";
    human += "\n";
    emit_report(out, as_json, "elasticity", payload, human);
    return 0;
}

int cmd_hessian(const ParamFlags& pf, const PointFlags& xf, bool as_json, std::ostream& out) {
    const Parameters P = pf.resolve();
    const InputPoint x = xf.resolve();
    const Hessian2 H = hessian(P, x);
    ordered_json payload = point_payload(P, x);
    payload["hkk"] = H.hkk;
    payload["hkl"] = H.hkl;
    payload["hlk"] = H.hlk;
    payload["hll"] = H.hll;
    payload["eig1"] = H.eig1;
    payload["eig2"] = H.eig2;
    std::string human;
    human += "hkk " + format_double(H.hkk) + "\n";
    human += "hkl " + format_double(H.hkl) + "\n";
    human += "hlk " + format_double(H.hlk) + "\n";
    human += "hll " + format_double(H.hll) + "\n";
    human += "eig1 " + format_double(H.eig1) + "\n";
    human += "eig2 " + format_double(H.eig2) + "\n";
    emit_report(out, as_json, "hessian", payload, human);
    return 0;
}

int cmd_reduce(const ParamFlags& pf, const PointFlags& xf, double tol, bool as_json,
               std::ostream& out) {
    const Parameters P = pf.resolve();
    const InputPoint x = xf.resolve();
    const SpecialCaseForm form = classify_special_case(P, tol);
    ordered_json payload = point_payload(P, x);
    payload["tag"] = to_string(form.tag);
    payload["tolerance_used"] = form.tolerance_used;
    const double reduced = reduced_eval(P, x, form);
    const double general = eval_v(P, x).v;
    payload["reduced_value"] = reduced;
    payload["general_value"] = general;
    payload["abs_gap"] = std::fabs(reduced - general);
    std::string human;
    human += std::string("tag ") + to_string(form.tag) + "\n";
    human += "reduced_value " + format_double(reduced) + "\n";
    human += "general_value " + format_double(general) + "\n";
    human += "abs_gap " + format_double(std::fabs(reduced - general)) + "\n";
    emit_report(out, as_json, "reduction", payload, human);
    return 0;
}

int cmd_audit(const ParamFlags& pf, const PointFlags& xf, bool as_json, std::ostream& out) {
    const Parameters P = pf.resolve();
    const InputPoint x = xf.resolve();
    const FormulaAudit audit = audit_formulas(P, x);
    const ordered_json payload = audit_payload(P, x, audit);
    std::string human;
    for (const FormulaCheck& c : audit.checks) {
        human += c.id;
        if (!c.defined) {
            human += "  closed_form undefined";
            if (!c.note.empty()) human += " (" + c.note + ")";
            human += "\n";
            continue;
        }
        human += "  closed_form " + format_double(c.closed_form_value);
        human += "  computed " + format_double(c.computed_value);
        human += "  abs_deviation " + format_double(c.abs_deviation) + "\n";
    }
    emit_report(out, as_json, "audit", payload, human);
    return 0;
}

int cmd_diagnose(const ParamFlags& pf, const ScanConfig& cfg, bool as_json, std::ostream& out) {
    const Parameters P = pf.resolve();
    const DiagnosticsReport report = run_all(P, cfg);
    const ordered_json payload = diagnostics_payload(P, cfg, report);
    std::string human;
    human += "positivity checked " + std::to_string(report.positivity.checked) + ", violations " +
             std::to_string(report.positivity.violations) + "\n";
    human += "homogeneity degree [" + format_double(report.homogeneity.degree_min) + ", " +
             format_double(report.homogeneity.degree_max) + "], is_homogeneous " +
             (report.homogeneity.is_homogeneous ? "true" : "false") + ", claimed_degree_one " +
             (report.homogeneity.claimed_degree_one ? "true" : "false") + "\n";
    human += "concavity checked " + std::to_string(report.concavity.points_checked) +
             ", negative_semidefinite " +
             std::to_string(report.concavity.negative_semidefinite_count) + ", max_eig " +
             format_double(report.concavity.max_eig_over_region) + "\n";
    human += "monotonicity share dV/dK>0 " +
             format_double(report.monotonicity.share_dVdK_positive) + ", share dV/dL>0 " +
             format_double(report.monotonicity.share_dVdL_positive) + "\n";
    human += "euler_identity_max_abs_err " + format_double(report.euler_identity_max_abs_err) +
             "\n";
    emit_report(out, as_json, "diagnostics", payload, human);
    return 0;
}

int cmd_synth(const ParamFlags& pf, const SynthSpec& partial, const std::string& out_path,
              std::ostream& out) {
    SynthSpec spec = partial;
    spec.true_params = pf.resolve();
    const Panel panel = synth_panel(spec);
    const std::string csv = write_panel_csv(panel);
    if (out_path.empty()) {
        out << csv;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw InvalidParameter("cannot open output file '" + out_path + "'");
        f << csv;
    }
    return 0;
}

std::vector<Parameters> load_user_starts(const std::string& path, bool strict) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("cannot open user-start file '" + path + "'");
    nlohmann::json j = nlohmann::json::parse(in);
    auto one = [strict](const nlohmann::json& obj) {
        return make_parameters(obj.at("A").get<double>(), obj.at("sigma").get<double>(),
                               obj.at("delta").get<double>(), obj.at("p").get<double>(),
                               obj.at("q").get<double>(), strict);
    };
    std::vector<Parameters> starts;
    if (j.is_array())
        for (const auto& obj : j) starts.push_back(one(obj));
    else
        starts.push_back(one(j));
    return starts;
}

std::string fit_human(const FitResult& r) {
    auto opt = [](bool defined, double v) { return defined ? format_double(v) : "undefined"; };
    std::string human;
    human += "R-squared                     " + opt(r.r_squared_defined, r.r_squared) + "\n";
    human += "StdError                      " + opt(r.std_error_defined, r.std_error) + "\n";
    human += "Elasticity of Substitution    " +
             opt(r.substitution_elasticity_defined, r.substitution_elasticity) + "\n";
    human += "delta                         " + format_double(r.params.delta) + "\n";
    human += "sigma                         " + format_double(r.params.sigma) + "\n";
    human += "p                             " + format_double(r.params.p) + "\n";
    human += "q                             " + format_double(r.params.q) + "\n";
    human += "A                             " + format_double(r.params.A) + "\n";
    human += "RSS                           " + format_double(r.rss) + "\n";
    human += std::string("Convergence                   ") +
             (r.converged ? "Achieved" : "Not achieved") + "\n";
    return human;
}

int cmd_fit(const std::string& input, const std::string& industry, int starts, std::uint64_t seed,
            int max_iters, const std::string& user_start_path, bool as_json,
            const std::string& out_path, std::istream& stdin_stream, std::ostream& out) {
    std::string csv;
    if (input == "-") {
        std::ostringstream buf;
        buf << stdin_stream.rdbuf();
        csv = buf.str();
    } else {
        std::ifstream f(input, std::ios::binary);
        if (!f) throw InvalidParameter("cannot open input file '" + input + "'");
        std::ostringstream buf;
        buf << f.rdbuf();
        csv = buf.str();
    }
    Panel panel = parse_panel_csv(csv);
    if (!industry.empty()) {
        Panel filtered;
        filtered.source_label = panel.source_label;
        for (const Observation& obs : panel.observations)
            if (obs.industry_code == industry) filtered.observations.push_back(obs);
        panel = std::move(filtered);
    }

    const bool strict = strict_mode_enabled();
    FitConfig cfg;
    cfg.n_starts = starts;
    cfg.seed = seed;
    cfg.max_iters_per_start = max_iters;
    if (strict) {
        cfg.bounds.sigma = Interval{0.0, 1.0};
        cfg.bounds.delta = Interval{0.0, 1.0};
    }
    if (!user_start_path.empty()) cfg.user_starts = load_user_starts(user_start_path, strict);

    const FitResult result = fit(panel, cfg);

    std::string code = industry;
    if (code.empty()) {
        for (const Observation& obs : panel.observations) {
            if (code.empty())
                code = obs.industry_code;
            else if (code != obs.industry_code) {
                code = "all";
                break;
            }
        }
    }

    const ordered_json payload = fit_payload(fit_report_values(result, code, seed));
    const std::string rendered_json = write_report_json(ReportDocument{"fit", payload});
    if (!out_path.empty()) {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw InvalidParameter("cannot open output file '" + out_path + "'");
        f << rendered_json;
    }
    out << (as_json ? rendered_json : fit_human(result));
    return result.converged ? 0 : 3;
}

}  // namespace

CommandOutcome run(const std::vector<std::string>& argv, std::istream& stdin_stream) {
    CommandOutcome outcome;
    std::ostringstream out;
    std::ostringstream err;

    CLI::App app{"nested production function toolkit"};
    app.require_subcommand(1);

    // eval | grad | elasticity | hessian | reduce | audit
    struct PointCmd {
        CLI::App* cmd = nullptr;
        ParamFlags params;
        PointFlags point;
        bool json = false;
    };
    auto make_point_cmd = [&](const char* name, const char* desc) {
        PointCmd pc;
        pc.cmd = app.add_subcommand(name, desc);
        pc.params.attach(pc.cmd);
        pc.point.attach(pc.cmd);
        pc.cmd->add_flag("--json", pc.json, "emit one JSON report document");
        return pc;
    };
    PointCmd eval_cmd = make_point_cmd("eval", "evaluate V(K, L) and its breakdown");
    PointCmd grad_cmd = make_point_cmd("grad", "analytic marginal products");
    PointCmd elas_cmd = make_point_cmd("elasticity",
                                       "output elasticities and substitution elasticity");
    PointCmd hess_cmd = make_point_cmd("hessian", "finite-difference Hessian and eigenvalues");
    PointCmd reduce_cmd = make_point_cmd("reduce", "classify special case and evaluate reduction");
    double reduce_tol = 1e-9;
    reduce_cmd.cmd->add_option("--tol", reduce_tol, "classification tolerance, default 1e-9");
    PointCmd audit_cmd =
        make_point_cmd("audit", "deviation of quoted closed forms from computed values");

    // diagnose
    CLI::App* diag = app.add_subcommand("diagnose", "property scans over a region");
    ParamFlags diag_params;
    diag_params.attach(diag);
    ScanConfig scan;
    bool diag_json = false;
    bool diag_linear = false;
    diag->add_option("--kmin", scan.k_range.lo, "K lower bound")->required();
    diag->add_option("--kmax", scan.k_range.hi, "K upper bound")->required();
    diag->add_option("--lmin", scan.l_range.lo, "L lower bound")->required();
    diag->add_option("--lmax", scan.l_range.hi, "L upper bound")->required();
    diag->add_option("--grid", scan.grid, "grid points per axis (>= 2)")->required();
    diag->add_option("--samples", scan.samples, "random draws for the positivity scan")
        ->required();
    diag->add_option("--seed", scan.seed, "seed for the counter generator")->required();
    diag->add_option("--max-budget", scan.max_budget, "scan budget, default 10^7");
    diag->add_flag("--linear", diag_linear, "linear spacing instead of log");
    diag->add_flag("--json", diag_json, "emit one JSON report document");

    // synth
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic panel CSV");
    ParamFlags synth_params;
    synth_params.attach(synth);
    SynthSpec synth_spec;
    std::string synth_out;
    synth->add_option("--n", synth_spec.n, "number of rows (>= 1)")->required();
    synth->add_option("--noise", synth_spec.noise_sd, "multiplicative lognormal sigma (>= 0)")
        ->required();
    synth->add_option("--seed", synth_spec.seed, "seed for the counter generator")->required();
    synth->add_option("--kmin", synth_spec.k_range.lo, "K lower bound, default 0.5");
    synth->add_option("--kmax", synth_spec.k_range.hi, "K upper bound, default 10");
    synth->add_option("--lmin", synth_spec.l_range.lo, "L lower bound, default 0.5");
    synth->add_option("--lmax", synth_spec.l_range.hi, "L upper bound, default 10");
    synth->add_option("--out", synth_out, "write the CSV here instead of stdout");

    // fit
    CLI::App* fit_cmd = app.add_subcommand("fit", "multistart nonlinear least squares");
    std::string fit_input, fit_industry, fit_user_start, fit_out;
    int fit_starts = 16;
    int fit_max_iters = 2000;
    std::uint64_t fit_seed = 0;
    bool fit_json = false;
    fit_cmd->add_option("--input", fit_input, "panel CSV path, or - for stdin")->required();
    fit_cmd->add_option("--industry", fit_industry, "keep only rows with this industry_code");
    fit_cmd->add_option("--starts", fit_starts, "Latin-hypercube starts, default 16");
    fit_cmd->add_option("--seed", fit_seed, "seed for start generation")->required();
    fit_cmd->add_option("--max-iters", fit_max_iters, "iteration cap per start, default 2000");
    fit_cmd->add_option("--user-start", fit_user_start,
                        "JSON file with one {A, sigma, delta, p, q} object or an array of them");
    fit_cmd->add_option("--out", fit_out, "also write the JSON report here");
    fit_cmd->add_flag("--json", fit_json, "emit one JSON report document");

    try {
        std::vector<std::string> args(argv.rbegin(), argv.rend());
        app.parse(args);

        if (*eval_cmd.cmd)
            outcome.exit_code = cmd_eval(eval_cmd.params, eval_cmd.point, eval_cmd.json, out);
        else if (*grad_cmd.cmd)
            outcome.exit_code = cmd_grad(grad_cmd.params, grad_cmd.point, grad_cmd.json, out);
        else if (*elas_cmd.cmd)
            outcome.exit_code = cmd_elasticity(elas_cmd.params, elas_cmd.point, elas_cmd.json, out);
        else if (*hess_cmd.cmd)
            outcome.exit_code = cmd_hessian(hess_cmd.params, hess_cmd.point, hess_cmd.json, out);
        else if (*reduce_cmd.cmd)
            outcome.exit_code =
                cmd_reduce(reduce_cmd.params, reduce_cmd.point, reduce_tol, reduce_cmd.json, out);
        else if (*audit_cmd.cmd)
            outcome.exit_code = cmd_audit(audit_cmd.params, audit_cmd.point, audit_cmd.json, out);
        else if (*diag) {
            scan.log_spacing = !diag_linear;
            outcome.exit_code = cmd_diagnose(diag_params, scan, diag_json, out);
        } else if (*synth) {
            outcome.exit_code = cmd_synth(synth_params, synth_spec, synth_out, out);
        } else if (*fit_cmd) {
            outcome.exit_code =
                cmd_fit(fit_input, fit_industry, fit_starts, fit_seed, fit_max_iters,
                        fit_user_start, fit_json, fit_out, stdin_stream, out);
        }
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        outcome.exit_code = 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        err << "run with --help for the subcommand grammar\n";
        outcome.exit_code = 2;
    } catch (const InvalidParameter& e) {
        err << "invalid input: " << e.what() << "\n";
        outcome.exit_code = 2;
    } catch (const HeaderMismatch& e) {
        err << "invalid input: " << e.what() << "\n";
        outcome.exit_code = 2;
    } catch (const RowParseError& e) {
        err << "invalid input: " << e.what() << "\n";
        outcome.exit_code = 2;
    } catch (const NonPositiveValue& e) {
        err << "invalid input: " << e.what() << "\n";
        outcome.exit_code = 2;
    } catch (const TooFewObservations& e) {
        err << "invalid input: " << e.what() << "\n";
        outcome.exit_code = 2;
    } catch (const ScanBudgetExceeded& e) {
        err << "invalid input: " << e.what() << "\n";
        outcome.exit_code = 2;
    } catch (const nlohmann::json::exception& e) {
        err << "invalid input: " << e.what() << "\n";
        outcome.exit_code = 2;
    } catch (const NumericalBreakdown& e) {
        err << "numerical breakdown: " << e.what() << "\n";
        outcome.exit_code = 5;
    } catch (const Error& e) {
        // DomainError, NonPositiveBracket, ZeroMarginalProduct, FormMismatch,
        // UnsatisfiableRegion, AllStartsFailed
        err << "domain error: " << e.what() << "\n";
        outcome.exit_code = 4;
    }

    outcome.stdout_payload = out.str();
    outcome.stderr_diagnostics = err.str();
    return outcome;
}

}  // namespace nestfn::cli
