#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "nestfn/audit.hpp"
#include "nestfn/cli.hpp"
#include "nestfn/data_io.hpp"
#include "nestfn/diagnostics.hpp"
#include "nestfn/estimation.hpp"
#include "nestfn/model.hpp"
#include "nestfn/special_cases.hpp"

namespace py = pybind11;
using namespace nestfn;

namespace {

std::string params_repr(const Parameters& p) {
    std::ostringstream os;
    os << "Parameters(A=" << format_double(p.A) << ", sigma=" << format_double(p.sigma)
       << ", delta=" << format_double(p.delta) << ", p=" << format_double(p.p)
       << ", q=" << format_double(p.q) << ")";
    return os.str();
}

}  // namespace

PYBIND11_MODULE(nestfn, m) {
    m.doc() = "nested production function toolkit: evaluation, diagnostics, estimation";

    // Translators run newest-first, so the base class registers first and the
    // leaf classes after it.
    py::register_exception<Error>(m, "NestfnError", PyExc_RuntimeError);
    py::register_exception<InvalidParameter>(m, "InvalidParameterError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NonPositiveBracket>(m, "NonPositiveBracketError", PyExc_ArithmeticError);
    py::register_exception<ZeroMarginalProduct>(m, "ZeroMarginalProductError",
                                                PyExc_ArithmeticError);
    py::register_exception<FormMismatch>(m, "FormMismatchError", PyExc_ValueError);
    py::register_exception<NumericalBreakdown>(m, "NumericalBreakdownError",
                                               PyExc_ArithmeticError);
    py::register_exception<TooFewObservations>(m, "TooFewObservationsError", PyExc_ValueError);
    py::register_exception<AllStartsFailed>(m, "AllStartsFailedError", PyExc_ArithmeticError);
    py::register_exception<UnsatisfiableRegion>(m, "UnsatisfiableRegionError",
                                                PyExc_ArithmeticError);

    py::class_<Parameters>(m, "Parameters")
        .def(py::init([](double A, double sigma, double delta, double p, double q, bool strict) {
                 return make_parameters(A, sigma, delta, p, q, strict);
             }),
             py::arg("A"), py::arg("sigma"), py::arg("delta"), py::arg("p"), py::arg("q"),
             py::arg("strict") = false)
        .def_readonly("A", &Parameters::A)
        .def_readonly("sigma", &Parameters::sigma)
        .def_readonly("delta", &Parameters::delta)
        .def_readonly("p", &Parameters::p)
        .def_readonly("q", &Parameters::q)
        .def("__repr__", &params_repr);

    py::class_<InputPoint>(m, "InputPoint")
        .def(py::init([](double K, double L) { return make_input(K, L); }), py::arg("K"),
             py::arg("L"))
        .def_readonly("K", &InputPoint::K)
        .def_readonly("L", &InputPoint::L);

    py::class_<EvalBreakdown>(m, "EvalBreakdown")
        .def_readonly("h_value", &EvalBreakdown::h_value)
        .def_readonly("ratio_term", &EvalBreakdown::ratio_term)
        .def_readonly("bracket", &EvalBreakdown::bracket)
        .def_readonly("v", &EvalBreakdown::v);

    py::class_<Gradient>(m, "Gradient")
        .def_readonly("dV_dK", &Gradient::dV_dK)
        .def_readonly("dV_dL", &Gradient::dV_dL);

    py::class_<Hessian2>(m, "Hessian2")
        .def_readonly("hkk", &Hessian2::hkk)
        .def_readonly("hkl", &Hessian2::hkl)
        .def_readonly("hlk", &Hessian2::hlk)
        .def_readonly("hll", &Hessian2::hll)
        .def_readonly("eig1", &Hessian2::eig1)
        .def_readonly("eig2", &Hessian2::eig2);

    py::class_<SubstitutionElasticity>(m, "SubstitutionElasticity")
        .def_readonly("value", &SubstitutionElasticity::value)
        .def_readonly("degenerate_direction", &SubstitutionElasticity::degenerate_direction);

    py::class_<SpecialCaseForm>(m, "SpecialCaseForm")
        .def_property_readonly("tag",
                               [](const SpecialCaseForm& f) { return to_string(f.tag); })
        .def_readonly("tolerance_used", &SpecialCaseForm::tolerance_used);

    py::class_<FormulaCheck>(m, "FormulaCheck")
        .def_readonly("id", &FormulaCheck::id)
        .def_readonly("closed_form_value", &FormulaCheck::closed_form_value)
        .def_readonly("computed_value", &FormulaCheck::computed_value)
        .def_readonly("abs_deviation", &FormulaCheck::abs_deviation)
        .def_readonly("defined", &FormulaCheck::defined)
        .def_readonly("note", &FormulaCheck::note);

    m.def("eval_v", &eval_v, py::arg("params"), py::arg("x"));
    m.def("eval_f", &eval_f, py::arg("params"), py::arg("x"));
    m.def("gradient", &gradient, py::arg("params"), py::arg("x"));
    m.def("elasticity_k", &elasticity_k, py::arg("params"), py::arg("x"));
    m.def("elasticity_l", &elasticity_l, py::arg("params"), py::arg("x"));
    m.def("substitution_elasticity", &substitution_elasticity, py::arg("params"), py::arg("x"));
    m.def("hessian", &hessian, py::arg("params"), py::arg("x"));
    m.def("classify_special_case", &classify_special_case, py::arg("params"),
          py::arg("tol") = 1e-9);
    m.def("reduced_eval", &reduced_eval, py::arg("params"), py::arg("x"), py::arg("form"));
    m.def(
        "audit_formulas",
        [](const Parameters& p, const InputPoint& x) { return audit_formulas(p, x).checks; },
        py::arg("params"), py::arg("x"));
    m.def("homogeneity_degree", &homogeneity_degree, py::arg("params"), py::arg("x"));

    py::class_<ScanConfig>(m, "ScanConfig")
        .def(py::init([](double kmin, double kmax, double lmin, double lmax, int grid,
                         long long samples, std::uint64_t seed, bool log_spacing) {
                 ScanConfig cfg;
                 cfg.k_range = Interval{kmin, kmax};
                 cfg.l_range = Interval{lmin, lmax};
                 cfg.grid = grid;
                 cfg.samples = samples;
                 cfg.seed = seed;
                 cfg.log_spacing = log_spacing;
                 validate_scan_config(cfg);
                 return cfg;
             }),
             py::arg("kmin") = 0.5, py::arg("kmax") = 10.0, py::arg("lmin") = 0.5,
             py::arg("lmax") = 10.0, py::arg("grid") = 8, py::arg("samples") = 10000,
             py::arg("seed") = 0, py::arg("log_spacing") = true);

    m.def(
        "run_diagnostics",
        [](const Parameters& params, const ScanConfig& cfg) {
            const DiagnosticsReport report = run_all(params, cfg);
            return write_report_json(
                ReportDocument{"diagnostics", diagnostics_payload(params, cfg, report)});
        },
        py::arg("params"), py::arg("cfg"),
        "run every scan and return the diagnostics report as a JSON string");

    py::class_<Observation>(m, "Observation")
        .def(py::init<std::string, int, double, double, double>(), py::arg("industry_code"),
             py::arg("year"), py::arg("K"), py::arg("L"), py::arg("V"))
        .def_readonly("industry_code", &Observation::industry_code)
        .def_readonly("year", &Observation::year)
        .def_readonly("K", &Observation::K)
        .def_readonly("L", &Observation::L)
        .def_readonly("V", &Observation::V);

    py::class_<Panel>(m, "Panel")
        .def(py::init<>())
        .def_readonly("observations", &Panel::observations)
        .def_readonly("source_label", &Panel::source_label)
        .def("__len__", [](const Panel& p) { return p.size(); });

    m.def(
        "synth_panel",
        [](const Parameters& true_params, long long n, double noise_sd, std::uint64_t seed,
           double kmin, double kmax, double lmin, double lmax) {
            SynthSpec spec;
            spec.true_params = true_params;
            spec.n = n;
            spec.noise_sd = noise_sd;
            spec.seed = seed;
            spec.k_range = Interval{kmin, kmax};
            spec.l_range = Interval{lmin, lmax};
            return synth_panel(spec);
        },
        py::arg("true_params"), py::arg("n"), py::arg("noise_sd") = 0.0, py::arg("seed") = 0,
        py::arg("kmin") = 0.5, py::arg("kmax") = 10.0, py::arg("lmin") = 0.5,
        py::arg("lmax") = 10.0);

    m.def("parse_panel_csv", [](const std::string& s) { return parse_panel_csv(s); },
          py::arg("text"));
    m.def("write_panel_csv", &write_panel_csv, py::arg("panel"));

    py::class_<StartOutcome>(m, "StartOutcome")
        .def_readonly("index", &StartOutcome::index)
        .def_readonly("rss", &StartOutcome::rss)
        .def_readonly("converged", &StartOutcome::converged)
        .def_readonly("iterations", &StartOutcome::iterations)
        .def_readonly("failed", &StartOutcome::failed);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("params", &FitResult::params)
        .def_readonly("rss", &FitResult::rss)
        .def_readonly("r_squared", &FitResult::r_squared)
        .def_readonly("r_squared_defined", &FitResult::r_squared_defined)
        .def_readonly("std_error", &FitResult::std_error)
        .def_readonly("std_error_defined", &FitResult::std_error_defined)
        .def_readonly("substitution_elasticity", &FitResult::substitution_elasticity)
        .def_readonly("substitution_elasticity_defined",
                      &FitResult::substitution_elasticity_defined)
        .def_readonly("converged", &FitResult::converged)
        .def_readonly("n_iterations", &FitResult::n_iterations)
        .def_readonly("best_start_index", &FitResult::best_start_index)
        .def_readonly("n_obs", &FitResult::n_obs)
        .def_readonly("starts", &FitResult::starts);

    m.def(
        "fit",
        [](const Panel& panel, int n_starts, std::uint64_t seed, int max_iters,
           const std::vector<Parameters>& user_starts) {
            FitConfig cfg;
            cfg.n_starts = n_starts;
            cfg.seed = seed;
            cfg.max_iters_per_start = max_iters;
            cfg.user_starts = user_starts;
            return fit(panel, cfg);
        },
        py::arg("panel"), py::arg("n_starts") = 16, py::arg("seed") = 0,
        py::arg("max_iters") = 2000, py::arg("user_starts") = std::vector<Parameters>{});

    m.def(
        "fit_report_json",
        [](const FitResult& result, const std::string& industry_code, std::uint64_t seed) {
            return write_report_json(
                ReportDocument{"fit", fit_payload(fit_report_values(result, industry_code, seed))});
        },
        py::arg("result"), py::arg("industry_code"), py::arg("seed"));

    m.def(
        "run_cli",
        [](const std::vector<std::string>& argv, const std::string& stdin_text) {
            std::istringstream in(stdin_text);
            const cli::CommandOutcome o = cli::run(argv, in);
            return py::make_tuple(o.exit_code, o.stdout_payload, o.stderr_diagnostics);
        },
        py::arg("argv"), py::arg("stdin_text") = std::string{},
        "drive the CLI in-process; returns (exit_code, stdout, stderr)");
}
