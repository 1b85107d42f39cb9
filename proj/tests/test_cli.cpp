#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nestfn/cli.hpp"

using nestfn::cli::CommandOutcome;
using nestfn::cli::run;

namespace {

CommandOutcome run_cli(const std::vector<std::string>& argv, const std::string& stdin_text = "") {
    std::istringstream in(stdin_text);
    return run(argv, in);
}

std::string temp_path(const std::string& name) {
    return std::string("/tmp/nestfn_test_") + std::to_string(::getpid()) + "_" + name;
}

}  // namespace

TEST_CASE("eval prints the bare value") {
    const CommandOutcome o = run_cli({"eval", "--A", "3", "--sigma", "0.7", "--delta", "0.4",
                                      "--p", "0.5", "--q", "0.5", "--K", "1", "--L", "1"});
    CHECK(o.exit_code == 0);
    CHECK(o.stdout_payload == "3\n");
    CHECK(o.stderr_diagnostics.empty());
}

TEST_CASE("eval --json emits exactly one report document") {
    const CommandOutcome o = run_cli({"eval", "--A", "1", "--sigma", "0.5", "--delta", "0.5",
                                      "--p", "0.5", "--q", "0.5", "--K", "4", "--L", "1",
                                      "--json"});
    CHECK(o.exit_code == 0);
    const auto doc = nlohmann::json::parse(o.stdout_payload);
    CHECK(doc["kind"] == "eval");
    CHECK(doc["v"].get<double>() == doctest::Approx(144.0 / 121.0).epsilon(1e-13));
    CHECK(doc["schema_version"] == "1.0");
    // one line, one document
    CHECK(o.stdout_payload.find('\n') == o.stdout_payload.size() - 1);
}

TEST_CASE("domain errors exit 4 and name the offending input") {
    const CommandOutcome o = run_cli({"eval", "--A", "1", "--sigma", "0.5", "--delta", "0.5",
                                      "--p", "0.5", "--q", "0.5", "--K", "0", "--L", "1"});
    CHECK(o.exit_code == 4);
    CHECK(o.stdout_payload.empty());
    CHECK(o.stderr_diagnostics.find("K") != std::string::npos);
}

TEST_CASE("usage errors exit 2 with a hint") {
    const CommandOutcome o = run_cli({"eval", "--A", "1", "--nope", "3"});
    CHECK(o.exit_code == 2);
    CHECK_FALSE(o.stderr_diagnostics.empty());

    const CommandOutcome missing = run_cli({"eval", "--A", "1", "--sigma", "0.5"});
    CHECK(missing.exit_code == 2);

    const CommandOutcome no_sub = run_cli({});
    CHECK(no_sub.exit_code == 2);
}

TEST_CASE("parameter range violations exit 2") {
    const CommandOutcome o = run_cli({"eval", "--A", "1", "--sigma", "2.5", "--delta", "0.5",
                                      "--p", "0.5", "--q", "0.5"});
    CHECK(o.exit_code == 2);
    CHECK(o.stderr_diagnostics.find("sigma") != std::string::npos);
}

TEST_CASE("strict mode is driven by the environment variable") {
    ::setenv("NESTFN_STRICT", "1", 1);
    const CommandOutcome rejected = run_cli({"eval", "--A", "1", "--sigma", "1.5", "--delta",
                                             "0.5", "--p", "0.5", "--q", "0.5"});
    ::unsetenv("NESTFN_STRICT");
    CHECK(rejected.exit_code == 2);

    const CommandOutcome accepted = run_cli({"eval", "--A", "1", "--sigma", "1.5", "--delta",
                                             "0.5", "--p", "0.5", "--q", "0.5", "--K", "2",
                                             "--L", "2"});
    CHECK(accepted.exit_code == 0);
}

TEST_CASE("elasticity reports a degenerate substitution direction instead of failing") {
    // sigma = delta = 1: V = A/K, labor marginal product is zero.
    const CommandOutcome o = run_cli({"elasticity", "--A", "1", "--sigma", "1", "--delta", "1",
                                      "--p", "0.5", "--q", "0.5", "--K", "2", "--L", "3",
                                      "--json"});
    CHECK(o.exit_code == 0);
    const auto doc = nlohmann::json::parse(o.stdout_payload);
    CHECK(doc["elasticity_k"].get<double>() == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(doc["elasticity_l"].get<double>() == doctest::Approx(0.0));
    CHECK(doc["degenerate_direction"] == true);
    CHECK(doc["substitution_elasticity"].is_null());
    REQUIRE(doc.contains("nonfinite_fields"));
    CHECK(doc["nonfinite_fields"][0] == "substitution_elasticity");
}

TEST_CASE("reduce classifies and reports the gap") {
    const CommandOutcome o = run_cli({"reduce", "--A", "1", "--sigma", "0", "--delta", "0.5",
                                      "--p", "0.7", "--q", "0.5", "--K", "3", "--L", "2",
                                      "--json"});
    CHECK(o.exit_code == 0);
    const auto doc = nlohmann::json::parse(o.stdout_payload);
    CHECK(doc["tag"] == "SigmaZero");
    CHECK(doc["reduced_value"].get<double>() == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(doc["abs_gap"].get<double>() <= 1e-12);
}

TEST_CASE("audit subcommand reports the worked deviations") {
    const CommandOutcome o = run_cli({"audit", "--A", "1", "--sigma", "0.5", "--delta", "0.5",
                                      "--p", "0.5", "--q", "0.5", "--K", "4", "--L", "1",
                                      "--json"});
    CHECK(o.exit_code == 0);
    const auto doc = nlohmann::json::parse(o.stdout_payload);
    CHECK(doc["kind"] == "audit");
    CHECK(doc["checks"]["elasticity_l_closed_form"]["abs_deviation"].get<double>() ==
          doctest::Approx(0.8826).epsilon(1e-3));
    CHECK(doc["checks"]["elasticity_k_closed_form"]["defined"] == false);
}

TEST_CASE("diagnose reports non-homogeneity for the worked parameters") {
    const std::vector<std::string> argv = {
        "diagnose", "--A", "1",      "--sigma",   "0.5", "--delta", "0.5",  "--p",
        "0.5",      "--q", "0.5",    "--kmin",    "0.5", "--kmax",  "10",   "--lmin",
        "0.5",      "--lmax", "10",  "--grid",    "8",   "--samples", "10000", "--seed",
        "7",        "--json"};
    const CommandOutcome o = run_cli(argv);
    CHECK(o.exit_code == 0);
    const auto doc = nlohmann::json::parse(o.stdout_payload);
    CHECK(doc["kind"] == "diagnostics");
    CHECK(doc["homogeneity"]["is_homogeneous"] == false);
    CHECK(doc["homogeneity"]["claimed_degree_one"] == false);
    CHECK(doc["positivity"]["violations"] == 0);

    // Byte-identical stdout on repeat.
    const CommandOutcome again = run_cli(argv);
    CHECK(again.stdout_payload == o.stdout_payload);
}

TEST_CASE("synth then fit round trip through files") {
    const std::string panel_path = temp_path("panel.csv");
    const std::string start_path = temp_path("start.json");
    const std::string report_path = temp_path("report.json");

    const CommandOutcome synth = run_cli({"synth", "--A", "2", "--sigma", "0.8", "--delta", "0.6",
                                          "--p", "0.4", "--q", "0.7", "--n", "80", "--noise", "0",
                                          "--seed", "42", "--out", panel_path});
    REQUIRE(synth.exit_code == 0);
    CHECK(synth.stdout_payload.empty());

    {
        std::ofstream f(start_path);
        f << R"({"A": 2.0, "sigma": 0.8, "delta": 0.6, "p": 0.4, "q": 0.7})";
    }

    const CommandOutcome fitted =
        run_cli({"fit", "--input", panel_path, "--starts", "8", "--seed", "7", "--user-start",
                 start_path, "--json", "--out", report_path});
    CHECK(fitted.exit_code == 0);
    const auto doc = nlohmann::json::parse(fitted.stdout_payload);
    CHECK(doc["kind"] == "fit");
    CHECK(doc["rss"].get<double>() <= 1e-10);
    CHECK(doc["converged"] == true);
    CHECK(doc["industry_code"] == "000");
    CHECK(doc["seed"] == 7);

    // --out wrote the same document.
    std::ifstream f(report_path);
    std::stringstream buf;
    buf << f.rdbuf();
    CHECK(buf.str() == fitted.stdout_payload);

    // Human rendering carries the Achieved verdict.
    const CommandOutcome human = run_cli({"fit", "--input", panel_path, "--starts", "8", "--seed",
                                          "7", "--user-start", start_path});
    CHECK(human.exit_code == 0);
    CHECK(human.stdout_payload.find("Convergence") != std::string::npos);
    CHECK(human.stdout_payload.find("Achieved") != std::string::npos);

    // Pure multistart (no user start) also reaches the noiseless optimum.
    const CommandOutcome pure = run_cli(
        {"fit", "--input", panel_path, "--starts", "32", "--seed", "7", "--json"});
    CHECK(pure.exit_code == 0);
    const auto pure_doc = nlohmann::json::parse(pure.stdout_payload);
    CHECK(pure_doc["rss"].get<double>() <= 1e-10);

    std::remove(panel_path.c_str());
    std::remove(start_path.c_str());
    std::remove(report_path.c_str());
}

TEST_CASE("synth without --out streams csv; fit accepts stdin") {
    const CommandOutcome synth = run_cli({"synth", "--A", "2", "--sigma", "0.8", "--delta", "0.6",
                                          "--p", "0.4", "--q", "0.7", "--n", "40", "--noise",
                                          "0.05", "--seed", "3"});
    REQUIRE(synth.exit_code == 0);
    CHECK(synth.stdout_payload.rfind("industry_code,year,K,L,V\n", 0) == 0);

    const CommandOutcome fitted = run_cli(
        {"fit", "--input", "-", "--starts", "4", "--seed", "5", "--json"}, synth.stdout_payload);
    CHECK((fitted.exit_code == 0 || fitted.exit_code == 3));
    const auto doc = nlohmann::json::parse(fitted.stdout_payload);
    CHECK(doc["n_obs"] == 40);
}

TEST_CASE("unconverged fits exit 3 but still report") {
    const CommandOutcome synth = run_cli({"synth", "--A", "2", "--sigma", "0.8", "--delta", "0.6",
                                          "--p", "0.4", "--q", "0.7", "--n", "40", "--noise",
                                          "0.05", "--seed", "3"});
    REQUIRE(synth.exit_code == 0);
    const CommandOutcome fitted =
        run_cli({"fit", "--input", "-", "--starts", "6", "--seed", "5", "--max-iters", "3",
                 "--json"},
                synth.stdout_payload);
    CHECK(fitted.exit_code == 3);
    const auto doc = nlohmann::json::parse(fitted.stdout_payload);
    CHECK(doc["converged"] == false);

    // With too few starts every search can land infeasible: a domain error.
    const CommandOutcome all_failed =
        run_cli({"fit", "--input", "-", "--starts", "2", "--seed", "5", "--max-iters", "3"},
                synth.stdout_payload);
    CHECK(all_failed.exit_code == 4);
}

TEST_CASE("fit rejects unusable inputs with exit 2") {
    const CommandOutcome missing = run_cli({"fit", "--input", "/nonexistent.csv", "--seed", "1"});
    CHECK(missing.exit_code == 2);

    const CommandOutcome short_panel = run_cli(
        {"fit", "--input", "-", "--seed", "1"},
        "industry_code,year,K,L,V\n151,2010,1,1,1\n");
    CHECK(short_panel.exit_code == 2);

    const CommandOutcome bad_header =
        run_cli({"fit", "--input", "-", "--seed", "1"}, "bad,header\n");
    CHECK(bad_header.exit_code == 2);
}

TEST_CASE("industry filter selects matching rows") {
    const std::string csv =
        "industry_code,year,K,L,V\n"
        "151,2010,2,1,2\n151,2011,3,1,3\n151,2012,4,1,4\n151,2013,5,1,5\n"
        "151,2014,6,1,6\n151,2015,7,1,7\n"
        "251,2010,1,2,9\n";
    const CommandOutcome o = run_cli(
        {"fit", "--input", "-", "--industry", "151", "--starts", "6", "--seed", "2", "--json"},
        csv);
    CHECK((o.exit_code == 0 || o.exit_code == 3));
    const auto doc = nlohmann::json::parse(o.stdout_payload);
    CHECK(doc["industry_code"] == "151");
    CHECK(doc["n_obs"] == 6);
}

TEST_CASE("params file override with flag precedence") {
    const std::string params_path = temp_path("params.json");
    {
        std::ofstream f(params_path);
        f << R"({"A": 3.0, "sigma": 0.7, "delta": 0.4, "p": 0.5, "q": 0.5})";
    }
    const CommandOutcome file_only = run_cli({"eval", "--params", params_path});
    CHECK(file_only.exit_code == 0);
    CHECK(file_only.stdout_payload == "3\n");

    // Explicit flag beats the file.
    const CommandOutcome overridden = run_cli({"eval", "--params", params_path, "--A", "5"});
    CHECK(overridden.exit_code == 0);
    CHECK(overridden.stdout_payload == "5\n");
    std::remove(params_path.c_str());
}
