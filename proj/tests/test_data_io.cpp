#include <doctest.h>

#include <cmath>
#include <limits>

#include "nestfn/data_io.hpp"
#include "nestfn/rng.hpp"

using namespace nestfn;

TEST_CASE("counter generator matches the documented recipe") {
    // Frozen words computed by an independent implementation of the recipe.
    const CounterRng a(42);
    CHECK(a.word(0) == 13679457532755275413ull);
    CHECK(a.word(1) == 2949826092126892291ull);
    CHECK(a.word(2) == 5139283748462763858ull);
    CHECK(CounterRng(0).word(0) == 16294208416658607535ull);
    CHECK(CounterRng(7).word(123456789) == 12208133997311326809ull);
    CHECK(a.uniform(0) == doctest::Approx(0.7415648787718233).epsilon(1e-15));
    // Counter access is random access, order free.
    CHECK(a.word(1000) == a.word(1000));
}

TEST_CASE("csv parsing") {
    const Panel one = parse_panel_csv("industry_code,year,K,L,V\n151,2010,4.0,1.0,1.19\n");
    REQUIRE(one.size() == 1);
    CHECK(one.observations[0].industry_code == "151");
    CHECK(one.observations[0].year == 2010);
    CHECK(one.observations[0].K == 4.0);
    CHECK(one.observations[0].L == 1.0);
    CHECK(one.observations[0].V == 1.19);

    // Header only is a valid empty panel; CRLF and blank lines are tolerated.
    CHECK(parse_panel_csv("industry_code,year,K,L,V\n").empty());
    CHECK(parse_panel_csv("industry_code,year,K,L,V").empty());
    const Panel crlf =
        parse_panel_csv("industry_code,year,K,L,V\r\n151,2010,1,1,1\r\n\r\n251,2011,2,2,2\r\n");
    REQUIRE(crlf.size() == 2);
    CHECK(crlf.observations[1].industry_code == "251");

    CHECK_THROWS_AS(parse_panel_csv(""), HeaderMismatch);
    CHECK_THROWS_AS(parse_panel_csv("industry,year,K,L,V\n"), HeaderMismatch);

    try {
        parse_panel_csv("industry_code,year,K,L,V\n151,2010,-1,1,1\n");
        FAIL("expected NonPositiveValue");
    } catch (const NonPositiveValue& e) {
        CHECK(e.line == 2);
    }

    try {
        parse_panel_csv("industry_code,year,K,L,V\n151,2010,abc,1,1\n");
        FAIL("expected RowParseError");
    } catch (const RowParseError& e) {
        CHECK(e.line == 2);
        CHECK(e.column == 3);
    }

    try {
        parse_panel_csv("industry_code,year,K,L,V\n151,1850,1,1,1\n");
        FAIL("expected RowParseError");
    } catch (const RowParseError& e) {
        CHECK(e.column == 2);
    }

    CHECK_THROWS_AS(parse_panel_csv("industry_code,year,K,L,V\n151,2010,1,1\n"), RowParseError);
}

TEST_CASE("csv writing and round trip") {
    CHECK(write_panel_csv(Panel{}) == "industry_code,year,K,L,V\n");

    Panel one;
    one.observations = {{"151", 2010, 4.0, 1.0, 1.19}};
    CHECK(write_panel_csv(one) == "industry_code,year,K,L,V\n151,2010,4,1,1.19\n");

    // Bit-exact round trip over random rows.
    const CounterRng rng(31415);
    Panel random_panel;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const std::uint64_t c = 3 * i;
        random_panel.observations.push_back(
            {std::to_string(100 + i % 7), 2010 + static_cast<int>(i % 8),
             rng.log_uniform(c, 1e-6, 1e6), rng.log_uniform(c + 1, 1e-6, 1e6),
             rng.log_uniform(c + 2, 1e-6, 1e6)});
    }
    const Panel reparsed = parse_panel_csv(write_panel_csv(random_panel));
    REQUIRE(reparsed.size() == random_panel.size());
    for (std::size_t i = 0; i < reparsed.size(); ++i) {
        CHECK(reparsed.observations[i].industry_code ==
              random_panel.observations[i].industry_code);
        CHECK(reparsed.observations[i].year == random_panel.observations[i].year);
        CHECK(reparsed.observations[i].K == random_panel.observations[i].K);
        CHECK(reparsed.observations[i].L == random_panel.observations[i].L);
        CHECK(reparsed.observations[i].V == random_panel.observations[i].V);
    }
}

TEST_CASE("synthetic panels") {
    const Parameters truth = make_parameters(2, 0.8, 0.6, 0.4, 0.7);

    SynthSpec spec;
    spec.true_params = truth;
    spec.n = 200;
    spec.seed = 42;

    // Noiseless: exact self-consistency.
    const Panel clean = synth_panel(spec);
    REQUIRE(clean.size() == 200);
    for (const Observation& obs : clean.observations) {
        CHECK(obs.V == eval_v(truth, InputPoint{obs.K, obs.L}).v);
        CHECK(obs.K >= 0.5);
        CHECK(obs.K <= 10.0);
    }

    // Deterministic: double generation is identical.
    const Panel again = synth_panel(spec);
    CHECK(write_panel_csv(again) == write_panel_csv(clean));

    // Mean-one multiplicative noise keeps the V ratio near 1.
    spec.noise_sd = 0.05;
    spec.n = 500;
    const Panel noisy = synth_panel(spec);
    double ratio_sum = 0.0;
    for (const Observation& obs : noisy.observations)
        ratio_sum += obs.V / eval_v(truth, InputPoint{obs.K, obs.L}).v;
    const double mean_ratio = ratio_sum / 500.0;
    CHECK(mean_ratio > 0.98);
    CHECK(mean_ratio < 1.02);
}

TEST_CASE("synthetic panel failure modes") {
    SynthSpec spec;
    spec.true_params = make_parameters(1, 1.5, 0.5, 0.5, 0.5);
    spec.k_range = Interval{1e-6, 1e-6};
    spec.l_range = Interval{1.0, 1.0};
    spec.n = 3;
    CHECK_THROWS_AS(synth_panel(spec), UnsatisfiableRegion);

    SynthSpec bad;
    bad.true_params = make_parameters(1, 0.5, 0.5, 0.5, 0.5);
    bad.n = 0;
    CHECK_THROWS_AS(synth_panel(bad), InvalidParameter);
}

TEST_CASE("fit report payload has the exact key set in order") {
    FitReportValues v;
    v.industry_code = "151";
    v.r_squared = 0.99;
    v.std_error = 0.43;
    v.substitution_elasticity = 1.4;
    v.delta = 1.13;
    v.sigma = 0.94;
    v.rss = 0.30;
    v.converged = true;

    const ordered_json payload = fit_payload(v);
    const std::vector<std::string> expected = {
        "industry_code", "r_squared", "std_error", "substitution_elasticity", "delta", "sigma",
        "p", "q", "A", "rss", "converged", "n_obs", "n_iterations", "best_start_index", "seed",
        "schema_version"};
    std::vector<std::string> got;
    for (const auto& [key, value] : payload.items()) got.push_back(key);
    CHECK(got == expected);

    const std::string text = write_report_json({"fit", payload});
    CHECK(text.find("\"r_squared\":0.99") != std::string::npos);
    CHECK(text.find("\"std_error\":0.43") != std::string::npos);
    CHECK(text.find("\"substitution_elasticity\":1.4") != std::string::npos);
    CHECK(text.find("\"delta\":1.13") != std::string::npos);
    CHECK(text.find("\"sigma\":0.94") != std::string::npos);
    CHECK(text.find("\"rss\":0.3") != std::string::npos);
    CHECK(text.find("\"converged\":true") != std::string::npos);
    CHECK(text.find("\"p\":null") != std::string::npos);  // unpublished columns stay null
    CHECK(text.back() == '\n');
}

TEST_CASE("report json handles non-finite values with a sidecar field") {
    ordered_json payload;
    payload["a"] = 1.5;
    payload["b"] = std::numeric_limits<double>::quiet_NaN();
    payload["nested"] = ordered_json{{"c", std::numeric_limits<double>::infinity()}};
    const std::string text = write_report_json({"audit", payload});
    CHECK(text.find("\"b\":null") != std::string::npos);
    CHECK(text.find("\"c\":null") != std::string::npos);
    CHECK(text.find("\"nonfinite_fields\":[\"b\",\"nested.c\"]") != std::string::npos);

    // All-finite documents do not carry the sidecar.
    ordered_json clean;
    clean["a"] = 1.0;
    CHECK(write_report_json({"audit", clean}).find("nonfinite_fields") == std::string::npos);
}

TEST_CASE("report json round trip") {
    const CounterRng rng(8);
    ordered_json payload;
    payload["values"] = ordered_json::array();
    for (std::uint64_t i = 0; i < 40; ++i)
        payload["values"].push_back(rng.log_uniform(i, 1e-8, 1e8));
    payload["label"] = "fixture";
    payload["count"] = 40;

    const std::string text = write_report_json({"diagnostics", payload});
    const ReportDocument parsed = parse_report_json(text);
    CHECK(parsed.kind == "diagnostics");
    CHECK(parsed.schema_version == kSchemaVersion);
    for (std::uint64_t i = 0; i < 40; ++i)
        CHECK(parsed.payload["values"][i].get<double>() == payload["values"][i].get<double>());
    // Serialize-parse-serialize is a fixed point.
    ReportDocument doc2 = parsed;
    CHECK(write_report_json(doc2) == text);
}
