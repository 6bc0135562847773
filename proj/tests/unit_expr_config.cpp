#include <doctest.h>

#include <cmath>

#include "clk/errors.hpp"
#include "clk/expr.hpp"
#include "clk/run_config.hpp"

using namespace clk;

TEST_CASE("expression grammar evaluates the documented forms") {
    CPoint z{{0.5, -0.25}, {1.5, 2.0}};
    CHECK(Expr::parse("z1", 2).eval(z) == z[0]);
    CHECK(Expr::parse("x1", 2).eval(z) == Complex(0.5));
    CHECK(Expr::parse("y2", 2).eval(z) == Complex(2.0));
    CHECK(Expr::parse("conj(z1)", 2).eval(z) == std::conj(z[0]));
    CHECK(Expr::parse("abs2(z2)", 2).eval(z) == Complex(abs2(z[1])));
    CHECK(Expr::parse("re(z1) + i*im(z1)", 2).eval(z) == z[0]);
    CHECK(Expr::parse("2 + 3*i", 2).eval(z) == Complex(2.0, 3.0));
    CHECK(Expr::parse("-z1*z2 + 1", 2).eval(z) == -z[0] * z[1] + 1.0);
    CHECK(Expr::parse("(z1 + z2)/2", 2).eval(z) == (z[0] + z[1]) / 2.0);
    CHECK(std::abs(Expr::parse("abs2(z1 - 1)^0.25", 2).eval(z) -
                   std::pow(abs2(z[0] - Complex(1.0)), 0.25)) < 1e-14);
    // right-associative power with constant exponents
    CHECK(std::abs(Expr::parse("2^2^0.5", 2).eval(z) - std::pow(2.0, std::sqrt(2.0))) < 1e-12);
}

TEST_CASE("expression errors are structured") {
    CHECK_THROWS_AS(Expr::parse("z3", 2), ConfigError);
    CHECK_THROWS_AS(Expr::parse("foo(z1)", 2), ConfigError);
    CHECK_THROWS_AS(Expr::parse("z1 +", 2), ConfigError);
    CHECK_THROWS_AS(Expr::parse("z1 ^ z2", 2), ConfigError);  // non-constant exponent
    CHECK_THROWS_AS(Expr::parse("z1 ^ (2*i)", 2), ConfigError);
    CHECK_THROWS_AS(Expr::parse("(z1", 2), ConfigError);
}

TEST_CASE("expression form fields fill coefficients by multi-index") {
    FormField f = expression_form_field(2, 1, {{"1", "z2"}, {"2", "0"}});
    CPoint z{{0.2, 0.1}, {0.6, -0.4}};
    FormValue v = f.eval(z);
    CHECK(v[0] == z[1]);
    CHECK(v[1] == Complex(0.0));

    FormField g = expression_form_field(2, 2, {{"1,2", "x1"}});
    CHECK(g.eval(z)[0] == Complex(0.2));

    FormField s = expression_form_field(2, 0, {{"", "z1*z2"}});
    CHECK(s.eval(z)[0] == z[0] * z[1]);

    CHECK_THROWS_AS(expression_form_field(2, 1, {{"3", "z1"}}), ConfigError);
    CHECK_THROWS_AS(expression_form_field(2, 1, {{"1,2", "z1"}}), ConfigError);
    CHECK_THROWS_AS(expression_form_field(2, 3, {{"1", "z1"}}), DegreeError);
}

TEST_CASE("experiment config round-trips through JSON") {
    std::string text = R"({
      "dimension": 2,
      "domain": {"kind": "ball", "radius": 1.0},
      "data": {"q": 1, "coefficients": {"1": "z2", "2": "0"}},
      "operator": {"tag": "T", "q": 1},
      "resolutions": {"boundary_n": 16, "volume_n": 12, "exclusion_radius": 0.2, "fd_step": 0.001},
      "probes": {"count": 5, "seed": 42},
      "output_dir": "out"
    })";
    ExperimentConfig cfg = ExperimentConfig::from_json_text(text);
    CHECK(cfg.dimension == 2);
    CHECK(cfg.domain.kind == DomainSpec::Kind::Ball);
    CHECK(cfg.data.q == 1);
    CHECK(cfg.op.tag == "T");
    CHECK(cfg.resolutions.boundary_n == 16);
    CHECK(cfg.probes.seed == 42);
    // the echo embeds everything needed to reproduce the run
    ExperimentConfig back = ExperimentConfig::from_json_text(cfg.echo_json());
    CHECK(back.resolutions.volume_n == 12);
    CHECK(back.data.coefficients.at("1") == "z2");
}

TEST_CASE("config validation errors") {
    CHECK_THROWS_AS(ExperimentConfig::from_json_text("not json"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"dimension": 0})"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(
                        R"({"dimension": 1, "resolutions": {"boundary_n": -2}})"),
                    ConfigError);
    // power domain with an exponent at the forbidden value m = 1
    std::string bad = R"({
      "dimension": 1,
      "domain": {"kind": "power", "exponents": [1.0, 2.0], "level": 1.0}
    })";
    ExperimentConfig cfg = ExperimentConfig::from_json_text(bad);
    CHECK_THROWS_AS(make_domain(cfg.domain), ConfigError);
}

TEST_CASE("run reports aggregate pass/fail") {
    RunReport rep;
    rep.command = "verify";
    rep.fingerprint = version_fingerprint();
    rep.config_echo = "{}";
    rep.add("alpha", true, 0.5, 1.0);
    CHECK(rep.all_passed());
    rep.add("beta", false, 2.0, 1.0, "exceeded");
    CHECK_FALSE(rep.all_passed());
    rep.skip("gamma", "not applicable");
    std::string js = rep.to_json();
    CHECK(js.find("\"alpha\"") != std::string::npos);
    CHECK(js.find("\"fail\"") != std::string::npos);
    CHECK(js.find("all_passed") != std::string::npos);
}

TEST_CASE("probe sampler stays strictly interior and is deterministic") {
    DomainSpec s;
    s.kind = DomainSpec::Kind::Ball;
    s.n = 2;
    s.radius = 1.0;
    auto dom = make_domain(s);
    auto a = sample_probes(*dom, 20, 9);
    auto b = sample_probes(*dom, 20, 9);
    REQUIRE(a.size() == 20);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(dom->r()->value(a[i]) < 0.0);
        CHECK(std::sqrt(norm2sq(a[i])) <= 0.75 + 1e-12);
        for (int j = 0; j < 2; ++j) CHECK(a[i][j] == b[i][j]);
    }
}
