#include <doctest.h>

#include <string>

#include "bergman/error.hpp"
#include "bergman/expression.hpp"
#include "bergman/scenario.hpp"

using namespace bergman;

namespace {

// Message of the CONFIG_INVALID error raised by parsing `text`.
std::string parse_error(const std::string& text) {
  try {
    (void)parse_scenario(text, "case.json");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) return e.what();
    return std::string("wrong code: ") + e.what();
  }
  return "no error";
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

const char* kHilbert = R"({
  "name": "hilbert",
  "weight": {"kind": "standard_alpha", "alpha": 0},
  "measure": {"kind": "radial_power", "s": 1.5},
  "params": {"p": 2, "q": 2, "r": 1}
})";

}  // namespace

TEST_SUITE("expression") {
  TEST_CASE("arithmetic and precedence") {
    CHECK(Expression("1 + 2 * 3")(0.0, 1.0) == 7.0);
    CHECK(Expression("2 ^ 3 ^ 2")(0.0, 1.0) == 512.0);
    CHECK(Expression("-2 ^ 2")(0.0, 1.0) == -4.0);
    CHECK(Expression("(1 + 2) * 3")(0.0, 1.0) == 9.0);
    CHECK(Expression("pow(2, 10) / 4")(0.0, 1.0) == 256.0);
    CHECK(Expression("exp(log(3))")(0.0, 1.0) == doctest::Approx(3.0));
    CHECK(Expression("sqrt(abs(-16)) + cos(0) - sin(0)")(0.0, 1.0) == 5.0);
    CHECK(Expression("pi")(0.0, 1.0) == doctest::Approx(3.14159265358979));
    CHECK(Expression("1e-3 * 2")(0.0, 1.0) == doctest::Approx(0.002));
  }

  TEST_CASE("variables") {
    const Expression e("s * 10 + u");
    CHECK(e(0.25, 0.75) == 3.25);
    CHECK(Expression("r")(0.4, 0.6) == 0.4);
    // u is passed through, never recomputed from s.
    CHECK(Expression("u")(1.0, 1e-300) == 1e-300);
  }

  TEST_CASE("syntax errors") {
    for (const char* bad : {"", "1 +", "(1", "foo(2)", "x", "2 3", "pow(1)", "1 $ 2"}) {
      INFO(bad);
      CHECK_THROWS(Expression{bad});
    }
  }
}

TEST_SUITE("scenario") {
  TEST_CASE("valid scenario parses with defaults echoed") {
    const Scenario sc = parse_scenario(kHilbert, "h.json");
    CHECK(sc.name == "hilbert");
    CHECK(sc.params.p == 2.0);
    CHECK(sc.params.grid.j_max == 14);
    REQUIRE(sc.measure.has_value());
    CHECK(sc.measure->power().value() == 1.5);
    CHECK(sc.echo["grid"]["K"] == 2);
    CHECK(sc.echo["params"]["metric"] == "bergman");
  }

  TEST_CASE("errors carry file and line") {
    const std::string wrong_type = "{\n  \"weight\": {\"kind\": \"standard_alpha\", \"alpha\": 0},\n"
                                   "  \"measure\": {\"kind\": \"radial_power\",\n     \"s\": \"x\"}\n}";
    const auto msg = parse_error(wrong_type);
    CHECK(contains(msg, "case.json:4:"));
    CHECK(contains(msg, "/measure/s"));

    const auto unknown = parse_error("{\"weight\": {\"kind\": \"standard_alpha\", \"alpha\": 0},\n"
                                     "\"measure\": {\"kind\": \"atomic\", \"atoms\": [[0.3, 0, 1]]},\n"
                                     "\"bogus\": 1}");
    CHECK(contains(unknown, "case.json:3:"));
    CHECK(contains(unknown, "bogus"));

    CHECK(contains(parse_error("{\"measure\": {\"kind\": \"radial_power\", \"s\": 1}}"), "weight"));
    CHECK(contains(parse_error("{\n\"weight\": {\"kind\": \"standard_alpha\", \"alpha\": 0},\n  \"measure\": ]"),
                   "case.json:3: malformed JSON"));
    CHECK(contains(parse_error("{\"weight\": {\"kind\": \"flat\"}, \"measure\": {\"kind\": \"radial_power\", \"s\": 1}}"),
                   "unknown weight kind"));
    CHECK(contains(parse_error("{\"weight\": {\"kind\": \"standard_alpha\", \"alpha\": -2},"
                               " \"measure\": {\"kind\": \"radial_power\", \"s\": 1}}"),
                   "/weight"));
    CHECK(contains(parse_error("{\"weight\": {\"kind\": \"standard_alpha\", \"alpha\": 0},"
                               " \"measure\": {\"kind\": \"radial_power\", \"s\": 1}, \"grid\": {\"j_max\": 40}}"),
                   "/grid/j_max"));
    CHECK(contains(parse_error("{\"weight\": {\"kind\": \"standard_alpha\", \"alpha\": 0},"
                               " \"measure\": {\"kind\": \"atomic\", \"atoms\": [[1.5, 0, 1]]}}"),
                   "/measure/atoms/0"));
  }

  TEST_CASE("locator maps pointers to lines") {
    const JsonLocator loc("{\n\"a\": 1,\n\"b\": {\n  \"c\": [1,\n 2]\n}\n}");
    CHECK(loc.line("") == 1);
    CHECK(loc.line("/a") == 2);
    CHECK(loc.line("/b") == 3);
    CHECK(loc.line("/b/c") == 4);
    CHECK(loc.line("/b/c/1") == 5);
    CHECK(loc.line("/b/zzz") == 3);
  }

  TEST_CASE("weight and measure specs") {
    const auto w = parse_weight(Json::parse(R"j({"kind": "custom", "expr": "2*u*(2-u)"})j"));
    CHECK(w.omega_hat(0.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
    const auto mu = parse_measure(Json::parse(R"j({"kind": "weighted_area", "c": 2})j"), w);
    CHECK(mu.kind() == Measure::Kind::WeightedArea);
    const auto atoms = parse_measure(Json::parse(R"j({"kind": "atomic", "atoms": [[0.3, 0.0, 1.0], [0, 0.5, 2]]})j"), w);
    REQUIRE(atoms.atoms().size() == 2);
    CHECK(atoms.atoms()[1].mass == 2.0);
    const auto rad = parse_measure(Json::parse(R"j({"kind": "radial", "expr": "u^2"})j"), w);
    CHECK(rad.radial_density(0.5, 0.5) == doctest::Approx(0.25));
  }

  TEST_CASE("run reports are deterministic and decided") {
    const Scenario sc = parse_scenario(kHilbert, "h.json");
    const RunResult a = run_scenario(sc);
    const RunResult b = run_scenario(sc);
    CHECK(a.report.dump(2) == b.report.dump(2));
    CHECK(a.evidence_csv == b.evidence_csv);
    CHECK(a.exit_code == 0);
    CHECK(a.report["carleson"]["bounded"] == "yes");
    CHECK(a.report["summing"]["verdict"] == "summing");
    CHECK(a.report["invariants"]["chain_holds"] == true);
    CHECK(a.report["exit_status"] == "decided");
  }

  TEST_CASE("unsupported regimes are undecided, not errors") {
    const Scenario sc = parse_scenario(R"({
      "weight": {"kind": "standard_alpha", "alpha": 0},
      "measure": {"kind": "atomic", "atoms": [[0.3, 0.0, 1.0]]},
      "params": {"p": 1.2, "q": 3, "r": 1}
    })");
    const RunResult res = run_scenario(sc);
    CHECK(res.exit_code == 3);
    CHECK(res.report["summing"]["regime"] == "unsupported");
  }

  TEST_CASE("number formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678}) CHECK(std::stod(format_number(v)) == v);
  }
}
