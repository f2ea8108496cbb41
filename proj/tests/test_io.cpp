#include <doctest.h>

#include <cmath>

#include "dpa/errors.hpp"
#include "dpa/report.hpp"
#include "dpa/scenario_io.hpp"

using namespace dpa;

namespace {

const char* kMinimalScenario = R"({
  "advertisers": [
    {
      "distribution": {"kind": "uniform", "lower": 0.0, "upper": 1.0},
      "conversion": {"kind": "constant", "level": 1.0},
      "price_domain": [0.0, 1.0]
    },
    {
      "distribution": {"kind": "truncated-exponential", "lower": 0.0,
                       "upper": 1.0, "alpha": 2.0},
      "conversion": {"kind": "exp-decay", "alpha": 0.5},
      "price_domain": [0.2, 1.0]
    }
  ],
  "mechanism": {"family": "vwm-rp"},
  "price_mode": {"mode": "fixed", "prices": [1.0, 0.8]},
  "samples": 500,
  "seed": 9
})";

}  // namespace

TEST_CASE("scenario parsing fills defaults and validates") {
  const ScenarioDoc doc = parse_scenario(kMinimalScenario, "test");
  CHECK(doc.scenario.advertisers.size() == 2);
  CHECK(doc.scenario.samples == 500);
  CHECK(doc.scenario.seed == 9);
  CHECK(doc.family == "vwm-rp");
  CHECK_FALSE(doc.broken);
  // default grid spans the union of domains with 2001 points
  CHECK(doc.scenario.price_grid.lower == 0.0);
  CHECK(doc.scenario.price_grid.upper == 1.0);
  CHECK(doc.scenario.price_grid.points == 2001);
  CHECK(doc.config["advertisers"][0]["regular"] == true);
  CHECK(doc.config["mechanism"]["family"] == "vwm-rp");
  CHECK(doc.config["samples"] == 500);
}

TEST_CASE("parse errors carry the line number") {
  const std::string bad = "{\n  \"advertisers\": [\n  broken\n}";
  try {
    parse_scenario(bad, "file.json");
    FAIL("expected a parse error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("file.json:3") != std::string::npos);
  }
}

TEST_CASE("validation names the offending field") {
  std::string s = kMinimalScenario;
  SUBCASE("price outside the domain") {
    auto pos = s.find("[1.0, 0.8]");
    s.replace(pos, 10, "[1.0, 0.1]");
    try {
      parse_scenario(s, "test");
      FAIL("expected a validation error");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("price_mode.prices[1]") !=
            std::string::npos);
    }
  }
  SUBCASE("unknown mechanism family") {
    auto pos = s.find("vwm-rp");
    s.replace(pos, 6, "magic");
    CHECK_THROWS_AS(parse_scenario(s, "test"), InputError);
  }
  SUBCASE("unknown top-level key") {
    s.insert(1, "\"bogus\": 1,");
    CHECK_THROWS_AS(parse_scenario(s, "test"), InputError);
  }
  SUBCASE("ama weights on a non-ama family") {
    auto pos = s.find("\"family\": \"vwm-rp\"");
    s.replace(pos, 18, "\"family\": \"vwm-rp\", \"weights\": [1, 1]");
    CHECK_THROWS_AS(parse_scenario(s, "test"), InputError);
  }
}

TEST_CASE("non-regular law requires ironing for virtual families") {
  std::string s = R"({
    "advertisers": [
      {
        "distribution": {"kind": "uniform-mixture", "weight": 0.5,
                         "first": [0.0, 0.1], "second": [0.9, 1.0]},
        "conversion": {"kind": "constant", "level": 1.0},
        "price_domain": [0.2, 1.0]
      }
    ],
    "mechanism": {"family": "vwm-rp"},
    "price_mode": {"mode": "fixed", "prices": [1.0]}
  })";
  try {
    parse_scenario(s, "test");
    FAIL("expected a validation error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("ironing") != std::string::npos);
  }
  auto pos = s.find("\"price_domain\": [0.2, 1.0]");
  s.insert(pos, "\"ironing\": true, ");
  const ScenarioDoc doc = parse_scenario(s, "test");
  CHECK(doc.scenario.advertisers[0].ironing != nullptr);
  CHECK_FALSE(doc.scenario.advertisers[0].regular);
}

TEST_CASE("pia prices computed when missing, echoed in the config") {
  const std::string s = R"({
    "advertisers": [
      {
        "distribution": {"kind": "uniform", "lower": 0.0, "upper": 1.0},
        "conversion": {"kind": "unimodal"},
        "price_domain": [0.0, 5.0]
      }
    ],
    "mechanism": {"family": "vwm-pia"},
    "price_mode": {"mode": "pi-equilibrium"},
    "price_grid": {"lower": 0.0, "upper": 5.0, "points": 2001}
  })";
  const ScenarioDoc doc = parse_scenario(s, "test");
  REQUIRE(doc.scenario.mechanism.pia_prices.has_value());
  CHECK(std::abs((*doc.scenario.mechanism.pia_prices)[0] - 1.0) <= 0.0025);
  CHECK(doc.config["mechanism"].contains("pia_prices"));
}

TEST_CASE("overrides update the scenario and its echoed config") {
  ScenarioDoc doc = parse_scenario(kMinimalScenario, "test");
  apply_overrides(doc, 77, 1234);
  CHECK(doc.scenario.seed == 77);
  CHECK(doc.scenario.samples == 1234);
  CHECK(doc.config["seed"] == 77);
  CHECK(doc.config["samples"] == 1234);
}

TEST_CASE("number formatting for reports") {
  CHECK(format_number(0.3333333333333333) == "0.333333333333");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(std::nan("")) == "null");
  CHECK(format_number(1e300) == "1e+300");
}

TEST_CASE("deterministic json writer") {
  nlohmann::ordered_json doc;
  doc["b"] = 1.5;
  doc["a"] = nlohmann::ordered_json::array({1.0, 2.0});
  doc["nested"]["x"] = true;
  doc["nan"] = std::nan("");
  const std::string s1 = to_deterministic_json(doc);
  const std::string s2 = to_deterministic_json(doc);
  CHECK(s1 == s2);
  CHECK(s1.find("\"b\"") < s1.find("\"a\""));  // insertion order kept
  CHECK(s1.find("null") != std::string::npos);
}

TEST_CASE("csv quoting") {
  CsvDoc csv;
  csv.add_row({"key", "value"});
  csv.add_row({"plain", "1.5"});
  csv.add_row({"with,comma", "a\"b"});
  const std::string s = csv.str();
  CHECK(s == "key,value\nplain,1.5\n\"with,comma\",\"a\"\"b\"\n");
}
