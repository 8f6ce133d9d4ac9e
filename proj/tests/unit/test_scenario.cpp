#include "nlslab/checks.hpp"
#include "nlslab/errors.hpp"

#include <doctest.h>

#include <json.hpp>

#include <fstream>
#include <numbers>
#include <sstream>

using namespace nlslab;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("nlslab_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

const char* kZero = R"({
  "name": "zero_small",
  "profile": {"type": "zero"},
  "grid": 16, "dt": 1e-3, "t_end": 0.1, "stride": 10, "K": 8,
  "checks": [
    {"kind": "discriminant_error", "criterion": 1, "bound": 1e-9, "points": 50},
    {"kind": "omega_exact_error", "criterion": 1, "bound": 1e-9},
    {"kind": "normalization_residual", "bound": 1e-9}
  ]
})";

const char* kTwoMode = R"({
  "name": "two_small",
  "profile": {"type": "mode_list", "modes": [{"n": 1, "re": 0.3}, {"n": -2, "re": 0.1}]},
  "grid": 32, "dt": 1e-3, "t_end": 1.0, "stride": 20, "K": 8, "s_values": [2, 3],
  "output": {"trajectory_max_mode": 4},
  "checks": [
    {"kind": "trace_identity", "criterion": 5, "bound": 1e-6},
    {"kind": "l2_drift", "bound": 1e-10},
    {"kind": "uv_sup", "criterion": 7, "bound": 1e-12, "s": 3}
  ]
})";

}  // namespace

TEST_CASE("parse a complete scenario") {
  const Scenario sc = parse_scenario(kTwoMode, "two.json");
  CHECK(sc.name == "two_small");
  CHECK(sc.level == "full");
  CHECK(sc.profile.kind == Profile::Kind::mode_list);
  CHECK(sc.profile.mode_amplitudes().size() == 2);
  CHECK(sc.point_count == 32);
  CHECK(sc.K == 8);
  CHECK(sc.s_values == std::vector<double>{2, 3});
  CHECK(sc.stages.size() == 6);
  CHECK(sc.output.trajectory_max_mode == 4);
  REQUIRE(sc.checks.size() == 3);
  CHECK(sc.checks[2].param("s", 0) == 3.0);
  CHECK(sc.checks[0].criterion == 5);
  CHECK_FALSE(sc.checks[1].criterion.has_value());
}

TEST_CASE("profiles") {
  const auto pw = parse_scenario(R"({"profile": {"type": "plane_wave", "n": 2, "a": 0.4}})");
  REQUIRE(pw.profile.mode_amplitudes().size() == 1);
  CHECK(pw.profile.mode_amplitudes()[0].n == 2);
  const auto hf = parse_scenario(
      R"({"profile": {"type": "highfreq", "L": 4, "base": {"type": "mode_list", "modes": [{"n": 1, "re": 0.5}]}}})");
  CHECK(hf.profile.mode_amplitudes()[0].n == 4);
  CHECK(hf.profile.describe().find("highfreq L=4") == 0);
  const auto c = parse_scenario(R"({"profile": {"type": "constant", "a": 0.3}})");
  CHECK(c.initial_state().mode(0) == cplx(0.3));
}

TEST_CASE("malformed scenarios name the line or the field") {
  const auto message = [](const std::string& text) {
    try {
      parse_scenario(text, "bad.json");
    } catch (const ConfigurationError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("{\n  \"name\": \"x\",\n  \"grid\": ,\n}").find("bad.json:3:") == 0);
  CHECK(message(R"({"profile": {"type": "zero"}, "grid": 17})").find("field 'grid'") != std::string::npos);
  CHECK(message(R"({"profile": {"type": "zero"}, "dt": -1})").find("field 'dt': must be positive") !=
        std::string::npos);
  CHECK(message(R"({"profile": {"type": "zero"}, "colour": 1})").find("field 'colour': unknown field") !=
        std::string::npos);
  CHECK(message(R"({"profile": {"type": "wave"}})").find("field 'profile.type'") != std::string::npos);
  CHECK(message(R"({})").find("field 'profile': missing") != std::string::npos);
  CHECK(message(R"({"profile": {"type": "zero"}, "checks": [{"kind": "nope", "bound": 1}]})")
            .find("field 'checks[0].kind'") != std::string::npos);
  CHECK(message(R"({"profile": {"type": "zero"}, "checks": [{"kind": "l2_drift"}]})")
            .find("field 'checks[0].bound': missing") != std::string::npos);
  CHECK(message(R"({"profile": {"type": "plane_wave", "n": 40}, "grid": 16})").find("not resolved") !=
        std::string::npos);
  CHECK(message(R"({"profile": {"type": "zero"}, "stages": ["fly"]})").find("field 'stages'") !=
        std::string::npos);
  CHECK(message(R"({"profile": {"type": "zero"}, "spectrum": {"cells": 20}, "grid": 16})")
            .find("spectrum.cells") != std::string::npos);
  CHECK_THROWS_AS(load_scenario("/nonexistent/file.json"), ConfigurationError);
}

TEST_CASE("zero scenario: artifacts and summary") {
  const auto dir = scratch("zero");
  const auto r = run_scenario(parse_scenario(kZero), dir);
  CHECK(r.pass);
  REQUIRE(r.checks.size() == 3);
  for (const auto& c : r.checks) CHECK(c.value <= 1e-9);
  for (const char* f : {"trajectory.csv", "conserved.csv", "gaps.csv", "frequencies.csv", "summary.json",
                        "compare_v_s3.csv", "extracted.csv", "sigma/sigma_n0.csv"})
    CHECK(std::filesystem::exists(dir / f));

  const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(j["pass"] == true);
  CHECK(j["checks"].size() == 3);
  CHECK(j["criteria"].size() == kCriterionCount);
  CHECK(j["criteria"]["1"] == "pass");
  CHECK(j["criteria"]["7"] == "not_covered");
  CHECK(j["checks"][0]["name"] == "discriminant_error");
  CHECK(j["checks"][0]["bound"] == 1e-9);
}

TEST_CASE("failing checks fail the scenario but are still reported") {
  const auto dir = scratch("two");
  const auto r = run_scenario(parse_scenario(kTwoMode), dir);
  CHECK_FALSE(r.pass);
  CHECK(r.checks[0].pass);
  CHECK(r.checks[1].pass);
  CHECK_FALSE(r.checks[2].pass);  // the bound is deliberately far too tight
  const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(j["criteria"]["5"] == "pass");
  CHECK(j["criteria"]["7"] == "fail");
}

TEST_CASE("identical configs give byte-identical CSV output") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  run_scenario(parse_scenario(kTwoMode), a);
  run_scenario(parse_scenario(kTwoMode), b);
  for (const auto& entry : std::filesystem::recursive_directory_iterator(a)) {
    if (entry.path().extension() != ".csv") continue;
    const auto rel = std::filesystem::relative(entry.path(), a);
    CHECK_MESSAGE(slurp(entry.path()) == slurp(b / rel), rel.string());
  }
}

TEST_CASE("stage errors carry the stage name") {
  // Newton cannot converge in one iteration to 1e-300.
  const auto sc = parse_scenario(R"({
    "profile": {"type": "mode_list", "modes": [{"n": 1, "re": 0.3}, {"n": -2, "re": 0.1}]},
    "grid": 32, "K": 6, "stages": ["spectrum", "sigma"],
    "normalization": {"max_iterations": 1, "tolerance": 1e-300}
  })");
  try {
    run_scenario(sc);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "sigma");
    CHECK(std::string(e.what()).find("stage 'sigma'") == 0);
  }
}

TEST_CASE("a check that cannot be evaluated fails with a note") {
  auto sc = parse_scenario(R"({"profile": {"type": "mode_list", "modes": [{"n": 1, "re": 0.3}]}, "grid": 16, "K": 4,
    "stages": ["checks"], "checks": [{"kind": "discriminant_error", "bound": 1}]})");
  const auto r = run_scenario(sc);
  REQUIRE(r.checks.size() == 1);
  CHECK_FALSE(r.checks[0].pass);
  CHECK(r.checks[0].note.find("closed form") != std::string::npos);
}

TEST_CASE("exact forms") {
  Profile zero;
  CHECK(exact_frequency(zero, 3) == doctest::Approx(4 * 9 * std::numbers::pi * std::numbers::pi));
  Profile c;
  c.kind = Profile::Kind::constant;
  c.a = 0.3;
  CHECK(*exact_frequency(c, 0) == doctest::Approx(0.18));
  CHECK(exact_gap_edges(c, 0)->second == doctest::Approx(0.3));
  Profile pw;
  pw.kind = Profile::Kind::plane_wave;
  pw.n = 1;
  pw.a = 0.3;
  CHECK_FALSE(exact_frequency(pw, 2).has_value());
  CHECK_FALSE(exact_discriminant(pw, 1.0).has_value());
}

TEST_CASE("suite runner over a directory") {
  const auto dir = scratch("suite");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "a.json") << R"({"name": "q", "level": "quick", "profile": {"type": "zero"}, "grid": 16, "K": 4,
    "stages": ["spectrum", "checks"], "checks": [{"kind": "gap_edge_error", "criterion": 1, "bound": 1e-10}]})";
  std::ofstream(dir / "b.json") << R"({"name": "f", "level": "full", "profile": {"type": "zero"}, "grid": 16, "K": 4,
    "stages": ["spectrum", "checks"], "checks": [{"kind": "gap_edge_error", "criterion": 2, "bound": -1}]})";
  const auto quick = check_suite(SuiteLevel::quick, dir);
  CHECK(quick.scenarios.size() == 1);
  CHECK(quick.pass);
  const auto full = check_suite(SuiteLevel::full, dir);
  CHECK(full.scenarios.size() == 2);
  CHECK_FALSE(full.pass);
  const auto v = criterion_verdicts(full);
  CHECK(v.at(1));
  CHECK_FALSE(v.at(2));
  CHECK_THROWS_AS(check_suite(SuiteLevel::quick, dir / "missing"), ConfigurationError);
}
