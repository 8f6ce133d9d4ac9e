#pragma once

#include "nlslab/approx_compare.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nlslab {

/// Initial data. Every profile is real-type (phi1 = conj(phi2)).
struct Profile {
  enum class Kind { zero, constant, plane_wave, mode_list, highfreq };
  Kind kind = Kind::zero;
  double a = 0.0;  ///< constant and plane_wave amplitude
  int n = 0;       ///< plane_wave mode
  std::vector<ModeAmplitude> modes;  ///< mode_list, or the base profile of highfreq
  int L = 1;                         ///< highfreq shift
  double norm_index = 2.0;           ///< highfreq: H^N norm kept by the shift

  /// Fourier modes of the profile (after any shift).
  std::vector<ModeAmplitude> mode_amplitudes() const;
  std::string describe() const;
};

/// One entry of the scenario's check list. The bound and every parameter
/// come from the file.
struct CheckSpec {
  std::string kind;
  std::string name;
  std::optional<int> criterion;
  double bound = 0.0;
  std::map<std::string, double> params;
  std::map<std::string, std::vector<double>> lists;

  double param(const std::string& key, double fallback) const;
  bool has(const std::string& key) const { return params.count(key) != 0; }
};

struct OutputOptions {
  int trajectory_max_mode = 16;   ///< -1 writes every mode
  int trajectory_sample_stride = 10;
  bool sigma_tables = true;       ///< one sigma CSV per solved n
};

struct Scenario {
  std::string name;
  std::string level = "full";  ///< "quick" scenarios form the quick check suite
  Profile profile;
  int point_count = 128;
  double dt = kDefaultDt;
  double t_end = 10.0;
  int stride = 100;
  int K = 16;
  std::vector<double> s_values{3.0};
  std::uint64_t seed = 0;          ///< recorded only; nothing in a scenario run is random
  std::vector<std::string> stages;  ///< subset of simulate, spectrum, sigma, frequencies, compare, checks
  std::vector<int> sigma_n;         ///< indices to solve; empty = all of [-K, K]
  double amplitude_floor = 0.05;    ///< extraction floor
  SpectrumOptions spectrum;
  NormalizationOptions normalization;
  OutputOptions output;
  std::vector<CheckSpec> checks;

  bool has_stage(const std::string& stage) const;
  StateField initial_state() const;
};

/// Parses a scenario from JSON text. Errors name the offending field, or the
/// line and column of a syntax error, prefixed with source.
Scenario parse_scenario(const std::string& text, const std::string& source = "<string>");
Scenario load_scenario(const std::filesystem::path& path);

struct CheckResult {
  std::string name;
  std::string kind;
  std::optional<int> criterion;
  double value = 0.0;
  double bound = 0.0;
  std::string relation;  ///< "<=" or "<"
  bool pass = false;
  std::string note;  ///< error text when the check could not be evaluated
};

struct ScenarioResult {
  std::string name;
  std::vector<CheckResult> checks;
  std::vector<std::string> artifacts;  ///< files written, relative to the output directory
  double seconds = 0.0;
  bool pass = false;
};

/// Runs the listed stages, writes their CSV files and summary.json into
/// outdir (when given) and evaluates every check. A failing stage is reported
/// as ConfigurationError/Error carrying the stage name.
ScenarioResult run_scenario(const Scenario& scenario,
                            const std::optional<std::filesystem::path>& outdir = {});

/// Loads and runs a scenario file; returns 0 iff every check passes.
int run_scenario_file(const std::filesystem::path& path, const std::filesystem::path& outdir);

/// Acceptance criteria are numbered 1..kCriterionCount. The summary lists
/// each of them as "pass", "fail" or "not_covered".
inline constexpr int kCriterionCount = 11;
std::string summary_json(const ScenarioResult& result);

}  // namespace nlslab
