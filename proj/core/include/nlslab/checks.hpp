#pragma once

#include "nlslab/scenario.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nlslab {

/// Everything a scenario computes, built on first use and cached.
class ScenarioContext {
public:
  explicit ScenarioContext(Scenario scenario);

  const Scenario& scenario() const noexcept { return scenario_; }
  const StateField& u0() const noexcept { return u0_; }
  const Potential& potential() const noexcept { return phi_; }
  double elapsed_seconds() const;

  const Trajectory& trajectory();
  const ZsOperator& zs_operator();
  const GapTable& gaps();
  const std::map<int, SigmaSet>& sigmas();
  const FrequencyTable& frequencies();
  const std::map<int, double>& extracted();
  const NormSeries& difference(Reference ref, double s);
  const NormSeries& norm(double s);

private:
  Scenario scenario_;
  StateField u0_;
  Potential phi_;
  std::chrono::steady_clock::time_point start_;
  std::optional<Trajectory> trajectory_;
  std::unique_ptr<ZsOperator> op_;
  std::optional<GapTable> gaps_;
  std::optional<std::map<int, SigmaSet>> sigmas_;
  std::optional<FrequencyTable> table_;
  std::optional<std::map<int, double>> extracted_;
  std::map<std::pair<int, double>, NormSeries> series_;
};

/// Closed forms available for the zero, constant and plane-wave profiles.
/// Each returns nullopt when the profile has none.
std::optional<cplx> exact_discriminant(const Profile& profile, cplx lambda);
std::optional<std::pair<double, double>> exact_gap_edges(const Profile& profile, int n);
std::optional<double> exact_frequency(const Profile& profile, int n);

/// Evaluates one check. Errors raised while computing it are reported as a
/// failed result with the message in note.
CheckResult evaluate_check(ScenarioContext& context, const CheckSpec& spec);

/// Names accepted in a scenario's check list.
const std::vector<std::string>& check_kinds();

enum class SuiteLevel { quick, full };

struct SuiteReport {
  std::vector<ScenarioResult> scenarios;
  double seconds = 0.0;
  bool pass = false;
};

/// Runs every bundled scenario (*.json in dir) whose level is covered:
/// quick runs the "quick" scenarios, full runs all of them. Results are
/// written below outdir/<scenario name> when outdir is given.
SuiteReport check_suite(SuiteLevel level, const std::filesystem::path& dir,
                        const std::optional<std::filesystem::path>& outdir = {});

/// Per-criterion verdicts across all scenarios of a suite: a criterion passes
/// when it has at least one check and all of them pass.
std::map<int, bool> criterion_verdicts(const SuiteReport& report);

/// Scenario directory: NLSLAB_SCENARIO_DIR if set, else the compiled-in default.
std::filesystem::path default_scenario_dir();

}  // namespace nlslab
