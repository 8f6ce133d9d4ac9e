#include "nlslab/checks.hpp"
#include "nlslab/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>

namespace {

using namespace nlslab;

struct Args {
  std::string config;
  std::string out;
  int K = -1;
  int n = 0;
  double s = -1.0;
  std::string ref = "v";
  std::vector<int> L;
  double eps = 0.1;
  double T = -1.0;
  std::string level = "quick";
};

// Writes to --out when given, stdout otherwise.
void emit(const Args& a, const std::function<void(std::ostream&)>& body) {
  if (a.out.empty()) {
    body(std::cout);
    return;
  }
  const std::filesystem::path path(a.out);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw ConfigurationError("cannot write " + a.out);
  body(os);
}

Scenario scenario_from(const Args& a) {
  if (a.config.empty()) throw ConfigurationError("--config is required");
  Scenario sc = load_scenario(a.config);
  if (a.K >= 0) {
    if (a.K < 1) throw ConfigurationError("--K must be positive");
    sc.K = a.K;
    sc.sigma_n.clear();
  }
  return sc;
}

void print_check(const CheckResult& c) {
  std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  value " << c.value << ' ' << c.relation << ' '
            << c.bound;
  if (c.criterion) std::cout << "  [criterion " << *c.criterion << "]";
  if (!c.note.empty()) std::cout << "  (" << c.note << ")";
  std::cout << '\n';
}

int run_checks(const Args& a) {
  if (!a.config.empty()) {
    const Scenario sc = scenario_from(a);
    const std::filesystem::path outdir = a.out.empty() ? std::filesystem::path("out") / sc.name : std::filesystem::path(a.out);
    const ScenarioResult r = run_scenario(sc, outdir);
    for (const auto& c : r.checks) print_check(c);
    std::cout << (r.pass ? "scenario passed" : "scenario FAILED") << " (" << r.seconds << " s), outputs in "
              << outdir.string() << '\n';
    return r.pass ? 0 : 1;
  }
  const SuiteLevel level = a.level == "full" ? SuiteLevel::full : SuiteLevel::quick;
  std::optional<std::filesystem::path> outdir;
  if (!a.out.empty()) outdir = a.out;
  const SuiteReport report = check_suite(level, default_scenario_dir(), outdir);
  for (const auto& s : report.scenarios) {
    std::cout << "== " << s.name << '\n';
    for (const auto& c : s.checks) print_check(c);
  }
  for (const auto& [k, pass] : criterion_verdicts(report))
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << k << '\n';
  std::cout << (report.pass ? "suite passed" : "suite FAILED") << " (" << report.seconds << " s)\n";
  return report.pass ? 0 : 1;
}

int run_highfreq(const Args& a) {
  HighfreqOptions o;
  if (!a.config.empty()) {
    const Scenario sc = scenario_from(a);
    o.profile = sc.profile.mode_amplitudes();
    o.point_count = sc.point_count;
    o.dt = sc.dt;
    o.stride = sc.stride;
    o.K = sc.K;
    o.t_end = sc.t_end;
    o.spectrum = sc.spectrum;
    o.normalization = sc.normalization;
  } else {
    o.profile = {{1, cplx(0.5)}, {-2, cplx(0.2)}};
  }
  if (!a.L.empty()) o.shifts = a.L;
  o.epsilon = a.eps;
  if (a.T > 0.0) o.t_end = a.T;
  const HighfreqReport r = highfreq_experiment(o);
  emit(a, [&](std::ostream& os) { write_highfreq_csv(os, r); });
  std::cerr << "smallest L with sup ||u-v|| <= eps: "
            << (r.smallest_L_v ? std::to_string(*r.smallest_L_v) : "none")
            << ", with sup ||u-w|| <= eps: " << (r.smallest_L_w ? std::to_string(*r.smallest_L_w) : "none")
            << ", sup ||u-v|| decreasing in L: " << (r.sup_uv_decreasing ? "yes" : "no") << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic defocusing NLS: dynamics, spectral data and frequency checks"};
  app.require_subcommand(1);
  Args a;

  const auto config = [&](CLI::App* sub, bool required = true) {
    auto* opt = sub->add_option("--config", a.config, "Scenario JSON file")->check(CLI::ExistingFile);
    if (required) opt->required();
    sub->add_option("--out", a.out, "Output file (stdout when omitted)");
  };

  auto* simulate = app.add_subcommand("simulate", "Trajectory CSV: t, n, re, im");
  config(simulate);
  auto* spectrum = app.add_subcommand("spectrum", "Periodic spectrum CSV");
  config(spectrum);
  spectrum->add_option("--K", a.K, "Largest gap index")->check(CLI::PositiveNumber);
  auto* sigma = app.add_subcommand("sigma", "Zeros sigma_k^n of psi_n");
  config(sigma);
  sigma->add_option("--K", a.K, "Largest gap index")->check(CLI::PositiveNumber);
  sigma->add_option("--n", a.n, "Index n")->required();
  auto* freq = app.add_subcommand("frequencies", "NLS frequencies for |n| <= K");
  config(freq);
  freq->add_option("--K", a.K, "Largest index")->check(CLI::PositiveNumber);
  auto* compare = app.add_subcommand("compare", "||u - v||_{H^s} or ||u - w||_{H^s} over time");
  config(compare);
  compare->add_option("--ref", a.ref, "Reference flow")->check(CLI::IsMember({"v", "w"}));
  compare->add_option("--s", a.s, "Sobolev index (default: first s value of the scenario)");
  auto* extract = app.add_subcommand("extract", "Frequencies fitted from the simulated phases");
  config(extract);
  auto* highfreq = app.add_subcommand("highfreq", "Shifted-profile experiment");
  config(highfreq, false);
  highfreq->add_option("--L", a.L, "Shifts (comma separated)")->delimiter(',');
  highfreq->add_option("--eps", a.eps, "Threshold epsilon")->check(CLI::PositiveNumber);
  highfreq->add_option("--T", a.T, "Time horizon")->check(CLI::PositiveNumber);
  auto* checks = app.add_subcommand("checks", "Run one scenario (--config) or the bundled suite (--level)");
  config(checks, false);
  checks->add_option("--level", a.level, "Suite level")->check(CLI::IsMember({"quick", "full"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      const Scenario sc = scenario_from(a);
      const Trajectory traj = evolve(sc.initial_state(), sc.t_end, sc.dt, sc.stride);
      emit(a, [&](std::ostream& os) {
        write_trajectory_csv(os, traj, sc.output.trajectory_max_mode, sc.output.trajectory_sample_stride);
      });
    } else if (*spectrum) {
      ScenarioContext ctx(scenario_from(a));
      emit(a, [&](std::ostream& os) { write_gap_csv(os, ctx.gaps()); });
    } else if (*sigma) {
      Scenario sc = scenario_from(a);
      if (std::abs(a.n) > sc.K) throw ConfigurationError("--n must satisfy |n| <= K");
      sc.sigma_n = {a.n};
      ScenarioContext ctx(sc);
      const SigmaSet& sig = ctx.sigmas().at(a.n);
      emit(a, [&](std::ostream& os) { write_sigma_csv(os, ctx.gaps(), sig, sc.normalization); });
    } else if (*freq) {
      ScenarioContext ctx(scenario_from(a));
      emit(a, [&](std::ostream& os) { write_frequency_csv(os, ctx.frequencies()); });
    } else if (*compare) {
      ScenarioContext ctx(scenario_from(a));
      const double s = a.s >= 0.0 ? a.s : ctx.scenario().s_values.front();
      const Reference ref = a.ref == "w" ? Reference::w : Reference::v;
      emit(a, [&](std::ostream& os) { write_norm_series_csv(os, ctx.difference(ref, s)); });
    } else if (*extract) {
      ScenarioContext ctx(scenario_from(a));
      emit(a, [&](std::ostream& os) { write_extracted_csv(os, ctx.extracted()); });
    } else if (*highfreq) {
      return run_highfreq(a);
    } else if (*checks) {
      return run_checks(a);
    }
  } catch (const ConfigurationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
