#include "nlslab/checks.hpp"

#include "nlslab/csv.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <set>

#ifndef NLSLAB_DEFAULT_SCENARIO_DIR
#define NLSLAB_DEFAULT_SCENARIO_DIR "scenarios"
#endif

namespace nlslab {
namespace {

constexpr double kPi = std::numbers::pi;

double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

struct Outcome {
  double value = 0.0;
  std::string note;
};

using CheckFn = std::function<Outcome(ScenarioContext&, const CheckSpec&)>;

struct CheckKind {
  CheckFn fn;
  bool strict = false;  // value < bound instead of value <= bound
};

[[noreturn]] void no_closed_form(const std::string& what) {
  throw ConfigurationError("profile has no closed form for " + what);
}

double sobolev_index(const ScenarioContext& ctx, const CheckSpec& spec) {
  return spec.param("s", ctx.scenario().s_values.front());
}

int int_param(const CheckSpec& spec, const std::string& key, int fallback) {
  return static_cast<int>(std::lround(spec.param(key, fallback)));
}

Outcome verdict_outcome(const BoundednessVerdict& v) {
  Outcome o;
  o.value = v.sup > 0.0 ? v.slope * v.span / v.sup : 0.0;
  o.note = "sup " + csv::format(v.sup) + ", slope " + csv::format(v.slope);
  return o;
}

std::vector<int> index_range(const CheckSpec& spec, int K) {
  const int lo = int_param(spec, "n_min", -K);
  const int hi = int_param(spec, "n_max", K);
  std::vector<int> out;
  for (int n = lo; n <= hi; ++n) out.push_back(n);
  return out;
}

Trajectory resimulate(const ScenarioContext& ctx, double dt, int stride) {
  const auto& sc = ctx.scenario();
  return evolve(ctx.u0(), sc.t_end, dt, stride);
}

const std::map<std::string, CheckKind>& registry() {
  static const std::map<std::string, CheckKind> kinds{
      {"discriminant_error",
       {[](ScenarioContext& ctx, const CheckSpec& spec) {
          const int points = int_param(spec, "points", 200);
          const double lmax = spec.param("lambda_max", (ctx.scenario().K + 0.5) * kPi);
          if (points < 2) throw ConfigurationError("discriminant_error needs at least 2 points");
          std::vector<double> err(static_cast<std::size_t>(points));
          const auto& op = ctx.zs_operator();
          parallel_for(err.size(), [&](std::size_t j) {
            const double lambda = -lmax + 2.0 * lmax * static_cast<double>(j) / (points - 1);
            const auto exact = exact_discriminant(ctx.scenario().profile, lambda);
            if (!exact) no_closed_form("the discriminant");
            err[j] = std::abs(op.discriminant(lambda) - *exact);
          });
          return Outcome{*std::max_element(err.begin(), err.end()), ""};
        }}},
      {"gap_edge_error",
       {[](ScenarioContext& ctx, const CheckSpec&) {
          double worst = 0.0;
          for (const auto& e : ctx.gaps().entries()) {
            const auto exact = exact_gap_edges(ctx.scenario().profile, e.n);
            if (!exact) no_closed_form("the gap edges");
            worst = std::max({worst, std::abs(e.lambda_minus - exact->first), std::abs(e.lambda_plus - exact->second)});
          }
          return Outcome{worst, ""};
        }}},
      {"gamma_exact_error",
       {[](ScenarioContext& ctx, const CheckSpec& spec) {
          const int n = int_param(spec, "n", 0);
          const auto exact = exact_gap_edges(ctx.scenario().profile, n);
          if (!exact) no_closed_form("the gap lengths");
          const auto& e = ctx.gaps().at(n);
          return Outcome{std::abs(e.gamma - (exact->second - exact->first)),
                         "gamma_" + std::to_string(n) + " = " + csv::format(e.gamma)};
        }}},
      {"closed_gaps_gamma",
       {[](ScenarioContext& ctx, const CheckSpec&) {
          double worst = 0.0;
          for (const auto& e : ctx.gaps().entries()) {
            const auto exact = exact_gap_edges(ctx.scenario().profile, e.n);
            if (!exact) no_closed_form("the open gap set");
            if (exact->second > exact->first) continue;
            worst = std::max(worst, e.gamma);
          }
          return Outcome{worst, ""};
        }}},
      {"omega_exact_error",
       {[](ScenarioContext& ctx, const CheckSpec&) {
          double worst = 0.0;
          int used = 0;
          for (const auto& r : ctx.frequencies().rows) {
            const auto exact = exact_frequency(ctx.scenario().profile, r.n);
            if (!exact) continue;
            worst = std::max(worst, std::abs(r.omega_nls - *exact));
            ++used;
          }
          if (used == 0) no_closed_form("any tabulated frequency");
          return Outcome{worst, std::to_string(used) + " frequencies compared"};
        }}},
      {"normalization_residual",
       {[](ScenarioContext& ctx, const CheckSpec&) {
          double worst = 0.0;
          for (const auto& [n, sig] : ctx.sigmas()) worst = std::max(worst, sig.max_residual);
          return Outcome{worst, ""};
        }}},
      {"trace_identity",
       {[](ScenarioContext& ctx, const CheckSpec&) {
          double worst = 0.0;
          for (const auto& [n, sig] : ctx.sigmas()) worst = std::max(worst, trace_identity_check(ctx.gaps(), sig));
          return Outcome{worst, ""};
        }}},
      {"contour_independence",
       {[](ScenarioContext& ctx, const CheckSpec& spec) {
          NormalizationOptions base = ctx.scenario().normalization;
          NormalizationOptions other = base;
          other.radius_scale *= spec.param("scale", 1.5);
          if (spec.has("nodes")) other.nodes = int_param(spec, "nodes", base.nodes);
          const auto& gaps = ctx.gaps();
          std::vector<const SigmaSet*> sets;
          for (const auto& [n, sig] : ctx.sigmas()) sets.push_back(&sig);
          std::vector<double> worst(sets.size(), 0.0);
          parallel_for(sets.size(), [&](std::size_t i) {
            const SigmaSet& sig = *sets[i];
            std::vector<int> ms = gaps.open_indices();
            ms.push_back(sig.n);
            for (int m : ms) {
              const cplx a = normalization_integral(gaps, sig, contour_for(gaps, m, base));
              const cplx b = normalization_integral(gaps, sig, contour_for(gaps, m, other));
              worst[i] = std::max(worst[i], std::abs(a - b));
            }
          });
          return Outcome{worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end()), ""};
        }}},
      {"sigma_in_gap",
       {[](ScenarioContext& ctx, const CheckSpec&) {
          int outside = 0;
          for (const auto& [n, sig] : ctx.sigmas())
            for (const auto& [k, s] : sig.sigma) {
              const auto& e = ctx.gaps().at(k);
              if (s < e.lambda_minus || s > e.lambda_plus) ++outside;
            }
          return Outcome{static_cast<double>(outside), ""};
        }}},
      {"rho_slope",
       {[](ScenarioContext& ctx, const CheckSpec& spec) {
          return Outcome{rho_loglog_slope(ctx.frequencies(), int_param(spec, "n_min", 4),
                                          int_param(spec, "n_max", ctx.scenario().K)),
                         ""};
        }}},
      {"weighted_rho_max",
       {[](ScenarioContext& ctx, const CheckSpec& spec) {
          return Outcome{max_weighted_rho(ctx.frequencies(), int_param(spec, "n_min", -ctx.scenario().K),
                                          int_param(spec, "n_max", ctx.scenario().K)),
                         ""};
        }}},
      {"weighted_rho_resolution",
       {[](ScenarioContext& ctx, const CheckSpec& spec) {
          const int lo = int_param(spec, "n_min", -ctx.scenario().K);
          const int hi = int_param(spec, "n_max", ctx.scenario().K);
          const double here = max_weighted_rho(ctx.frequencies(), lo, hi);
          Scenario alt = ctx.scenario();
          alt.point_count = int_param(spec, "point_count", 2 * alt.point_count);
          alt.spectrum.cells = 0;
          alt.sigma_n = index_range(spec, alt.K);
          ScenarioContext other(alt);
          const double there = max_weighted_rho(other.frequencies(), lo, hi);
          return Outcome{relative(here, there),
                         "grid " + std::to_string(ctx.scenario().point_count) + ": " + csv::format(here) +
                             ", grid " + std::to_string(alt.point_count) + ": " + csv::format(there)};
        }}},
      {"pairing_identity_max",
       {[](ScenarioContext& ctx, const CheckSpec& spec) {
          const int lo = int_param(spec, "n_min", 4);
          const int hi = int_param(spec, "n_max", ctx.scenario().K);
          double worst = 0.0;
          for (const auto& [n, sig] : ctx.sigmas())
            if (n >= lo && n <= hi) worst = std::max(worst, pairing_identity_check(ctx.gaps(), sig, n, ctx.potential()));
          return Outcome{worst, ""};
        }}},
      {"omega_sup", {[](ScenarioContext& ctx, const CheckSpec&) { return Outcome{omega_sup_check(ctx.frequencies()), ""}; }}},
      {"tau_asymptotics",
       {[](ScenarioContext& ctx, const CheckSpec& spec) {
          const int lo = int_param(spec, "k_min", 1);
          double worst = 0.0;
          for (const auto& r : tau_asymptotics_check(ctx.gaps(), ctx.potential()))
            if (std::abs(r.k) >= lo) worst = std::max(worst, r.residual);
          return Outcome{worst, ""};
        }}},
      {"l2_drift",
       {[](ScenarioContext& ctx, const CheckSpec&) {
          return Outcome{max_drift(conserved_report(ctx.trajectory())).l2, ""};
        }}},
      {"hamiltonian_drift_ratio",
       {[](ScenarioContext& ctx, const CheckSpec&) {
          const double coarse = max_drift(conserved_report(ctx.trajectory())).hamiltonian;
          const auto fine_traj = resimulate(ctx, ctx.trajectory().dt / 2.0, 2 * ctx.scenario().stride);
          const double fine = max_drift(conserved_report(fine_traj)).hamiltonian;
          const double ratio = coarse / fine;
          return Outcome{std::abs(ratio / 4.0 - 1.0), "drift " + csv::format(coarse) + " -> " +
                                                          csv::format(fine) + ", ratio " + csv::format(ratio)};
        }}},
      {"round_trip",
       {[](ScenarioContext& ctx, const CheckSpec&) {
          const auto& sc = ctx.scenario();
          const StateField there = evolve_to(ctx.u0(), sc.t_end, sc.dt);
          const StateField back = evolve_to(there, -sc.t_end, sc.dt);
          double sum = 0.0;
          for (int n = back.grid().min_mode(); n <= back.grid().max_mode(); ++n)
            sum += std::norm(back.mode(n) - ctx.u0().mode(n));
          return Outcome{std::sqrt(sum), ""};
        }}},
      {"extraction_exact_error",
       {[](ScenarioContext& ctx, const CheckSpec&) {
          double worst = 0.0;
          int used = 0;
          for (const auto& [n, om] : ctx.extracted()) {
            const auto exact = exact_frequency(ctx.scenario().profile, n);
            if (!exact) continue;
            worst = std::max(worst, relative(om, *exact));
            ++used;
          }
          if (used == 0) no_closed_form("any extracted frequency");
          return Outcome{worst, std::to_string(used) + " modes compared"};
        }}},
      {"extraction_vs_pipeline",
       {[](ScenarioContext& ctx, const CheckSpec&) {
          double worst = 0.0;
          int used = 0;
          std::string note;
          for (const auto& [n, om] : ctx.extracted()) {
            const FrequencyRow* row = ctx.frequencies().find(n);
            if (!row) continue;
            worst = std::max(worst, relative(row->omega_nls, om));
            note += "n=" + std::to_string(n) + ": " + csv::format(om) + " vs " + csv::format(row->omega_nls) + "; ";
            ++used;
          }
          if (used == 0) throw ConfigurationError("no extracted mode has a tabulated frequency");
          return Outcome{worst, note};
        }}},
      {"extraction_dt_stability",
       {[](ScenarioContext& ctx, const CheckSpec&) {
          const auto fine = extract_frequencies(
              resimulate(ctx, ctx.trajectory().dt / 2.0, 2 * ctx.scenario().stride), ctx.scenario().amplitude_floor);
          double worst = 0.0;
          for (const auto& [n, om] : ctx.extracted()) {
            const auto it = fine.find(n);
            if (it == fine.end()) throw InternalError("mode " + std::to_string(n) + " lost at the finer step");
            worst = std::max(worst, relative(it->second, om));
          }
          return Outcome{worst, ""};
        }}},
      {"uv_bounded",
       {[](ScenarioContext& ctx, const CheckSpec& spec) {
          return verdict_outcome(boundedness_verdict(ctx.difference(Reference::v, sobolev_index(ctx, spec))));
        },
        true}},
      {"uv_sup",
       {[](ScenarioContext& ctx, const CheckSpec& spec) {
          return Outcome{boundedness_verdict(ctx.difference(Reference::v, sobolev_index(ctx, spec))).sup, ""};
        }}},
      {"uw_linear_constant",
       {[](ScenarioContext& ctx, const CheckSpec& spec) {
          const auto g = linear_growth(ctx.difference(Reference::w, sobolev_index(ctx, spec)), spec.param("t_start", 5.0));
          return Outcome{g.constant, ""};
        }}},
      {"uw_running_max",
       {[](ScenarioContext& ctx, const CheckSpec& spec) {
          const auto g = linear_growth(ctx.difference(Reference::w, sobolev_index(ctx, spec)), spec.param("t_start", 5.0));
          return Outcome{g.early_max > 0.0 ? g.late_max / g.early_max : 0.0,
                         "ratio max before t_start " + csv::format(g.early_max) + ", after " + csv::format(g.late_max)};
        }}},
      {"norm_bounded",
       {[](ScenarioContext& ctx, const CheckSpec& spec) {
          return verdict_outcome(boundedness_verdict(ctx.norm(sobolev_index(ctx, spec))));
        },
        true}},
      {"highfreq_decreasing",
       {[](ScenarioContext& ctx, const CheckSpec& spec) {
          const auto& sc = ctx.scenario();
          HighfreqOptions o;
          o.profile = sc.profile.mode_amplitudes();
          if (const auto it = spec.lists.find("shifts"); it != spec.lists.end()) {
            o.shifts.clear();
            for (double L : it->second) o.shifts.push_back(static_cast<int>(std::lround(L)));
          }
          o.norm_index = spec.param("norm_index", o.norm_index);
          o.epsilon = spec.param("epsilon", o.epsilon);
          o.t_end = spec.param("T", sc.t_end);
          o.point_count = sc.point_count;
          o.dt = sc.dt;
          o.stride = sc.stride;
          o.K = sc.K;
          o.spectrum = sc.spectrum;
          o.spectrum.cells = 0;
          o.normalization = sc.normalization;
          const auto report = highfreq_experiment(o);
          double worst = 0.0;
          std::string note;
          for (std::size_t i = 0; i < report.rows.size(); ++i) {
            note += "L=" + std::to_string(report.rows[i].L) + ": " + csv::format(report.rows[i].sup_uv) + "; ";
            if (i > 0) worst = std::max(worst, report.rows[i].sup_uv / report.rows[i - 1].sup_uv);
          }
          note += "smallest L (v): " + (report.smallest_L_v ? std::to_string(*report.smallest_L_v) : "none");
          note += ", smallest L (w): " + (report.smallest_L_w ? std::to_string(*report.smallest_L_w) : "none");
          return Outcome{worst, note};
        },
        true}},
      {"runtime", {[](ScenarioContext& ctx, const CheckSpec&) { return Outcome{ctx.elapsed_seconds(), ""}; }}},
  };
  return kinds;
}

}  // namespace

ScenarioContext::ScenarioContext(Scenario scenario)
    : scenario_(std::move(scenario)),
      u0_(scenario_.initial_state()),
      phi_(Potential::from_field(u0_)),
      start_(std::chrono::steady_clock::now()) {}

double ScenarioContext::elapsed_seconds() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

const Trajectory& ScenarioContext::trajectory() {
  if (!trajectory_) trajectory_ = evolve(u0_, scenario_.t_end, scenario_.dt, scenario_.stride);
  return *trajectory_;
}

const ZsOperator& ScenarioContext::zs_operator() {
  if (!op_) op_ = std::make_unique<ZsOperator>(phi_, scenario_.spectrum.cells);
  return *op_;
}

const GapTable& ScenarioContext::gaps() {
  if (!gaps_) gaps_ = periodic_spectrum(zs_operator(), scenario_.K, scenario_.spectrum);
  return *gaps_;
}

const std::map<int, SigmaSet>& ScenarioContext::sigmas() {
  if (!sigmas_) {
    std::vector<int> ns = scenario_.sigma_n;
    if (ns.empty())
      for (int n = -scenario_.K; n <= scenario_.K; ++n) ns.push_back(n);
    const GapTable& table = gaps();
    std::vector<SigmaSet> solved(ns.size());
    parallel_for(ns.size(), [&](std::size_t i) { solved[i] = solve_sigma(table, ns[i], scenario_.normalization); });
    std::map<int, SigmaSet> out;
    for (std::size_t i = 0; i < ns.size(); ++i) out[ns[i]] = std::move(solved[i]);
    sigmas_ = std::move(out);
  }
  return *sigmas_;
}

const FrequencyTable& ScenarioContext::frequencies() {
  if (!table_) table_ = frequency_residuals(gaps(), sigmas(), phi_);
  return *table_;
}

const std::map<int, double>& ScenarioContext::extracted() {
  if (!extracted_) extracted_ = extract_frequencies(trajectory(), scenario_.amplitude_floor);
  return *extracted_;
}

const NormSeries& ScenarioContext::difference(Reference ref, double s) {
  const auto key = std::make_pair(ref == Reference::v ? 0 : 1, s);
  auto it = series_.find(key);
  if (it == series_.end()) {
    const FrequencyTable* table = ref == Reference::v ? &frequencies() : nullptr;
    it = series_.emplace(key, difference_series(trajectory(), ref, s, table)).first;
  }
  return it->second;
}

const NormSeries& ScenarioContext::norm(double s) {
  const auto key = std::make_pair(2, s);
  auto it = series_.find(key);
  if (it == series_.end()) it = series_.emplace(key, norm_series(trajectory(), s)).first;
  return it->second;
}

std::optional<cplx> exact_discriminant(const Profile& profile, cplx lambda) {
  switch (profile.kind) {
    case Profile::Kind::zero: return 2.0 * std::cos(lambda);
    case Profile::Kind::constant: return 2.0 * std::cos(std::sqrt(lambda * lambda - profile.a * profile.a));
    default: return std::nullopt;
  }
}

std::optional<std::pair<double, double>> exact_gap_edges(const Profile& profile, int n) {
  switch (profile.kind) {
    case Profile::Kind::zero: return std::make_pair(n * kPi, n * kPi);
    case Profile::Kind::constant: {
      const double a = std::abs(profile.a);
      if (n == 0) return std::make_pair(-a, a);
      const double tau = (n > 0 ? 1.0 : -1.0) * std::sqrt(n * n * kPi * kPi + a * a);
      return std::make_pair(tau, tau);
    }
    default: return std::nullopt;
  }
}

std::optional<double> exact_frequency(const Profile& profile, int n) {
  const double a2 = profile.a * profile.a;
  switch (profile.kind) {
    case Profile::Kind::zero: return 4.0 * kPi * kPi * n * n;
    case Profile::Kind::constant: {
      // Linearization about u = a exp(-2 i a^2 t): the carried mode rotates at
      // 2a^2, mode n != 0 at 2a^2 + sqrt(k^4 + 4 a^2 k^2) with k = 2 pi n.
      if (n == 0) return 2.0 * a2;
      const double k2 = 4.0 * kPi * kPi * n * n;
      return 2.0 * a2 + std::sqrt(k2 * k2 + 4.0 * a2 * k2);
    }
    case Profile::Kind::plane_wave:
      if (n == profile.n) return 4.0 * kPi * kPi * n * n + 2.0 * a2;
      return std::nullopt;
    default: return std::nullopt;
  }
}

CheckResult evaluate_check(ScenarioContext& context, const CheckSpec& spec) {
  CheckResult r;
  r.name = spec.name;
  r.kind = spec.kind;
  r.criterion = spec.criterion;
  r.bound = spec.bound;
  const auto it = registry().find(spec.kind);
  if (it == registry().end()) {
    r.relation = "<=";
    r.note = "unknown check kind";
    r.value = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  r.relation = it->second.strict ? "<" : "<=";
  try {
    const Outcome o = it->second.fn(context, spec);
    r.value = o.value;
    r.note = o.note;
    r.pass = std::isfinite(o.value) && (it->second.strict ? o.value < spec.bound : o.value <= spec.bound);
  } catch (const std::exception& e) {
    r.value = std::numeric_limits<double>::quiet_NaN();
    r.note = e.what();
    r.pass = false;
  }
  return r;
}

const std::vector<std::string>& check_kinds() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, kind] : registry()) v.push_back(name);
    return v;
  }();
  return names;
}

SuiteReport check_suite(SuiteLevel level, const std::filesystem::path& dir,
                        const std::optional<std::filesystem::path>& outdir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigurationError("scenario directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  const auto start = std::chrono::steady_clock::now();
  SuiteReport report;
  for (const auto& file : files) {
    const Scenario sc = load_scenario(file);
    if (level == SuiteLevel::quick && sc.level != "quick") continue;
    std::optional<std::filesystem::path> where;
    if (outdir) where = *outdir / sc.name;
    report.scenarios.push_back(run_scenario(sc, where));
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.pass = !report.scenarios.empty() &&
                std::all_of(report.scenarios.begin(), report.scenarios.end(), [](const ScenarioResult& s) { return s.pass; });
  return report;
}

std::map<int, bool> criterion_verdicts(const SuiteReport& report) {
  std::map<int, bool> out;
  for (const auto& s : report.scenarios)
    for (const auto& c : s.checks) {
      if (!c.criterion) continue;
      auto [it, inserted] = out.emplace(*c.criterion, c.pass);
      if (!inserted) it->second = it->second && c.pass;
    }
  return out;
}

std::filesystem::path default_scenario_dir() {
  if (const char* env = std::getenv("NLSLAB_SCENARIO_DIR"); env && *env) return env;
  return NLSLAB_DEFAULT_SCENARIO_DIR;
}

}  // namespace nlslab
