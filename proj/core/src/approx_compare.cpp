#include "nlslab/approx_compare.hpp"

#include "nlslab/csv.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/log.hpp"
#include "nlslab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

namespace nlslab {
namespace {

constexpr double kPi = std::numbers::pi;

double free_frequency(int n) { return 4.0 * kPi * kPi * n * n; }

double weight(int n, double s) {
  return std::pow(std::max(1.0, std::abs(static_cast<double>(n))), 2.0 * s);
}

double slope_of(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = m * sxx - sx * sx;
  return den != 0.0 ? (m * sxy - sx * sy) / den : 0.0;
}

}  // namespace

LinearFlow LinearFlow::nearly_linear(const StateField& u0, const FrequencyTable& table, double floor) {
  const auto& grid = u0.grid();
  const double c = 4.0 * sobolev_norm_squared(grid, u0.modes(), 0.0);
  std::vector<double> omega(static_cast<std::size_t>(grid.size()));
  std::string uncovered;
  for (int n = grid.min_mode(); n <= grid.max_mode(); ++n) {
    if (const FrequencyRow* row = table.find(n)) {
      omega[grid.slot(n)] = row->omega_nls;
      continue;
    }
    omega[grid.slot(n)] = free_frequency(n) + c;
    if (std::abs(u0.mode(n)) >= floor) uncovered += " " + std::to_string(n);
  }
  if (!uncovered.empty())
    log::warn("no tabulated frequency for carried modes" + uncovered +
              "; using 4 pi^2 n^2 + 4 int |u0|^2");
  return LinearFlow(u0, std::move(omega));
}

LinearFlow LinearFlow::modified_free(const StateField& u0) {
  const auto& grid = u0.grid();
  const double c = 4.0 * sobolev_norm_squared(grid, u0.modes(), 0.0);
  std::vector<double> omega(static_cast<std::size_t>(grid.size()));
  for (int n = grid.min_mode(); n <= grid.max_mode(); ++n) omega[grid.slot(n)] = free_frequency(n) + c;
  return LinearFlow(u0, std::move(omega));
}

double LinearFlow::omega(int n) const {
  if (!u0_.grid().holds(n)) throw DomainError("mode " + std::to_string(n) + " not on the grid");
  return omega_[u0_.grid().slot(n)];
}

std::vector<cplx> LinearFlow::modes_at(double t) const {
  const auto m0 = u0_.modes();
  std::vector<cplx> m(m0.size());
  for (std::size_t j = 0; j < m.size(); ++j) m[j] = m0[j] * std::polar(1.0, -omega_[j] * t);
  return m;
}

StateField LinearFlow::state(double t) const {
  if (t == 0.0) return u0_;
  return StateField::from_modes(u0_.grid(), modes_at(t));
}

StateField build_v(const StateField& u0, const FrequencyTable& omegas, double t) {
  return LinearFlow::nearly_linear(u0, omegas).state(t);
}

StateField build_w(const StateField& u0, double t) { return LinearFlow::modified_free(u0).state(t); }

NormSeries difference_series(const Trajectory& traj, Reference ref, double s, const FrequencyTable* table) {
  if (traj.states.empty()) throw ConfigurationError("empty trajectory");
  if (s < 0.0) throw DomainError("Sobolev index must be non-negative");
  if (ref == Reference::v && !table) throw ConfigurationError("u - v needs a frequency table");
  const StateField& u0 = traj.states.front();
  const LinearFlow flow =
      ref == Reference::v ? LinearFlow::nearly_linear(u0, *table) : LinearFlow::modified_free(u0);
  const auto& grid = u0.grid();

  NormSeries out;
  out.s = s;
  out.label = ref == Reference::v ? "u-v" : "u-w";
  out.times = traj.times;
  out.values.assign(traj.states.size(), 0.0);
  parallel_for(traj.states.size(), [&](std::size_t i) {
    const auto r = flow.modes_at(traj.times[i]);
    const auto u = traj.states[i].modes();
    double sum = 0.0;
    for (int n = grid.min_mode(); n <= grid.max_mode(); ++n)
      sum += weight(n, s) * std::norm(u[grid.slot(n)] - r[grid.slot(n)]);
    out.values[i] = std::sqrt(sum);
  });
  return out;
}

NormSeries norm_series(const Trajectory& traj, double s) {
  NormSeries out;
  out.s = s;
  out.label = "u";
  out.times = traj.times;
  out.values.reserve(traj.states.size());
  for (const auto& st : traj.states) out.values.push_back(sobolev_norm(st, s));
  return out;
}

BoundednessVerdict boundedness_verdict(const NormSeries& series, double fraction, double floor) {
  if (series.values.size() != series.times.size() || series.values.empty())
    throw ConfigurationError("norm series is empty or misaligned");
  BoundednessVerdict v;
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    v.sup = std::max(v.sup, series.values[i]);
    v.span = std::max(v.span, std::abs(series.times[i]));
  }
  std::vector<double> t(series.times.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::abs(series.times[i]);
  v.slope = slope_of(t, series.values);
  v.bounded = v.sup <= floor || v.slope * v.span <= fraction * v.sup;
  return v;
}

LinearGrowth linear_growth(const NormSeries& series, double t_start) {
  LinearGrowth g;
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    const double t = std::abs(series.times[i]);
    const double r = series.values[i] / (1.0 + t);
    g.constant = std::max(g.constant, r);
    if (t <= t_start) g.early_max = std::max(g.early_max, r);
    else g.late_max = std::max(g.late_max, r);
  }
  g.running_max_flat = g.late_max <= g.early_max;
  return g;
}

std::map<int, double> extract_frequencies(const Trajectory& traj, double amplitude_floor) {
  if (traj.states.size() < 3) throw ConfigurationError("frequency extraction needs at least three samples");
  const StateField& u0 = traj.states.front();
  const auto& grid = u0.grid();
  std::vector<int> modes;
  for (int n = grid.min_mode(); n <= grid.max_mode(); ++n)
    if (std::abs(u0.mode(n)) >= amplitude_floor) modes.push_back(n);

  std::vector<double> result(modes.size());
  std::vector<char> keep(modes.size(), 1);
  parallel_for(modes.size(), [&](std::size_t m) {
    const int n = modes[m];
    std::vector<double> phase(traj.states.size());
    cplx previous{};
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      const cplx c = traj.states[i].mode(n);
      if (std::abs(c) < amplitude_floor) {
        keep[m] = 0;
        log::warn("mode " + std::to_string(n) + " fell below the amplitude floor at t = " +
                  csv::format(traj.times[i]) + "; skipped");
        return;
      }
      const cplx z = c * std::polar(1.0, free_frequency(n) * traj.times[i]);
      phase[i] = i == 0 ? std::arg(z) : phase[i - 1] + std::arg(z / previous);
      previous = z;
    }
    const double slope = slope_of(traj.times, phase);
    const double spacing = std::abs(traj.times[1] - traj.times[0]);
    if (std::abs(slope) * spacing >= 0.5 * kPi)
      throw ConfigurationError("samples too sparse to unwrap the phase of mode " + std::to_string(n));
    result[m] = free_frequency(n) - slope;
  });
  std::map<int, double> out;
  for (std::size_t m = 0; m < modes.size(); ++m)
    if (keep[m]) out[modes[m]] = result[m];
  return out;
}

std::vector<ModeAmplitude> shift_profile(const std::vector<ModeAmplitude>& modes, int L, double norm_index) {
  if (L < 1) throw ConfigurationError("shift base mode must be >= 1");
  std::vector<ModeAmplitude> out;
  for (const auto& m : modes) {
    if (m.n == 0) throw ConfigurationError("cannot shift a profile that carries mode 0");
    const int sign = m.n > 0 ? 1 : -1;
    const int shifted = m.n + sign * (L - 1);
    const double ratio = std::pow(static_cast<double>(std::abs(m.n)) / std::abs(shifted), norm_index);
    out.push_back({shifted, m.amplitude * ratio});
  }
  return out;
}

StateField field_from_modes(const SpectralGrid& grid, const std::vector<ModeAmplitude>& modes) {
  std::vector<cplx> m(static_cast<std::size_t>(grid.size()));
  for (const auto& e : modes) {
    if (!grid.holds(e.n) || e.n == grid.min_mode())
      throw ConfigurationError("mode " + std::to_string(e.n) + " not resolved by a " +
                               std::to_string(grid.size()) + "-point grid");
    m[grid.slot(e.n)] += e.amplitude;
  }
  return StateField::from_modes(grid, std::move(m));
}

HighfreqReport highfreq_experiment(const HighfreqOptions& options) {
  if (options.shifts.empty()) throw ConfigurationError("no shifts requested");
  if (!(options.t_end > 0.0)) throw ConfigurationError("highfreq T must be positive");
  const SpectralGrid grid(options.point_count);
  HighfreqReport report;
  for (int L : options.shifts) {
    const auto modes = shift_profile(options.profile, L, options.norm_index);
    const StateField u0 = field_from_modes(grid, modes);
    std::vector<int> ns;
    int top = 0;
    for (const auto& m : modes) {
      ns.push_back(m.n);
      top = std::max(top, std::abs(m.n));
    }
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    const int K = std::max(options.K, top + 4);
    const auto pipeline = run_frequency_pipeline(Potential::from_field(u0), K, ns, options.spectrum,
                                                 options.normalization);

    const Trajectory forward = evolve(u0, options.t_end, options.dt, options.stride);
    const Trajectory backward = evolve(u0, -options.t_end, options.dt, options.stride);
    HighfreqRow row;
    row.L = L;
    row.h_norm = sobolev_norm(u0, options.norm_index);
    for (double v : difference_series(forward, Reference::v, options.norm_index, &pipeline.table).values)
      row.sup_uv = std::max(row.sup_uv, v);
    for (const auto* traj : {&forward, &backward})
      for (double v : difference_series(*traj, Reference::w, options.norm_index).values)
        row.sup_uw = std::max(row.sup_uw, v);
    if (!report.smallest_L_v && row.sup_uv <= options.epsilon) report.smallest_L_v = L;
    if (!report.smallest_L_w && row.sup_uw <= options.epsilon) report.smallest_L_w = L;
    report.rows.push_back(row);
  }
  report.sup_uv_decreasing = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    if (!(report.rows[i].sup_uv < report.rows[i - 1].sup_uv)) report.sup_uv_decreasing = false;
  return report;
}

void write_norm_series_csv(std::ostream& os, const NormSeries& series) {
  csv::Writer w(os);
  w.comment(series.label + " in H^" + csv::format(series.s));
  w.header({"t", "value"});
  for (std::size_t i = 0; i < series.values.size(); ++i) w.row(series.times[i], series.values[i]);
}

void write_extracted_csv(std::ostream& os, const std::map<int, double>& omegas) {
  csv::Writer w(os);
  w.header({"n", "omega_hat"});
  for (const auto& [n, om] : omegas) w.row(n, om);
}

void write_highfreq_csv(std::ostream& os, const HighfreqReport& report) {
  csv::Writer w(os);
  w.header({"L", "h_norm", "sup_uv", "sup_uw"});
  for (const auto& r : report.rows) w.row(r.L, r.h_norm, r.sup_uv, r.sup_uw);
}

}  // namespace nlslab
