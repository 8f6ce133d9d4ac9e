#include "nlslab/frequencies.hpp"

#include "nlslab/csv.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

namespace nlslab {
namespace {

constexpr double kPi = std::numbers::pi;

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = m * sxx - sx * sx;
  LineFit f;
  f.slope = (m * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / m;
  return f;
}

}  // namespace

const FrequencyRow* FrequencyTable::find(int n) const {
  const auto it = std::lower_bound(rows.begin(), rows.end(), n,
                                   [](const FrequencyRow& r, int v) { return r.n < v; });
  return (it != rows.end() && it->n == n) ? &*it : nullptr;
}

double FrequencyTable::omega(int n) const {
  const FrequencyRow* row = find(n);
  if (!row) throw DomainError("no frequency tabulated for n = " + std::to_string(n));
  return row->omega_nls;
}

double frequency(const GapTable& gaps, const SigmaSet& sig, int n) {
  if (sig.n != n)
    throw DomainError("sigma set belongs to n = " + std::to_string(sig.n) + ", not " +
                      std::to_string(n));
  if (!sig.converged)
    throw DomainError("sigma set for n = " + std::to_string(n) + " is not converged (residual " +
                      csv::format(sig.max_residual) + ")");
  const double tau_n = gaps.at(n).tau;
  double omega = 2.0 * tau_n * tau_n + 2.0 * n * n * kPi * kPi;
  // Sign as in the residual expansion (tau - sigma)(tau + sigma); the other
  // sign contradicts the exact constant-potential frequencies 2a^2 + 4 n pi tau_n.
  for (const auto& [k, s] : sig.sigma) {
    const double tau = gaps.at(k).tau;
    omega += 2.0 * (tau - s) * (tau + s);
  }
  for (const auto& e : gaps.entries())
    if (e.open) omega += 0.5 * e.gamma * e.gamma;
  return omega;
}

double gamma_tail_bound(const GapTable& gaps) {
  const int K = gaps.K();
  std::vector<double> x, y;
  for (const auto& e : gaps.entries())
    if (e.open && 2 * std::abs(e.n) > K) {
      x.push_back(std::log(static_cast<double>(std::abs(e.n))));
      y.push_back(std::log(e.gamma));
    }
  if (x.empty()) return 0.0;
  if (x.size() == 1 || *std::min_element(x.begin(), x.end()) == *std::max_element(x.begin(), x.end())) {
    // A single point: assume 1/k^2 decay through it.
    const double g = std::exp(y.front()) * std::exp(2.0 * x.front());
    return 2.0 * g * g / (3.0 * std::pow(K, 3.0));
  }
  const LineFit f = least_squares(x, y);
  const double p = 2.0 * f.slope;  // gamma^2 ~ A^2 k^p
  if (p >= -1.0) return std::numeric_limits<double>::infinity();
  const double a2 = std::exp(2.0 * f.intercept);
  // Both signs of k, integral bound from K.
  return 2.0 * a2 * std::pow(static_cast<double>(K), p + 1.0) / (-p - 1.0);
}

FrequencyTable frequency_residuals(const GapTable& gaps, const std::map<int, SigmaSet>& sigmas,
                                   const Potential& phi) {
  FrequencyTable table;
  table.pairing = phi.pairing_integral().real();
  table.tail_bound = gamma_tail_bound(gaps);
  for (const auto& [n, sig] : sigmas) {
    FrequencyRow row;
    row.n = n;
    row.omega_nls = frequency(gaps, sig, n);
    row.omega_renorm = row.omega_nls - 4.0 * kPi * kPi * n * n;
    row.rho = row.omega_renorm - 4.0 * table.pairing;
    row.weighted_rho = (1.0 + std::abs(n)) * row.rho;
    table.rows.push_back(row);
  }
  return table;
}

FrequencyPipeline run_frequency_pipeline(const Potential& phi, int K, const std::vector<int>& ns,
                                         const SpectrumOptions& spectrum,
                                         const NormalizationOptions& normalization) {
  FrequencyPipeline out;
  out.gaps = periodic_spectrum(phi, K, spectrum);
  std::vector<SigmaSet> solved(ns.size());
  parallel_for(ns.size(), [&](std::size_t i) { solved[i] = solve_sigma(out.gaps, ns[i], normalization); });
  for (std::size_t i = 0; i < ns.size(); ++i) out.sigmas[ns[i]] = std::move(solved[i]);
  out.table = frequency_residuals(out.gaps, out.sigmas, phi);
  return out;
}

double pairing_identity_check(const GapTable& gaps, const SigmaSet& sig, int n, const Potential& phi) {
  double sum = 0.0;
  for (const auto& e : gaps.entries()) {
    if (!e.open || e.n == n || 2 * std::abs(e.n) > std::abs(n)) continue;
    const double s = sig.sigma_at(gaps, e.n);
    sum += (e.tau - s) * (e.tau + s) + 0.25 * e.gamma * e.gamma;
  }
  return std::abs(n) * std::abs(sum - phi.pairing_integral().real());
}

double omega_sup_check(const FrequencyTable& table) {
  double sup = 0.0;
  for (const auto& r : table.rows) sup = std::max(sup, std::abs(r.omega_renorm));
  return sup;
}

double max_weighted_rho(const FrequencyTable& table, std::optional<int> lo, std::optional<int> hi) {
  double sup = 0.0;
  for (const auto& r : table.rows) {
    if ((lo && r.n < *lo) || (hi && r.n > *hi)) continue;
    sup = std::max(sup, std::abs(r.weighted_rho));
  }
  return sup;
}

double rho_loglog_slope(const FrequencyTable& table, int lo, int hi) {
  std::vector<double> x, y;
  for (const auto& r : table.rows)
    if (r.n > 0 && r.n >= lo && r.n <= hi && r.rho != 0.0) {
      x.push_back(std::log(static_cast<double>(r.n)));
      y.push_back(std::log(std::abs(r.rho)));
    }
  if (x.size() < 2) throw DomainError("log-log fit needs at least two nonzero residuals");
  return least_squares(x, y).slope;
}

void write_frequency_csv(std::ostream& os, const FrequencyTable& table) {
  csv::Writer w(os);
  w.header({"n", "omega_nls", "omega_renorm", "rho", "weighted_rho"});
  for (const auto& r : table.rows) w.row(r.n, r.omega_nls, r.omega_renorm, r.rho, r.weighted_rho);
}

}  // namespace nlslab
