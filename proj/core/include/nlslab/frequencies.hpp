#pragma once

#include "nlslab/psi_normalization.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

namespace nlslab {

struct FrequencyRow {
  int n = 0;
  double omega_nls = 0.0;
  double omega_renorm = 0.0;  ///< omega_nls - 4 pi^2 n^2
  double rho = 0.0;           ///< omega_renorm - 4 \int phi1 phi2
  double weighted_rho = 0.0;  ///< (1 + |n|) rho
};

struct FrequencyTable {
  std::vector<FrequencyRow> rows;  ///< ascending n
  double pairing = 0.0;            ///< \int phi1 phi2
  double tail_bound = 0.0;         ///< estimate of the omitted sum over |k| > K of gamma_k^2

  const FrequencyRow* find(int n) const;
  double omega(int n) const;  ///< throws DomainError when n is not tabulated
};

/// 2 tau_n^2 + 2 n^2 pi^2 + 2 sum_{k != n}(tau_k - sigma_k)(tau_k + sigma_k)
/// + (1/2) sum_k gamma_k^2, both sums over open gaps. Rejects an unconverged
/// or mismatched SigmaSet with DomainError.
double frequency(const GapTable& gaps, const SigmaSet& sig, int n);

/// Sum over |k| > K of gamma_k^2, extrapolated from a power-law fit to the
/// open gaps in K/2 < |k| <= K. Zero when none of them is open, infinite
/// when they do not decay faster than 1/|k|.
double gamma_tail_bound(const GapTable& gaps);

FrequencyTable frequency_residuals(const GapTable& gaps, const std::map<int, SigmaSet>& sigmas,
                                   const Potential& phi);

/// Spectrum, sigma solves for every n in ns (in parallel) and the table.
struct FrequencyPipeline {
  GapTable gaps;
  std::map<int, SigmaSet> sigmas;
  FrequencyTable table;
};
FrequencyPipeline run_frequency_pipeline(const Potential& phi, int K, const std::vector<int>& ns,
                                         const SpectrumOptions& spectrum = {},
                                         const NormalizationOptions& normalization = {});

/// n |sum_{|k| <= |n|/2, open, k != n}((tau_k - sigma_k)(tau_k + sigma_k) + (gamma_k/2)^2)
///    - \int phi1 phi2|
double pairing_identity_check(const GapTable& gaps, const SigmaSet& sig, int n, const Potential& phi);

/// max_n |omega_renorm|
double omega_sup_check(const FrequencyTable& table);

/// max_n (1 + |n|) |rho_n|, optionally restricted to lo <= n <= hi.
double max_weighted_rho(const FrequencyTable& table, std::optional<int> lo = {},
                        std::optional<int> hi = {});

/// Least-squares slope of log|rho_n| against log n over lo <= n <= hi, n > 0.
/// Throws DomainError with fewer than two usable rows.
double rho_loglog_slope(const FrequencyTable& table, int lo, int hi);

/// Columns n, omega_nls, omega_renorm, rho, weighted_rho.
void write_frequency_csv(std::ostream& os, const FrequencyTable& table);

}  // namespace nlslab
