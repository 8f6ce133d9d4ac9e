#pragma once

#include "nlslab/zs_spectral.hpp"

#include <iosfwd>
#include <map>

namespace nlslab {

/// pi_n = n pi for n != 0, pi_0 = 1.
double pi_index(int n);

/// Circle around [lambda_m^-, lambda_m^+], traversed counter-clockwise.
struct Contour {
  double center = 0.0;
  double radius = 0.0;
  int nodes = 64;
};

struct NormalizationOptions {
  int nodes = 64;                   ///< trapezoid nodes per contour
  double neighbor_fraction = 0.05;  ///< radius = max(gamma_m, fraction * neighbor distance)
  double radius_scale = 1.0;        ///< extra factor applied to every radius
  double tolerance = 1e-12;         ///< Newton stops once max |residual| <= tolerance
  double certificate = 1e-8;        ///< residual bound a converged set must meet
  int max_iterations = 50;
};

/// Zeros sigma_k^n of psi_n on the open gaps k != n, and psi_n's multiplier.
/// Closed gaps carry sigma_k^n = tau_k implicitly and are not stored.
struct SigmaSet {
  int n = 0;
  std::map<int, double> sigma;
  double multiplier = 0.0;  ///< nominal value -2/pi_n
  int iterations = 0;
  bool converged = false;
  std::map<int, double> residuals;  ///< normalization residual per open m and m = n
  double max_residual = 0.0;
  int projections = 0;  ///< Newton steps clipped back into a gap interval

  double sigma_at(const GapTable& gaps, int k) const;
  double alpha(const GapTable& gaps, int k) const { return sigma_at(gaps, k) - gaps.at(k).tau; }
};

/// (tau_k - lambda) sqrt(1 - ((gamma_k/2)/(tau_k - lambda))^2), principal root;
/// cut along [lambda_k^-, lambda_k^+] and ~ tau_k - lambda at infinity.
cplx standard_root(const GapEntry& gap, cplx lambda);

/// 2i prod_{|k|<=K} w_k(lambda)/pi_k times the tail prod_{|k|>K}(k pi - lambda)/pi_k,
/// the tail taken from the closed form -2i sin(lambda) of the zero potential.
/// Throws BranchError on an open gap interval.
cplx canonical_root(const GapTable& gaps, cplx lambda);

/// psi_n(lambda) from its zeros, truncated to |k| <= K with the same tail as
/// canonical_root.
cplx psi(const GapTable& gaps, const SigmaSet& sig, cplx lambda);

/// psi_n / canonical_root in closed ratio form: closed gaps cancel exactly,
///   (multiplier / (-2/pi_n)) * i / w_n(lambda) * prod_{k != n, open} (sigma_k - lambda)/w_k(lambda).
cplx normalization_integrand(const GapTable& gaps, const SigmaSet& sig, cplx lambda);

/// Contour for gap m; throws GeometryError if it cannot isolate the gap.
Contour contour_for(const GapTable& gaps, int m, const NormalizationOptions& options = {});

/// (1/2pi) \oint_{Gamma_m} psi_n / canonical_root dlambda, trapezoid rule.
cplx normalization_integral(const GapTable& gaps, const SigmaSet& sig, const Contour& contour);

/// Real part of the integral minus delta_nm.
double normalization_residual(const GapTable& gaps, const SigmaSet& sig, int m,
                              const NormalizationOptions& options = {});

/// Newton solve of the normalization conditions for psi_n. Unknowns are the
/// sigma_k^n on open gaps k != n plus the multiplier.
SigmaSet solve_sigma(const GapTable& gaps, int n, const NormalizationOptions& options = {});

/// |sum_{k != n, open}(sigma_k^n - tau_k) - (tau_n - n pi)|
double trace_identity_check(const GapTable& gaps, const SigmaSet& sig);

/// Columns k, tau_k, sigma_k_n, alpha_k_n, residual for every k in the table
/// except n; closed gaps report sigma = tau and the residual of their contour.
void write_sigma_csv(std::ostream& os, const GapTable& gaps, const SigmaSet& sig,
                     const NormalizationOptions& options = {});

}  // namespace nlslab
