#pragma once

#include "nlslab/field.hpp"

#include <iosfwd>
#include <vector>

namespace nlslab {

/// Fundamental matrix at x = 1 of  i sigma3 F' + Q F = lambda F,  F(0) = Id.
struct MonodromyMatrix {
  cplx lambda;
  cplx m11, m12, m21, m22;

  cplx trace() const { return m11 + m22; }
  cplx det() const { return m11 * m22 - m12 * m21; }
};

/// Discriminant and its lambda-derivative at one point.
struct DiscriminantJet {
  cplx value;
  cplx derivative;
};

/// Zakharov-Shabat operator L(phi) = i sigma3 d/dx + [[0, phi1], [phi2, 0]]
/// discretized by freezing the potential at cell midpoints. Each cell is
/// propagated by its exact 2x2 exponential
///   exp(hA) = cosh(x) Id + sinh(x)/x hA,   x^2 = h^2 (phi1 phi2 - lambda^2),
/// so det = 1 holds cell by cell.
class ZsOperator {
public:
  /// cells = 0 selects four cells per grid point.
  explicit ZsOperator(const Potential& phi, int cells = 0);

  int cells() const noexcept { return static_cast<int>(q1_.size()); }
  bool real_type() const noexcept { return real_type_; }

  MonodromyMatrix monodromy(cplx lambda) const;
  cplx discriminant(cplx lambda) const;
  DiscriminantJet discriminant_jet(cplx lambda) const;

private:
  std::vector<cplx> q1_;
  std::vector<cplx> q2_;
  std::vector<cplx> product_;  // q1 q2 per cell, exactly real for real-type data
  double h_;
  bool real_type_;
};

MonodromyMatrix monodromy(const Potential& phi, cplx lambda, int cells);
cplx discriminant(const Potential& phi, cplx lambda, int cells = 0);

/// Periodic eigenvalue pair near n pi.
struct GapEntry {
  int n = 0;
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;
  double tau = 0.0;    ///< (lambda_plus + lambda_minus) / 2
  double gamma = 0.0;  ///< lambda_plus - lambda_minus
  bool open = false;
  double peak = 0.0;   ///< max over the window of (-1)^n Delta - 2
};

class GapTable {
public:
  GapTable() = default;
  GapTable(int K, std::vector<GapEntry> entries);

  int K() const noexcept { return K_; }
  bool contains(int n) const noexcept { return n >= -K_ && n <= K_; }
  const GapEntry& at(int n) const;
  const std::vector<GapEntry>& entries() const noexcept { return entries_; }
  std::vector<int> open_indices() const;

private:
  int K_ = 0;
  std::vector<GapEntry> entries_;
};

struct SpectrumOptions {
  int cells = 0;                      ///< 0: four cells per grid point
  int scan_points = 64;               ///< samples per window for the sign scan
  double discriminant_noise = 1e-12;  ///< peaks at or below this are double points
  double gap_tol = 1e-9;              ///< gaps below gap_tol * max(1,|n|) count as closed
  double root_tol = 1e-14;            ///< absolute bracket width for root polishing
  double argument_height = 0.5;       ///< half-height of the argument-principle rectangle
};

/// Locates the two zeros of Delta^2 - 4 in each window |lambda - n pi| <= pi/2,
/// n in [-K, K]. Throws ResolutionError when a window does not hold exactly
/// two eigenvalues and InternalError when a real-type potential yields a
/// non-real eigenvalue.
GapTable periodic_spectrum(const Potential& phi, int K, const SpectrumOptions& options = {});
GapTable periodic_spectrum(const ZsOperator& op, int K, const SpectrumOptions& options = {});

/// Zeros of Delta^2 - 4 inside the rectangle [lo, hi] x [-height, height],
/// counted with multiplicity by the argument principle.
int count_periodic_eigenvalues(const ZsOperator& op, double lo, double hi, double height);

struct TauResidual {
  int k;
  double residual;  ///< k^2 |tau_k - k pi - (1/(2 pi k)) \int phi1 phi2|
};

std::vector<TauResidual> tau_asymptotics_check(const GapTable& gaps, const Potential& phi);

/// Columns n, lambda_minus, lambda_plus, tau, gamma, open.
void write_gap_csv(std::ostream& os, const GapTable& gaps);

}  // namespace nlslab
