#include "nlslab/psi_normalization.hpp"

#include "nlslab/csv.hpp"
#include "nlslab/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

namespace nlslab {
namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

double effective_gamma(const GapEntry& e) { return e.open ? e.gamma : 0.0; }

// sin(lambda) / (j pi - lambda), continuous through lambda = j pi.
cplx sin_over_node(cplx lambda, int j) {
  const cplx d = lambda - j * kPi;
  const double sign = (j % 2 == 0) ? 1.0 : -1.0;
  // sin(lambda) = (-1)^j sin(d)
  if (std::abs(d) < 1e-6) return -sign * (1.0 - d * d / 6.0);
  return -sign * std::sin(d) / d;
}

int nearest_node(cplx lambda) { return static_cast<int>(std::lround(lambda.real() / kPi)); }

void require_off_cuts(const GapTable& gaps, cplx lambda) {
  if (lambda.imag() != 0.0) return;
  for (const auto& e : gaps.entries())
    if (e.open && lambda.real() >= e.lambda_minus && lambda.real() <= e.lambda_plus)
      throw BranchError("lambda lies on the cut of gap " + std::to_string(e.n));
}

double neighbor_distance(const GapTable& gaps, int m) {
  const GapEntry& e = gaps.at(m);
  double d = std::numeric_limits<double>::infinity();
  if (gaps.contains(m - 1)) d = std::min(d, e.lambda_minus - gaps.at(m - 1).lambda_plus);
  if (gaps.contains(m + 1)) d = std::min(d, gaps.at(m + 1).lambda_minus - e.lambda_plus);
  return std::isfinite(d) ? d : kPi;
}

}  // namespace

double pi_index(int n) { return n == 0 ? 1.0 : n * kPi; }

double SigmaSet::sigma_at(const GapTable& gaps, int k) const {
  const auto it = sigma.find(k);
  return it != sigma.end() ? it->second : gaps.at(k).tau;
}

cplx standard_root(const GapEntry& gap, cplx lambda) {
  const cplx d = gap.tau - lambda;
  const double half = 0.5 * effective_gamma(gap);
  if (half == 0.0) return d;
  if (d == 0.0) throw BranchError("standard root evaluated at the gap center");
  const cplx ratio = half / d;
  return d * std::sqrt(1.0 - ratio * ratio);
}

cplx canonical_root(const GapTable& gaps, cplx lambda) {
  require_off_cuts(gaps, lambda);
  const int j = nearest_node(lambda);
  const bool paired = gaps.contains(j);
  cplx value = paired ? -2.0 * kI * sin_over_node(lambda, j) : -2.0 * kI * std::sin(lambda);
  for (const auto& e : gaps.entries()) {
    const cplx w = standard_root(e, lambda);
    value *= (paired && e.n == j) ? w : w / (e.n * kPi - lambda);
  }
  return value;
}

cplx psi(const GapTable& gaps, const SigmaSet& sig, cplx lambda) {
  // psi_n = c pi_n (-sin lambda) prod_{k != n}(s_k - lambda) / prod_k (k pi - lambda)
  const int j = nearest_node(lambda);
  const bool paired = gaps.contains(j);
  cplx value = -sig.multiplier * pi_index(sig.n) *
               (paired ? sin_over_node(lambda, j) : std::sin(lambda));
  for (const auto& e : gaps.entries()) {
    if (e.n != sig.n) value *= sig.sigma_at(gaps, e.n) - lambda;
    if (!(paired && e.n == j)) value /= e.n * kPi - lambda;
  }
  return value;
}

cplx normalization_integrand(const GapTable& gaps, const SigmaSet& sig, cplx lambda) {
  const double scale = sig.multiplier / (-2.0 / pi_index(sig.n));
  cplx value = scale * kI / standard_root(gaps.at(sig.n), lambda);
  for (const auto& [k, s] : sig.sigma) value *= (s - lambda) / standard_root(gaps.at(k), lambda);
  return value;
}

Contour contour_for(const GapTable& gaps, int m, const NormalizationOptions& options) {
  const GapEntry& e = gaps.at(m);
  const double gamma = effective_gamma(e);
  const double d = neighbor_distance(gaps, m);
  Contour c;
  c.center = e.tau;
  c.radius = std::max(gamma, options.neighbor_fraction * d) * options.radius_scale;
  c.nodes = options.nodes;
  if (options.nodes < 8) throw ConfigurationError("contour needs at least 8 nodes");
  if (!(c.radius > 0.5 * gamma) || !(c.radius < 0.5 * gamma + d))
    throw GeometryError("contour around gap " + std::to_string(m) +
                        " cannot separate it from its neighbors");
  return c;
}

cplx normalization_integral(const GapTable& gaps, const SigmaSet& sig, const Contour& contour) {
  // (1/2pi) \oint f dlambda with lambda = c + r e^{i theta}, dlambda = i r e^{i theta} dtheta.
  cplx sum = 0.0;
  for (int j = 0; j < contour.nodes; ++j) {
    const double theta = 2.0 * kPi * j / contour.nodes;
    const cplx e = std::polar(1.0, theta);
    const cplx lambda = contour.center + contour.radius * e;
    sum += normalization_integrand(gaps, sig, lambda) * kI * contour.radius * e;
  }
  return sum / static_cast<double>(contour.nodes);
}

double normalization_residual(const GapTable& gaps, const SigmaSet& sig, int m,
                              const NormalizationOptions& options) {
  const cplx value = normalization_integral(gaps, sig, contour_for(gaps, m, options));
  return value.real() - (m == sig.n ? 1.0 : 0.0);
}

SigmaSet solve_sigma(const GapTable& gaps, int n, const NormalizationOptions& options) {
  if (!gaps.contains(n)) throw DomainError("n = " + std::to_string(n) + " outside the gap table");
  SigmaSet sig;
  sig.n = n;
  sig.multiplier = -2.0 / pi_index(n);

  std::vector<int> unknown_gaps;
  for (int k : gaps.open_indices())
    if (k != n) {
      unknown_gaps.push_back(k);
      sig.sigma[k] = gaps.at(k).tau;
    }
  std::vector<int> equations = unknown_gaps;
  equations.push_back(n);
  std::vector<Contour> contours;
  for (int m : equations) contours.push_back(contour_for(gaps, m, options));

  const auto size = static_cast<Eigen::Index>(equations.size());
  const auto evaluate = [&](const SigmaSet& s) {
    Eigen::VectorXd r(size);
    for (Eigen::Index i = 0; i < size; ++i) {
      const int m = equations[static_cast<std::size_t>(i)];
      r(i) = normalization_integral(gaps, s, contours[static_cast<std::size_t>(i)]).real() -
             (m == n ? 1.0 : 0.0);
    }
    return r;
  };
  const auto get = [&](const SigmaSet& s, Eigen::Index i) {
    return i + 1 < size ? s.sigma.at(unknown_gaps[static_cast<std::size_t>(i)]) : s.multiplier;
  };
  const auto set = [&](SigmaSet& s, Eigen::Index i, double v) {
    if (i + 1 < size) s.sigma[unknown_gaps[static_cast<std::size_t>(i)]] = v;
    else s.multiplier = v;
  };

  Eigen::VectorXd residual = evaluate(sig);
  while (residual.cwiseAbs().maxCoeff() > options.tolerance) {
    if (sig.iterations >= options.max_iterations) {
      std::string msg = "sigma solve for n = " + std::to_string(n) + " did not converge; residuals:";
      for (Eigen::Index i = 0; i < size; ++i)
        msg += " m=" + std::to_string(equations[static_cast<std::size_t>(i)]) + ":" +
               csv::format(residual(i));
      throw SolverError(msg);
    }
    // The residuals are affine in each unknown separately, so central
    // differences are exact up to rounding for any step.
    Eigen::MatrixXd jac(size, size);
    for (Eigen::Index i = 0; i < size; ++i) {
      const double x = get(sig, i);
      const double h = i + 1 < size
                           ? std::max(1e-3 * gaps.at(unknown_gaps[static_cast<std::size_t>(i)]).gamma, 1e-10)
                           : 1e-3 * std::abs(x);
      SigmaSet plus = sig, minus = sig;
      set(plus, i, x + h);
      set(minus, i, x - h);
      jac.col(i) = (evaluate(plus) - evaluate(minus)) / (2.0 * h);
    }
    const Eigen::VectorXd step = jac.partialPivLu().solve(-residual);
    if (!step.allFinite()) throw SolverError("singular normalization Jacobian for n = " + std::to_string(n));

    // Largest fraction of the step that keeps every sigma inside its gap.
    double fraction = 1.0;
    for (Eigen::Index i = 0; i + 1 < size; ++i) {
      const GapEntry& g = gaps.at(unknown_gaps[static_cast<std::size_t>(i)]);
      const double x = get(sig, i);
      const double target = x + step(i);
      if (target > g.lambda_plus && step(i) != 0.0) fraction = std::min(fraction, (g.lambda_plus - x) / step(i));
      if (target < g.lambda_minus && step(i) != 0.0) fraction = std::min(fraction, (g.lambda_minus - x) / step(i));
    }
    if (fraction < 1.0) ++sig.projections;
    fraction = std::max(fraction, 0.0);

    const double current = residual.cwiseAbs().maxCoeff();
    SigmaSet trial = sig;
    Eigen::VectorXd trial_residual = residual;
    for (int halving = 0; halving < 30; ++halving) {
      trial = sig;
      for (Eigen::Index i = 0; i < size; ++i) set(trial, i, get(sig, i) + fraction * step(i));
      for (auto& [k, s] : trial.sigma) {
        const GapEntry& g = gaps.at(k);
        s = std::clamp(s, g.lambda_minus, g.lambda_plus);
      }
      trial_residual = evaluate(trial);
      if (trial_residual.cwiseAbs().maxCoeff() < current) break;
      fraction *= 0.5;
    }
    sig.sigma = trial.sigma;
    sig.multiplier = trial.multiplier;
    residual = trial_residual;
    ++sig.iterations;
  }

  for (Eigen::Index i = 0; i < size; ++i)
    sig.residuals[equations[static_cast<std::size_t>(i)]] = residual(i);
  sig.max_residual = residual.cwiseAbs().maxCoeff();
  sig.converged = sig.max_residual <= options.certificate;
  return sig;
}

double trace_identity_check(const GapTable& gaps, const SigmaSet& sig) {
  double sum = 0.0;
  for (const auto& [k, s] : sig.sigma) sum += s - gaps.at(k).tau;
  return std::abs(sum - (gaps.at(sig.n).tau - sig.n * kPi));
}

void write_sigma_csv(std::ostream& os, const GapTable& gaps, const SigmaSet& sig,
                     const NormalizationOptions& options) {
  csv::Writer w(os);
  w.header({"k", "tau_k", "sigma_k_n", "alpha_k_n", "residual"});
  for (const auto& e : gaps.entries()) {
    if (e.n == sig.n) continue;
    const double s = sig.sigma_at(gaps, e.n);
    w.row(e.n, e.tau, s, s - e.tau, normalization_residual(gaps, sig, e.n, options));
  }
}

}  // namespace nlslab
