#include "nlslab/errors.hpp"
#include "nlslab/psi_normalization.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace nlslab;

namespace {

constexpr double kPi = std::numbers::pi;

Potential constant_potential(int N, double a) {
  return Potential::from_field(StateField::from_samples(SpectralGrid(N), std::vector<cplx>(N, cplx(a))));
}

Potential modes_potential(int N, std::initializer_list<std::pair<int, cplx>> modes) {
  const SpectralGrid g(N);
  std::vector<cplx> m(static_cast<std::size_t>(N));
  for (auto [n, a] : modes) m[g.slot(n)] = a;
  return Potential::from_field(StateField::from_modes(g, m));
}

}  // namespace

TEST_CASE("pi_index") {
  CHECK(pi_index(0) == 1.0);
  CHECK(pi_index(3) == doctest::Approx(3 * kPi));
  CHECK(pi_index(-2) == doctest::Approx(-2 * kPi));
}

TEST_CASE("zero potential: canonical root squares to Delta^2 - 4") {
  const auto phi = Potential::from_field(StateField::zero(SpectralGrid(16)));
  const auto gaps = periodic_spectrum(phi, 12);
  for (int j = 0; j < 32; ++j) {
    const cplx lambda = 2.0 + 0.8 * std::polar(1.0, 2 * kPi * j / 32.0);
    const cplx c = canonical_root(gaps, lambda);
    CHECK(std::abs(c * c - (4.0 * std::cos(lambda) * std::cos(lambda) - 4.0)) < 1e-8);
  }
}

TEST_CASE("canonical root against the discriminant on contours") {
  // The tail beyond K is the zero-potential one, so the square matches
  // Delta^2 - 4 up to prod_{|k|>K} ((tau_k - lambda)/(k pi - lambda))^2
  // ~ 1 + 2 P / (pi^2 K), P = \int phi1 phi2.
  const auto phi = modes_potential(64, {{1, 0.3}, {-2, 0.1}});
  const ZsOperator op(phi);
  const double P = phi.pairing_integral().real();
  double previous = 0.0;
  for (int K : {16, 32}) {
    const auto gaps = periodic_spectrum(op, K);
    double worst = 0.0;
    for (int m : {0, 1, -2, 3}) {
      const Contour c = contour_for(gaps, m);
      for (int j = 0; j < 16; ++j) {
        const cplx lambda = c.center + c.radius * std::polar(1.0, 2 * kPi * j / 16.0);
        const cplx d = op.discriminant(lambda);
        const cplx r = canonical_root(gaps, lambda);
        worst = std::max(worst, std::abs(r * r / (d * d - 4.0) - 1.0));
      }
    }
    CHECK(worst < 1.5 * 2 * P / (kPi * kPi * K));
    if (previous > 0.0) CHECK(worst < 0.6 * previous);
    previous = worst;
  }
}

TEST_CASE("constant potential: root branch follows continuation from i infinity") {
  const double a = 0.3;
  const auto gaps = periodic_spectrum(constant_potential(32, a), 12);
  const Contour c = contour_for(gaps, 0);
  // Walk from high on the imaginary axis down to the contour and track the
  // sign of sqrt(Delta^2 - 4) by continuity.
  const auto exact = [&](cplx l) {
    const cplx d = 2.0 * std::cos(std::sqrt(l * l - a * a));
    return d * d - 4.0;
  };
  cplx prev = canonical_root(gaps, cplx(0, 3.0));
  const double truncation = 1.5 * 2 * a * a / (kPi * kPi * 12);
  CHECK(std::abs(prev * prev / exact(cplx(0, 3.0)) - 1.0) < truncation);
  for (int j = 1; j <= 200; ++j) {
    const cplx l = cplx(0, 3.0 - (3.0 - c.radius) * j / 200.0);
    cplx root = std::sqrt(exact(l));
    if (std::abs(root - prev) > std::abs(root + prev)) root = -root;
    prev = root;
  }
  // Same branch: agreement to the truncation level, far from -prev.
  CHECK(std::abs(canonical_root(gaps, cplx(0, c.radius)) - prev) < truncation * std::abs(prev));
  CHECK_THROWS_AS(canonical_root(gaps, 0.1), BranchError);
}

TEST_CASE("standard root") {
  GapEntry e;
  e.n = 0;
  e.lambda_minus = -0.5;
  e.lambda_plus = 0.5;
  e.tau = 0.0;
  e.gamma = 1.0;
  e.open = true;
  const cplx far = standard_root(e, 100.0);
  CHECK(std::abs(far - (0.0 - 100.0)) < 0.01);
  const cplx z(0.2, 0.3);
  CHECK(std::abs(standard_root(e, z) * standard_root(e, z) - ((0.0 - z) * (0.0 - z) - 0.25)) < 1e-14);
}

TEST_CASE("zero potential: empty sigma set, no iterations") {
  const auto gaps = periodic_spectrum(Potential::from_field(StateField::zero(SpectralGrid(16))), 8);
  for (int n : {0, 1, -3}) {
    const auto sig = solve_sigma(gaps, n);
    CHECK(sig.sigma.empty());
    CHECK(sig.iterations == 0);
    CHECK(sig.converged);
    CHECK(sig.multiplier == doctest::Approx(-2.0 / pi_index(n)));
    CHECK(trace_identity_check(gaps, sig) < 1e-12);
    for (int m = -8; m <= 8; ++m) CHECK(normalization_residual(gaps, sig, m) < 1e-12);
  }
}

TEST_CASE("constant potential: one-gap solve and the bracketing sign change") {
  const double a = 0.3;
  const auto gaps = periodic_spectrum(constant_potential(32, a), 12);
  for (int n : {1, 2, -3, 7}) {
    const auto sig = solve_sigma(gaps, n);
    CHECK(sig.converged);
    CHECK(sig.iterations <= 10);
    CHECK(sig.max_residual < 1e-8);
    REQUIRE(sig.sigma.count(0) == 1);
    const double s0 = sig.sigma.at(0);
    CHECK(s0 >= -a);
    CHECK(s0 <= a);
    CHECK(s0 == doctest::Approx(gaps.at(n).tau - n * kPi).epsilon(1e-9));
    CHECK(trace_identity_check(gaps, sig) < 1e-9);

    // Residual for m = 0 changes sign across [-a, a].
    SigmaSet lo = sig, hi = sig;
    lo.sigma[0] = -a * 0.999;
    hi.sigma[0] = a * 0.999;
    const double rlo = std::real(normalization_integral(gaps, lo, contour_for(gaps, 0)));
    const double rhi = std::real(normalization_integral(gaps, hi, contour_for(gaps, 0)));
    CHECK(rlo * rhi < 0.0);
  }
}

TEST_CASE("two open gaps: certificate, containment, contour independence, quadrature") {
  const auto gaps = periodic_spectrum(modes_potential(64, {{1, 0.3}, {-2, 0.1}}), 16);
  CHECK(gaps.open_indices().size() >= 2);
  NormalizationOptions wide;
  wide.radius_scale = 1.5;
  NormalizationOptions dense;
  dense.nodes = 128;
  for (int n : {0, 1, -2, 5, -9}) {
    const auto sig = solve_sigma(gaps, n);
    CHECK(sig.converged);
    CHECK(sig.max_residual < 1e-8);
    CHECK(trace_identity_check(gaps, sig) < 1e-6);
    for (const auto& [k, s] : sig.sigma) {
      CHECK(s >= gaps.at(k).lambda_minus);
      CHECK(s <= gaps.at(k).lambda_plus);
    }
    for (int m : gaps.open_indices()) {
      const cplx i1 = normalization_integral(gaps, sig, contour_for(gaps, m));
      const cplx i2 = normalization_integral(gaps, sig, contour_for(gaps, m, wide));
      CHECK(std::abs(i1 - i2) < 1e-9);
      CHECK(std::abs(normalization_residual(gaps, sig, m) - normalization_residual(gaps, sig, m, dense)) < 1e-10);
    }
    // The ratio form equals psi / canonical_root.
    const Contour c = contour_for(gaps, 1);
    const cplx l = c.center + c.radius * std::polar(1.0, 0.7);
    CHECK(std::abs(normalization_integrand(gaps, sig, l) - psi(gaps, sig, l) / canonical_root(gaps, l)) <
          1e-12 * std::abs(normalization_integrand(gaps, sig, l)));
  }
}

TEST_CASE("contour geometry errors") {
  const auto gaps = periodic_spectrum(constant_potential(32, 0.3), 8);
  NormalizationOptions huge;
  huge.radius_scale = 50.0;
  CHECK_THROWS_AS(contour_for(gaps, 0, huge), GeometryError);
}

TEST_CASE("solver reports non-convergence") {
  const auto gaps = periodic_spectrum(modes_potential(64, {{1, 0.3}, {-2, 0.1}}), 16);
  NormalizationOptions tight;
  tight.max_iterations = 1;
  tight.tolerance = 1e-300;
  CHECK_THROWS_AS(solve_sigma(gaps, 3, tight), SolverError);
  CHECK_THROWS_AS(solve_sigma(gaps, 17), DomainError);
}

TEST_CASE("sigma CSV") {
  const auto gaps = periodic_spectrum(constant_potential(32, 0.3), 4);
  std::ostringstream os;
  write_sigma_csv(os, gaps, solve_sigma(gaps, 1));
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "k,tau_k,sigma_k_n,alpha_k_n,residual");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 8);
}
