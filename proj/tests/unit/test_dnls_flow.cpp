#include "nlslab/dnls_flow.hpp"
#include "nlslab/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

using namespace nlslab;

namespace {

constexpr double kPi = std::numbers::pi;

StateField constant(int N, cplx a) { return StateField::from_samples(SpectralGrid(N), std::vector<cplx>(N, a)); }

StateField plane_wave(int N, int n, double a) {
  std::vector<cplx> modes(static_cast<std::size_t>(N));
  const SpectralGrid g(N);
  modes[g.slot(n)] = a;
  return StateField::from_modes(g, modes);
}

StateField two_mode(int N) {
  std::vector<cplx> modes(static_cast<std::size_t>(N));
  const SpectralGrid g(N);
  modes[g.slot(1)] = 0.5;
  modes[g.slot(-2)] = 0.2;
  return StateField::from_modes(g, modes);
}

double h0_distance(const StateField& a, const StateField& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.modes().size(); ++i) sum += std::norm(a.modes()[i] - b.modes()[i]);
  return std::sqrt(sum);
}

}  // namespace

TEST_CASE("one step on a constant is the exact phase rotation") {
  const double a = 0.3, dt = 0.01;
  const auto out = step_strang(constant(16, a), dt);
  for (auto z : out.samples()) CHECK(std::abs(z - a * std::polar(1.0, -2 * a * a * dt)) < 1e-14);
}

TEST_CASE("one step on a plane wave is exact") {
  const double a = 0.4, dt = 0.003;
  const auto out = step_strang(plane_wave(32, 3, a), dt);
  const cplx expected = a * std::polar(1.0, -(4 * kPi * kPi * 9 + 2 * a * a) * dt);
  CHECK(std::abs(out.mode(3) - expected) < 1e-14);
  for (int n = -16; n < 16; ++n)
    if (n != 3) CHECK(std::abs(out.mode(n)) < 1e-14);
}

TEST_CASE("zero stays zero") {
  const auto out = evolve(StateField::zero(SpectralGrid(16)), 0.1, 1e-3, 10);
  for (const auto& s : out.states)
    for (auto z : s.modes()) CHECK(z == cplx());
}

TEST_CASE("constant data over unit time") {
  const double a = 0.6;
  const auto u = evolve_to(constant(32, a), 1.0, 1e-3);
  for (auto z : u.samples()) CHECK(std::abs(z - a * std::polar(1.0, -2 * a * a)) < 1e-12);
}

TEST_CASE("trajectory bookkeeping") {
  const auto u0 = plane_wave(16, 1, 0.5);
  const auto one = evolve(u0, 1e-3, 1e-3, 1);
  CHECK(one.states.size() == 2);
  CHECK(one.times.back() == doctest::Approx(1e-3));

  const auto traj = evolve(u0, 0.1, 1e-3, 10);
  CHECK(traj.states.size() == 11);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(traj.stride == 10);

  // Step shrinks so that t_end is hit exactly.
  const auto odd = evolve(u0, 0.01, 3e-3, 1, 1e-2);
  CHECK(odd.states.size() == 5);
  CHECK(odd.dt == doctest::Approx(0.0025));
}

TEST_CASE("invalid stepping arguments") {
  const auto u0 = plane_wave(16, 1, 0.5);
  CHECK_THROWS_AS(evolve(u0, 1.0, 0.0, 1), ConfigurationError);
  CHECK_THROWS_AS(evolve(u0, 1.0, -1e-3, 1), ConfigurationError);
  CHECK_THROWS_AS(evolve(u0, 1.0, 1e-3, 0), ConfigurationError);
  CHECK_THROWS_AS(evolve(u0, 1.0, 1e-2, 1), ConfigurationError);
}

TEST_CASE("non-finite data is reported as blow-up") {
  std::vector<cplx> s(16, cplx(0.1));
  s[3] = cplx(std::numeric_limits<double>::quiet_NaN());
  CHECK_THROWS_AS(evolve(StateField::from_samples(SpectralGrid(16), s), 0.01, 1e-3, 1), BlowUpError);
}

TEST_CASE("conservation on a plane wave over t = 10") {
  const auto traj = evolve(plane_wave(32, 1, 0.5), 10.0, 1e-3, 100);
  const auto d = max_drift(conserved_report(traj));
  CHECK(d.l2 < 1e-12);
  CHECK(d.hamiltonian < 1e-12);  // plane waves are stepped exactly
}

TEST_CASE("Hamiltonian drift is second order in dt") {
  const auto u0 = two_mode(64);
  const double coarse = max_drift(conserved_report(evolve(u0, 2.0, 4e-4, 50))).hamiltonian;
  const double fine = max_drift(conserved_report(evolve(u0, 2.0, 2e-4, 100))).hamiltonian;
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("forward then backward returns to the initial state") {
  const auto u0 = two_mode(64);
  const auto there = evolve_to(u0, 2.0, 1e-3);
  const auto back = evolve_to(there, -2.0, 1e-3);
  CHECK(h0_distance(back, u0) < 1e-8);
  CHECK(h0_distance(there, u0) > 1e-2);
}

TEST_CASE("backward time is conj of forward on conj data") {
  const auto u0 = two_mode(32);
  const auto back = evolve_to(u0, -0.5, 1e-3);
  const auto ref = evolve_to(u0.conj(), 0.5, 1e-3).conj();
  CHECK(h0_distance(back, ref) < 1e-14);
}

TEST_CASE("trajectory CSV respects the mode cut and sample stride") {
  const auto traj = evolve(plane_wave(16, 1, 0.5), 0.01, 1e-3, 1);
  std::ostringstream os;
  write_trajectory_csv(os, traj, 2, 5);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,n,re(u_hat),im(u_hat)");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 3 * 5);  // samples 0, 5, 10; modes -2..2
}
