#include "nlslab/approx_compare.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/log.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace nlslab;

namespace {

constexpr double kPi = std::numbers::pi;

StateField from_modes(int N, const std::vector<ModeAmplitude>& modes) {
  return field_from_modes(SpectralGrid(N), modes);
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> out;
  for (int n = lo; n <= hi; ++n) out.push_back(n);
  return out;
}

double distance(const StateField& a, const StateField& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.modes().size(); ++i) sum += std::norm(a.modes()[i] - b.modes()[i]);
  return std::sqrt(sum);
}

struct CaptureWarnings {
  std::vector<std::string> messages;
  log::Sink previous;
  CaptureWarnings() {
    previous = log::set_sink([this](std::string_view m) { messages.emplace_back(m); });
  }
  ~CaptureWarnings() { log::set_sink(previous); }
};

}  // namespace

TEST_CASE("references at t = 0 are the initial data") {
  const auto u0 = from_modes(32, {{1, 0.5}, {-2, 0.2}});
  const auto p = run_frequency_pipeline(Potential::from_field(u0), 8, range(-8, 8));
  CHECK(distance(build_v(u0, p.table, 0.0), u0) == 0.0);
  CHECK(distance(build_w(u0, 0.0), u0) == 0.0);
}

TEST_CASE("constant data: v is exact, u - w is 2|a||sin(a^2 t)|") {
  const double a = 0.3;
  const auto u0 = from_modes(32, {{0, a}});
  const auto p = run_frequency_pipeline(Potential::from_field(u0), 8, range(-8, 8));
  const auto traj = evolve(u0, 5.0, 1e-3, 100);
  const auto uv = difference_series(traj, Reference::v, 3.0, &p.table);
  const auto verdict = boundedness_verdict(uv);
  CHECK(verdict.sup < 1e-9);
  CHECK(verdict.bounded);

  const auto uw = difference_series(traj, Reference::w, 3.0);
  for (std::size_t i = 0; i < uw.times.size(); ++i)
    CHECK(uw.values[i] == doctest::Approx(2 * a * std::abs(std::sin(a * a * uw.times[i]))).epsilon(1e-9));
}

TEST_CASE("constant data over a long window: u - w has sup 2|a| and no trend") {
  const double a = 0.3;
  const auto u0 = from_modes(16, {{0, a}});
  // Whole periods of |sin(a^2 t)|, so the fitted slope vanishes.
  const auto traj = evolve(u0, 5 * kPi / (a * a), 1e-3, 200);
  const auto v = boundedness_verdict(difference_series(traj, Reference::w, 0.0));
  CHECK(v.sup == doctest::Approx(2 * a).epsilon(1e-3));
  CHECK(v.bounded);
}

TEST_CASE("plane wave: v matches the exact solution; u - w closed form") {
  const double a = 0.3;
  const auto u0 = from_modes(32, {{1, a}});
  const auto p = run_frequency_pipeline(Potential::from_field(u0), 8, range(-8, 8));
  const double omega = 4 * kPi * kPi + 2 * a * a;
  const double error = std::abs(p.table.omega(1) - omega);
  CHECK(error < 1e-4);
  for (double t : {0.5, 3.0, 10.0}) {
    const cplx exact = a * std::polar(1.0, -omega * t);
    CHECK(std::abs(build_v(u0, p.table, t).mode(1) - exact) <= a * error * t * (1 + 1e-6) + 1e-14);
  }
  const auto traj = evolve(u0, 2.0, 1e-3, 50);
  for (double s : {0.0, 2.0, 3.0}) {
    const auto uw = difference_series(traj, Reference::w, s);
    for (std::size_t i = 0; i < uw.times.size(); ++i)
      CHECK(uw.values[i] == doctest::Approx(a * 2 * std::abs(std::sin(a * a * uw.times[i]))).epsilon(1e-8));
  }
}

TEST_CASE("references are unitary") {
  const auto u0 = from_modes(64, {{1, 0.5}, {-2, 0.2}, {3, cplx(0.0, 0.05)}});
  const auto p = run_frequency_pipeline(Potential::from_field(u0), 8, range(-8, 8));
  for (double t : {0.3, 7.0, 40.0}) {
    for (double s : {0.0, 2.0, 3.5})
      CHECK(std::abs(sobolev_norm(build_v(u0, p.table, t), s) - sobolev_norm(u0, s)) < 1e-12 * sobolev_norm(u0, s));
    CHECK(std::abs(sobolev_norm(build_w(u0, t), 0.0) - sobolev_norm(u0, 0.0)) < 1e-12);
  }
}

TEST_CASE("uncovered carried modes fall back with a warning") {
  const auto u0 = from_modes(32, {{1, 0.5}, {9, 0.1}});
  const auto p = run_frequency_pipeline(Potential::from_field(u0), 4, range(-4, 4));
  CaptureWarnings w;
  const auto flow = LinearFlow::nearly_linear(u0, p.table);
  REQUIRE(w.messages.size() == 1);
  CHECK(w.messages[0].find("9") != std::string::npos);
  CHECK(flow.omega(9) == doctest::Approx(4 * kPi * kPi * 81 + 4 * 0.26));
  CHECK(flow.omega(1) == doctest::Approx(p.table.omega(1)));
  CHECK_THROWS_AS(flow.omega(40), DomainError);
}

TEST_CASE("difference series argument errors") {
  const auto traj = evolve(from_modes(16, {{1, 0.5}}), 0.01, 1e-3, 1);
  CHECK_THROWS_AS(difference_series(traj, Reference::v, 1.0), ConfigurationError);
  CHECK_THROWS_AS(difference_series(traj, Reference::w, -1.0), DomainError);
  CHECK_THROWS_AS(boundedness_verdict(NormSeries{}), ConfigurationError);
}

TEST_CASE("boundedness verdict and linear growth on synthetic series") {
  NormSeries flat{{0, 1, 2, 3, 4}, {1, 1, 1, 1, 1}, 0.0, "flat"};
  auto v = boundedness_verdict(flat);
  CHECK(v.bounded);
  CHECK(v.sup == 1.0);
  CHECK(v.slope == doctest::Approx(0.0));
  CHECK(v.span == 4.0);

  NormSeries ramp{{0, 1, 2, 3, 4}, {0, 1, 2, 3, 4}, 0.0, "ramp"};
  v = boundedness_verdict(ramp);
  CHECK_FALSE(v.bounded);
  CHECK(v.slope == doctest::Approx(1.0));

  NormSeries zero{{0, 1}, {0, 0}, 0.0, "zero"};
  CHECK(boundedness_verdict(zero).bounded);

  // value = 0.5 (1 + t): ratio constant, running max flat.
  NormSeries lin{{0, 2, 4, 6, 8, 10}, {0.5, 1.5, 2.5, 3.5, 4.5, 5.5}, 0.0, "lin"};
  const auto g = linear_growth(lin, 5.0);
  CHECK(g.constant == doctest::Approx(0.5));
  CHECK(g.running_max_flat);

  NormSeries quad{{0, 2, 4, 6, 8}, {0, 4, 16, 36, 64}, 0.0, "quad"};
  CHECK_FALSE(linear_growth(quad, 5.0).running_max_flat);
}

TEST_CASE("frequency extraction: constant and plane wave oracles") {
  const double a = 0.3;
  const auto c = extract_frequencies(evolve(from_modes(32, {{0, a}}), 10.0, 1e-3, 100), 0.05);
  REQUIRE(c.count(0) == 1);
  CHECK(c.at(0) == doctest::Approx(2 * a * a).epsilon(1e-4));

  const auto pw = extract_frequencies(evolve(from_modes(32, {{2, a}}), 10.0, 1e-4, 100), 0.05);
  REQUIRE(pw.size() == 1);
  CHECK(pw.at(2) == doctest::Approx(16 * kPi * kPi + 2 * a * a).epsilon(1e-4));
}

TEST_CASE("extraction is stable under halving dt") {
  const auto u0 = from_modes(64, {{1, 0.5}, {-2, 0.2}});
  const auto coarse = extract_frequencies(evolve(u0, 10.0, 2e-4, 50), 0.05);
  const auto fine = extract_frequencies(evolve(u0, 10.0, 1e-4, 100), 0.05);
  REQUIRE(coarse.size() == 2);
  for (const auto& [n, om] : coarse) CHECK(std::abs(fine.at(n) - om) < 1e-5 * std::abs(om));
}

TEST_CASE("extraction errors") {
  const auto u0 = from_modes(16, {{1, 0.5}});
  CHECK_THROWS_AS(extract_frequencies(evolve(u0, 1e-3, 1e-3, 1), 0.05), ConfigurationError);
  // Large nonlinear phase per sample cannot be unwrapped.
  const auto big = from_modes(16, {{0, 3.0}});
  CHECK_THROWS_AS(extract_frequencies(evolve(big, 1.0, 1e-3, 100), 0.05), ConfigurationError);
}

TEST_CASE("shifted profiles keep the H^N contribution") {
  const std::vector<ModeAmplitude> base{{1, 0.5}, {-2, 0.2}};
  for (int L : {1, 4, 16}) {
    const auto shifted = shift_profile(base, L, 2.0);
    REQUIRE(shifted.size() == 2);
    CHECK(shifted[0].n == L);
    CHECK(shifted[1].n == -(L + 1));
    CHECK(sobolev_norm(field_from_modes(SpectralGrid(128), shifted), 2.0) ==
          doctest::Approx(sobolev_norm(field_from_modes(SpectralGrid(128), base), 2.0)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(shift_profile(base, 0, 2.0), ConfigurationError);
  CHECK_THROWS_AS(shift_profile({{0, 0.1}}, 3, 2.0), ConfigurationError);
  CHECK_THROWS_AS(field_from_modes(SpectralGrid(16), {{8, 0.1}}), ConfigurationError);
  CHECK_THROWS_AS(field_from_modes(SpectralGrid(16), {{-8, 0.1}}), ConfigurationError);
}

TEST_CASE("smoothing: u - v one derivative higher stays comparable") {
  const auto u0 = from_modes(64, {{1, 0.3}, {-2, 0.1}});
  const auto p = run_frequency_pipeline(Potential::from_field(u0), 16, range(-16, 16));
  const auto traj = evolve(u0, 5.0, 1e-4, 500);
  const auto lo = difference_series(traj, Reference::v, 2.0, &p.table);
  const auto hi = difference_series(traj, Reference::v, 3.0, &p.table);
  for (std::size_t i = 1; i < lo.values.size(); ++i) CHECK(hi.values[i] / lo.values[i] < 20.0);
}

TEST_CASE("series CSV writers") {
  NormSeries s{{0, 0.5}, {1, 2}, 3.0, "u-v"};
  std::ostringstream os;
  write_norm_series_csv(os, s);
  CHECK(os.str().find("t,value\n") != std::string::npos);
  std::ostringstream ex;
  write_extracted_csv(ex, {{1, 39.5}});
  CHECK(ex.str() == "n,omega_hat\n1,39.5\n");
}
