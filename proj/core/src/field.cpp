#include "nlslab/field.hpp"

#include "nlslab/csv.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/fft.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

namespace nlslab {

SpectralGrid::SpectralGrid(int point_count) : point_count_(point_count) {
  if (point_count < 8 || point_count % 2 != 0)
    throw ConfigurationError("grid point_count must be even and >= 8, got " +
                             std::to_string(point_count));
}

std::vector<cplx> forward_transform(std::span<const cplx> samples) {
  const SpectralGrid grid(static_cast<int>(samples.size()));
  const int N = grid.size();
  std::vector<cplx> raw(samples.size());
  fft::forward(samples, raw);
  std::vector<cplx> modes(samples.size());
  const double scale = 1.0 / N;
  for (int n = grid.min_mode(); n <= grid.max_mode(); ++n)
    modes[grid.slot(n)] = raw[static_cast<std::size_t>((n + N) % N)] * scale;
  return modes;
}

std::vector<cplx> inverse_transform(std::span<const cplx> modes) {
  const SpectralGrid grid(static_cast<int>(modes.size()));
  const int N = grid.size();
  std::vector<cplx> raw(modes.size());
  for (int n = grid.min_mode(); n <= grid.max_mode(); ++n)
    raw[static_cast<std::size_t>((n + N) % N)] = modes[grid.slot(n)];
  std::vector<cplx> samples(modes.size());
  fft::backward(raw, samples);
  return samples;
}

StateField::StateField(SpectralGrid grid, std::vector<cplx> samples, std::vector<cplx> modes)
    : grid_(grid), samples_(std::move(samples)), modes_(std::move(modes)) {}

StateField StateField::from_samples(SpectralGrid grid, std::vector<cplx> samples) {
  if (static_cast<int>(samples.size()) != grid.size())
    throw ConfigurationError("sample count " + std::to_string(samples.size()) +
                             " does not match grid size " + std::to_string(grid.size()));
  auto modes = forward_transform(samples);
  return StateField(grid, std::move(samples), std::move(modes));
}

StateField StateField::from_modes(SpectralGrid grid, std::vector<cplx> modes) {
  if (static_cast<int>(modes.size()) != grid.size())
    throw ConfigurationError("mode count " + std::to_string(modes.size()) +
                             " does not match grid size " + std::to_string(grid.size()));
  auto samples = inverse_transform(modes);
  return StateField(grid, std::move(samples), std::move(modes));
}

StateField StateField::zero(SpectralGrid grid) {
  const auto n = static_cast<std::size_t>(grid.size());
  return StateField(grid, std::vector<cplx>(n), std::vector<cplx>(n));
}

StateField StateField::conj() const {
  std::vector<cplx> s(samples_.size());
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = std::conj(samples_[j]);
  // conj(u)^(n) = conj(u_hat(-n)); the Nyquist mode maps onto itself.
  std::vector<cplx> m(modes_.size());
  for (int n = grid_.min_mode(); n <= grid_.max_mode(); ++n) {
    const int partner = (n == grid_.min_mode()) ? n : -n;
    m[grid_.slot(n)] = std::conj(modes_[grid_.slot(partner)]);
  }
  return StateField(grid_, std::move(s), std::move(m));
}

std::vector<cplx> StateField::interpolate(int count, double offset) const {
  const int N = grid_.size();
  if (count < N || count % N != 0)
    throw ConfigurationError("interpolation count must be a multiple of the grid size");
  std::vector<cplx> raw(static_cast<std::size_t>(count));
  const double shift = 2.0 * std::numbers::pi * offset / count;
  for (int n = grid_.min_mode(); n <= grid_.max_mode(); ++n) {
    cplx c = modes_[grid_.slot(n)];
    // Split the Nyquist coefficient evenly between +-N/2 so the interpolant
    // stays real for real samples.
    if (n == grid_.min_mode() && count > N) {
      const cplx half = 0.5 * c;
      raw[static_cast<std::size_t>((n + count) % count)] += half * std::polar(1.0, n * shift);
      raw[static_cast<std::size_t>(-n)] += half * std::polar(1.0, -n * shift);
      continue;
    }
    raw[static_cast<std::size_t>((n + count) % count)] += c * std::polar(1.0, n * shift);
  }
  std::vector<cplx> out(raw.size());
  fft::backward(raw, out);
  return out;
}

double sobolev_norm_squared(const SpectralGrid& grid, std::span<const cplx> modes, double s) {
  if (s < 0.0) throw DomainError("Sobolev index must be non-negative");
  double sum = 0.0;
  for (int n = grid.min_mode(); n <= grid.max_mode(); ++n) {
    const double weight = std::pow(std::max(1.0, std::abs(static_cast<double>(n))), 2.0 * s);
    sum += weight * std::norm(modes[grid.slot(n)]);
  }
  return sum;
}

double sobolev_norm(const StateField& field, double s) {
  return std::sqrt(sobolev_norm_squared(field.grid(), field.modes(), s));
}

double hamiltonian(const StateField& field) {
  const auto& grid = field.grid();
  const double two_pi = 2.0 * std::numbers::pi;
  double kinetic = 0.0;
  std::vector<cplx> filtered(field.modes().begin(), field.modes().end());
  const int cutoff = grid.size() / 3;
  for (int n = grid.min_mode(); n <= grid.max_mode(); ++n) {
    const double k = two_pi * n;
    kinetic += k * k * std::norm(field.mode(n));
    if (std::abs(n) > cutoff) filtered[grid.slot(n)] = 0.0;
  }
  const auto samples = inverse_transform(filtered);
  double quartic = 0.0;
  for (const auto& v : samples) {
    const double a = std::norm(v);
    quartic += a * a;
  }
  return kinetic + quartic / grid.size();
}

double momentum(const StateField& field) {
  const auto& grid = field.grid();
  double p = 0.0;
  for (int n = grid.min_mode(); n <= grid.max_mode(); ++n)
    p += 2.0 * std::numbers::pi * n * std::norm(field.mode(n));
  return p;
}

Potential Potential::from_field(const StateField& u) {
  return Potential{u.conj(), u, true};
}

Potential Potential::from_pair(StateField phi1, StateField phi2) {
  if (!(phi1.grid() == phi2.grid()))
    throw ConfigurationError("potential components live on different grids");
  bool real = true;
  const auto a = phi1.samples();
  const auto b = phi2.samples();
  double scale = 1.0;
  for (const auto& v : a) scale = std::max(scale, std::abs(v));
  for (std::size_t j = 0; j < a.size() && real; ++j)
    real = std::abs(b[j] - std::conj(a[j])) <= 1e-13 * scale;
  return Potential{std::move(phi1), std::move(phi2), real};
}

cplx Potential::pairing_integral() const {
  const auto& grid = phi1.grid();
  cplx sum{};
  // On the grid the Nyquist mode is its own partner.
  for (int n = grid.min_mode(); n <= grid.max_mode(); ++n)
    sum += phi1.mode(n) * phi2.mode(n == grid.min_mode() ? n : -n);
  return sum;
}

void write_modes_csv(std::ostream& os, const StateField& field) {
  csv::Writer w(os);
  w.comment("u_hat(n) = int_0^1 u(x) exp(-2 pi i n x) dx, u(x) = sum_n u_hat(n) exp(2 pi i n x)");
  w.header({"n", "re(u_hat)", "im(u_hat)"});
  const auto& grid = field.grid();
  for (int n = grid.min_mode(); n <= grid.max_mode(); ++n) {
    const cplx c = field.mode(n);
    w.row(n, c.real(), c.imag());
  }
}

}  // namespace nlslab
