#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

namespace nlslab {

using cplx = std::complex<double>;

/// Uniform grid x_j = j/N on the unit circle, N even and at least 8.
class SpectralGrid {
public:
  explicit SpectralGrid(int point_count);

  int size() const noexcept { return point_count_; }
  double x(int j) const noexcept { return static_cast<double>(j) / point_count_; }

  /// Represented modes are n in [min_mode(), max_mode()].
  int min_mode() const noexcept { return -point_count_ / 2; }
  int max_mode() const noexcept { return point_count_ / 2 - 1; }
  bool holds(int n) const noexcept { return n >= min_mode() && n <= max_mode(); }

  /// Position of mode n in a symmetric-ordered mode array.
  std::size_t slot(int n) const noexcept {
    return static_cast<std::size_t>(n - min_mode());
  }
  int mode_at(std::size_t slot) const noexcept {
    return static_cast<int>(slot) + min_mode();
  }

  friend bool operator==(const SpectralGrid&, const SpectralGrid&) = default;

private:
  int point_count_;
};

/// Discrete Fourier coefficients in the convention
///   u_hat(n) = \int_0^1 u(x) e^{-2 pi i n x} dx,   u(x) = sum_n u_hat(n) e^{2 pi i n x},
/// ordered n = -N/2, ..., N/2 - 1.
std::vector<cplx> forward_transform(std::span<const cplx> samples);
std::vector<cplx> inverse_transform(std::span<const cplx> modes);

/// Periodic complex field holding both its grid samples and its Fourier
/// coefficients. Immutable once built.
class StateField {
public:
  static StateField from_samples(SpectralGrid grid, std::vector<cplx> samples);
  static StateField from_modes(SpectralGrid grid, std::vector<cplx> modes);
  static StateField zero(SpectralGrid grid);

  const SpectralGrid& grid() const noexcept { return grid_; }
  std::span<const cplx> samples() const noexcept { return samples_; }
  std::span<const cplx> modes() const noexcept { return modes_; }

  /// Coefficient of e^{2 pi i n x}; zero for modes outside the band.
  cplx mode(int n) const noexcept {
    return grid_.holds(n) ? modes_[grid_.slot(n)] : cplx{};
  }

  StateField conj() const;

  /// Trigonometric interpolant evaluated at x = (j + offset)/count,
  /// j = 0..count-1. count must be a multiple of the grid size.
  std::vector<cplx> interpolate(int count, double offset) const;

private:
  StateField(SpectralGrid grid, std::vector<cplx> samples, std::vector<cplx> modes);

  SpectralGrid grid_;
  std::vector<cplx> samples_;
  std::vector<cplx> modes_;
};

/// (sum_n <n>^{2s} |u_hat(n)|^2)^{1/2} over the represented band, <n> = max(1,|n|).
double sobolev_norm(const StateField& field, double s);

/// Sum over the band of <n>^{2s} |a(n)|^2 for a symmetric-ordered mode array.
double sobolev_norm_squared(const SpectralGrid& grid, std::span<const cplx> modes, double s);

/// \int_0^1 (|u_x|^2 + |u|^4) dx: spectral derivative term plus grid
/// quadrature of the quartic term after a 2/3-rule filter.
double hamiltonian(const StateField& field);

/// sum_n 2 pi n |u_hat(n)|^2
double momentum(const StateField& field);

/// The pair (phi1, phi2) feeding the Zakharov-Shabat operator.
struct Potential {
  StateField phi1;
  StateField phi2;
  bool real_type = false;

  /// Real-type potential of a dNLS state: phi1 = conj(u), phi2 = u. With
  /// this pairing the gap labelled n belongs to the Fourier mode n of u.
  static Potential from_field(const StateField& u);
  static Potential from_pair(StateField phi1, StateField phi2);

  /// \int_0^1 phi1 phi2 dx = sum_n phi1_hat(n) phi2_hat(-n).
  cplx pairing_integral() const;
};

/// CSV rows "n,re,im" for every represented mode, preceded by a header naming
/// the transform convention.
void write_modes_csv(std::ostream& os, const StateField& field);

}  // namespace nlslab
