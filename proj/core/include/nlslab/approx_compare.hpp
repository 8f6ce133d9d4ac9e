#pragma once

#include "nlslab/dnls_flow.hpp"
#include "nlslab/frequencies.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nlslab {

/// Modes of u0 below this amplitude may fall back to the asymptotic frequency
/// without a warning.
inline constexpr double kCoverageFloor = 1e-8;

/// Diagonal flow u_hat(n, t) = u_hat0(n) exp(-i omega_n t).
class LinearFlow {
public:
  /// omega_n from the table; untabulated modes use 4 pi^2 n^2 + 4 \int|u0|^2,
  /// with a warning when |u_hat0(n)| >= floor.
  static LinearFlow nearly_linear(const StateField& u0, const FrequencyTable& table,
                                  double floor = kCoverageFloor);
  /// omega_n = 4 pi^2 n^2 + c, c = 4 \int|u0|^2.
  static LinearFlow modified_free(const StateField& u0);

  const StateField& initial() const noexcept { return u0_; }
  double omega(int n) const;
  std::vector<cplx> modes_at(double t) const;
  StateField state(double t) const;

private:
  LinearFlow(StateField u0, std::vector<double> omega) : u0_(std::move(u0)), omega_(std::move(omega)) {}
  StateField u0_;
  std::vector<double> omega_;  // by grid slot
};

StateField build_v(const StateField& u0, const FrequencyTable& omegas, double t);
StateField build_w(const StateField& u0, double t);

struct NormSeries {
  std::vector<double> times;
  std::vector<double> values;
  double s = 0.0;
  std::string label;
};

enum class Reference { v, w };

/// ||u(t) - ref(t)||_{H^s} at every trajectory sample. The table is needed
/// for Reference::v only.
NormSeries difference_series(const Trajectory& traj, Reference ref, double s,
                             const FrequencyTable* table = nullptr);

/// ||u(t)||_{H^s} at every trajectory sample.
NormSeries norm_series(const Trajectory& traj, double s);

struct BoundednessVerdict {
  double sup = 0.0;
  double slope = 0.0;  ///< least-squares slope of values against t
  double span = 0.0;   ///< max |t| covered
  bool bounded = false;
};

/// Bounded when slope * span <= fraction * sup. A series whose sup is at or
/// below floor is round-off and counts as bounded.
inline constexpr double kVanishingSeries = 1e-10;
BoundednessVerdict boundedness_verdict(const NormSeries& series, double fraction = 0.05,
                                       double floor = kVanishingSeries);

struct LinearGrowth {
  double constant = 0.0;      ///< sup_t value / (1 + |t|)
  double early_max = 0.0;     ///< max of the ratio over |t| <= t_start
  double late_max = 0.0;      ///< max of the ratio over |t| > t_start
  bool running_max_flat = false;  ///< running max of the ratio stops growing after t_start
};

LinearGrowth linear_growth(const NormSeries& series, double t_start);

/// Minus the least-squares slope of the unwrapped phase of u_hat(n, t) for
/// every mode with |u_hat0(n)| >= floor. The phase is unwrapped after removing
/// the linear rotation 4 pi^2 n^2 t, so the sample spacing only has to resolve
/// the nonlinear part. Modes whose amplitude drops below floor are skipped
/// with a warning.
std::map<int, double> extract_frequencies(const Trajectory& traj, double amplitude_floor);

struct ModeAmplitude {
  int n;
  cplx amplitude;
};

/// Moves mode n to n + sign(n)(L - 1), so that base mode 1 lands on L, and
/// rescales each amplitude to keep its H^norm_index contribution.
std::vector<ModeAmplitude> shift_profile(const std::vector<ModeAmplitude>& modes, int L,
                                         double norm_index);

StateField field_from_modes(const SpectralGrid& grid, const std::vector<ModeAmplitude>& modes);

struct HighfreqOptions {
  std::vector<ModeAmplitude> profile;
  std::vector<int> shifts{4, 8, 16};
  double norm_index = 2.0;  ///< N in H^N
  double epsilon = 0.1;
  double t_end = 10.0;      ///< u - v on [0, T], u - w on [-T, T]
  int point_count = 128;
  double dt = kDefaultDt;
  int stride = 100;
  int K = 24;
  SpectrumOptions spectrum{};
  NormalizationOptions normalization{};
};

struct HighfreqRow {
  int L = 0;
  double h_norm = 0.0;  ///< ||u0||_{H^N}
  double sup_uv = 0.0;  ///< sup over [0, T] of ||u - v||_{H^N}
  double sup_uw = 0.0;  ///< sup over [-T, T] of ||u - w||_{H^N}
};

struct HighfreqReport {
  std::vector<HighfreqRow> rows;
  std::optional<int> smallest_L_v;  ///< first L with sup_uv <= epsilon
  std::optional<int> smallest_L_w;
  bool sup_uv_decreasing = false;
};

HighfreqReport highfreq_experiment(const HighfreqOptions& options);

/// Columns t, value.
void write_norm_series_csv(std::ostream& os, const NormSeries& series);
/// Columns n, omega_hat.
void write_extracted_csv(std::ostream& os, const std::map<int, double>& omegas);
/// Columns L, h_norm, sup_uv, sup_uw.
void write_highfreq_csv(std::ostream& os, const HighfreqReport& report);

}  // namespace nlslab
