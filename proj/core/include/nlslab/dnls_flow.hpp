#pragma once

#include "nlslab/field.hpp"

#include <iosfwd>
#include <vector>

namespace nlslab {

inline constexpr double kDefaultDt = 1e-4;
inline constexpr double kDefaultDtMax = 1e-3;

/// Sampled solution of i u_t = -u_xx + 2|u|^2 u.
struct Trajectory {
  std::vector<double> times;
  std::vector<StateField> states;
  double dt = 0.0;  ///< step actually used (t_end / step count)
  int stride = 1;
};

/// One Strang step: exact nonlinear half-step u -> exp(-i|u|^2 dt) u, exact
/// linear step u_hat(n) -> exp(-i 4 pi^2 n^2 dt) u_hat(n), nonlinear half-step.
StateField step_strang(const StateField& state, double dt);

/// Repeated Strang steps from u0 up to t_end, recording every stride-th state
/// (states[0] is u0). A negative t_end runs conj(evolve(conj(u0), -t_end)).
/// The step is shrunk so that an integer number of steps lands on t_end.
Trajectory evolve(const StateField& u0, double t_end, double dt, int stride,
                  double dt_max = kDefaultDtMax);

/// Final state only; same stepping as evolve.
StateField evolve_to(const StateField& u0, double t_end, double dt,
                     double dt_max = kDefaultDtMax);

struct ConservedRow {
  double t;
  double l2_norm;
  double hamiltonian;
  double momentum;
  double l2_drift;           ///< relative to t = 0
  double hamiltonian_drift;  ///< relative to t = 0
  double momentum_drift;     ///< absolute, momentum may vanish
};

std::vector<ConservedRow> conserved_report(const Trajectory& traj);

/// Largest |drift| over the report for each quantity.
struct DriftSummary {
  double l2 = 0.0;
  double hamiltonian = 0.0;
  double momentum = 0.0;
};
DriftSummary max_drift(const std::vector<ConservedRow>& rows);

/// Columns t, n, re(u_hat), im(u_hat); one row per (sample, mode). A
/// negative max_mode keeps every mode; sample_stride thins the samples.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int max_mode = -1,
                          int sample_stride = 1);
void write_conserved_csv(std::ostream& os, const std::vector<ConservedRow>& rows);

}  // namespace nlslab
