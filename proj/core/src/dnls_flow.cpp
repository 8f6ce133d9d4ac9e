#include "nlslab/dnls_flow.hpp"

#include "nlslab/csv.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/fft.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <ostream>
#include <string>

namespace nlslab {
namespace {

// Works on raw FFT-ordered buffers to avoid rebuilding StateFields per step.
class StrangStepper {
public:
  StrangStepper(const SpectralGrid& grid, double dt)
      : N_(grid.size()), dt_(dt), linear_(static_cast<std::size_t>(N_)), spectrum_(linear_.size()) {
    const double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
    for (int k = 0; k < N_; ++k) {
      const int n = k < N_ / 2 ? k : k - N_;
      // FFT normalization folded into the linear multiplier.
      linear_[static_cast<std::size_t>(k)] =
          std::polar(1.0 / N_, -four_pi2 * n * n * dt);
    }
    linear_[static_cast<std::size_t>(N_ / 2)] = 0.0;  // Nyquist
  }

  // Advances `steps` Strang steps in place. Adjacent nonlinear half-steps
  // are merged; this is exact because |u| is invariant under them.
  void advance(std::vector<cplx>& u, long steps) {
    if (steps <= 0) return;
    nonlinear(u, 0.5 * dt_);
    for (long s = 0; s < steps; ++s) {
      linear(u);
      nonlinear(u, s + 1 < steps ? dt_ : 0.5 * dt_);
    }
  }

private:
  static void nonlinear(std::vector<cplx>& u, double tau) {
    for (auto& v : u) v *= std::polar(1.0, -2.0 * std::norm(v) * tau);
  }

  void linear(std::vector<cplx>& u) {
    fft::forward(u, spectrum_);
    for (std::size_t k = 0; k < spectrum_.size(); ++k) spectrum_[k] *= linear_[k];
    fft::backward(spectrum_, u);
  }

  int N_;
  double dt_;
  std::vector<cplx> linear_;
  std::vector<cplx> spectrum_;
};

void require_finite(const std::vector<cplx>& u, double t) {
  for (const auto& v : u)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw BlowUpError("non-finite field value at t = " + csv::format(t));
}

struct StepPlan {
  long steps;
  double dt;
};

StepPlan plan_steps(double duration, double dt, double dt_max) {
  if (!(dt > 0.0)) throw ConfigurationError("dt must be positive");
  if (dt > dt_max)
    throw ConfigurationError("dt = " + csv::format(dt) + " exceeds dt_max = " + csv::format(dt_max));
  if (duration == 0.0) return {0, dt};
  const long steps = static_cast<long>(std::ceil(duration / dt - 1e-9));
  return {steps, duration / static_cast<double>(steps)};
}

}  // namespace

StateField step_strang(const StateField& state, double dt) {
  if (!(dt > 0.0)) throw ConfigurationError("dt must be positive");
  std::vector<cplx> u(state.samples().begin(), state.samples().end());
  StrangStepper stepper(state.grid(), dt);
  stepper.advance(u, 1);
  return StateField::from_samples(state.grid(), std::move(u));
}

Trajectory evolve(const StateField& u0, double t_end, double dt, int stride, double dt_max) {
  if (stride < 1) throw ConfigurationError("stride must be >= 1");
  if (t_end < 0.0) {
    Trajectory back = evolve(u0.conj(), -t_end, dt, stride, dt_max);
    for (auto& t : back.times) t = -t;
    for (auto& s : back.states) s = s.conj();
    return back;
  }
  const StepPlan plan = plan_steps(t_end, dt, dt_max);
  Trajectory traj;
  traj.dt = plan.dt;
  traj.stride = stride;
  traj.times.push_back(0.0);
  traj.states.push_back(u0);

  std::vector<cplx> u(u0.samples().begin(), u0.samples().end());
  StrangStepper stepper(u0.grid(), plan.dt);
  long done = 0;
  while (done + stride <= plan.steps) {
    stepper.advance(u, stride);
    done += stride;
    const double t = done * plan.dt;
    require_finite(u, t);
    traj.times.push_back(t);
    traj.states.push_back(StateField::from_samples(u0.grid(), u));
  }
  return traj;
}

StateField evolve_to(const StateField& u0, double t_end, double dt, double dt_max) {
  if (t_end < 0.0) return evolve_to(u0.conj(), -t_end, dt, dt_max).conj();
  const StepPlan plan = plan_steps(t_end, dt, dt_max);
  std::vector<cplx> u(u0.samples().begin(), u0.samples().end());
  StrangStepper stepper(u0.grid(), plan.dt);
  stepper.advance(u, plan.steps);
  require_finite(u, t_end);
  return StateField::from_samples(u0.grid(), std::move(u));
}

std::vector<ConservedRow> conserved_report(const Trajectory& traj) {
  std::vector<ConservedRow> rows;
  rows.reserve(traj.states.size());
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const auto& s = traj.states[i];
    ConservedRow r{};
    r.t = traj.times[i];
    r.l2_norm = sobolev_norm(s, 0.0);
    r.hamiltonian = hamiltonian(s);
    r.momentum = momentum(s);
    rows.push_back(r);
  }
  if (rows.empty()) return rows;
  const auto relative = [](double v, double ref) {
    return ref != 0.0 ? (v - ref) / std::abs(ref) : v - ref;
  };
  const ConservedRow first = rows.front();
  for (auto& r : rows) {
    r.l2_drift = relative(r.l2_norm, first.l2_norm);
    r.hamiltonian_drift = relative(r.hamiltonian, first.hamiltonian);
    r.momentum_drift = r.momentum - first.momentum;
  }
  return rows;
}

DriftSummary max_drift(const std::vector<ConservedRow>& rows) {
  DriftSummary d;
  for (const auto& r : rows) {
    d.l2 = std::max(d.l2, std::abs(r.l2_drift));
    d.hamiltonian = std::max(d.hamiltonian, std::abs(r.hamiltonian_drift));
    d.momentum = std::max(d.momentum, std::abs(r.momentum_drift));
  }
  return d;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int max_mode, int sample_stride) {
  if (sample_stride < 1) throw ConfigurationError("sample stride must be >= 1");
  csv::Writer w(os);
  w.header({"t", "n", "re(u_hat)", "im(u_hat)"});
  for (std::size_t i = 0; i < traj.states.size(); i += static_cast<std::size_t>(sample_stride)) {
    const auto& s = traj.states[i];
    const auto& g = s.grid();
    for (int n = g.min_mode(); n <= g.max_mode(); ++n) {
      if (max_mode >= 0 && std::abs(n) > max_mode) continue;
      const cplx c = s.mode(n);
      w.row(traj.times[i], n, c.real(), c.imag());
    }
  }
}

void write_conserved_csv(std::ostream& os, const std::vector<ConservedRow>& rows) {
  csv::Writer w(os);
  w.header({"t", "l2_norm", "hamiltonian", "momentum", "l2_drift", "hamiltonian_drift",
            "momentum_drift"});
  for (const auto& r : rows)
    w.row(r.t, r.l2_norm, r.hamiltonian, r.momentum, r.l2_drift, r.hamiltonian_drift,
          r.momentum_drift);
}

}  // namespace nlslab
