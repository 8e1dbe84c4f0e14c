#ifndef VPMM_MINIMIZING_MOVEMENTS_HPP
#define VPMM_MINIMIZING_MOVEMENTS_HPP

#include <string>
#include <vector>

#include "vpmm/gradient_system.hpp"

namespace vpmm {

// Uniform partition of [0, T] into N steps.
struct TimeGrid {
  double T = 1.0;
  int N = 1;

  double tau() const { return T / N; }
  double node(int n) const { return T * (static_cast<double>(n) / static_cast<double>(N)); }
};

struct StepRecord {
  double t = 0.0;
  PlasticField P;
  DeformationField phi;
  std::vector<Mat> xi;
  double energy = 0.0;            // E(t^n, P^n)
  double psi_inc = 0.0;           // tau * Psi_{P^{n-1}}(V^n)
  double psi_star_inc = 0.0;      // tau * Psi*_{P^{n-1}}(-Xi^n)
  double power_inc = 0.0;         // E(t^n, P^{n-1}) - E(t^{n-1}, P^{n-1})
  double power_value = 0.0;       // pointwise power at the selection
  double fenchel_gap = 0.0;       // Psi(V) + Psi*(-Xi) + <Xi, V>
  double comparison_slack = 0.0;  // E(t^n,P^{n-1}) - E(t^n,P^n) - psi_inc
  double inner_grad_norm = 0.0;
  int inner_iterations = 0;
  double min_det_P = 0.0;
};

struct Trajectory {
  TimeGrid grid;
  std::string config_hash;
  PlasticField P0;
  double E0 = 0.0;
  std::vector<StepRecord> steps;  // steps[n-1] holds step n
  bool rejected = false;
  int rejected_at = 0;
  std::string reject_reason;

  const PlasticField& state(int n) const;  // P^n, n = 0..N
  int n_steps() const { return static_cast<int>(steps.size()); }
};

struct StepOptions {
  double gap_tol_rel = 1e-6;      // acceptance: gap <= gap_tol_rel * (1 + |E|)
  double gap_target_rel = 1e-10;  // the solver drives the gap down to this
  double slack_tol_rel = 1e-10;
  int max_picard = 120;
  int max_outer_rounds = 4;
  LbfgsOptions pblock;
};

struct StepData {
  PlasticField P;
  SubdiffSelection sel;
  double energy = 0.0;
  double psi_inc = 0.0;
  double psi_star_inc = 0.0;
  double fenchel_gap = 0.0;
  double comparison_slack = 0.0;
};

// One proximal step: approximately minimize
//   P |-> tau_weight * Psi_{P_prev}((P - P_prev)/tau_weight) + E(t_energy, P)
// by alternating inner deformation solves with plastic updates until the
// optimality gap closes. energy_prev_at_t must be E(t_energy, P_prev).
StepData incremental_step(GeneralizedGradientSystem& system, double t_energy,
                          const PlasticField& P_prev, double tau_weight,
                          double energy_prev_at_t, const StepOptions& opts);

// Full trajectory from P0. On step rejection the partial trajectory is
// returned with the failure recorded.
Trajectory run(GeneralizedGradientSystem& system, const PlasticField& P0, const TimeGrid& grid,
               const StepOptions& opts, const std::string& config_hash = "");

// Piecewise-constant (left/right) and piecewise-linear curves built on the
// discrete values, with the piecewise-constant rate.
class Interpolants {
 public:
  explicit Interpolants(const Trajectory& traj);

  PlasticField left(double t) const;        // value P^{n-1} on [t^{n-1}, t^n)
  PlasticField right(double t) const;       // value P^n on (t^{n-1}, t^n]
  PlasticField linear(double t) const;
  std::vector<Mat> derivative(double t) const;  // V^n inside each subinterval

 private:
  const Trajectory* traj_;
  int interval_of(double t) const;  // 1..N with t in (t^{n-1}, t^n] (t=0 -> 1)
};

struct DeGiorgiSample {
  double t = 0.0;
  PlasticField P;
  std::vector<Mat> xi;
  double energy = 0.0;
  double psi_rate = 0.0;       // Psi_{P^{n-1}}((P~ - P^{n-1})/(t - t^{n-1}))
  double psi_star_value = 0.0; // Psi*_{P^{n-1}}(-Xi~)
  double power_value = 0.0;
  double fenchel_gap = 0.0;
};

// Variational interpolant: the incremental problem re-solved with time
// weight (t - t^{n-1}) and energy frozen at time t.
DeGiorgiSample de_giorgi_interpolant(GeneralizedGradientSystem& system, const Trajectory& traj,
                                     double t, const StepOptions& opts);

// Fenchel gap of the pair (V, -Xi) w.r.t. the dissipation frozen at P_prev;
// zero exactly when -Xi lies in the subdifferential at V.
double euler_lagrange_residual(GeneralizedGradientSystem& system, const PlasticField& P_prev,
                               const PlasticField& P_n, double tau, const std::vector<Mat>& Xi);

}  // namespace vpmm

#endif
