#include "vpmm/minimizing_movements.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace vpmm {

const PlasticField& Trajectory::state(int n) const {
  if (n == 0) return P0;
  return steps[static_cast<std::size_t>(n - 1)].P;
}

namespace {

std::vector<Mat> rate_field(const PlasticField& P, const PlasticField& P_prev, double tau) {
  std::vector<Mat> V(P.size());
  for (std::size_t j = 0; j < P.size(); ++j) V[j] = (P[j] - P_prev[j]) * (1.0 / tau);
  return V;
}

std::vector<Mat> negate(const std::vector<Mat>& A) {
  std::vector<Mat> r(A.size());
  for (std::size_t j = 0; j < A.size(); ++j) r[j] = A[j] * (-1.0);
  return r;
}

double field_max_norm(const std::vector<Mat>& A) {
  double m = 0.0;
  for (const Mat& a : A) m = std::max(m, frobenius_norm(a));
  return m;
}

struct Candidate {
  PlasticField P;
  double J = 0.0;       // tau Psi(V) + E
  double energy = 0.0;  // E(t, P)
  bool valid = false;
};

}  // namespace

double euler_lagrange_residual(GeneralizedGradientSystem& system, const PlasticField& P_prev,
                               const PlasticField& P_n, double tau,
                               const std::vector<Mat>& Xi) {
  const std::vector<Mat> V = rate_field(P_n, P_prev, tau);
  return system.dissipation(P_prev, V) + system.dual_dissipation(P_prev, negate(Xi)) +
         system.pairing(Xi, V);
}

StepData incremental_step(GeneralizedGradientSystem& system, double t_energy,
                          const PlasticField& P_prev, double tau_weight,
                          double energy_prev_at_t, const StepOptions& opts) {
  const double tau = tau_weight;
  const std::size_t nn = P_prev.size();

  auto exact_J = [&](const PlasticField& P, double energy) {
    return tau * system.dissipation(P_prev, rate_field(P, P_prev, tau)) + energy;
  };

  Candidate best;
  best.P = P_prev;
  best.energy = energy_prev_at_t;
  best.J = energy_prev_at_t;  // V = 0
  best.valid = true;

  const double scale = 1.0 + std::abs(energy_prev_at_t);
  const double gap_target = opts.gap_target_rel * scale;
  const double p_scale = 1.0 + field_max_norm(P_prev);

  PlasticField P_cur = P_prev;
  SubdiffSelection sel;
  bool have_sel = false;
  double gap = 0.0;

  auto evaluate = [&](const PlasticField& P) -> bool {
    // refresh selection/energy at P; false when the state is unusable
    try {
      sel = system.subdifferential_select(t_energy, P);
    } catch (const Error&) {
      return false;
    }
    have_sel = true;
    return true;
  };

  for (int round = 0; round < opts.max_outer_rounds; ++round) {
    // ---- fixed-point phase on the flow rule ----
    double J_last = best.J;
    double best_gap_seen = std::numeric_limits<double>::infinity();
    int bad_streak = 0;
    int stagnant = 0;
    bool fixed_point_done = false;
    for (int it = 0; it < opts.max_picard; ++it) {
      if (!evaluate(P_cur)) {
        P_cur = best.P;
        break;
      }
      const double J_cur = exact_J(P_cur, sel.energy);
      if (J_cur < best.J) {
        best.P = P_cur;
        best.J = J_cur;
        best.energy = sel.energy;
      }
      gap = euler_lagrange_residual(system, P_prev, P_cur, tau, sel.xi);
      if (gap <= gap_target) {
        fixed_point_done = true;
        break;
      }
      if (gap < 0.98 * best_gap_seen) {
        best_gap_seen = gap;
        stagnant = 0;
      } else if (++stagnant >= 6) {
        fixed_point_done = true;  // gap floor for this state; certify below
        break;
      }
      if (J_cur > J_last + 1e-12 * (1.0 + std::abs(J_last)))
        ++bad_streak;
      else
        bad_streak = 0;
      if (bad_streak >= 2) break;
      J_last = J_cur;

      PlasticField P_next(nn);
      for (std::size_t j = 0; j < nn; ++j) {
        const Mat Y = sel.xi[j] * P_prev[j].transpose() * (-1.0);
        const Mat W = system.flow_rule(Y, static_cast<int>(j));
        P_next[j] = P_prev[j] + tau * (W * P_prev[j]);
      }
      double delta = 0.0;
      for (std::size_t j = 0; j < nn; ++j)
        delta = std::max(delta, frobenius_norm(P_next[j] - P_cur[j]));
      P_cur = P_next;
      if (delta <= 1e-15 * p_scale) {
        // stationary update; re-evaluate once and stop
        if (evaluate(P_cur)) {
          const double J_cur2 = exact_J(P_cur, sel.energy);
          if (J_cur2 < best.J) {
            best.P = P_cur;
            best.J = J_cur2;
            best.energy = sel.energy;
          }
          gap = euler_lagrange_residual(system, P_prev, P_cur, tau, sel.xi);
        }
        fixed_point_done = gap <= gap_target;
        break;
      }
    }
    if (fixed_point_done && gap <= gap_target) break;

    // ---- forward-backward splitting in the plastic-rate variable ----
    // P(W) = P_prev + tau W P_prev; the dissipation is separable and radial
    // in W, so its prox is an exact nodal shrinkage.
    P_cur = best.P;
    if (!evaluate(P_cur)) break;
    const Mesh& mesh = system.mesh();
    std::vector<Mat> W(nn);
    std::vector<Mat> Pprev_inv(nn), Pprev_T(nn);
    for (std::size_t j = 0; j < nn; ++j) {
      Pprev_inv[j] = inverse_glplus(P_prev[j]);
      Pprev_T[j] = P_prev[j].transpose();
      W[j] = (P_cur[j] - P_prev[j]) * Pprev_inv[j] * (1.0 / tau);
    }
    auto P_of = [&](const std::vector<Mat>& Wv) {
      PlasticField P(nn);
      for (std::size_t j = 0; j < nn; ++j) P[j] = P_prev[j] + tau * (Wv[j] * P_prev[j]);
      return P;
    };
    double fb_step = 1.0;
    double best_fb_gap = std::numeric_limits<double>::infinity();
    int fb_stagnant = 0;
    bool done = false;
    for (int fb_round = 0; fb_round < 10 && !done; ++fb_round) {
      const DeformationField phi_frozen = sel.phi_star;
      EnergyValue e_smooth = system.frozen_energy(t_energy, phi_frozen, P_of(W));
      if (!e_smooth.is_finite()) break;

      for (int it = 0; it < 400; ++it) {
        const PlasticField P_w = P_of(W);
        const GradPResult gr = system.frozen_grad_P(phi_frozen, P_w);
        // gradient of the smooth part w.r.t. W in the lumped metric
        std::vector<Mat> Yf(nn);
        for (std::size_t j = 0; j < nn; ++j)
          Yf[j] = gr.total[j] * Pprev_T[j] * (tau / mesh.lumped_mass[j]);

        bool accepted = false;
        std::vector<Mat> W_next(nn);
        for (int bt = 0; bt < 50 && !accepted; ++bt) {
          double dw2 = 0.0, lin = 0.0;
          for (std::size_t j = 0; j < nn; ++j) {
            const Mat G = W[j] - fb_step * Yf[j];
            W_next[j] = system.dissipation_prox_at(G, fb_step * tau, static_cast<int>(j));
            const Mat D = W_next[j] - W[j];
            dw2 += mesh.lumped_mass[j] * frobenius_inner(D, D);
            lin += mesh.lumped_mass[j] * frobenius_inner(Yf[j], D);
          }
          const EnergyValue e_next = system.frozen_energy(t_energy, phi_frozen, P_of(W_next));
          if (e_next.is_finite() &&
              e_next.value() <= e_smooth.value() + lin + 0.5 * dw2 / fb_step +
                                    1e-14 * (1.0 + std::abs(e_smooth.value()))) {
            accepted = true;
            e_smooth = e_next;
            break;
          }
          fb_step *= 0.5;
        }
        if (!accepted) break;
        double delta = 0.0;
        for (std::size_t j = 0; j < nn; ++j)
          delta = std::max(delta, frobenius_norm(W_next[j] - W[j]));
        W = std::move(W_next);
        W_next.assign(nn, Mat(P_prev[0].dim));
        fb_step = std::min(fb_step * 1.25, 1e6);
        if (delta * tau <= 1e-16 * p_scale) break;
      }

      P_cur = P_of(W);
      if (!evaluate(P_cur)) {
        P_cur = best.P;
        break;
      }
      const double J_cur = exact_J(P_cur, sel.energy);
      if (J_cur < best.J) {
        best.P = P_cur;
        best.J = J_cur;
        best.energy = sel.energy;
      }
      gap = euler_lagrange_residual(system, P_prev, P_cur, tau, sel.xi);
      if (gap <= gap_target) {
        done = true;
        break;
      }
      if (gap < 0.98 * best_fb_gap) {
        best_fb_gap = gap;
        fb_stagnant = 0;
      } else if (++fb_stagnant >= 3) {
        break;
      }
    }
    if (done) break;
    P_cur = best.P;
  }

  // ---- stick polish: revert negligible nodal motion exactly ----
  {
    PlasticField P_polish = best.P;
    bool changed = false;
    for (std::size_t j = 0; j < nn; ++j)
      if (frobenius_norm(P_polish[j] - P_prev[j]) <= 1e-11 * p_scale &&
          frobenius_norm(P_polish[j] - P_prev[j]) > 0.0) {
        P_polish[j] = P_prev[j];
        changed = true;
      }
    if (changed) {
      try {
        SubdiffSelection sp = system.subdifferential_select(t_energy, P_polish);
        const double Jp = exact_J(P_polish, sp.energy);
        if (Jp <= best.J + 1e-14 * scale) {
          best.P = P_polish;
          best.J = Jp;
          best.energy = sp.energy;
        }
      } catch (const Error&) {
      }
    }
  }

  // ---- final certification ----
  StepData out;
  out.P = best.P;
  out.sel = system.subdifferential_select(t_energy, best.P);
  out.energy = out.sel.energy;
  const std::vector<Mat> V = rate_field(best.P, P_prev, tau);
  out.psi_inc = tau * system.dissipation(P_prev, V);
  out.psi_star_inc = tau * system.dual_dissipation(P_prev, negate(out.sel.xi));
  out.fenchel_gap = euler_lagrange_residual(system, P_prev, best.P, tau, out.sel.xi);
  out.comparison_slack = energy_prev_at_t - out.energy - out.psi_inc;

  const double gap_tol = opts.gap_tol_rel * (1.0 + std::abs(out.energy));
  const double slack_tol = opts.slack_tol_rel * (1.0 + std::abs(energy_prev_at_t));
  if (!(out.fenchel_gap <= gap_tol) || !(out.comparison_slack >= -slack_tol)) {
    std::ostringstream msg;
    msg << "incremental step rejected at t = " << t_energy << ": fenchel gap "
        << out.fenchel_gap << " (tol " << gap_tol << "), comparison slack "
        << out.comparison_slack << " (tol " << -slack_tol << ")";
    throw StepRejected(msg.str());
  }
  return out;
}

Trajectory run(GeneralizedGradientSystem& system, const PlasticField& P0, const TimeGrid& grid,
               const StepOptions& opts, const std::string& config_hash) {
  if (!plastic_field_admissible(system.mesh(), P0))
    throw ConfigError("initial plastic state violates det(P) > 0");

  Trajectory traj;
  traj.grid = grid;
  traj.config_hash = config_hash;
  traj.P0 = P0;

  system.reset_warm_start();
  traj.E0 = system.reduced_energy(0.0, P0).value;

  PlasticField P_prev = P0;
  double E_prev_record = traj.E0;  // E(t^{n-1}, P^{n-1})

  for (int n = 1; n <= grid.N; ++n) {
    const double t_n = grid.node(n);
    StepRecord rec;
    rec.t = t_n;
    try {
      const ReducedEnergyResult prev_at_tn = system.reduced_energy(t_n, P_prev);
      const StepData sd = incremental_step(system, t_n, P_prev, grid.tau(),
                                           prev_at_tn.value, opts);
      rec.P = sd.P;
      rec.phi = sd.sel.phi_star;
      rec.xi = sd.sel.xi;
      rec.energy = sd.energy;
      rec.psi_inc = sd.psi_inc;
      rec.psi_star_inc = sd.psi_star_inc;
      rec.power_inc = prev_at_tn.value - E_prev_record;
      rec.power_value = system.power(t_n, sd.P, sd.sel);
      rec.fenchel_gap = sd.fenchel_gap;
      rec.comparison_slack = sd.comparison_slack;
      rec.inner_grad_norm = sd.sel.inner_grad_norm;
      rec.inner_iterations = sd.sel.inner_iterations;
      rec.min_det_P = min_det_plastic(system.mesh(), sd.P);
    } catch (const Error& e) {
      traj.rejected = true;
      traj.rejected_at = n;
      traj.reject_reason = e.what();
      break;
    }
    traj.steps.push_back(std::move(rec));
    P_prev = traj.steps.back().P;
    E_prev_record = traj.steps.back().energy;
  }
  return traj;
}

Interpolants::Interpolants(const Trajectory& traj) : traj_(&traj) {}

int Interpolants::interval_of(double t) const {
  const TimeGrid& g = traj_->grid;
  if (t < 0.0 || t > g.T)
    throw TimeOutOfRange("interpolant queried at t = " + std::to_string(t));
  if (t == 0.0) return 1;
  const int n = std::min(g.N, static_cast<int>(std::ceil(t / g.tau() - 1e-14)));
  return std::max(1, n);
}

PlasticField Interpolants::left(double t) const {
  // right-continuous step function holding the previous value
  const TimeGrid& g = traj_->grid;
  if (t < 0.0 || t > g.T)
    throw TimeOutOfRange("interpolant queried at t = " + std::to_string(t));
  if (t >= g.T) return traj_->state(g.N);
  const int n = static_cast<int>(std::floor(t / g.tau() + 1e-14));
  return traj_->state(std::min(n, g.N));
}

PlasticField Interpolants::right(double t) const {
  const int n = interval_of(t);
  if (t == 0.0) return traj_->state(0);
  return traj_->state(n);
}

PlasticField Interpolants::linear(double t) const {
  const int n = interval_of(t);
  const TimeGrid& g = traj_->grid;
  const double t0 = g.node(n - 1), t1 = g.node(n);
  const double w = (t - t0) / (t1 - t0);
  const PlasticField& A = traj_->state(n - 1);
  const PlasticField& B = traj_->state(n);
  PlasticField out(A.size());
  for (std::size_t j = 0; j < A.size(); ++j) out[j] = A[j] * (1.0 - w) + B[j] * w;
  return out;
}

std::vector<Mat> Interpolants::derivative(double t) const {
  const int n = interval_of(t);
  const TimeGrid& g = traj_->grid;
  return rate_field(traj_->state(n), traj_->state(n - 1), g.tau());
}

DeGiorgiSample de_giorgi_interpolant(GeneralizedGradientSystem& system, const Trajectory& traj,
                                     double t, const StepOptions& opts) {
  const TimeGrid& g = traj.grid;
  if (t <= 0.0 || t > g.T)
    throw TimeOutOfRange("variational interpolant requires t in (0, T]");
  const int n = std::min(g.N, static_cast<int>(std::ceil(t / g.tau() - 1e-14)));
  const double t_prev = g.node(n - 1);
  const double delta = t - t_prev;
  const PlasticField& P_prev = traj.state(n - 1);

  const double E_prev_t = system.reduced_energy(t, P_prev).value;
  const StepData sd = incremental_step(system, t, P_prev, delta, E_prev_t, opts);

  DeGiorgiSample s;
  s.t = t;
  s.P = sd.P;
  s.xi = sd.sel.xi;
  s.energy = sd.energy;
  s.psi_rate = sd.psi_inc / delta;
  s.psi_star_value = sd.psi_star_inc / delta;
  s.power_value = system.power(t, sd.P, sd.sel);
  s.fenchel_gap = sd.fenchel_gap;
  return s;
}

}  // namespace vpmm
