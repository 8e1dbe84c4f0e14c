#include "vpmm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vpmm {

void DiagnosticsReport::add(const std::string& name, const std::string& tag, double value,
                            double tolerance, bool pass, const std::string& detail) {
  entries.push_back({name, tag, value, tolerance, pass, detail});
}

bool DiagnosticsReport::all_pass() const {
  for (const auto& e : entries)
    if (!e.pass) return false;
  return true;
}

// ------------------------------------------------------------- energy books

namespace {

double energy_at(const Trajectory& traj, int n) {
  return n == 0 ? traj.E0 : traj.steps[static_cast<std::size_t>(n - 1)].energy;
}

}  // namespace

double edi_residual(const Trajectory& traj, int s_index, int t_index) {
  if (s_index == t_index) return 0.0;
  double diss = 0.0, power = 0.0;
  for (int k = s_index + 1; k <= t_index; ++k) {
    const StepRecord& r = traj.steps[static_cast<std::size_t>(k - 1)];
    diss += r.psi_inc + r.psi_star_inc;
    power += r.power_inc;
  }
  return (energy_at(traj, t_index) + diss) - (energy_at(traj, s_index) + power);
}

double max_edi_prefix_residual(const Trajectory& traj) {
  double mx = -std::numeric_limits<double>::infinity();
  for (int n = 1; n <= traj.n_steps(); ++n) mx = std::max(mx, edi_residual(traj, 0, n));
  return traj.n_steps() == 0 ? 0.0 : mx;
}

double edb_residual(const Trajectory& traj) {
  return std::abs(edi_residual(traj, 0, traj.n_steps()));
}

ChainRuleReport chain_rule_check(const Trajectory& traj, GeneralizedGradientSystem& system,
                                 double eta) {
  ChainRuleReport rep;
  rep.chain_rule_guaranteed = eta > 0.0;
  const int N = traj.n_steps();
  if (N < 3) return rep;
  const double tau = traj.grid.tau();

  // nodal yield state: does the driving stress leave the elastic domain
  auto yield_state = [&](int n) {
    const PlasticField& P = traj.state(n);
    const std::vector<Mat>& xi = traj.steps[static_cast<std::size_t>(n - 1)].xi;
    std::vector<char> out(P.size());
    for (std::size_t j = 0; j < P.size(); ++j) {
      const Mat Y = xi[j] * P[j].transpose();
      out[j] = frobenius_norm(Y) > system.yield_stress_at(static_cast<int>(j)) ? 1 : 0;
    }
    return out;
  };

  rep.defects.assign(static_cast<std::size_t>(N + 1),
                     std::numeric_limits<double>::quiet_NaN());
  for (int n = 2; n <= N - 1; ++n) {
    const auto s_prev = yield_state(n - 1);
    const auto s_cur = yield_state(n);
    const auto s_next = yield_state(n + 1);
    bool switches = false;
    for (std::size_t j = 0; j < s_cur.size(); ++j)
      if (s_prev[j] != s_cur[j] || s_cur[j] != s_next[j]) switches = true;
    if (switches) {
      ++rep.steps_excluded;
      continue;
    }
    const StepRecord& rec = traj.steps[static_cast<std::size_t>(n - 1)];
    const double fd = (energy_at(traj, n + 1) - energy_at(traj, n - 1)) / (2.0 * tau);
    std::vector<Mat> V(rec.P.size());
    const PlasticField& Pm = traj.state(n - 1);
    for (std::size_t j = 0; j < V.size(); ++j) V[j] = (rec.P[j] - Pm[j]) * (1.0 / tau);
    const double model = system.pairing(rec.xi, V) + rec.power_value;
    const double defect = std::abs(fd - model) / (1.0 + std::abs(fd));
    rep.defects[static_cast<std::size_t>(n)] = defect;
    rep.max_defect = std::max(rep.max_defect, defect);
    ++rep.steps_checked;
  }
  return rep;
}

double de_giorgi_budget_residual(GeneralizedGradientSystem& system, const Trajectory& traj,
                                 int samples_per_step, const StepOptions& opts) {
  const int N = traj.n_steps();
  const double tau = traj.grid.tau();
  std::vector<double> psi_star_int(static_cast<std::size_t>(N), 0.0);
  std::vector<double> power_int(static_cast<std::size_t>(N), 0.0);

  // sample offsets and weights on (0,1)
  std::vector<std::pair<double, double>> rule;
  if (samples_per_step <= 1) {
    rule = {{0.5, 1.0}};
  } else {
    const double a = std::sqrt(3.0 / 5.0);
    rule = {{0.5 * (1 - a), 5.0 / 18.0}, {0.5, 8.0 / 18.0}, {0.5 * (1 + a), 5.0 / 18.0}};
  }

  for (int n = 1; n <= N; ++n) {
    const double t0 = traj.grid.node(n - 1);
    for (const auto& [off, w] : rule) {
      const DeGiorgiSample s = de_giorgi_interpolant(system, traj, t0 + off * tau, opts);
      psi_star_int[static_cast<std::size_t>(n - 1)] += w * tau * s.psi_star_value;
      power_int[static_cast<std::size_t>(n - 1)] += w * tau * s.power_value;
    }
  }

  double mx = 0.0, diss = 0.0, power = 0.0;
  for (int n = 1; n <= N; ++n) {
    const StepRecord& r = traj.steps[static_cast<std::size_t>(n - 1)];
    diss += r.psi_inc + psi_star_int[static_cast<std::size_t>(n - 1)];
    power += power_int[static_cast<std::size_t>(n - 1)];
    mx = std::max(mx, (energy_at(traj, n) + diss) - (traj.E0 + power));
  }
  return mx;
}

// ------------------------------------------------------------ stress survey

Mat random_rotation(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  if (d == 2) {
    const double a = u(rng);
    Mat q(2);
    q(0, 0) = std::cos(a);
    q(0, 1) = -std::sin(a);
    q(1, 0) = std::sin(a);
    q(1, 1) = std::cos(a);
    return q;
  }
  // compose three planar rotations
  std::array<double, 3> ang = {u(rng), u(rng), u(rng)};
  Mat q = Mat::identity(3);
  for (int axis = 0; axis < 3; ++axis) {
    Mat r = Mat::identity(3);
    const int i = (axis + 1) % 3, j = (axis + 2) % 3;
    r(i, i) = std::cos(ang[static_cast<std::size_t>(axis)]);
    r(i, j) = -std::sin(ang[static_cast<std::size_t>(axis)]);
    r(j, i) = std::sin(ang[static_cast<std::size_t>(axis)]);
    r(j, j) = std::cos(ang[static_cast<std::size_t>(axis)]);
    q = q * r;
  }
  return q;
}

Mat random_glplus(int d, std::mt19937_64& rng, double det_min, double spread) {
  std::uniform_real_distribution<double> u(-spread, spread);
  for (int tries = 0; tries < 1000; ++tries) {
    Mat m(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = (i == j ? 1.0 : 0.0) + u(rng);
    if (det(m) < 0.0) {
      for (int i = 0; i < d; ++i) std::swap(m(i, 0), m(i, 1));
    }
    if (det(m) >= det_min) return m;
  }
  return Mat::identity(d);
}

StressSurveyReport stress_control_survey(const ElasticParams& ep, double q_F, int d,
                                         int n_lambda, int n_rotations, unsigned seed) {
  // Bound for W(F) = c3|F|^a + c4 det(F)^(-b):
  //   |M(F)| <= a c3 |F|^(a-2) |F^T F| + b c4 det(F)^(-b) |1|
  //          <= a c3 |F|^a + b sqrt(d) c4 det(F)^(-b) <= (a + b sqrt(d)) (W(F)+1),
  // using |F^T F| <= |F|^2 and |1| = sqrt(d).
  StressSurveyReport rep;
  rep.bound_C4 = q_F + ep.eta_W * std::sqrt(static_cast<double>(d));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  std::vector<double> lambdas;
  for (int i = 0; i < n_lambda; ++i)
    lambdas.push_back(std::pow(10.0, -3.0 + 6.0 * i / (n_lambda - 1.0)));

  for (int r = 0; r < n_rotations; ++r) {
    const Mat Q = random_rotation(d, rng);
    for (double l1 : lambdas)
      for (double l2 : lambdas) {
        Mat D = d == 2 ? Mat::diag(l1, l2) : Mat::diag(l1, l2, std::sqrt(l1 * l2));
        const Mat F = Q * D * Q.transpose();
        rep.max_ratio = std::max(rep.max_ratio, stress_control_ratio(F, ep, q_F));
        ++rep.samples;

        // variation constant over N in the 0.1-neighbourhood of identity
        Mat N = Mat::identity(d);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) N(i, j) += 0.05 * (2.0 * u01(rng) - 1.0);
        if (distance_to_identity(N) < 0.1 && det(F * N) > 0.0) {
          const double dist = distance_to_identity(N);
          if (dist > 1e-12) {
            const double num =
                frobenius_norm(mandel_stress(F, ep, q_F) - mandel_stress(F * N, ep, q_F));
            const double den = dist * (elastic_W(F, ep, q_F).value() + 1.0);
            rep.empirical_C5 = std::max(rep.empirical_C5, num / den);
          }
        }
      }
  }
  rep.pass = rep.max_ratio <= rep.bound_C4 && std::isfinite(rep.empirical_C5);
  return rep;
}

// --------------------------------------------------------- gradient checks

namespace {

double fd_step(double x) { return std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + std::abs(x)); }

// max_k |g_fd - g|_inf scaled by the gradient magnitude
double compare_grads(const std::vector<double>& fd, const std::vector<double>& g) {
  double nref = 1.0, err = 0.0;
  for (double v : fd) nref = std::max(nref, std::abs(v));
  for (std::size_t k = 0; k < fd.size(); ++k) err = std::max(err, std::abs(fd[k] - g[k]));
  return err / nref;
}

}  // namespace

GradientSuiteReport gradient_fd_suite(const Scenario& sc, const ModelParams& mp, int n_samples,
                                      unsigned seed) {
  GradientSuiteReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int d = sc.mesh.d;

  // density derivatives at random GL+ points
  for (int s = 0; s < n_samples; ++s) {
    const Mat P = random_glplus(d, rng, 0.3, 0.45);
    const Mat F = random_glplus(d, rng, 0.3, 0.45);

    auto check_density = [&](auto value, auto deriv, const Mat& at) {
      const Mat g = deriv(at);
      Mat fd(at.dim);
      for (int k = 0; k < at.dim * at.dim; ++k) {
        Mat hi = at, lo = at;
        const double h = fd_step(at.a[static_cast<std::size_t>(k)]);
        hi.a[static_cast<std::size_t>(k)] += h;
        lo.a[static_cast<std::size_t>(k)] -= h;
        fd.a[static_cast<std::size_t>(k)] = (value(hi) - value(lo)) / (2.0 * h);
      }
      double nref = 1.0;
      for (int k = 0; k < at.dim * at.dim; ++k)
        nref = std::max(nref, std::abs(fd.a[static_cast<std::size_t>(k)]));
      rep.max_err_densities =
          std::max(rep.max_err_densities, frobenius_norm(fd - g) / nref);
    };

    check_density([&](const Mat& m) { return hardening_K(m, mp.hp, mp.ex).value(); },
                  [&](const Mat& m) { return d_hardening_K(m, mp.hp, mp.ex); }, P);
    check_density([&](const Mat& m) { return elastic_W(m, mp.ep, mp.ex.q_F).value(); },
                  [&](const Mat& m) { return d_elastic_W(m, mp.ep, mp.ex.q_F); }, F);
    check_density([&](const Mat& m) { return regularizer_Wtilde(m, mp.rp, mp.ex.p).value(); },
                  [&](const Mat& m) { return d_regularizer_Wtilde(m, mp.rp, mp.ex.p); }, F);
    // composed elastic term: d/dP W(F P^-1) = -B(F, P)
    check_density(
        [&](const Mat& m) { return elastic_W(F * inverse_glplus(m), mp.ep, mp.ex.q_F).value(); },
        [&](const Mat& m) { return backstress_B(F, m, mp.ep, mp.ex.q_F) * (-1.0); }, P);
  }

  // assembled gradients at random admissible states
  for (int s = 0; s < n_samples; ++s) {
    PlasticField P(sc.mesh.nodes.size());
    for (auto& m : P) m = random_glplus(d, rng, 0.5, 0.2);
    if (!plastic_field_admissible(sc.mesh, P)) {
      --s;
      continue;
    }
    DeformationField phi = affine_field(sc.mesh, sc.F0);
    for (int node = 0; node < sc.mesh.n_nodes(); ++node)
      if (!sc.mesh.is_dirichlet[static_cast<std::size_t>(node)])
        for (int i = 0; i < d; ++i) phi[static_cast<std::size_t>(node)][i] += 0.05 * u(rng);
    const double t = 0.7;
    if (!assemble_energy(sc, t, phi, P, mp).is_finite()) {
      --s;
      continue;
    }

    // deformation gradient vs finite differences
    if (sc.mesh.n_free_phi() > 0) {
      const DeformationField g = grad_phi_energy(sc, t, phi, P, mp);
      std::vector<double> gv, fdv;
      for (int node = 0; node < sc.mesh.n_nodes(); ++node) {
        if (sc.mesh.is_dirichlet[static_cast<std::size_t>(node)]) continue;
        for (int i = 0; i < d; ++i) {
          gv.push_back(g[static_cast<std::size_t>(node)][i]);
          DeformationField hi = phi, lo = phi;
          const double h = fd_step(phi[static_cast<std::size_t>(node)][i]);
          hi[static_cast<std::size_t>(node)][i] += h;
          lo[static_cast<std::size_t>(node)][i] -= h;
          fdv.push_back((assemble_energy(sc, t, hi, P, mp).value() -
                         assemble_energy(sc, t, lo, P, mp).value()) /
                        (2.0 * h));
        }
      }
      rep.max_err_phi = std::max(rep.max_err_phi, compare_grads(fdv, gv));
    }

    // plastic gradient vs finite differences
    const GradPResult gp = grad_P_energy(sc, phi, P, mp);
    std::vector<double> gv, fdv;
    for (std::size_t node = 0; node < P.size(); ++node)
      for (int k = 0; k < d * d; ++k) {
        gv.push_back(gp.total[node].a[static_cast<std::size_t>(k)]);
        PlasticField hi = P, lo = P;
        const double h = fd_step(P[node].a[static_cast<std::size_t>(k)]);
        hi[node].a[static_cast<std::size_t>(k)] += h;
        lo[node].a[static_cast<std::size_t>(k)] -= h;
        fdv.push_back((assemble_energy(sc, t, phi, hi, mp).value() -
                       assemble_energy(sc, t, phi, lo, mp).value()) /
                      (2.0 * h));
      }
    rep.max_err_P = std::max(rep.max_err_P, compare_grads(fdv, gv));
    ++rep.samples;
  }
  return rep;
}

double GradientSuiteReport::max_err() const {
  return std::max({max_err_densities, max_err_phi, max_err_P});
}

// ------------------------------------------------------------- conjugates

double dissipation_R_conj_bruteforce(double xi_norm, const DissipationParams& dp) {
  // maximize f(r) = xi_norm r - sigma r - (nu/p) r^p over r >= 0
  const double slope0 = xi_norm - dp.sigma_yield;
  if (slope0 <= 0.0) return 0.0;
  auto fprime = [&](double r) { return slope0 - dp.nu * std::pow(r, dp.p - 1.0); };
  double hi = 1.0;
  while (fprime(hi) > 0.0) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fprime(mid) > 0.0 ? lo : hi) = mid;
  }
  double r = 0.5 * (lo + hi);
  for (int it = 0; it < 50; ++it) {  // Newton refinement on f'
    const double fp = fprime(r);
    const double fpp = -dp.nu * (dp.p - 1.0) * std::pow(r, dp.p - 2.0);
    if (fpp == 0.0) break;
    const double r_next = r - fp / fpp;
    if (!(r_next > 0.0) || !std::isfinite(r_next)) break;
    if (std::abs(r_next - r) <= 1e-16 * (1.0 + r)) {
      r = r_next;
      break;
    }
    r = r_next;
  }
  return slope0 * r - dp.nu / dp.p * std::pow(r, dp.p);
}

ConjugateOracleReport conjugate_oracle(const DissipationParams& dp, int n_samples,
                                       unsigned seed) {
  ConjugateOracleReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> mag(0.0, 3.0);
  for (int s = 0; s < n_samples; ++s) {
    Mat Xi(2);
    for (int k = 0; k < 4; ++k) Xi.a[static_cast<std::size_t>(k)] = u(rng);
    const double n = frobenius_norm(Xi);
    if (n > 0) Xi = Xi * (mag(rng) * dp.sigma_yield / n);
    const double closed = dissipation_R_conj(Xi, dp);
    const double brute = dissipation_R_conj_bruteforce(frobenius_norm(Xi), dp);
    rep.max_abs_err = std::max(rep.max_abs_err, std::abs(closed - brute));
    ++rep.samples;
  }
  return rep;
}

// ------------------------------------------------------------ duality suite

FenchelSuiteReport fenchel_young_suite(const DissipationParams& dp, int n_pairs,
                                       unsigned seed) {
  FenchelSuiteReport rep;
  rep.min_gap = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int s = 0; s < n_pairs; ++s) {
    Mat V(2), Xi(2);
    for (int k = 0; k < 4; ++k) {
      V.a[static_cast<std::size_t>(k)] = u(rng);
      Xi.a[static_cast<std::size_t>(k)] = u(rng);
    }
    const double gap =
        dissipation_R(V, dp) + dissipation_R_conj(Xi, dp) - frobenius_inner(Xi, V);
    rep.min_gap = std::min(rep.min_gap, gap);

    if (frobenius_norm(V) > 1e-12) {
      const SubdiffR sd = subdiff_R(V, dp);
      const double eq = dissipation_R(V, dp) + dissipation_R_conj(sd.xi, dp) -
                        frobenius_inner(sd.xi, V);
      rep.max_equality_defect = std::max(rep.max_equality_defect, std::abs(eq));
    }
    ++rep.samples;
  }
  return rep;
}

// ------------------------------------------------------ algebraic identities

IdentitySuiteReport identity_suite(const ElasticParams& ep, double q_F, int d, int n_samples,
                                   unsigned seed) {
  IdentitySuiteReport rep;
  std::mt19937_64 rng(seed);
  for (int s = 0; s < n_samples; ++s) {
    const Mat A = random_glplus(d, rng, 0.05, 0.9);
    const Mat B = random_glplus(d, rng, 0.05, 0.9);

    // minor blocks multiply under composition
    for (int order = 1; order <= d; ++order) {
      const MinorBlock mab = order_minors(A * B, order);
      const MinorBlock prod = minor_block_product(order_minors(A, order), order_minors(B, order));
      double nref = 1.0;
      for (double v : mab.v) nref = std::max(nref, std::abs(v));
      for (std::size_t k = 0; k < mab.v.size(); ++k)
        rep.cauchy_binet_err =
            std::max(rep.cauchy_binet_err, std::abs(mab.v[k] - prod.v[k]) / nref);
    }

    // cof(A)^T = det(A) A^-1
    {
      const Mat lhs = cofactor(A).transpose();
      const Mat rhs = det(A) * inverse_glplus(A);
      rep.cofactor_inverse_err = std::max(
          rep.cofactor_inverse_err,
          frobenius_norm(lhs - rhs) / std::max(1.0, frobenius_norm(lhs)));
    }

    // M(F) = F^T S(F) F^-T
    {
      const Mat F = random_glplus(d, rng, 0.2, 0.6);
      const Mat M = mandel_stress(F, ep, q_F);
      const Mat S = kirchhoff_stress(F, ep, q_F);
      const Mat rhs = F.transpose() * S * inverse_glplus(F).transpose();
      rep.mandel_kirchhoff_err =
          std::max(rep.mandel_kirchhoff_err,
                   frobenius_norm(M - rhs) / std::max(1.0, frobenius_norm(M)));
    }

    // W(QF) = W(F) for rotations Q
    {
      const Mat F = random_glplus(d, rng, 0.2, 0.6);
      const Mat Q = random_rotation(d, rng);
      const double w1 = elastic_W(F, ep, q_F).value();
      const double w2 = elastic_W(Q * F, ep, q_F).value();
      rep.frame_indifference_err =
          std::max(rep.frame_indifference_err, std::abs(w1 - w2) / std::max(1.0, std::abs(w1)));
    }

    // R(V P^-1) invariant under right multiplication of both arguments
    {
      const Mat V = random_glplus(d, rng, 0.05, 0.8);
      const Mat P = random_glplus(d, rng, 0.3, 0.5);
      const Mat Pt = random_glplus(d, rng, 0.3, 0.5);
      DissipationParams dp{1.0, 1.0, 2.0};
      const double r1 = dissipation_R(V * inverse_glplus(P), dp);
      const double r2 = dissipation_R((V * Pt) * inverse_glplus(P * Pt), dp);
      rep.plastic_indifference_err =
          std::max(rep.plastic_indifference_err, std::abs(r1 - r2) / std::max(1.0, r1));
    }
    ++rep.samples;
  }
  return rep;
}

// --------------------------------------------------------------- tau study

TauStudyReport tau_refinement_study(
    const std::function<std::unique_ptr<GeneralizedGradientSystem>()>& make_system,
    const PlasticField& P0, const TimeGrid& base_grid, int levels, const StepOptions& opts) {
  TauStudyReport rep;
  PlasticField prev_final;
  const Mesh* mesh = nullptr;
  double p = 2.0;
  for (int lev = 0; lev < levels; ++lev) {
    TimeGrid grid{base_grid.T, base_grid.N << lev};
    auto system = make_system();
    mesh = &system->mesh();
    p = system->dissipation_exponent();
    Trajectory traj = run(*system, P0, grid, opts);
    if (traj.rejected) throw StepRejected("tau study level " + std::to_string(lev) + ": " +
                                          traj.reject_reason);
    TauStudyLevel out;
    out.N = grid.N;
    out.tau = grid.tau();
    out.max_edi_prefix = max_edi_prefix_residual(traj);
    out.final_energy = traj.steps.back().energy;
    for (const auto& st : traj.steps)
      out.max_fenchel_gap = std::max(out.max_fenchel_gap, st.fenchel_gap);
    if (lev > 0) out.diff_to_prev = lp_norm_diff(*mesh, traj.state(grid.N), prev_final, p);
    prev_final = traj.state(grid.N);
    rep.levels.push_back(out);
  }
  rep.monotone_decrease = true;
  for (std::size_t i = 2; i < rep.levels.size(); ++i)
    if (!(rep.levels[i].diff_to_prev < rep.levels[i - 1].diff_to_prev))
      rep.monotone_decrease = false;
  return rep;
}

}  // namespace vpmm
