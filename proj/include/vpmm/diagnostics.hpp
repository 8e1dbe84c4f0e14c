#ifndef VPMM_DIAGNOSTICS_HPP
#define VPMM_DIAGNOSTICS_HPP

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "vpmm/minimizing_movements.hpp"

namespace vpmm {

struct DiagnosticEntry {
  std::string name;
  std::string tag;  // which identity or inequality the residual certifies
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct DiagnosticsReport {
  std::vector<DiagnosticEntry> entries;

  void add(const std::string& name, const std::string& tag, double value, double tolerance,
           bool pass, const std::string& detail = "");
  bool all_pass() const;
};

// ------------------------------------------------------------- energy books

// One-sided budget defect over (t^s, t^t]:
//   [E(t,P(t)) + sum (psi_inc + psi*_inc)] - [E(s,P(s)) + sum power_inc].
// Nonpositive (within tolerance) certifies the discrete dissipation
// inequality on that window.
double edi_residual(const Trajectory& traj, int s_index, int t_index);
double max_edi_prefix_residual(const Trajectory& traj);

// Two-sided defect of the full-interval balance.
double edb_residual(const Trajectory& traj);

struct ChainRuleReport {
  double max_defect = 0.0;        // max relative defect over non-switching steps
  int steps_checked = 0;
  int steps_excluded = 0;         // yield state switches between neighbors
  bool chain_rule_guaranteed = false;  // true only for eta > 0
  std::vector<double> defects;    // per interior step; NaN where excluded
};

// Central difference of n -> E(t^n, P^n) against <Xi^n, V^n> + power.
ChainRuleReport chain_rule_check(const Trajectory& traj, GeneralizedGradientSystem& system,
                                 double eta);

// Approximate energy budget with the dual term integrated through
// variational-interpolant samples (1 = midpoint, 3 = Gauss).
double de_giorgi_budget_residual(GeneralizedGradientSystem& system, const Trajectory& traj,
                                 int samples_per_step, const StepOptions& opts);

// ------------------------------------------------------------ stress survey

struct StressSurveyReport {
  double max_ratio = 0.0;
  double bound_C4 = 0.0;       // q_F + eta_W sqrt(d), from the closed form
  double empirical_C5 = 0.0;   // variation constant over sampled N near 1
  int samples = 0;
  bool pass = false;
};

StressSurveyReport stress_control_survey(const ElasticParams& ep, double q_F, int d,
                                         int n_lambda, int n_rotations, unsigned seed);

// --------------------------------------------------------- gradient checks

struct GradientSuiteReport {
  double max_err_densities = 0.0;
  double max_err_phi = 0.0;
  double max_err_P = 0.0;
  int samples = 0;
  double max_err() const;
};

GradientSuiteReport gradient_fd_suite(const Scenario& sc, const ModelParams& mp, int n_samples,
                                      unsigned seed);

// ------------------------------------------------------------- conjugates

struct ConjugateOracleReport {
  double max_abs_err = 0.0;
  int samples = 0;
};

// Brute-force conjugate by bracketing + scalar Newton on the radial profile,
// compared against the closed form.
ConjugateOracleReport conjugate_oracle(const DissipationParams& dp, int n_samples,
                                       unsigned seed);
double dissipation_R_conj_bruteforce(double xi_norm, const DissipationParams& dp);

// ------------------------------------------------------------ duality suite

struct FenchelSuiteReport {
  double min_gap = 0.0;           // most negative Fenchel-Young gap observed
  double max_equality_defect = 0.0;  // at subdifferential pairs
  int samples = 0;
};

FenchelSuiteReport fenchel_young_suite(const DissipationParams& dp, int n_pairs, unsigned seed);

// ------------------------------------------------------- algebraic identities

struct IdentitySuiteReport {
  double cauchy_binet_err = 0.0;
  double cofactor_inverse_err = 0.0;
  double mandel_kirchhoff_err = 0.0;
  double frame_indifference_err = 0.0;
  double plastic_indifference_err = 0.0;
  int samples = 0;
};

IdentitySuiteReport identity_suite(const ElasticParams& ep, double q_F, int d, int n_samples,
                                   unsigned seed);

// --------------------------------------------------------------- tau study

struct TauStudyLevel {
  int N = 0;
  double tau = 0.0;
  double diff_to_prev = 0.0;          // ||P_tau(T) - P_{2tau}(T)||_{L^p}
  double max_edi_prefix = 0.0;
  double max_fenchel_gap = 0.0;
  double final_energy = 0.0;
};

struct TauStudyReport {
  std::vector<TauStudyLevel> levels;
  bool monotone_decrease = false;
};

TauStudyReport tau_refinement_study(
    const std::function<std::unique_ptr<GeneralizedGradientSystem>()>& make_system,
    const PlasticField& P0, const TimeGrid& base_grid, int levels, const StepOptions& opts);

// Deterministic helpers shared by tests and surveys.
Mat random_glplus(int d, std::mt19937_64& rng, double det_min = 0.05, double spread = 1.0);
Mat random_rotation(int d, std::mt19937_64& rng);

}  // namespace vpmm

#endif
