// Command-line front end: runs simulations, verification suites and studies
// on viscoplastic gradient-system scenarios described by config files.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vpmm/config.hpp"
#include "vpmm/diagnostics.hpp"
#include "vpmm/trajectory_io.hpp"

namespace {

using namespace vpmm;

constexpr int kExitOk = 0;
constexpr int kExitDiagnosticFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitSolverFailure = 3;

std::string out_path(const RunConfig& cfg, const std::string& override_prefix,
                     const std::string& kind) {
  if (!override_prefix.empty()) return override_prefix + "." + kind;
  if (kind == "csv" && !cfg.out_csv.empty()) return cfg.out_csv;
  if (kind == "json" && !cfg.out_json.empty()) return cfg.out_json;
  return cfg.name + "." + kind;
}

int cmd_run(const RunConfig& cfg, const std::string& out_prefix) {
  auto system = cfg.make_system();
  Trajectory traj =
      run(*system, cfg.make_initial_state(), cfg.make_grid(), cfg.make_step_options(),
          cfg.hash());
  serialize_trajectory(traj, cfg.mode, out_path(cfg, out_prefix, "csv"));
  write_summary_json(traj, cfg.mode, out_path(cfg, out_prefix, "json"));
  if (traj.rejected) {
    std::cerr << "run aborted at step " << traj.rejected_at << ": " << traj.reject_reason
              << " (partial trajectory written)\n";
    return kExitSolverFailure;
  }
  std::cout << "run complete: " << traj.n_steps() << " steps, E(T) = "
            << traj.steps.back().energy << ", max edi prefix residual = "
            << max_edi_prefix_residual(traj) << "\n";
  return kExitOk;
}

int cmd_check(const RunConfig& cfg, const std::string& out_prefix) {
  DiagnosticsReport rep;
  const ModelParams mp = cfg.make_params();

  const IdentitySuiteReport ids = identity_suite(mp.ep, mp.ex.q_F, cfg.d, 200, cfg.seed);
  rep.add("cauchy_binet", "minor_multiplicativity", ids.cauchy_binet_err, 1e-10,
          ids.cauchy_binet_err < 1e-10);
  rep.add("cofactor_inverse", "cofactor_transpose_identity", ids.cofactor_inverse_err, 1e-11,
          ids.cofactor_inverse_err < 1e-11);
  rep.add("mandel_kirchhoff", "stress_tensor_relation", ids.mandel_kirchhoff_err, 1e-10,
          ids.mandel_kirchhoff_err < 1e-10);
  rep.add("frame_indifference", "rotation_invariance", ids.frame_indifference_err, 1e-12,
          ids.frame_indifference_err < 1e-12);
  rep.add("plastic_indifference", "right_multiplication_invariance",
          ids.plastic_indifference_err, 1e-12, ids.plastic_indifference_err < 1e-12);

  const FenchelSuiteReport fy = fenchel_young_suite(mp.dp, 10000, cfg.seed);
  rep.add("fenchel_young_gap", "duality_inequality", fy.min_gap, -1e-12, fy.min_gap >= -1e-12);
  rep.add("fenchel_young_equality", "subdifferential_equality", fy.max_equality_defect, 1e-10,
          fy.max_equality_defect < 1e-10);

  const ConjugateOracleReport co = conjugate_oracle(mp.dp, 100, cfg.seed);
  rep.add("conjugate_closed_form", "bruteforce_conjugate", co.max_abs_err, 1e-8,
          co.max_abs_err < 1e-8);

  const GradientSuiteReport gs = gradient_fd_suite(cfg.make_scenario(), mp, 20, cfg.seed);
  rep.add("gradient_fd", "finite_difference_check", gs.max_err(), 1e-5, gs.max_err() < 1e-5);

  const StressSurveyReport ss = stress_control_survey(mp.ep, mp.ex.q_F, cfg.d, 13, 8, cfg.seed);
  rep.add("stress_control", "mandel_energy_bound", ss.max_ratio, ss.bound_C4, ss.pass,
          "empirical variation constant " + std::to_string(ss.empirical_C5));

  // trajectory certificates
  auto system = cfg.make_system();
  Trajectory traj =
      run(*system, cfg.make_initial_state(), cfg.make_grid(), cfg.make_step_options(),
          cfg.hash());
  if (traj.rejected) {
    std::cerr << "check: run aborted at step " << traj.rejected_at << ": "
              << traj.reject_reason << "\n";
    return kExitSolverFailure;
  }
  double max_gap_rel = 0.0, min_slack = 0.0;
  for (const auto& r : traj.steps) {
    max_gap_rel = std::max(max_gap_rel, r.fenchel_gap / (1.0 + std::abs(r.energy)));
    min_slack = std::min(min_slack, r.comparison_slack);
  }
  rep.add("per_step_fenchel_gap", "flow_rule_inclusion", max_gap_rel, cfg.tol_fenchel_gap,
          max_gap_rel <= cfg.tol_fenchel_gap);
  rep.add("per_step_comparison", "incremental_minimality", min_slack, -1e-10,
          min_slack >= -1e-10 * (1.0 + std::abs(traj.E0)));
  const double edi_scale = cfg.tol_residual_scale * (1.0 + std::abs(traj.E0));
  const double edi = traj.n_steps() > 0 ? max_edi_prefix_residual(traj) : 0.0;
  rep.add("edi_prefix", "energy_dissipation_inequality", edi, edi_scale, edi <= edi_scale);

  if (cfg.eta > 0.0) {
    rep.add("edb_balance", "energy_dissipation_balance", edb_residual(traj),
            1e-3 * (1.0 + std::abs(traj.E0)),
            edb_residual(traj) <= 1e-3 * (1.0 + std::abs(traj.E0)),
            "two-sided defect at this resolution");
    const ChainRuleReport cr = chain_rule_check(traj, *system, cfg.eta);
    rep.add("chain_rule", "energy_time_derivative", cr.max_defect,
            std::max(1e-3, 10.0 * traj.grid.tau()),
            cr.max_defect <= std::max(1e-3, 10.0 * traj.grid.tau()),
            std::to_string(cr.steps_checked) + " steps checked, " +
                std::to_string(cr.steps_excluded) + " excluded");
  } else {
    const ChainRuleReport cr = chain_rule_check(traj, *system, cfg.eta);
    rep.add("chain_rule", "energy_time_derivative", cr.max_defect, 0.0, true,
            "chain rule not guaranteed at eta = 0; reported only");
  }

  write_diagnostics_json(rep, out_path(cfg, out_prefix, "json"));
  std::cout << diagnostics_table_text(rep);
  return rep.all_pass() ? kExitOk : kExitDiagnosticFailure;
}

int cmd_study_tau(const RunConfig& cfg, const std::string& out_prefix, int levels) {
  auto make = [&]() -> std::unique_ptr<GeneralizedGradientSystem> {
    return cfg.make_system();
  };
  const TauStudyReport rep = tau_refinement_study(make, cfg.make_initial_state(),
                                                  cfg.make_grid(), levels,
                                                  cfg.make_step_options());
  const std::string path = out_path(cfg, out_prefix, "csv");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "'");
  out << "level,N,tau,diff_to_prev,max_edi_prefix,max_fenchel_gap,final_energy\n";
  char buf[256];
  for (std::size_t i = 0; i < rep.levels.size(); ++i) {
    const auto& l = rep.levels[i];
    std::snprintf(buf, sizeof(buf), "%zu,%d,%a,%a,%a,%a,%a\n", i, l.N, l.tau, l.diff_to_prev,
                  l.max_edi_prefix, l.max_fenchel_gap, l.final_energy);
    out << buf;
  }
  std::cout << "tau study: " << rep.levels.size() << " levels, cauchy differences "
            << (rep.monotone_decrease ? "strictly decreasing" : "NOT monotone") << "\n";
  return kExitOk;
}

int cmd_survey_stress(const RunConfig& cfg, const std::string& out_prefix) {
  const ModelParams mp = cfg.make_params();
  const StressSurveyReport ss =
      stress_control_survey(mp.ep, mp.ex.q_F, cfg.d, 13, 16, cfg.seed);
  DiagnosticsReport rep;
  rep.add("stress_control_max_ratio", "mandel_energy_bound", ss.max_ratio, ss.bound_C4,
          ss.max_ratio <= ss.bound_C4,
          std::to_string(ss.samples) + " samples");
  rep.add("stress_variation_constant", "mandel_variation_bound", ss.empirical_C5, 0.0,
          std::isfinite(ss.empirical_C5), "empirical constant, reported");
  write_diagnostics_json(rep, out_path(cfg, out_prefix, "json"));
  std::cout << diagnostics_table_text(rep);
  return rep.all_pass() ? kExitOk : kExitDiagnosticFailure;
}

int cmd_oracle_conjugate(const RunConfig& cfg, const std::string& out_prefix) {
  DiagnosticsReport rep;
  const auto run_case = [&](double sigma, double nu, double p, double tol) {
    DissipationParams dp{sigma, nu, p};
    const ConjugateOracleReport r = conjugate_oracle(dp, 100, cfg.seed);
    char name[96];
    std::snprintf(name, sizeof(name), "conjugate_p%.3g_s%.3g_n%.3g", p, sigma, nu);
    rep.add(name, "bruteforce_conjugate", r.max_abs_err, tol, r.max_abs_err < tol);
  };
  run_case(cfg.dp.sigma_yield, cfg.dp.nu, cfg.dp.p, cfg.dp.p == 2.0 ? 1e-8 : 1e-6);
  for (double sigma : {0.5, 1.0, 2.0})
    for (double nu : {0.5, 1.0}) {
      run_case(sigma, nu, 2.0, 1e-8);
      run_case(sigma, nu, 1.5, 1e-6);
    }
  write_diagnostics_json(rep, out_path(cfg, out_prefix, "json"));
  std::cout << diagnostics_table_text(rep);
  return rep.all_pass() ? kExitOk : kExitDiagnosticFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"viscoplastic minimizing-movement solver and verification harness"};
  app.require_subcommand(1);

  std::string config_path, out_prefix;
  double eta_override = -1.0;
  int steps_override = 0;
  int levels = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file")->required();
    sub->add_option("--out", out_prefix, "output path prefix");
    sub->add_option("--eta", eta_override, "override regularization weight");
    sub->add_option("--steps", steps_override, "override step count");
  };

  CLI::App* c_run = app.add_subcommand("run", "run a simulation, emit trajectory CSV + summary");
  CLI::App* c_check = app.add_subcommand("check", "run the verification suite for a config");
  CLI::App* c_tau = app.add_subcommand("study-tau", "time-step refinement study");
  CLI::App* c_stress = app.add_subcommand("survey-stress", "stress-control survey");
  CLI::App* c_oracle = app.add_subcommand("oracle-conjugate", "conjugate closed form vs oracle");
  for (CLI::App* sub : {c_run, c_check, c_tau, c_stress, c_oracle}) add_common(sub);
  c_tau->add_option("--levels", levels, "refinement levels (default from config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfigError;
  }

  try {
    vpmm::RunConfig cfg = vpmm::load_config(config_path);
    if (eta_override >= 0.0) cfg.eta = eta_override;
    if (steps_override > 0) cfg.steps = steps_override;
    if (levels <= 0) levels = cfg.study_levels;

    if (c_run->parsed()) return cmd_run(cfg, out_prefix);
    if (c_check->parsed()) return cmd_check(cfg, out_prefix);
    if (c_tau->parsed()) return cmd_study_tau(cfg, out_prefix, levels);
    if (c_stress->parsed()) return cmd_survey_stress(cfg, out_prefix);
    if (c_oracle->parsed()) return cmd_oracle_conjugate(cfg, out_prefix);
  } catch (const vpmm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const vpmm::StepRejected& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const vpmm::InnerSolverDiverged& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const vpmm::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const vpmm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolverFailure;
  }
  return kExitOk;
}
