#ifndef VPMM_CONFIG_HPP
#define VPMM_CONFIG_HPP

#include <memory>
#include <string>

#include "vpmm/gradient_system.hpp"
#include "vpmm/minimizing_movements.hpp"

namespace vpmm {

// Flat key = value run description. Unknown keys are hard errors; all
// physics keys are mandatory so that nothing runs on silent defaults.
struct RunConfig {
  std::string name;

  std::string mode = "point";  // point | fem2d
  int d = 2;
  int mesh_n = 4;

  ExponentSet ex;
  HardeningParams hp;
  ElasticParams ep;
  DissipationParams dp;
  RegularizerParams rp;
  double eta = 0.0;

  Mat F0;
  Mat P0;
  LoadSpec load;

  double T = 1.0;
  int steps = 16;

  double tol_inner_grad = 1e-9;
  double tol_fenchel_gap = 1e-6;
  double tol_residual_scale = 1e-6;
  unsigned seed = 1;
  int de_giorgi_samples = 1;
  int study_levels = 3;

  std::string out_csv;
  std::string out_json;

  std::string canonical_text() const;
  std::string hash() const;

  Scenario make_scenario() const;
  ModelParams make_params() const;
  TimeGrid make_grid() const;
  PlasticField make_initial_state() const;
  StepOptions make_step_options() const;
  std::unique_ptr<ViscoplasticSystem> make_system() const;
};

RunConfig parse_config_text(const std::string& text, const std::string& name);
RunConfig load_config(const std::string& path);

}  // namespace vpmm

#endif
