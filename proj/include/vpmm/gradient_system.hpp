#ifndef VPMM_GRADIENT_SYSTEM_HPP
#define VPMM_GRADIENT_SYSTEM_HPP

#include <vector>

#include "vpmm/assembly.hpp"
#include "vpmm/lbfgs.hpp"

namespace vpmm {

struct ReducedEnergyResult {
  double value = 0.0;
  DeformationField minimizer_phi;
  bool converged = false;
  int inner_iterations = 0;
  double grad_norm = 0.0;
};

// Marginal-subdifferential selection at (t, P): the energy gradient taken at
// one deterministic inner minimizer, represented as a nodal field against
// the lumped duality pairing. xi is the nodewise sum of the three parts.
struct SubdiffSelection {
  std::vector<Mat> xi;
  DeformationField phi_star;
  std::vector<Mat> qg_part;
  std::vector<Mat> dk_part;
  std::vector<Mat> backstress_part;
  double energy = 0.0;  // reduced energy at (t, P)
  bool converged = false;
  double inner_grad_norm = 0.0;
  int inner_iterations = 0;
};

// The quintuple driving the evolution: state space (nodal plastic fields
// with the lumped L^p structure), reduced energy, dissipation potential and
// its conjugate, subdifferential selection, and power. Everything the
// time-incremental scheme consumes.
class GeneralizedGradientSystem {
 public:
  virtual ~GeneralizedGradientSystem() = default;

  virtual const Mesh& mesh() const = 0;
  virtual double dissipation_exponent() const = 0;
  virtual double yield_stress_at(int node) const = 0;

  virtual ReducedEnergyResult reduced_energy(double t, const PlasticField& P) = 0;
  virtual double dissipation(const PlasticField& P_ref, const std::vector<Mat>& V) const = 0;
  virtual double dual_dissipation(const PlasticField& P_ref,
                                  const std::vector<Mat>& Xi) const = 0;
  virtual double pairing(const std::vector<Mat>& Xi, const std::vector<Mat>& V) const = 0;
  virtual SubdiffSelection subdifferential_select(double t, const PlasticField& P) = 0;
  virtual double power(double t, const PlasticField& P, const SubdiffSelection& sel) const = 0;

  // Hooks consumed by the incremental minimization.
  virtual EnergyValue frozen_energy(double t, const DeformationField& phi,
                                    const PlasticField& P) const = 0;
  virtual GradPResult frozen_grad_P(const DeformationField& phi, const PlasticField& P) const = 0;
  virtual Mat flow_rule(const Mat& Y, int node) const = 0;  // resolvent of dR at a node
  virtual Mat dissipation_prox_at(const Mat& G, double lambda, int node) const = 0;
  virtual double pointwise_R(const Mat& W, int node) const = 0;
  virtual void reset_warm_start() = 0;
};

// Concrete viscoplastic system on a point or fem2d scenario.
class ViscoplasticSystem : public GeneralizedGradientSystem {
 public:
  ViscoplasticSystem(Scenario scenario, ModelParams params, LbfgsOptions inner_options);

  const Mesh& mesh() const override { return scen_.mesh; }
  const Scenario& scenario() const { return scen_; }
  const ModelParams& params() const { return mp_; }
  double dissipation_exponent() const override { return mp_.dp.p; }

  // Spatially varying yield data; homogeneous by default.
  void set_yield_fields(std::vector<double> sigma, std::vector<double> nu);
  double yield_stress_at(int node) const override {
    return sigma_[static_cast<std::size_t>(node)];
  }
  double nu_at(int node) const { return nu_[static_cast<std::size_t>(node)]; }

  ReducedEnergyResult reduced_energy(double t, const PlasticField& P) override;
  ReducedEnergyResult inner_minimize(double t, const PlasticField& P,
                                     const DeformationField& phi_init);

  double dissipation(const PlasticField& P_ref, const std::vector<Mat>& V) const override;
  double dual_dissipation(const PlasticField& P_ref,
                          const std::vector<Mat>& Xi) const override;
  double pairing(const std::vector<Mat>& Xi, const std::vector<Mat>& V) const override;
  SubdiffSelection subdifferential_select(double t, const PlasticField& P) override;
  double power(double t, const PlasticField& P, const SubdiffSelection& sel) const override;

  EnergyValue frozen_energy(double t, const DeformationField& phi,
                            const PlasticField& P) const override;
  GradPResult frozen_grad_P(const DeformationField& phi, const PlasticField& P) const override;
  Mat flow_rule(const Mat& Y, int node) const override;
  Mat dissipation_prox_at(const Mat& G, double lambda, int node) const override;
  double pointwise_R(const Mat& W, int node) const override;
  void reset_warm_start() override;

  // Same system with a different regularization weight.
  ViscoplasticSystem with_eta(double eta) const;

 private:
  Scenario scen_;
  ModelParams mp_;
  std::vector<double> sigma_, nu_;
  LbfgsOptions inner_opts_;
  std::vector<int> free_nodes_;
  DeformationField warm_phi_;
  bool has_warm_ = false;

  std::vector<double> phi_to_dofs(const DeformationField& phi) const;
  void dofs_to_phi(const std::vector<double>& x, DeformationField& phi) const;
};

}  // namespace vpmm

#endif
