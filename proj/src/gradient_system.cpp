#include "vpmm/gradient_system.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace vpmm {

ViscoplasticSystem::ViscoplasticSystem(Scenario scenario, ModelParams params,
                                       LbfgsOptions inner_options)
    : scen_(std::move(scenario)), mp_(params), inner_opts_(inner_options) {
  mp_.ex.validate();
  const std::size_t nn = scen_.mesh.nodes.size();
  sigma_.assign(nn, mp_.dp.sigma_yield);
  nu_.assign(nn, mp_.dp.nu);
  for (int j = 0; j < scen_.mesh.n_nodes(); ++j)
    if (!scen_.mesh.is_dirichlet[static_cast<std::size_t>(j)]) free_nodes_.push_back(j);
}

void ViscoplasticSystem::set_yield_fields(std::vector<double> sigma, std::vector<double> nu) {
  if (sigma.size() != sigma_.size() || nu.size() != nu_.size())
    throw DimensionMismatch("set_yield_fields: size mismatch");
  sigma_ = std::move(sigma);
  nu_ = std::move(nu);
}

std::vector<double> ViscoplasticSystem::phi_to_dofs(const DeformationField& phi) const {
  std::vector<double> x;
  x.reserve(free_nodes_.size() * static_cast<std::size_t>(scen_.mesh.d));
  for (int node : free_nodes_)
    for (int i = 0; i < scen_.mesh.d; ++i) x.push_back(phi[static_cast<std::size_t>(node)][i]);
  return x;
}

void ViscoplasticSystem::dofs_to_phi(const std::vector<double>& x, DeformationField& phi) const {
  std::size_t k = 0;
  for (int node : free_nodes_)
    for (int i = 0; i < scen_.mesh.d; ++i) phi[static_cast<std::size_t>(node)][i] = x[k++];
}

ReducedEnergyResult ViscoplasticSystem::inner_minimize(double t, const PlasticField& P,
                                                       const DeformationField& phi_init) {
  ReducedEnergyResult res;
  if (scen_.mesh.mode == MeshMode::point || free_nodes_.empty()) {
    res.minimizer_phi = affine_field(scen_.mesh, scen_.F0);
    const EnergyValue e = assemble_energy(scen_, t, res.minimizer_phi, P, mp_);
    if (!e.is_finite())
      throw InfiniteEnergyState("inner_minimize: pinned state has infinite energy");
    res.value = e.value();
    res.converged = true;
    return res;
  }

  DeformationField phi = phi_init;
  if (!assemble_energy(scen_, t, phi, P, mp_).is_finite())
    phi = affine_field(scen_.mesh, scen_.F0);

  auto objective = [&](const std::vector<double>& x) -> EnergyValue {
    DeformationField cand = phi;
    dofs_to_phi(x, cand);
    return assemble_energy(scen_, t, cand, P, mp_);
  };
  auto gradient = [&](const std::vector<double>& x) -> std::vector<double> {
    DeformationField cand = phi;
    dofs_to_phi(x, cand);
    const DeformationField g = grad_phi_energy(scen_, t, cand, P, mp_);
    std::vector<double> gx;
    gx.reserve(x.size());
    for (int node : free_nodes_)
      for (int i = 0; i < scen_.mesh.d; ++i) gx.push_back(g[static_cast<std::size_t>(node)][i]);
    return gx;
  };

  std::vector<double> x = phi_to_dofs(phi);
  const LbfgsResult lr = lbfgs_minimize(objective, gradient, x, inner_opts_);
  dofs_to_phi(x, phi);

  res.minimizer_phi = phi;
  res.value = assemble_energy(scen_, t, phi, P, mp_).value();
  res.converged = lr.converged;
  res.inner_iterations = lr.iters;
  res.grad_norm = lr.grad_norm;
  if (!res.converged)
    throw InnerSolverDiverged("inner_minimize: gradient norm " + std::to_string(lr.grad_norm) +
                              " above tolerance after " + std::to_string(lr.iters) +
                              " iterations");
  return res;
}

ReducedEnergyResult ViscoplasticSystem::reduced_energy(double t, const PlasticField& P) {
  if (!plastic_field_admissible(scen_.mesh, P))
    throw InfiniteEnergyState("reduced_energy: plastic state not admissible");

  DeformationField init =
      has_warm_ ? warm_phi_ : affine_field(scen_.mesh, scen_.F0);
  ReducedEnergyResult res = inner_minimize(t, P, init);

  if (scen_.mesh.mode == MeshMode::fem2d && !free_nodes_.empty()) {
    // the reduced value may never exceed the affine reference candidate
    const DeformationField ref = affine_field(scen_.mesh, scen_.F0);
    const EnergyValue e_ref = assemble_energy(scen_, t, ref, P, mp_);
    if (e_ref.is_finite() && e_ref.value() < res.value - 1e-12 * (1.0 + std::abs(res.value))) {
      ReducedEnergyResult res2 = inner_minimize(t, P, ref);
      if (res2.value < res.value) res = res2;
    }
  }
  warm_phi_ = res.minimizer_phi;
  has_warm_ = true;
  return res;
}

double ViscoplasticSystem::dissipation(const PlasticField& P_ref,
                                       const std::vector<Mat>& V) const {
  const Mesh& m = scen_.mesh;
  double s = 0.0;
  for (std::size_t j = 0; j < V.size(); ++j) {
    const Mat W = V[j] * inverse_glplus(P_ref[j]);
    DissipationParams dp{sigma_[j], nu_[j], mp_.dp.p};
    s += m.lumped_mass[j] * dissipation_R(W, dp);
  }
  return s;
}

double ViscoplasticSystem::dual_dissipation(const PlasticField& P_ref,
                                            const std::vector<Mat>& Xi) const {
  const Mesh& m = scen_.mesh;
  double s = 0.0;
  for (std::size_t j = 0; j < Xi.size(); ++j) {
    const Mat Y = Xi[j] * P_ref[j].transpose();
    DissipationParams dp{sigma_[j], nu_[j], mp_.dp.p};
    s += m.lumped_mass[j] * dissipation_R_conj(Y, dp);
  }
  return s;
}

double ViscoplasticSystem::pairing(const std::vector<Mat>& Xi,
                                   const std::vector<Mat>& V) const {
  const Mesh& m = scen_.mesh;
  double s = 0.0;
  for (std::size_t j = 0; j < Xi.size(); ++j)
    s += m.lumped_mass[j] * frobenius_inner(Xi[j], V[j]);
  return s;
}

SubdiffSelection ViscoplasticSystem::subdifferential_select(double t, const PlasticField& P) {
  const ReducedEnergyResult res = reduced_energy(t, P);
  GradPResult g = frozen_grad_P(res.minimizer_phi, P);
  SubdiffSelection sel;
  const Mesh& m = scen_.mesh;
  const std::size_t nn = P.size();
  sel.qg_part.resize(nn);
  sel.dk_part.resize(nn);
  sel.backstress_part.resize(nn);
  sel.xi.resize(nn);
  for (std::size_t j = 0; j < nn; ++j) {
    const double inv_m = 1.0 / m.lumped_mass[j];
    sel.qg_part[j] = g.qg_part[j] * inv_m;
    sel.dk_part[j] = g.dk_part[j] * inv_m;
    sel.backstress_part[j] = g.backstress_part[j] * inv_m;
    sel.xi[j] = sel.qg_part[j] + sel.dk_part[j] + sel.backstress_part[j];
  }
  sel.phi_star = res.minimizer_phi;
  sel.energy = res.value;
  sel.converged = res.converged;
  sel.inner_grad_norm = res.grad_norm;
  sel.inner_iterations = res.inner_iterations;
  return sel;
}

double ViscoplasticSystem::power(double t, const PlasticField& /*P*/,
                                 const SubdiffSelection& sel) const {
  return -load_pairing_dot(scen_, t, sel.phi_star);
}

EnergyValue ViscoplasticSystem::frozen_energy(double t, const DeformationField& phi,
                                              const PlasticField& P) const {
  return assemble_energy(scen_, t, phi, P, mp_);
}

GradPResult ViscoplasticSystem::frozen_grad_P(const DeformationField& phi,
                                              const PlasticField& P) const {
  return grad_P_energy(scen_, phi, P, mp_);
}

Mat ViscoplasticSystem::flow_rule(const Mat& Y, int node) const {
  const std::size_t j = static_cast<std::size_t>(node);
  DissipationParams dp{sigma_[j], nu_[j], mp_.dp.p};
  return dissipation_flow_rule(Y, dp);
}

Mat ViscoplasticSystem::dissipation_prox_at(const Mat& G, double lambda, int node) const {
  const std::size_t j = static_cast<std::size_t>(node);
  DissipationParams dp{sigma_[j], nu_[j], mp_.dp.p};
  return dissipation_prox(G, lambda, dp);
}

double ViscoplasticSystem::pointwise_R(const Mat& W, int node) const {
  const std::size_t j = static_cast<std::size_t>(node);
  DissipationParams dp{sigma_[j], nu_[j], mp_.dp.p};
  return dissipation_R(W, dp);
}

void ViscoplasticSystem::reset_warm_start() {
  has_warm_ = false;
  warm_phi_.clear();
}

ViscoplasticSystem ViscoplasticSystem::with_eta(double eta) const {
  ModelParams mp = mp_;
  mp.eta = eta;
  ViscoplasticSystem s(scen_, mp, inner_opts_);
  s.sigma_ = sigma_;
  s.nu_ = nu_;
  return s;
}

}  // namespace vpmm
