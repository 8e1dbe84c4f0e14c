#ifndef VPMM_ASSEMBLY_HPP
#define VPMM_ASSEMBLY_HPP

#include "vpmm/constitutive.hpp"
#include "vpmm/mesh.hpp"

namespace vpmm {

struct ModelParams {
  ExponentSet ex;
  HardeningParams hp;
  ElasticParams ep;
  DissipationParams dp;
  RegularizerParams rp;
  double eta = 0.0;  // weight of the regularizing elastic term
};

// Stored energy of a discrete state:
//   sum_q w_q [ W(grad phi P^-1) + K(P) + |grad P|^qG / qG
//               + eta Wtilde(grad phi) ] - <l(t), phi>.
// Infinite marker whenever a quadrature determinant leaves GL+.
EnergyValue assemble_energy(const Scenario& sc, double t, const DeformationField& phi,
                            const PlasticField& P, const ModelParams& mp);

// <l(t), phi> and <l'(t), phi> through the energy quadrature.
double load_pairing(const Scenario& sc, double t, const DeformationField& phi);
double load_pairing_dot(const Scenario& sc, double t, const DeformationField& phi);

// Exact gradient of the assembled energy w.r.t. free nodal deformation
// values; Dirichlet entries zeroed. Throws InfiniteEnergyState off-domain.
DeformationField grad_phi_energy(const Scenario& sc, double t, const DeformationField& phi,
                                 const PlasticField& P, const ModelParams& mp);

// Exact gradient w.r.t. nodal plastic values, split into the contributions
// of the plastic-gradient term, the hardening term and the elastic term
// (the backstress enters the last one).
struct GradPResult {
  PlasticField total;
  PlasticField qg_part;
  PlasticField dk_part;
  PlasticField backstress_part;
};
GradPResult grad_P_energy(const Scenario& sc, const DeformationField& phi,
                          const PlasticField& P, const ModelParams& mp);

double grad_phi_norm(const Mesh& mesh, const DeformationField& g);

}  // namespace vpmm

#endif
