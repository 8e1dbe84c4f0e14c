#include "vpmm/assembly.hpp"

#include <cmath>

namespace vpmm {

namespace {

// Deformation gradient at a quadrature point. Point mode carries the affine
// Dirichlet gradient directly; no shape-function contribution exists there.
Mat deformation_gradient(const Scenario& sc, const QuadPoint& q, const DeformationField& phi) {
  if (sc.mesh.mode == MeshMode::point) return sc.F0;
  return gradient_vec(q, phi);
}

}  // namespace

double load_pairing(const Scenario& sc, double t, const DeformationField& phi) {
  const double s = sc.load.scale(t);
  double sum = 0.0;
  for (const QuadPoint& q : sc.mesh.qpts) sum += q.w * dot(sc.load.f0, interpolate_vec(q, phi));
  return s * sum;
}

double load_pairing_dot(const Scenario& sc, double t, const DeformationField& phi) {
  const double s = sc.load.scale_dot(t);
  double sum = 0.0;
  for (const QuadPoint& q : sc.mesh.qpts) sum += q.w * dot(sc.load.f0, interpolate_vec(q, phi));
  return s * sum;
}

EnergyValue assemble_energy(const Scenario& sc, double t, const DeformationField& phi,
                            const PlasticField& P, const ModelParams& mp) {
  if (phi.size() != sc.mesh.nodes.size() || P.size() != sc.mesh.nodes.size())
    throw DimensionMismatch("assemble_energy: field size does not match mesh");
  double acc = 0.0;
  for (const QuadPoint& q : sc.mesh.qpts) {
    const Mat Pq = interpolate_mat(q, P);
    const double dP = det(Pq);
    if (!(dP > 0.0)) return EnergyValue::infinite();
    const Mat F = deformation_gradient(sc, q, phi);
    if (!(det(F) > 0.0)) return EnergyValue::infinite();
    const Mat Fel = F * inverse_glplus(Pq);
    const EnergyValue w = elastic_W(Fel, mp.ep, mp.ex.q_F);
    if (!w.is_finite()) return EnergyValue::infinite();
    const EnergyValue k = hardening_K(Pq, mp.hp, mp.ex);
    if (!k.is_finite()) return EnergyValue::infinite();
    double cell = w.value() + k.value();
    const Grad3 gP = gradient_mat(q, P);
    const double n2 = grad3_norm_sq(gP);
    if (n2 > 0.0) cell += std::pow(n2, mp.ex.q_G / 2.0) / mp.ex.q_G;
    if (mp.eta > 0.0) {
      const EnergyValue wt = regularizer_Wtilde(F, mp.rp, mp.ex.p);
      if (!wt.is_finite()) return EnergyValue::infinite();
      cell += mp.eta * wt.value();
    }
    acc += q.w * cell;
  }
  return EnergyValue(acc - load_pairing(sc, t, phi));
}

DeformationField grad_phi_energy(const Scenario& sc, double t, const DeformationField& phi,
                                 const PlasticField& P, const ModelParams& mp) {
  const Mesh& mesh = sc.mesh;
  DeformationField g(mesh.nodes.size(), Vec(mesh.d));
  if (mesh.mode == MeshMode::point) return g;  // fully pinned

  const double s = sc.load.scale(t);
  for (const QuadPoint& q : mesh.qpts) {
    const Mat Pq = interpolate_mat(q, P);
    if (!(det(Pq) > 0.0)) throw InfiniteEnergyState("grad_phi_energy: det(P) <= 0 at qpt");
    const Mat Pinv = inverse_glplus(Pq);
    const Mat F = gradient_vec(q, phi);
    if (!(det(F) > 0.0)) throw InfiniteEnergyState("grad_phi_energy: det(F) <= 0 at qpt");
    const Mat Fel = F * Pinv;
    if (!(det(Fel) > 0.0)) throw InfiniteEnergyState("grad_phi_energy: det(F P^-1) <= 0");
    Mat stress = d_elastic_W(Fel, mp.ep, mp.ex.q_F) * Pinv.transpose();
    if (mp.eta > 0.0) stress += mp.eta * d_regularizer_Wtilde(F, mp.rp, mp.ex.p);
    for (std::size_t a = 0; a < q.nodes.size(); ++a) {
      const int node = q.nodes[a];
      if (mesh.is_dirichlet[static_cast<std::size_t>(node)]) continue;
      Vec& gn = g[static_cast<std::size_t>(node)];
      for (int i = 0; i < mesh.d; ++i) {
        double v = 0.0;
        for (int k = 0; k < mesh.d; ++k) v += stress(i, k) * q.dN[a][k];
        gn[i] += q.w * v - q.w * s * sc.load.f0[i] * q.N[a];
      }
    }
  }
  return g;
}

GradPResult grad_P_energy(const Scenario& sc, const DeformationField& phi,
                          const PlasticField& P, const ModelParams& mp) {
  const Mesh& mesh = sc.mesh;
  GradPResult r;
  r.total.assign(mesh.nodes.size(), Mat(mesh.d));
  r.qg_part.assign(mesh.nodes.size(), Mat(mesh.d));
  r.dk_part.assign(mesh.nodes.size(), Mat(mesh.d));
  r.backstress_part.assign(mesh.nodes.size(), Mat(mesh.d));

  for (const QuadPoint& q : mesh.qpts) {
    const Mat Pq = interpolate_mat(q, P);
    if (!(det(Pq) > 0.0)) throw InfiniteEnergyState("grad_P_energy: det(P) <= 0 at qpt");
    const Mat F = deformation_gradient(sc, q, phi);
    const Mat B = backstress_B(F, Pq, mp.ep, mp.ex.q_F);
    const Mat DK = d_hardening_K(Pq, mp.hp, mp.ex);
    const Grad3 gP = gradient_mat(q, P);
    const double n2 = grad3_norm_sq(gP);
    const double qg_f = n2 > 0.0 ? std::pow(n2, (mp.ex.q_G - 2.0) / 2.0) : 0.0;
    for (std::size_t a = 0; a < q.nodes.size(); ++a) {
      const std::size_t node = static_cast<std::size_t>(q.nodes[a]);
      r.dk_part[node] += DK * (q.w * q.N[a]);
      // the elastic contribution to the P-derivative is minus the backstress
      r.backstress_part[node] += B * (-q.w * q.N[a]);
      if (qg_f != 0.0) {
        Mat acc(mesh.d);
        for (int k = 0; k < mesh.d; ++k) acc += gP[static_cast<std::size_t>(k)] * q.dN[a][k];
        r.qg_part[node] += acc * (q.w * qg_f);
      }
    }
  }
  for (std::size_t j = 0; j < r.total.size(); ++j)
    r.total[j] = r.qg_part[j] + r.dk_part[j] + r.backstress_part[j];
  return r;
}

double grad_phi_norm(const Mesh& mesh, const DeformationField& g) {
  double s = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (mesh.is_dirichlet[j]) continue;
    s += dot(g[j], g[j]);
  }
  return std::sqrt(s);
}

}  // namespace vpmm
