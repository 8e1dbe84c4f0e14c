#ifndef VPMM_CONSTITUTIVE_HPP
#define VPMM_CONSTITUTIVE_HPP

#include <vector>

#include "vpmm/energy_value.hpp"
#include "vpmm/tensor.hpp"

namespace vpmm {

// Growth exponents of the model. The two index conditions couple them:
//   1/q_phi = 1/q_F + 1/q_P  with  q_phi > d,
//   1/q_tilde = 2/q_gamma + 1/q_G  with  q_tilde > d,
// and all of q_F, q_P, q_G, q_gamma exceed d.
struct ExponentSet {
  double q_phi = 3.0;
  double q_F = 6.0;
  double q_P = 6.0;
  double q_G = 6.0;
  double q_gamma = 12.0;
  double p = 2.0;  // dissipation exponent
  int d = 2;

  double q_tilde() const { return 1.0 / (2.0 / q_gamma + 1.0 / q_G); }
  double p_conj() const { return p / (p - 1.0); }
  void validate() const;  // throws ConfigError naming the violated condition
};

struct HardeningParams {
  double c1 = 1.0;
  double c2 = 1.0;
};

struct ElasticParams {
  double c3 = 1.0;
  double c4 = 1.0;
  double eta_W = 2.0;  // determinant-penalty exponent of the elastic density
};

struct DissipationParams {
  double sigma_yield = 1.0;
  double nu = 1.0;
  double p = 2.0;
};

struct RegularizerParams {
  double C7 = 1.0;
  double C8 = 0.0;
  double q_W = 6.0;  // enters through the p' * q_W power
};

// ------------------------------------------------------------ hardening
// K(P) = c1 |P|^qP + c2 det(P)^(-q_gamma), finite only on GL+(d).
EnergyValue hardening_K(const Mat& P, const HardeningParams& hp, const ExponentSet& ex);
Mat d_hardening_K(const Mat& P, const HardeningParams& hp, const ExponentSet& ex);

// H(P,A) = K(P) + |A|^qG / qG with A a third-order array stored as d slices.
double grad3_norm_sq(const Grad3& A);
EnergyValue gradient_term_H(const Mat& P, const Grad3& A, const HardeningParams& hp,
                            const ExponentSet& ex);
Mat dP_gradient_term_H(const Mat& P, const HardeningParams& hp, const ExponentSet& ex);
Grad3 dA_gradient_term_H(const Grad3& A, const ExponentSet& ex);

// ------------------------------------------------------------- elastic
// W(F) = c3 |F|^qF + c4 det(F)^(-eta_W), finite only on GL+(d).
EnergyValue elastic_W(const Mat& F, const ElasticParams& ep, double q_F);
Mat d_elastic_W(const Mat& F, const ElasticParams& ep, double q_F);

// Mandel stress M(F) = F^T DW(F); closed form
//   M(F) = c3 qF |F|^(qF-2) F^T F - c4 eta det(F)^(-eta) I.
Mat mandel_stress(const Mat& F, const ElasticParams& ep, double q_F);
// Same quantity assembled as the generic product F^T DW(F).
Mat mandel_stress_product(const Mat& F, const ElasticParams& ep, double q_F);

// Kirchhoff stress S(F) = DW(F) F^T.
Mat kirchhoff_stress(const Mat& F, const ElasticParams& ep, double q_F);

// Backstress B(F,P) = M(F P^-1) P^-T. Equals -d/dP of W(F P^-1):
// the plastic driving force contributed by the elastic energy.
Mat backstress_B(const Mat& F, const Mat& P, const ElasticParams& ep, double q_F);

// |M(F)| / (W(F) + 1); bounded by q_F + eta_W sqrt(d) for this density.
double stress_control_ratio(const Mat& F, const ElasticParams& ep, double q_F);

// --------------------------------------------------------- regularizer
// Wtilde(F) = max(C7 (|F|^m + |F^-1|^m) - C8, 0) with m = p' q_W.
EnergyValue regularizer_Wtilde(const Mat& F, const RegularizerParams& rp, double p);
Mat d_regularizer_Wtilde(const Mat& F, const RegularizerParams& rp, double p);

// ----------------------------------------------------------- dissipation
// R(V) = sigma |V| + (nu/p) |V|^p.
double dissipation_R(const Mat& V, const DissipationParams& dp);
// Closed-form conjugate: R*(Xi) = max(|Xi|-sigma,0)^p' / (p' nu^(p'-1)).
double dissipation_R_conj(const Mat& Xi, const DissipationParams& dp);

// Subgradient of R: single-valued for V != 0, the yield ball at V = 0.
struct SubdiffR {
  bool at_origin = false;
  Mat xi;          // valid when !at_origin
  double sigma = 0.0;

  bool contains(const Mat& cand, double tol = 0.0) const;
};
SubdiffR subdiff_R(const Mat& V, const DissipationParams& dp);

// Resolvent of the subdifferential: returns the W solving Y in dR(W).
Mat dissipation_flow_rule(const Mat& Y, const DissipationParams& dp);

// prox_{lambda R}(G): argmin_W |W - G|^2/(2 lambda) + R(W). Radial shrinkage;
// closed form for p = 2, scalar Newton otherwise.
Mat dissipation_prox(const Mat& G, double lambda, const DissipationParams& dp);

// Smoothed dissipation used inside descent phases; eps = 0 recovers R.
double dissipation_R_smooth(const Mat& V, const DissipationParams& dp, double eps);
Mat d_dissipation_R_smooth(const Mat& V, const DissipationParams& dp, double eps);

}  // namespace vpmm

#endif
