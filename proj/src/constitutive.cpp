#include "vpmm/constitutive.hpp"

#include <cmath>
#include <sstream>

namespace vpmm {

void ExponentSet::validate() const {
  std::ostringstream err;
  if (d != 2 && d != 3) {
    err << "exponent condition violated: d must be 2 or 3 (got " << d << ")";
    throw ConfigError(err.str());
  }
  const double lhs = 1.0 / q_F + 1.0 / q_P;
  if (std::abs(1.0 / q_phi - lhs) > 1e-12) {
    err << "exponent condition violated: 1/q_phi must equal 1/q_F + 1/q_P (1/" << q_phi
        << " vs " << lhs << ")";
    throw ConfigError(err.str());
  }
  if (!(q_phi > d)) {
    err << "exponent condition violated: q_phi > d required (q_phi = " << q_phi
        << ", d = " << d << ")";
    throw ConfigError(err.str());
  }
  if (!(q_F > d) || !(q_P > d) || !(q_G > d) || !(q_gamma > d)) {
    err << "exponent condition violated: q_F, q_P, q_G, q_gamma must all exceed d = " << d
        << " (got q_F = " << q_F << ", q_P = " << q_P << ", q_G = " << q_G
        << ", q_gamma = " << q_gamma << ")";
    throw ConfigError(err.str());
  }
  if (!(q_tilde() > d)) {
    err << "exponent condition violated: 1/(2/q_gamma + 1/q_G) > d required (q_tilde = "
        << q_tilde() << ", d = " << d << ")";
    throw ConfigError(err.str());
  }
  if (!(p > 1.0)) {
    err << "exponent condition violated: dissipation exponent p > 1 required (p = " << p << ")";
    throw ConfigError(err.str());
  }
}

// ------------------------------------------------------------ hardening

EnergyValue hardening_K(const Mat& P, const HardeningParams& hp, const ExponentSet& ex) {
  const double dP = det(P);
  if (!(dP > 0.0)) return EnergyValue::infinite();
  const double n = frobenius_norm(P);
  return EnergyValue(hp.c1 * std::pow(n, ex.q_P) + hp.c2 * std::pow(dP, -ex.q_gamma));
}

Mat d_hardening_K(const Mat& P, const HardeningParams& hp, const ExponentSet& ex) {
  const double dP = det(P);
  if (!(dP > 0.0)) throw DeterminantNotPositive("d_hardening_K: det(P) <= 0");
  const double n = frobenius_norm(P);
  return hp.c1 * ex.q_P * std::pow(n, ex.q_P - 2.0) * P -
         hp.c2 * ex.q_gamma * std::pow(dP, -ex.q_gamma - 1.0) * cofactor(P);
}

double grad3_norm_sq(const Grad3& A) {
  double s = 0.0;
  for (const Mat& m : A) s += frobenius_inner(m, m);
  return s;
}

EnergyValue gradient_term_H(const Mat& P, const Grad3& A, const HardeningParams& hp,
                            const ExponentSet& ex) {
  const EnergyValue k = hardening_K(P, hp, ex);
  if (!k.is_finite()) return k;
  const double n2 = grad3_norm_sq(A);
  return EnergyValue(k.value() + std::pow(n2, ex.q_G / 2.0) / ex.q_G);
}

Mat dP_gradient_term_H(const Mat& P, const HardeningParams& hp, const ExponentSet& ex) {
  return d_hardening_K(P, hp, ex);
}

Grad3 dA_gradient_term_H(const Grad3& A, const ExponentSet& ex) {
  const double n2 = grad3_norm_sq(A);
  Grad3 out;
  out.reserve(A.size());
  const double f = n2 > 0.0 ? std::pow(n2, (ex.q_G - 2.0) / 2.0) : 0.0;
  for (const Mat& m : A) out.push_back(m * f);
  return out;
}

// ------------------------------------------------------------- elastic

EnergyValue elastic_W(const Mat& F, const ElasticParams& ep, double q_F) {
  const double dF = det(F);
  if (!(dF > 0.0)) return EnergyValue::infinite();
  const double n = frobenius_norm(F);
  return EnergyValue(ep.c3 * std::pow(n, q_F) + ep.c4 * std::pow(dF, -ep.eta_W));
}

Mat d_elastic_W(const Mat& F, const ElasticParams& ep, double q_F) {
  const double dF = det(F);
  if (!(dF > 0.0)) throw DeterminantNotPositive("d_elastic_W: det(F) <= 0");
  const double n = frobenius_norm(F);
  return ep.c3 * q_F * std::pow(n, q_F - 2.0) * F -
         ep.c4 * ep.eta_W * std::pow(dF, -ep.eta_W - 1.0) * cofactor(F);
}

Mat mandel_stress(const Mat& F, const ElasticParams& ep, double q_F) {
  const double dF = det(F);
  if (!(dF > 0.0)) throw DeterminantNotPositive("mandel_stress: det(F) <= 0");
  const double n = frobenius_norm(F);
  return ep.c3 * q_F * std::pow(n, q_F - 2.0) * (F.transpose() * F) -
         ep.c4 * ep.eta_W * std::pow(dF, -ep.eta_W) * Mat::identity(F.dim);
}

Mat mandel_stress_product(const Mat& F, const ElasticParams& ep, double q_F) {
  return F.transpose() * d_elastic_W(F, ep, q_F);
}

Mat kirchhoff_stress(const Mat& F, const ElasticParams& ep, double q_F) {
  return d_elastic_W(F, ep, q_F) * F.transpose();
}

Mat backstress_B(const Mat& F, const Mat& P, const ElasticParams& ep, double q_F) {
  const double dF = det(F);
  const double dP = det(P);
  if (!(dF > 0.0)) throw DeterminantNotPositive("backstress_B: det(F) <= 0");
  if (!(dP > 0.0)) throw DeterminantNotPositive("backstress_B: det(P) <= 0");
  const Mat Pinv = inverse_glplus(P);
  const Mat Fel = F * Pinv;
  if (!(det(Fel) > 0.0)) throw DeterminantNotPositive("backstress_B: det(F P^-1) <= 0");
  return mandel_stress(Fel, ep, q_F) * Pinv.transpose();
}

double stress_control_ratio(const Mat& F, const ElasticParams& ep, double q_F) {
  const EnergyValue w = elastic_W(F, ep, q_F);
  if (!w.is_finite()) throw DeterminantNotPositive("stress_control_ratio: det(F) <= 0");
  return frobenius_norm(mandel_stress(F, ep, q_F)) / (w.value() + 1.0);
}

// --------------------------------------------------------- regularizer

EnergyValue regularizer_Wtilde(const Mat& F, const RegularizerParams& rp, double p) {
  const double dF = det(F);
  if (!(dF > 0.0)) return EnergyValue::infinite();
  const double m = (p / (p - 1.0)) * rp.q_W;
  const Mat Finv = inverse_glplus(F);
  const double raw =
      rp.C7 * (std::pow(frobenius_norm(F), m) + std::pow(frobenius_norm(Finv), m)) - rp.C8;
  return EnergyValue(raw > 0.0 ? raw : 0.0);
}

Mat d_regularizer_Wtilde(const Mat& F, const RegularizerParams& rp, double p) {
  const double dF = det(F);
  if (!(dF > 0.0)) throw DeterminantNotPositive("d_regularizer_Wtilde: det(F) <= 0");
  const double m = (p / (p - 1.0)) * rp.q_W;
  const Mat Finv = inverse_glplus(F);
  const double nF = frobenius_norm(F);
  const double nI = frobenius_norm(Finv);
  const double raw = rp.C7 * (std::pow(nF, m) + std::pow(nI, m)) - rp.C8;
  if (!(raw > 0.0)) return Mat(F.dim);  // clamped region
  const Mat FinvT = Finv.transpose();
  return rp.C7 * m *
         (std::pow(nF, m - 2.0) * F - std::pow(nI, m - 2.0) * (FinvT * Finv * FinvT));
}

// ----------------------------------------------------------- dissipation

double dissipation_R(const Mat& V, const DissipationParams& dp) {
  const double n = frobenius_norm(V);
  return dp.sigma_yield * n + dp.nu / dp.p * std::pow(n, dp.p);
}

double dissipation_R_conj(const Mat& Xi, const DissipationParams& dp) {
  const double excess = frobenius_norm(Xi) - dp.sigma_yield;
  if (excess <= 0.0) return 0.0;
  const double pc = dp.p / (dp.p - 1.0);
  return std::pow(excess, pc) / (pc * std::pow(dp.nu, pc - 1.0));
}

bool SubdiffR::contains(const Mat& cand, double tol) const {
  if (at_origin) return frobenius_norm(cand) <= sigma + tol;
  return frobenius_norm(cand - xi) <= tol;
}

SubdiffR subdiff_R(const Mat& V, const DissipationParams& dp) {
  SubdiffR s;
  s.sigma = dp.sigma_yield;
  const double n = frobenius_norm(V);
  if (n == 0.0) {
    s.at_origin = true;
    s.xi = Mat(V.dim);
    return s;
  }
  s.at_origin = false;
  s.xi = (dp.sigma_yield / n + dp.nu * std::pow(n, dp.p - 2.0)) * V;
  return s;
}

Mat dissipation_flow_rule(const Mat& Y, const DissipationParams& dp) {
  const double n = frobenius_norm(Y);
  if (n <= dp.sigma_yield) return Mat(Y.dim);
  const double r = std::pow((n - dp.sigma_yield) / dp.nu, 1.0 / (dp.p - 1.0));
  return Y * (r / n);
}

Mat dissipation_prox(const Mat& G, double lambda, const DissipationParams& dp) {
  const double n = frobenius_norm(G);
  const double excess = n - lambda * dp.sigma_yield;
  if (excess <= 0.0) return Mat(G.dim);
  double rho;
  if (dp.p == 2.0) {
    rho = excess / (1.0 + lambda * dp.nu);
  } else {
    // rho + lambda nu rho^(p-1) = excess, monotone in rho
    rho = std::min(excess, std::pow(excess / (lambda * dp.nu), 1.0 / (dp.p - 1.0)));
    for (int it = 0; it < 100; ++it) {
      const double f = rho + lambda * dp.nu * std::pow(rho, dp.p - 1.0) - excess;
      const double fp = 1.0 + lambda * dp.nu * (dp.p - 1.0) * std::pow(rho, dp.p - 2.0);
      const double step = f / fp;
      rho -= step;
      if (rho <= 0.0) rho = excess * 1e-12;
      if (std::abs(step) <= 1e-16 * (1.0 + rho)) break;
    }
  }
  return G * (rho / n);
}

double dissipation_R_smooth(const Mat& V, const DissipationParams& dp, double eps) {
  const double n2 = frobenius_inner(V, V);
  const double s = std::sqrt(n2 + eps * eps);
  const double sp = std::pow(n2 + eps * eps, dp.p / 2.0) - std::pow(eps, dp.p);
  return dp.sigma_yield * (s - eps) + dp.nu / dp.p * sp;
}

Mat d_dissipation_R_smooth(const Mat& V, const DissipationParams& dp, double eps) {
  const double n2 = frobenius_inner(V, V);
  const double s = std::sqrt(n2 + eps * eps);
  const double f = dp.sigma_yield / s + dp.nu * std::pow(n2 + eps * eps, (dp.p - 2.0) / 2.0);
  return V * f;
}

}  // namespace vpmm
