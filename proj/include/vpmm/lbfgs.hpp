#ifndef VPMM_LBFGS_HPP
#define VPMM_LBFGS_HPP

#include <functional>
#include <vector>

#include "vpmm/energy_value.hpp"

namespace vpmm {

struct LbfgsOptions {
  int max_iters = 500;
  double grad_tol = 1e-8;
  int memory = 8;
  double armijo_c1 = 1e-4;
  int max_line_search = 60;
};

struct LbfgsResult {
  bool converged = false;
  int iters = 0;
  double grad_norm = 0.0;
  double f = 0.0;
};

// Limited-memory quasi-Newton descent with Armijo backtracking. Objective
// values may be the infinite marker; the line search treats such trial
// points as absorbing and backs off. The gradient is only evaluated at
// finite points. Deterministic for fixed inputs.
LbfgsResult lbfgs_minimize(const std::function<EnergyValue(const std::vector<double>&)>& f,
                           const std::function<std::vector<double>(const std::vector<double>&)>& grad,
                           std::vector<double>& x, const LbfgsOptions& opts);

double vec_norm(const std::vector<double>& v);

}  // namespace vpmm

#endif
