#include "heavylasso/model.hpp"

#include <cmath>

#include "heavylasso/kernels.hpp"
#include "heavylasso/loss.hpp"

namespace heavylasso {

std::vector<double> residuals(const Dataset& d, const Coefficients& b) {
  if (b.size() != d.p()) {
    throw ContractViolation("coefficient length " + std::to_string(b.size()) +
                            " does not match p = " + std::to_string(d.p()));
  }
  std::vector<double> r(d.y().begin(), d.y().end());
  if (b.intercept != 0.0) {
    for (double& v : r) v -= b.intercept;
  }
  for (std::size_t j = 0; j < d.p(); ++j) {
    if (b.beta[j] != 0.0) kernels::axpy(-b.beta[j], d.x().col(j), r);
  }
  return r;
}

double penalized_objective(const Dataset& d, const Coefficients& b, const FitConfig& cfg) {
  const std::vector<double> r = residuals(d, b);
  const double l1 = b.l1_norm();
  // lambda may be +inf (full shrinkage); inf * 0 must not become NaN.
  return loss_value(r, cfg) + (l1 == 0.0 ? 0.0 : cfg.lambda * l1);
}

double l1_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double l2_norm(std::span<const double> v) { return std::sqrt(kernels::sqnorm(v)); }

}  // namespace heavylasso
