#include "heavylasso/loss.hpp"

#include <algorithm>
#include <cmath>

#include "heavylasso/kernels.hpp"
#include "heavylasso/model.hpp"

namespace heavylasso {

namespace {

void require_positive_nu(double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidConfig("nu must be positive");
}

}  // namespace

LossEval student_eval(double r, double nu, double c) {
  const double r2 = r * r;
  const double den = nu + r2;
  return {c * (nu + 1.0) * std::log1p(r2 / nu), (nu + 1.0) / den, r / den};
}

double student_loss_point(double r, double nu, double c) {
  require_positive_nu(nu);
  if (!(c > 0.0)) throw InvalidConfig("scale c must be positive");
  return student_eval(r, nu, c).value;
}

double estep_weight(double r, double nu) { return student_eval(r, nu, 1.0).weight; }

double student_score(double r, double nu) { return student_eval(r, nu, 1.0).score; }

double huber_rho(double r, double delta) {
  const double a = std::abs(r);
  return a <= delta ? 0.5 * r * r : delta * a - 0.5 * delta * delta;
}

double baseline_weight(double r, LossKind kind, double delta) {
  switch (kind) {
    case LossKind::squared:
      return 1.0;
    case LossKind::huber: {
      if (!(delta > 0.0)) throw InvalidConfig("huber delta must be positive");
      const double a = std::abs(r);
      return a <= delta ? 1.0 : delta / a;
    }
    case LossKind::student:
      break;
  }
  throw InvalidConfig("baseline_weight: student loss has no baseline weight");
}

void majorizer_weights(std::span<const double> resid, const FitConfig& cfg,
                       std::span<double> out) {
  switch (cfg.loss_kind) {
    case LossKind::student:
      kernels::inv_shift_sq(resid, cfg.nu, cfg.scale_c * (cfg.nu + 1.0), out);
      return;
    case LossKind::squared:
      std::fill(out.begin(), out.end(), 1.0);
      return;
    case LossKind::huber:
      for (std::size_t i = 0; i < resid.size(); ++i) {
        out[i] = baseline_weight(resid[i], LossKind::huber, cfg.huber_delta);
      }
      return;
  }
}

double loss_value(std::span<const double> resid, const FitConfig& cfg) {
  const double n = static_cast<double>(resid.size());
  double s = 0.0;
  switch (cfg.loss_kind) {
    case LossKind::student:
      for (double r : resid) s += std::log1p(r * r / cfg.nu);
      return cfg.scale_c * (cfg.nu + 1.0) * s / (2.0 * n);
    case LossKind::squared:
      for (double r : resid) s += r * r;
      return s / (2.0 * n);
    case LossKind::huber:
      for (double r : resid) s += huber_rho(r, cfg.huber_delta);
      return s / n;
  }
  return s;
}

std::vector<double> gradient_from_residuals(const Matrix& x, std::span<const double> resid,
                                            const FitConfig& cfg) {
  const std::size_t n = x.rows();
  // psi_i = -dloss_i/dr_i scaled so that grad_j = -(1/n) sum psi_i x_ij.
  std::vector<double> psi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = resid[i];
    switch (cfg.loss_kind) {
      case LossKind::student:
        psi[i] = cfg.scale_c * (cfg.nu + 1.0) * student_eval(r, cfg.nu, 1.0).score;
        break;
      case LossKind::squared:
        psi[i] = r;
        break;
      case LossKind::huber:
        psi[i] = std::clamp(r, -cfg.huber_delta, cfg.huber_delta);
        break;
    }
  }
  std::vector<double> g(x.cols());
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < x.cols(); ++j) g[j] = -inv_n * kernels::dot(x.col(j), psi);
  return g;
}

std::vector<double> gradient(const Dataset& d, const Coefficients& b, const FitConfig& cfg) {
  if (cfg.loss_kind == LossKind::student) require_positive_nu(cfg.nu);
  const std::vector<double> r = residuals(d, b);
  return gradient_from_residuals(d.x(), r, cfg);
}

}  // namespace heavylasso
