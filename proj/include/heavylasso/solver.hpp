#pragma once

// Weighted-Lasso coordinate descent (the M-step) and the outer
// data-augmentation loop that alternates E-step weights with CD sweeps.
//
// Normalization: the objective carries a 1/(2n) factor on the loss, so the
// coordinate update is
//     beta_j <- S(z_j / n, lambda) * n / A_j,
//     z_j = sum_i w_i x_ij r_ij,  A_j = sum_i w_i x_ij^2,
// with r_ij the partial residual that excludes feature j. Setting
// FitConfig::unnormalized_update gives beta_j <- S(z_j, lambda) / A_j instead,
// which is the same fit at lambda / n.

#include <cstddef>
#include <span>
#include <vector>

#include "heavylasso/types.hpp"

namespace heavylasso {

/// sign(z) * max(|z| - t, 0); exactly 0 when |z| == t.
double soft_threshold(double z, double t);

/// Per-column scale used by FitConfig::standardize: the population standard
/// deviation (about the mean when `centered`, about zero otherwise); 1 for
/// constant-zero columns.
std::vector<double> column_scales(const Dataset& d, bool centered);

/// Mutable coordinate-descent state. `resid` tracks y - b0 - X beta and is
/// re-synchronised from scratch every kResyncSweeps sweeps.
struct CdState {
  static constexpr int kResyncSweeps = 50;

  std::vector<double> beta;
  double intercept = 0.0;
  std::vector<double> resid;
  std::vector<double> weights;    // majorizer weights, held fixed during a sweep
  std::vector<double> curvature;  // A_j cache; NaN marks stale entries
  int sweeps = 0;

  CdState(const Dataset& d, const Coefficients& init, std::vector<double> w);

  /// Replaces the weights and invalidates the A_j cache.
  void set_weights(std::span<const double> w);
  void resync(const Dataset& d);
};

struct SweepStats {
  double max_change = 0.0;
  std::vector<std::size_t> degenerate;  // columns with A_j == 0
};

/// One cyclic pass of exact coordinate minimisation of
///   (1/2n) sum_i w_i r_i^2 + lambda ||beta||_1
/// over `coords` (every column when empty), followed by the intercept when
/// `fit_intercept` is set. Passing lambda already divided by n reproduces the
/// unnormalized update.
SweepStats cd_sweep(CdState& state, const Dataset& d, double lambda, bool fit_intercept = false,
                    std::span<const std::size_t> coords = {});

/// Data-augmentation EM/MM fit. Starts from `init` (zero vector when empty),
/// alternates weight recomputation with cfg.inner_sweeps CD sweeps and stops
/// when the sup-norm coefficient change over one outer iteration drops below
/// cfg.tol after a full sweep. objective_trace[0] is the objective at the
/// starting point; entry t is the objective after outer iteration t.
///
/// Throws InvalidConfig / ContractViolation on bad input and NumericalFailure
/// on a non-finite objective. Hitting outer_max returns converged = false.
FitResult em_fit(const Dataset& d, const FitConfig& cfg, const Coefficients& init = {});

/// First-order optimality of the penalized objective at `b`:
/// |grad_j| <= lambda when beta_j == 0, grad_j == -lambda sign(beta_j)
/// otherwise. Reports the worst deviation; `ok` uses `slack`.
struct KktReport {
  double max_violation = 0.0;
  std::size_t worst_index = 0;
  bool ok = true;
};
KktReport kkt_check(const Dataset& d, const Coefficients& b, const FitConfig& cfg, double slack);

}  // namespace heavylasso
