#pragma once

// Empirical checks of the estimator's theoretical properties: the bounded
// score, the sup-norm of the loss gradient at the truth, the cone condition on
// the estimation error, restricted curvature along cone directions, and the
// solver's monotone-descent / KKT invariants on random instances.
//
// Everything here is Monte-Carlo with explicit seeds, so results are
// reproducible; tolerances are applied by the callers.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "heavylasso/simulation.hpp"
#include "heavylasso/types.hpp"

namespace heavylasso {

/// Scan of |r / (nu + r^2)| over a grid, compared with 1 / (2 sqrt(nu)).
struct ScoreBoundResult {
  double nu = 0.0;
  double bound = 0.0;
  double max_abs_score = 0.0;
  double argmax = 0.0;  // |r| at which the maximum was attained
  double max_excess = 0.0;
};
ScoreBoundResult score_bound_scan(double nu, double lo, double hi, double step);

struct GradientExperiment {
  std::size_t n = 0, p = 0;
  std::vector<double> supnorms;  // ||grad L(beta*)||_inf per trial
  double quantile = 0.0;         // empirical (1 - delta) quantile
  double rate = 0.0;             // sqrt(log(p / delta) / n)
  double c1 = 0.0;               // quantile / rate
  double deterministic_bound = 0.0;  // max over trials of c (nu+1) K / (2 sqrt(nu))
  std::size_t bound_violations = 0;  // trials with any |grad_j| above that bound
};

/// Draws `trials` datasets from `spec` at beta* = gen_beta0 and records the
/// sup-norm of the loss gradient at beta*. Trial t uses seed spec.seed ^ t.
GradientExperiment grad_supnorm_experiment(const ScenarioSpec& spec, const FitConfig& cfg,
                                           int trials, double delta = 0.05);

struct ConeCheck {
  double ratio = 0.0;  // ||D_{S^c}||_1 / ||D_S||_1 with D = beta_hat - beta0, S = supp(beta0)
  bool exact_recovery = false;  // ||D_S||_1 == 0
  bool guaranteed = false;      // lambda >= 2 ||grad L(beta*)||_inf
  bool violation = false;       // ratio > 3 while guaranteed
};
ConeCheck cone_check(const Coefficients& beta_hat, const Coefficients& beta0, double lambda,
                     double grad_supnorm_at_truth);

struct CurvatureProbe {
  double min_ratio = 0.0;  // min over directions of Bregman gap / ||D||_2^2
  double mean_ratio = 0.0;
  std::size_t directions = 0;
};

/// Random cone directions D (||D_{S^c}||_1 <= 3 ||D_S||_1, 0 < ||D||_2 <= radius)
/// around beta0; ratio = (L(b0 + D) - L(b0) - <grad L(b0), D>) / ||D||_2^2 with L
/// the unpenalized loss of cfg.loss_kind. Requires a non-empty support.
CurvatureProbe curvature_probe(const Dataset& d, const Coefficients& beta0, const FitConfig& cfg,
                               double radius, int directions, std::uint64_t seed);

/// Random small instances for the solver invariants.
struct InvariantSuiteResult {
  std::size_t instances = 0;
  std::size_t descent_violations = 0;
  double worst_increase = 0.0;
  std::size_t converged = 0;
  std::size_t kkt_violations = 0;
  double worst_kkt = 0.0;
};

/// `instances` random problems with n <= max_n, p <= max_p, every noise kind in
/// turn and lambda drawn log-uniformly in [0.01, 1] * lambda_max. Each trace
/// step may rise by at most `descent_slack`; converged fits must pass the KKT
/// check at 10 * tol.
InvariantSuiteResult solver_invariant_suite(int instances, std::size_t max_n, std::size_t max_p,
                                            double descent_slack, std::uint64_t seed);

/// Collected numbers for the verify command.
struct TheoryReport {
  std::string preset;
  double grad_supnorm = 0.0;  // quantile from the base gradient experiment
  double bound_rhs = 0.0;     // c1 * sqrt(log(p / delta) / n)
  double c1 = 0.0;
  double cone_ratio = 0.0;    // median over replications
  double curvature_est = 0.0;
  double delta = 0.05;

  // Scaling of the gradient quantile when n quadruples (expected ~ 1/2).
  double grad_shrink_ratio = 0.0;
  // max / min of c1 across the (n, p) grid (expected <= 2).
  double c1_spread = 0.0;
  double cone_fraction_ok = 0.0;

  std::vector<ScoreBoundResult> score_bounds;
  InvariantSuiteResult invariants;

  struct Check {
    std::string name;
    bool hard = false;
    bool passed = false;
    std::string detail;
  };
  std::vector<Check> checks;

  bool hard_failure() const;
};

/// Runs the suite at a named scale: "tiny", "small" or "full". `nu` is the
/// Student parameter used by the gradient, cone and curvature experiments.
TheoryReport run_theory_suite(const std::string& preset, std::uint64_t seed, int threads = 1,
                              double nu = 3.0);

}  // namespace heavylasso
