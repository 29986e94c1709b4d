#pragma once

// Student loss l(r) = c (nu + 1) log(1 + r^2 / nu), its E-step weight and
// score, plus the IRLS weights of the squared and Huber baselines.

#include <span>
#include <vector>

#include "heavylasso/types.hpp"

namespace heavylasso {

/// Per-residual evaluation of the Student loss. All three fields come from
/// the same denominator nu + r^2.
struct LossEval {
  double value;   // c (nu + 1) log(1 + r^2 / nu)
  double weight;  // (nu + 1) / (nu + r^2)
  double score;   // r / (nu + r^2)
};

LossEval student_eval(double r, double nu, double c);

double student_loss_point(double r, double nu, double c = 1.0);
double estep_weight(double r, double nu);
double student_score(double r, double nu);

/// Huber rho: r^2/2 inside [-delta, delta], delta |r| - delta^2/2 outside.
double huber_rho(double r, double delta);

/// IRLS weight of a baseline loss: 1 for squared, min(1, delta/|r|) for Huber.
double baseline_weight(double r, LossKind kind, double delta = 1.345);

/// Weights of the quadratic majorizer (1/2n) sum w_i r_i^2 at the given
/// residuals: c * omega for student, the IRLS weight for the baselines.
void majorizer_weights(std::span<const double> resid, const FitConfig& cfg,
                       std::span<double> out);

/// Unpenalized data term of the objective at the given residuals:
///   student  (c / 2n) sum (nu + 1) log(1 + r^2 / nu)
///   squared  (1 / 2n) sum r^2
///   huber    (1 / n)  sum rho_delta(r)
double loss_value(std::span<const double> resid, const FitConfig& cfg);

/// Gradient of the unpenalized data term with respect to beta.
std::vector<double> gradient(const Dataset& d, const Coefficients& b, const FitConfig& cfg);

/// Gradient from precomputed residuals (no intercept handling needed).
std::vector<double> gradient_from_residuals(const Matrix& x, std::span<const double> resid,
                                            const FitConfig& cfg);

}  // namespace heavylasso
