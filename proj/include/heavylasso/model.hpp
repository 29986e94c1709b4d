#pragma once

#include <span>
#include <vector>

#include "heavylasso/types.hpp"

namespace heavylasso {

/// r_i = y_i - b0 - <x_i, beta>. Throws ContractViolation on a length mismatch.
std::vector<double> residuals(const Dataset& d, const Coefficients& b);

/// Loss data term plus lambda * ||beta||_1 (the intercept is unpenalized).
/// For the student loss this is c (nu + 1)/(2n) sum log(1 + r_i^2 / nu) + lambda ||beta||_1.
double penalized_objective(const Dataset& d, const Coefficients& b, const FitConfig& cfg);

double l1_norm(std::span<const double> v);
double l2_norm(std::span<const double> v);

}  // namespace heavylasso
