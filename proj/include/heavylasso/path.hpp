#pragma once

// Lambda grids, warm-started regularization paths and information-criterion
// selection.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "heavylasso/types.hpp"

namespace heavylasso {

enum class Criterion { bic, aic };

std::string to_string(Criterion c);
Criterion parse_criterion(const std::string& name);

/// Residual spread fed into the criteria. `rss` is the plain residual sum of
/// squares. `mad` replaces it with n * sigma^2 where sigma = 1.4826 * MAD of
/// the residuals, which heavy-tailed residuals cannot inflate.
enum class ResidualScale { rss, mad };

std::string to_string(ResidualScale s);
ResidualScale parse_residual_scale(const std::string& name);

/// n * (1.4826 * median |r_i - median(r)|)^2.
double mad_rss(std::span<const double> resid);

/// Smallest lambda at which beta = 0 satisfies the optimality conditions when
/// starting from zero: max_j |sum_i w_i x_ij r_i| / n with the majorizer
/// weights of the null model (r = y without an intercept). Expressed in the
/// units of cfg.lambda, so it honours standardize / unnormalized_update.
double lambda_max(const Dataset& d, const FitConfig& cfg);

/// k log-spaced values from lambda_max down to ratio * lambda_max.
/// Throws InvalidConfig for k < 2 or ratio outside (0, 1), InvalidInput when
/// lambda_max is zero (all-zero design or response).
std::vector<double> lambda_grid(const Dataset& d, const FitConfig& cfg, int k, double ratio);

/// Ratio used by default_lambda_grid: 0.1 when n <= p, 1e-4 otherwise.
/// Deeper grids reach near-interpolating fits when n <= p, where every
/// residual-based criterion runs to -inf.
double default_grid_ratio(std::size_t n, std::size_t p);

/// 100 points down to default_grid_ratio(n, p) * lambda_max.
std::vector<double> default_lambda_grid(const Dataset& d, const FitConfig& cfg);

/// n log(rss / n) + log(n) df. Returns -inf for rss == 0 (perfect fit).
double bic_score(double rss, std::size_t df, std::size_t n);
/// n log(rss / n) + 2 df.
double aic_score(double rss, std::size_t df, std::size_t n);

/// Index of the minimum score, ignoring entries with failed[i]; ties go to the
/// smallest index (largest lambda on a descending grid). Returns -1 when every
/// entry failed.
int select_index(const std::vector<double>& scores, const std::vector<bool>& failed);

class PathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PathResult {
  std::vector<double> lambdas;
  std::vector<FitResult> fits;
  std::vector<double> rss;        // raw residual sum of squares
  std::vector<double> scale_rss;  // the quantity the criteria use (== rss for ResidualScale::rss)
  std::vector<std::size_t> df;
  std::vector<double> bic;
  std::vector<double> aic;
  std::vector<bool> failed;
  std::vector<bool> perfect_fit;
  std::vector<bool> df_exceeds_min_np;
  Criterion criterion = Criterion::bic;
  ResidualScale scale = ResidualScale::rss;
  int selected_index = -1;

  const FitResult& selected() const { return fits.at(static_cast<std::size_t>(selected_index)); }
  double selected_lambda() const { return lambdas.at(static_cast<std::size_t>(selected_index)); }
};

/// Fits each grid value in order, warm-starting from the previous solution.
/// cfg.lambda is ignored. A NumericalFailure at one lambda marks it failed;
/// PathError when every lambda fails.
PathResult fit_path(const Dataset& d, const FitConfig& cfg, const std::vector<double>& grid,
                    Criterion criterion = Criterion::bic,
                    ResidualScale scale = ResidualScale::rss, bool warm_start = true);

}  // namespace heavylasso
