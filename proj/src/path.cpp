#include "heavylasso/path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heavylasso/kernels.hpp"
#include "heavylasso/loss.hpp"
#include "heavylasso/model.hpp"
#include "heavylasso/solver.hpp"

namespace heavylasso {

namespace {

// Intercept-only fit (beta pinned at zero by an infinite penalty).
Coefficients null_model(const Dataset& d, const FitConfig& cfg) {
  if (!cfg.intercept) return Coefficients::zeros(d.p());
  FitConfig null_cfg = cfg;
  null_cfg.lambda = std::numeric_limits<double>::infinity();
  return em_fit(d, null_cfg).coef;
}

}  // namespace

std::string to_string(Criterion c) { return c == Criterion::bic ? "bic" : "aic"; }

Criterion parse_criterion(const std::string& name) {
  if (name == "bic") return Criterion::bic;
  if (name == "aic") return Criterion::aic;
  throw InvalidConfig("unknown criterion '" + name + "' (expected bic or aic)");
}

std::string to_string(ResidualScale s) { return s == ResidualScale::rss ? "rss" : "mad"; }

ResidualScale parse_residual_scale(const std::string& name) {
  if (name == "rss") return ResidualScale::rss;
  if (name == "mad") return ResidualScale::mad;
  throw InvalidConfig("unknown residual scale '" + name + "' (expected rss or mad)");
}

namespace {

double median_inplace(std::vector<double>& v) {
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
  const double hi = v[m];
  if (v.size() % 2) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m));
  return 0.5 * (lo + hi);
}

}  // namespace

double mad_rss(std::span<const double> resid) {
  if (resid.empty()) throw ContractViolation("mad_rss: empty residual vector");
  std::vector<double> v(resid.begin(), resid.end());
  const double med = median_inplace(v);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::abs(resid[i] - med);
  const double sigma = 1.4826 * median_inplace(v);
  return static_cast<double>(resid.size()) * sigma * sigma;
}

double lambda_max(const Dataset& d, const FitConfig& cfg) {
  cfg.validate();
  const Coefficients null = null_model(d, cfg);
  const std::vector<double> r = residuals(d, null);
  std::vector<double> w(d.n());
  majorizer_weights(r, cfg, w);
  const std::vector<double> scale =
      cfg.standardize ? column_scales(d, cfg.intercept) : std::vector<double>(d.p(), 1.0);
  const double n = static_cast<double>(d.n());
  double best = 0.0;
  for (std::size_t j = 0; j < d.p(); ++j) {
    best = std::max(best, std::abs(kernels::wdot(w, d.x().col(j), r)) / (n * scale[j]));
  }
  return cfg.unnormalized_update ? best * n : best;
}

std::vector<double> lambda_grid(const Dataset& d, const FitConfig& cfg, int k, double ratio) {
  if (k < 2) throw InvalidConfig("lambda grid needs at least 2 points");
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidConfig("lambda grid ratio must be in (0, 1)");
  const double top = lambda_max(d, cfg);
  if (!(top > 0.0)) throw InvalidInput("lambda_max is zero: design or response is identically zero");
  std::vector<double> grid(static_cast<std::size_t>(k));
  const double log_top = std::log(top);
  const double step = std::log(ratio) / (k - 1);
  grid.front() = top;
  for (int i = 1; i < k - 1; ++i) grid[static_cast<std::size_t>(i)] = std::exp(log_top + step * i);
  grid.back() = ratio * top;
  return grid;
}

double default_grid_ratio(std::size_t n, std::size_t p) { return n <= p ? 0.1 : 1e-4; }

std::vector<double> default_lambda_grid(const Dataset& d, const FitConfig& cfg) {
  return lambda_grid(d, cfg, 100, default_grid_ratio(d.n(), d.p()));
}

double bic_score(double rss, std::size_t df, std::size_t n) {
  if (rss == 0.0) return -std::numeric_limits<double>::infinity();
  const double nn = static_cast<double>(n);
  return nn * std::log(rss / nn) + std::log(nn) * static_cast<double>(df);
}

double aic_score(double rss, std::size_t df, std::size_t n) {
  if (rss == 0.0) return -std::numeric_limits<double>::infinity();
  const double nn = static_cast<double>(n);
  return nn * std::log(rss / nn) + 2.0 * static_cast<double>(df);
}

int select_index(const std::vector<double>& scores, const std::vector<bool>& failed) {
  int best = -1;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i < failed.size() && failed[i]) continue;
    if (best < 0 || scores[i] < scores[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

PathResult fit_path(const Dataset& d, const FitConfig& cfg, const std::vector<double>& grid,
                    Criterion criterion, ResidualScale scale, bool warm_start) {
  if (grid.empty()) throw InvalidConfig("lambda grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0)) throw InvalidConfig("lambda grid entries must be >= 0");
    if (i > 0 && !(grid[i] < grid[i - 1])) {
      throw InvalidConfig("lambda grid must be strictly decreasing");
    }
  }
  PathResult out;
  out.criterion = criterion;
  out.scale = scale;
  out.lambdas = grid;
  const std::size_t k = grid.size();
  out.fits.reserve(k);
  out.rss.assign(k, std::numeric_limits<double>::quiet_NaN());
  out.scale_rss.assign(k, std::numeric_limits<double>::quiet_NaN());
  out.df.assign(k, 0);
  out.bic.assign(k, std::numeric_limits<double>::quiet_NaN());
  out.aic.assign(k, std::numeric_limits<double>::quiet_NaN());
  out.failed.assign(k, false);
  out.perfect_fit.assign(k, false);
  out.df_exceeds_min_np.assign(k, false);

  FitConfig fit_cfg = cfg;
  const Coefficients start = null_model(d, cfg);
  Coefficients warm = start;
  for (std::size_t i = 0; i < k; ++i) {
    fit_cfg.lambda = grid[i];
    try {
      out.fits.push_back(em_fit(d, fit_cfg, warm_start ? warm : start));
    } catch (const NumericalFailure&) {
      out.fits.emplace_back();
      out.failed[i] = true;
      continue;
    }
    const FitResult& fit = out.fits.back();
    if (warm_start) warm = fit.coef;
    const std::vector<double> r = residuals(d, fit.coef);
    out.rss[i] = kernels::sqnorm(r);
    out.df[i] = fit.coef.nonzeros();
    out.scale_rss[i] = scale == ResidualScale::rss ? out.rss[i] : mad_rss(r);
    out.bic[i] = bic_score(out.scale_rss[i], out.df[i], d.n());
    out.aic[i] = aic_score(out.scale_rss[i], out.df[i], d.n());
    out.perfect_fit[i] = out.scale_rss[i] == 0.0;
    out.df_exceeds_min_np[i] = out.df[i] > std::min(d.n(), d.p());
  }
  out.selected_index =
      select_index(criterion == Criterion::bic ? out.bic : out.aic, out.failed);
  if (out.selected_index < 0) throw PathError("every lambda on the path failed");
  return out;
}

}  // namespace heavylasso
