#include "heavylasso/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "heavylasso/kernels.hpp"
#include "heavylasso/loss.hpp"
#include "heavylasso/model.hpp"

namespace heavylasso {

namespace {

constexpr double kStale = std::numeric_limits<double>::quiet_NaN();

// Sweeps 0 and 1 visit every column, later sweeps only the support, with a
// full pass every kFullSweepEvery sweeps to let violators back in.
constexpr int kWarmupFullSweeps = 2;
constexpr int kFullSweepEvery = 10;

double effective_lambda(const FitConfig& cfg, std::size_t n) {
  return cfg.unnormalized_update ? cfg.lambda / static_cast<double>(n) : cfg.lambda;
}

// Column-scaled copy of the data when standardizing; otherwise a view of the
// caller's dataset.
class Workspace {
 public:
  Workspace(const Dataset& d, bool standardize, bool intercept) : original_(&d) {
    if (!standardize) {
      scale_.assign(d.p(), 1.0);
      return;
    }
    scale_ = column_scales(d, intercept);
    Matrix x = d.x();
    for (std::size_t j = 0; j < d.p(); ++j) {
      for (double& v : x.col(j)) v /= scale_[j];
    }
    scaled_.emplace(std::move(x), std::vector<double>(d.y().begin(), d.y().end()));
  }

  const Dataset& data() const { return scaled_ ? *scaled_ : *original_; }

  Coefficients to_working(const Coefficients& b) const {
    Coefficients w = b;
    for (std::size_t j = 0; j < w.size(); ++j) w.beta[j] *= scale_[j];
    return w;
  }
  Coefficients to_original(const Coefficients& b) const {
    Coefficients o = b;
    for (std::size_t j = 0; j < o.size(); ++j) o.beta[j] /= scale_[j];
    return o;
  }

 private:
  const Dataset* original_;
  std::optional<Dataset> scaled_;
  std::vector<double> scale_;
};

double objective_at(std::span<const double> resid, std::span<const double> beta, double lambda,
                    const FitConfig& cfg) {
  const double l1 = l1_norm(beta);
  return loss_value(resid, cfg) + (l1 == 0.0 ? 0.0 : lambda * l1);
}

// Majorizer weights are c*omega for the student loss; report omega itself.
std::vector<double> reported_weights(std::span<const double> w, const FitConfig& cfg) {
  std::vector<double> out(w.begin(), w.end());
  if (cfg.loss_kind == LossKind::student) {
    for (double& v : out) v /= cfg.scale_c;
  }
  return out;
}

}  // namespace

std::vector<double> column_scales(const Dataset& d, bool centered) {
  const double n = static_cast<double>(d.n());
  std::vector<double> scale(d.p(), 1.0);
  for (std::size_t j = 0; j < d.p(); ++j) {
    const auto col = d.x().col(j);
    double mean = 0.0;
    if (centered) {
      for (double v : col) mean += v;
      mean /= n;
    }
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / n);
    if (sd > 0.0) scale[j] = sd;
  }
  return scale;
}

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

CdState::CdState(const Dataset& d, const Coefficients& init, std::vector<double> w)
    : beta(init.beta), intercept(init.intercept), weights(std::move(w)) {
  if (beta.size() != d.p()) throw ContractViolation("CdState: coefficient length mismatch");
  if (weights.size() != d.n()) throw ContractViolation("CdState: weight length mismatch");
  curvature.assign(d.p(), kStale);
  resid = residuals(d, init);
}

void CdState::set_weights(std::span<const double> w) {
  weights.assign(w.begin(), w.end());
  std::fill(curvature.begin(), curvature.end(), kStale);
}

void CdState::resync(const Dataset& d) { resid = residuals(d, Coefficients(beta, intercept)); }

SweepStats cd_sweep(CdState& state, const Dataset& d, double lambda, bool fit_intercept,
                    std::span<const std::size_t> coords) {
  if (state.resid.size() != d.n() || state.beta.size() != d.p()) {
    throw ContractViolation("cd_sweep: state does not match dataset");
  }
  SweepStats stats;
  const double n = static_cast<double>(d.n());
  const auto update = [&](std::size_t j) {
    const auto xj = d.x().col(j);
    double& a = state.curvature[j];
    if (std::isnan(a)) a = kernels::wsqnorm(state.weights, xj);
    const double old = state.beta[j];
    double fresh = 0.0;
    if (a > 0.0) {
      // z_j over the partial residual r + x_j * beta_j.
      const double z = kernels::wdot(state.weights, xj, state.resid) + a * old;
      fresh = soft_threshold(z / n, lambda) * n / a;
    } else {
      stats.degenerate.push_back(j);
    }
    if (fresh != old) {
      kernels::axpy(old - fresh, xj, state.resid);
      state.beta[j] = fresh;
      stats.max_change = std::max(stats.max_change, std::abs(fresh - old));
    }
  };
  if (coords.empty()) {
    for (std::size_t j = 0; j < d.p(); ++j) update(j);
  } else {
    for (std::size_t j : coords) update(j);
  }
  if (fit_intercept) {
    double wsum = 0.0;
    for (double w : state.weights) wsum += w;
    if (wsum > 0.0) {
      double wr = 0.0;
      for (std::size_t i = 0; i < d.n(); ++i) wr += state.weights[i] * state.resid[i];
      const double delta = wr / wsum;
      if (delta != 0.0) {
        for (double& r : state.resid) r -= delta;
        state.intercept += delta;
        stats.max_change = std::max(stats.max_change, std::abs(delta));
      }
    }
  }
  if (++state.sweeps % CdState::kResyncSweeps == 0) state.resync(d);
  return stats;
}

FitResult em_fit(const Dataset& d, const FitConfig& cfg, const Coefficients& init) {
  cfg.validate();
  Coefficients start = init.beta.empty() ? Coefficients::zeros(d.p()) : init;
  if (start.size() != d.p()) throw ContractViolation("em_fit: init length does not match p");
  for (double b : start.beta) {
    if (!std::isfinite(b)) throw InvalidInput("em_fit: init contains a non-finite entry");
  }
  if (!cfg.intercept) start.intercept = 0.0;

  const Workspace ws(d, cfg.standardize, cfg.intercept);
  const Dataset& wd = ws.data();
  const double lambda = effective_lambda(cfg, wd.n());

  CdState state(wd, ws.to_working(start), std::vector<double>(wd.n(), 1.0));
  std::vector<double> w(wd.n());

  FitResult result;
  result.objective_trace.push_back(objective_at(state.resid, state.beta, lambda, cfg));
  if (!std::isfinite(result.objective_trace.back())) {
    throw NumericalFailure("em_fit: non-finite objective at the starting point", 0);
  }

  std::vector<std::size_t> active;
  bool force_full = false;
  std::vector<double> prev_beta;
  for (int t = 1; t <= cfg.outer_max; ++t) {
    majorizer_weights(state.resid, cfg, w);
    state.set_weights(w);
    prev_beta = state.beta;
    const double prev_intercept = state.intercept;

    bool last_full = false;
    for (int k = 0; k < cfg.inner_sweeps; ++k) {
      bool full = force_full || state.sweeps < kWarmupFullSweeps ||
                  state.sweeps % kFullSweepEvery == 0;
      force_full = false;
      active.clear();
      if (!full) {
        for (std::size_t j = 0; j < wd.p(); ++j) {
          if (state.beta[j] != 0.0) active.push_back(j);
        }
        full = active.empty();
      }
      const SweepStats s = cd_sweep(state, wd, lambda, cfg.intercept, active);
      if (full) {
        for (std::size_t j : s.degenerate) {
          if (std::find(result.degenerate_columns.begin(), result.degenerate_columns.end(), j) ==
              result.degenerate_columns.end()) {
            result.degenerate_columns.push_back(j);
          }
        }
      }
      last_full = full;
    }

    const double obj = objective_at(state.resid, state.beta, lambda, cfg);
    if (!std::isfinite(obj)) throw NumericalFailure("em_fit: non-finite objective", t);
    result.objective_trace.push_back(obj);
    result.iterations = t;

    double change = std::abs(state.intercept - prev_intercept);
    for (std::size_t j = 0; j < wd.p(); ++j) {
      change = std::max(change, std::abs(state.beta[j] - prev_beta[j]));
    }
    if (change < cfg.tol) {
      if (last_full) {
        result.converged = true;
        break;
      }
      force_full = true;
    }
  }

  state.resync(wd);
  majorizer_weights(state.resid, cfg, w);
  result.weights = reported_weights(w, cfg);
  result.coef = ws.to_original(Coefficients(state.beta, state.intercept));
  std::sort(result.degenerate_columns.begin(), result.degenerate_columns.end());
  return result;
}

KktReport kkt_check(const Dataset& d, const Coefficients& b, const FitConfig& cfg, double slack) {
  const std::vector<double> r = residuals(d, b);
  const std::vector<double> g = gradient_from_residuals(d.x(), r, cfg);
  const double lambda = effective_lambda(cfg, d.n());
  KktReport report;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double v = b.beta[j] == 0.0 ? std::max(0.0, std::abs(g[j]) - lambda)
                                      : std::abs(g[j] + lambda * (b.beta[j] > 0 ? 1.0 : -1.0));
    if (v > report.max_violation) {
      report.max_violation = v;
      report.worst_index = j;
    }
  }
  if (cfg.intercept) {
    // d/d b0 of the loss: -(1/n) sum psi_i, obtained from a unit column.
    const Matrix ones(d.n(), 1, 1.0);
    const double g0 = gradient_from_residuals(ones, r, cfg)[0];
    if (std::abs(g0) > report.max_violation) {
      report.max_violation = std::abs(g0);
      report.worst_index = d.p();
    }
  }
  report.ok = report.max_violation <= slack;
  return report;
}

}  // namespace heavylasso
