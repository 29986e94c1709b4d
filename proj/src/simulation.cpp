#include "heavylasso/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>

#include "heavylasso/kernels.hpp"
#include "heavylasso/model.hpp"
#include "heavylasso/solver.hpp"

namespace heavylasso {

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::gauss: return "gauss";
    case NoiseKind::gauss_outlier: return "gauss_outlier";
    case NoiseKind::gauss_wide: return "gauss_wide";
    case NoiseKind::student_t: return "student_t";
    case NoiseKind::cauchy: return "cauchy";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(const std::string& name) {
  if (name == "gauss") return NoiseKind::gauss;
  if (name == "gauss_outlier") return NoiseKind::gauss_outlier;
  if (name == "gauss_wide") return NoiseKind::gauss_wide;
  if (name == "student_t") return NoiseKind::student_t;
  if (name == "cauchy") return NoiseKind::cauchy;
  throw InvalidConfig("unknown noise '" + name +
                      "' (expected gauss, gauss_outlier, gauss_wide, student_t or cauchy)");
}

void ScenarioSpec::validate() const {
  if (n < 1 || p < 1) throw InvalidConfig("scenario needs n >= 1 and p >= 1");
  if (s > p) throw InvalidConfig("scenario sparsity s exceeds p");
  if (!(rho_x >= 0.0 && rho_x < 1.0)) throw InvalidConfig("rho_x must be in [0, 1)");
  if (!(noise.outlier_rate >= 0.0 && noise.outlier_rate <= 1.0)) {
    throw InvalidConfig("outlier rate must be in [0, 1]");
  }
  if (!(noise.outlier_low >= 0.0 && noise.outlier_high >= noise.outlier_low)) {
    throw InvalidConfig("outlier magnitude range must satisfy 0 <= low <= high");
  }
  if (noise.t_df < 1) throw InvalidConfig("t degrees of freedom must be >= 1");
  if (!(noise.wide_sigma > 0.0)) throw InvalidConfig("wide noise sigma must be positive");
  if (n_test < 1) throw InvalidConfig("n_test must be >= 1");
  if (reps < 1) throw InvalidConfig("reps must be >= 1");
}

MethodSpec method_preset(const std::string& name) {
  MethodSpec m;
  m.name = name;
  m.cfg.loss_kind = parse_loss_kind(name);
  m.scale = m.cfg.loss_kind == LossKind::squared ? ResidualScale::rss : ResidualScale::mad;
  return m;
}

Matrix gen_design(std::size_t n, std::size_t p, double rho_x, Rng& rng) {
  if (!(rho_x >= 0.0 && rho_x < 1.0)) throw InvalidConfig("rho_x must be in [0, 1)");
  Matrix x(n, p);
  const double innov = std::sqrt(1.0 - rho_x * rho_x);
  for (std::size_t i = 0; i < n; ++i) {
    double prev = rng.normal();
    if (p > 0) x(i, 0) = prev;
    for (std::size_t j = 1; j < p; ++j) {
      prev = rho_x * prev + innov * rng.normal();
      x(i, j) = prev;
    }
  }
  return x;
}

Matrix gen_design(std::size_t n, std::size_t p, double rho_x, std::uint64_t seed) {
  Rng rng(seed);
  return gen_design(n, p, rho_x, rng);
}

Coefficients gen_beta0(std::size_t p, std::size_t s) {
  if (s > p) throw InvalidInput("gen_beta0: s exceeds p");
  Coefficients b = Coefficients::zeros(p);
  const std::size_t half = (s + 1) / 2;
  for (std::size_t j = 0; j < s; ++j) b.beta[j] = j < half ? 1.0 : -1.0;
  return b;
}

std::vector<double> gen_noise(std::size_t n, const NoiseSpec& noise, Rng& rng) {
  std::vector<double> e(n);
  switch (noise.kind) {
    case NoiseKind::gauss:
    case NoiseKind::gauss_outlier:
      for (double& v : e) v = rng.normal();
      break;
    case NoiseKind::gauss_wide:
      for (double& v : e) v = noise.wide_sigma * rng.normal();
      break;
    case NoiseKind::student_t:
      for (double& v : e) v = rng.student_t(noise.t_df);
      break;
    case NoiseKind::cauchy:
      for (double& v : e) v = rng.cauchy();
      break;
  }
  if (noise.kind == NoiseKind::gauss_outlier) {
    const auto k = static_cast<std::size_t>(std::llround(noise.outlier_rate * static_cast<double>(n)));
    // Partial Fisher-Yates: the first k slots of idx become a uniform k-subset.
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
      std::swap(idx[i], idx[j]);
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      e[idx[i]] += sign * rng.uniform(noise.outlier_low, noise.outlier_high);
    }
  }
  return e;
}

std::vector<double> gen_noise(std::size_t n, const NoiseSpec& noise, std::uint64_t seed) {
  Rng rng(seed);
  return gen_noise(n, noise, rng);
}

Dataset gen_dataset(std::size_t n, const ScenarioSpec& spec, const Coefficients& beta0, Rng& rng) {
  Matrix x = gen_design(n, spec.p, spec.rho_x, rng);
  std::vector<double> y = gen_noise(n, spec.noise, rng);
  for (std::size_t j = 0; j < spec.p; ++j) {
    if (beta0.beta[j] != 0.0) kernels::axpy(beta0.beta[j], x.col(j), y);
  }
  return Dataset(std::move(x), std::move(y));
}

MetricsRecord evaluate(const Coefficients& beta_hat, const Coefficients& beta0,
                       const Dataset& train, const Dataset& test) {
  if (beta_hat.size() != beta0.size() || beta_hat.size() != train.p() ||
      test.p() != train.p()) {
    throw ContractViolation("evaluate: dimension mismatch");
  }
  MetricsRecord m;
  std::vector<double> delta(beta_hat.size());
  for (std::size_t j = 0; j < delta.size(); ++j) {
    delta[j] = beta_hat.beta[j] - beta0.beta[j];
    m.l2sq += delta[j] * delta[j];
    m.l1 += std::abs(delta[j]);
  }
  std::vector<double> fitted(train.n(), beta_hat.intercept - beta0.intercept);
  for (std::size_t j = 0; j < delta.size(); ++j) {
    if (delta[j] != 0.0) kernels::axpy(delta[j], train.x().col(j), fitted);
  }
  m.linpred = kernels::sqnorm(fitted) / static_cast<double>(train.n());
  const std::vector<double> r = residuals(test, beta_hat);
  m.pred = kernels::sqnorm(r) / static_cast<double>(test.n());
  return m;
}

std::uint64_t replication_seed(std::uint64_t seed, int rep) noexcept {
  return seed ^ static_cast<std::uint64_t>(rep);
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) {
    s.mean = s.sd = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) {
    s.sd = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return s;
}

namespace {

struct RepOutcome {
  std::optional<MetricsRecord> metrics;
  double lambda = 0.0;
  std::size_t kkt_checked = 0;
  std::size_t kkt_violations = 0;
  double kkt_worst = 0.0;
};

std::vector<RepOutcome> run_replication(const ScenarioSpec& spec,
                                        const std::vector<MethodSpec>& methods,
                                        const Coefficients& beta0, int rep) {
  Rng rng(replication_seed(spec.seed, rep));
  const Dataset train = gen_dataset(spec.n, spec, beta0, rng);
  const Dataset test = gen_dataset(spec.n_test, spec, beta0, rng);
  std::vector<RepOutcome> out(methods.size());
  for (std::size_t m = 0; m < methods.size(); ++m) {
    const MethodSpec& method = methods[m];
    try {
      const double ratio =
          method.grid_ratio > 0.0 ? method.grid_ratio : default_grid_ratio(spec.n, spec.p);
      const std::vector<double> grid = lambda_grid(train, method.cfg, method.grid_size, ratio);
      const PathResult path = fit_path(train, method.cfg, grid, method.criterion, method.scale);
      for (std::size_t i = 0; i < path.fits.size(); ++i) {
        if (path.failed[i] || !path.fits[i].converged || method.cfg.standardize) continue;
        FitConfig at = method.cfg;
        at.lambda = path.lambdas[i];
        const KktReport kkt = kkt_check(train, path.fits[i].coef, at, 10.0 * at.tol);
        ++out[m].kkt_checked;
        out[m].kkt_violations += kkt.ok ? 0 : 1;
        out[m].kkt_worst = std::max(out[m].kkt_worst, kkt.max_violation);
      }
      out[m].metrics = evaluate(path.selected().coef, beta0, train, test);
      out[m].lambda = path.selected_lambda();
    } catch (const PathError&) {
    } catch (const NumericalFailure&) {
    }
  }
  return out;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioSpec& spec, const std::vector<MethodSpec>& methods,
                            int threads) {
  spec.validate();
  for (const MethodSpec& m : methods) m.cfg.validate();
  const Coefficients beta0 = gen_beta0(spec.p, spec.s);

  std::vector<std::vector<RepOutcome>> reps(static_cast<std::size_t>(spec.reps));
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int r = next++; r < spec.reps; r = next++) {
      reps[static_cast<std::size_t>(r)] = run_replication(spec, methods, beta0, r);
    }
  };
  const int nthreads = std::clamp(threads, 1, spec.reps);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  ScenarioResult result;
  result.spec = spec;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    MethodOutcome mo;
    mo.name = methods[m].name;
    std::vector<double> l2sq, l1, linpred, pred;
    for (int r = 0; r < spec.reps; ++r) {
      const RepOutcome& ro = reps[static_cast<std::size_t>(r)][m];
      mo.kkt_checked += ro.kkt_checked;
      mo.kkt_violations += ro.kkt_violations;
      mo.kkt_worst = std::max(mo.kkt_worst, ro.kkt_worst);
      if (!ro.metrics) {
        mo.failed_reps.push_back(r);
        continue;
      }
      mo.records.push_back(*ro.metrics);
      mo.selected_lambda.push_back(ro.lambda);
      l2sq.push_back(ro.metrics->l2sq);
      l1.push_back(ro.metrics->l1);
      linpred.push_back(ro.metrics->linpred);
      pred.push_back(ro.metrics->pred);
    }
    if (static_cast<double>(mo.failed_reps.size()) > 0.2 * spec.reps) {
      throw ScenarioFailure("method '" + mo.name + "' failed in " +
                            std::to_string(mo.failed_reps.size()) + " of " +
                            std::to_string(spec.reps) + " replications");
    }
    mo.l2sq = summarize(l2sq);
    mo.l1 = summarize(l1);
    mo.linpred = summarize(linpred);
    mo.pred = summarize(pred);
    result.methods.push_back(std::move(mo));
  }
  return result;
}

}  // namespace heavylasso
