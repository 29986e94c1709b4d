#include "heavylasso/theory.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

#include "heavylasso/kernels.hpp"
#include "heavylasso/loss.hpp"
#include "heavylasso/model.hpp"
#include "heavylasso/path.hpp"
#include "heavylasso/rng.hpp"
#include "heavylasso/solver.hpp"

namespace heavylasso {

namespace {

// Runs fn(0..count-1) on up to `threads` workers. Results must be written to
// per-index slots so the outcome does not depend on scheduling.
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  const int workers = std::clamp(threads, 1, std::max(count, 1));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) fn(i);
    });
  }
}

double empirical_quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::clamp<std::size_t>(k, 1, v.size()) - 1];
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

ScoreBoundResult score_bound_scan(double nu, double lo, double hi, double step) {
  if (!(nu > 0.0)) throw InvalidConfig("score_bound_scan: nu must be positive");
  if (!(step > 0.0) || !(hi >= lo)) throw InvalidConfig("score_bound_scan: bad grid");
  ScoreBoundResult res;
  res.nu = nu;
  res.bound = 1.0 / (2.0 * std::sqrt(nu));
  res.max_excess = -res.bound;
  const auto count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
  for (long long k = 0; k <= count; ++k) {
    const double r = lo + static_cast<double>(k) * step;
    const double s = std::abs(student_score(r, nu));
    if (s > res.max_abs_score) {
      res.max_abs_score = s;
      res.argmax = std::abs(r);
    }
    res.max_excess = std::max(res.max_excess, s - res.bound);
  }
  return res;
}

GradientExperiment grad_supnorm_experiment(const ScenarioSpec& spec, const FitConfig& cfg,
                                           int trials, double delta) {
  spec.validate();
  cfg.validate();
  if (trials < 1) throw InvalidConfig("grad_supnorm_experiment: trials must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidConfig("delta must be in (0, 1)");

  GradientExperiment ex;
  ex.n = spec.n;
  ex.p = spec.p;
  const Coefficients beta0 = gen_beta0(spec.p, spec.s);
  const double unit_bound =
      cfg.scale_c * (cfg.nu + 1.0) / (2.0 * std::sqrt(cfg.nu));
  for (int t = 0; t < trials; ++t) {
    Rng rng(replication_seed(spec.seed, t));
    const Dataset d = gen_dataset(spec.n, spec, beta0, rng);
    const std::vector<double> g = gradient(d, beta0, cfg);
    const double k = sup_norm(d.x().data());
    const double bound = unit_bound * k;
    ex.deterministic_bound = std::max(ex.deterministic_bound, bound);
    bool violated = false;
    for (double gj : g) violated = violated || std::abs(gj) > bound * (1.0 + 1e-12);
    ex.bound_violations += violated ? 1 : 0;
    ex.supnorms.push_back(sup_norm(g));
  }
  ex.quantile = empirical_quantile(ex.supnorms, 1.0 - delta);
  ex.rate = std::sqrt(std::log(static_cast<double>(spec.p) / delta) / static_cast<double>(spec.n));
  ex.c1 = ex.quantile / ex.rate;
  return ex;
}

ConeCheck cone_check(const Coefficients& beta_hat, const Coefficients& beta0, double lambda,
                     double grad_supnorm_at_truth) {
  if (beta_hat.size() != beta0.size()) throw ContractViolation("cone_check: size mismatch");
  double on = 0.0, off = 0.0;
  for (std::size_t j = 0; j < beta0.size(); ++j) {
    const double dj = std::abs(beta_hat.beta[j] - beta0.beta[j]);
    (beta0.beta[j] != 0.0 ? on : off) += dj;
  }
  ConeCheck c;
  c.guaranteed = lambda >= 2.0 * grad_supnorm_at_truth;
  if (on == 0.0) {
    c.exact_recovery = true;
    return c;
  }
  c.ratio = off / on;
  c.violation = c.guaranteed && c.ratio > 3.0;
  return c;
}

CurvatureProbe curvature_probe(const Dataset& d, const Coefficients& beta0, const FitConfig& cfg,
                               double radius, int directions, std::uint64_t seed) {
  cfg.validate();
  if (!(radius > 0.0)) throw InvalidConfig("curvature_probe: radius must be positive");
  if (directions < 1) throw InvalidConfig("curvature_probe: directions must be >= 1");
  if (beta0.size() != d.p()) throw ContractViolation("curvature_probe: size mismatch");
  const std::vector<std::size_t> on = beta0.support();
  if (on.empty()) throw InvalidInput("curvature_probe: beta0 has empty support");
  std::vector<std::size_t> off;
  for (std::size_t j = 0, k = 0; j < d.p(); ++j) {
    if (k < on.size() && on[k] == j) {
      ++k;
    } else {
      off.push_back(j);
    }
  }

  const std::vector<double> r0 = residuals(d, beta0);
  const double l0 = loss_value(r0, cfg);
  const std::vector<double> g0 = gradient_from_residuals(d.x(), r0, cfg);

  Rng rng(seed);
  CurvatureProbe probe;
  probe.min_ratio = INFINITY;
  double sum = 0.0;
  std::vector<double> delta(d.p());
  while (probe.directions < static_cast<std::size_t>(directions)) {
    std::fill(delta.begin(), delta.end(), 0.0);
    double on_l1 = 0.0;
    for (std::size_t j : on) {
      delta[j] = rng.normal();
      on_l1 += std::abs(delta[j]);
    }
    if (on_l1 == 0.0) continue;
    // Spread an off-support l1 budget of u * 3 ||D_S||_1 over a random subset.
    if (!off.empty()) {
      const std::size_t m = 1 + rng.below(std::min(off.size(), 3 * on.size()));
      double off_l1 = 0.0;
      std::vector<std::size_t> pick(off);
      for (std::size_t i = 0; i < m; ++i) {
        std::swap(pick[i], pick[i + rng.below(pick.size() - i)]);
        delta[pick[i]] = rng.normal();
        off_l1 += std::abs(delta[pick[i]]);
      }
      const double budget = rng.uniform() * 3.0 * on_l1;
      for (std::size_t i = 0; i < m; ++i) delta[pick[i]] *= budget / off_l1;
    }
    const double norm = l2_norm(delta);
    const double scale = radius * rng.uniform() / norm;
    for (double& v : delta) v *= scale;
    const double sq = kernels::sqnorm(delta);

    std::vector<double> r(r0);
    for (std::size_t j = 0; j < d.p(); ++j) {
      if (delta[j] != 0.0) kernels::axpy(-delta[j], d.x().col(j), r);
    }
    const double gap = loss_value(r, cfg) - l0 - kernels::dot(g0, delta);
    const double ratio = gap / sq;
    probe.min_ratio = std::min(probe.min_ratio, ratio);
    sum += ratio;
    ++probe.directions;
  }
  probe.mean_ratio = sum / static_cast<double>(probe.directions);
  return probe;
}

InvariantSuiteResult solver_invariant_suite(int instances, std::size_t max_n, std::size_t max_p,
                                            double descent_slack, std::uint64_t seed) {
  if (instances < 1 || max_n < 2 || max_p < 1) throw InvalidConfig("invariant suite: bad sizes");
  constexpr NoiseKind kinds[] = {NoiseKind::gauss, NoiseKind::gauss_outlier,
                                 NoiseKind::gauss_wide, NoiseKind::student_t, NoiseKind::cauchy};
  InvariantSuiteResult res;
  for (int i = 0; i < instances; ++i) {
    Rng rng(replication_seed(seed, i));
    ScenarioSpec spec;
    spec.n = 2 + rng.below(max_n - 1);
    spec.p = 1 + rng.below(max_p);
    spec.s = 1 + rng.below(std::min<std::size_t>(spec.p, 5));
    spec.rho_x = 0.8 * rng.uniform();
    spec.noise.kind = kinds[static_cast<std::size_t>(i) % 5];
    const Coefficients beta0 = gen_beta0(spec.p, spec.s);
    const Dataset d = gen_dataset(spec.n, spec, beta0, rng);

    FitConfig cfg;
    const double lmax = lambda_max(d, cfg);
    cfg.lambda = lmax * std::exp(std::log(0.01) * rng.uniform());
    const FitResult fit = em_fit(d, cfg);
    ++res.instances;

    bool rose = false;
    for (std::size_t t = 1; t < fit.objective_trace.size(); ++t) {
      const double inc = fit.objective_trace[t] - fit.objective_trace[t - 1];
      res.worst_increase = std::max(res.worst_increase, inc);
      rose = rose || inc > descent_slack;
    }
    res.descent_violations += rose ? 1 : 0;
    if (fit.converged) {
      ++res.converged;
      const KktReport kkt = kkt_check(d, fit.coef, cfg, 10.0 * cfg.tol);
      res.worst_kkt = std::max(res.worst_kkt, kkt.max_violation);
      res.kkt_violations += kkt.ok ? 0 : 1;
    }
  }
  return res;
}

bool TheoryReport::hard_failure() const {
  return std::any_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.hard && !c.passed; });
}

namespace {

struct Preset {
  int grad_trials;
  std::size_t n, p, s;
  int cone_reps;
  std::size_t curv_n, curv_p;
  int curv_dirs;
  int inv_instances;
  std::size_t inv_n, inv_p;
};

Preset preset_for(const std::string& name) {
  if (name == "tiny") return {50, 100, 120, 20, 20, 100, 120, 100, 100, 30, 40};
  if (name == "small") return {200, 100, 120, 20, 50, 300, 500, 200, 300, 50, 100};
  if (name == "full") return {200, 100, 120, 20, 100, 300, 500, 500, 1000, 50, 100};
  throw InvalidConfig("unknown verify preset '" + name + "' (expected tiny, small or full)");
}

}  // namespace

TheoryReport run_theory_suite(const std::string& preset, std::uint64_t seed, int threads,
                              double nu) {
  const Preset ps = preset_for(preset);
  FitConfig cfg;
  cfg.nu = nu;
  cfg.validate();
  TheoryReport rep;
  rep.preset = preset;
  const auto check = [&](std::string name, bool hard, bool passed, std::string detail) {
    rep.checks.push_back({std::move(name), hard, passed, std::move(detail)});
  };

  // Deterministic score bound on a fine grid.
  bool score_ok = true;
  std::string score_detail;
  for (double nu : {0.5, 1.0, 3.0, 10.0}) {
    const ScoreBoundResult sb = score_bound_scan(nu, -100.0, 100.0, 1e-3);
    const bool ok = sb.max_excess <= 1e-12 && std::abs(sb.argmax - std::sqrt(nu)) <= 1e-3;
    score_ok = score_ok && ok;
    score_detail += "nu=" + fmt(nu) + " argmax=" + fmt(sb.argmax) + " excess=" +
                    fmt(sb.max_excess) + "; ";
    rep.score_bounds.push_back(sb);
  }
  check("score_bound", true, score_ok, score_detail);

  // Solver invariants.
  rep.invariants = solver_invariant_suite(ps.inv_instances, ps.inv_n, ps.inv_p, 1e-10,
                                          splitmix64(seed ^ 0x1));
  check("monotone_descent", true, rep.invariants.descent_violations == 0,
        std::to_string(rep.invariants.descent_violations) + " of " +
            std::to_string(rep.invariants.instances) + " traces rose; worst step " +
            fmt(rep.invariants.worst_increase));
  check("kkt", true, rep.invariants.kkt_violations == 0,
        std::to_string(rep.invariants.kkt_violations) + " of " +
            std::to_string(rep.invariants.converged) + " converged fits; worst " +
            fmt(rep.invariants.worst_kkt));

  // Gradient sup-norm at the truth and its scaling in (n, p).
  ScenarioSpec base;
  base.n = ps.n;
  base.p = ps.p;
  base.s = ps.s;
  base.noise.kind = NoiseKind::student_t;
  base.seed = seed;
  std::vector<ScenarioSpec> grid(3, base);
  grid[1].n = 4 * base.n;
  grid[2].p = 4 * base.p;
  std::vector<GradientExperiment> ge(grid.size());
  parallel_for(static_cast<int>(grid.size()), threads, [&](int i) {
    ge[static_cast<std::size_t>(i)] =
        grad_supnorm_experiment(grid[static_cast<std::size_t>(i)], cfg, ps.grad_trials, rep.delta);
  });
  rep.grad_supnorm = ge[0].quantile;
  rep.c1 = ge[0].c1;
  rep.bound_rhs = ge[0].c1 * ge[0].rate;
  rep.grad_shrink_ratio = ge[1].quantile / ge[0].quantile;
  double c1_lo = INFINITY, c1_hi = 0.0;
  std::size_t det_viol = 0;
  for (const auto& g : ge) {
    c1_lo = std::min(c1_lo, g.c1);
    c1_hi = std::max(c1_hi, g.c1);
    det_viol += g.bound_violations;
  }
  rep.c1_spread = c1_hi / c1_lo;
  check("gradient_deterministic_bound", true, det_viol == 0,
        std::to_string(det_viol) + " trials exceeded c(nu+1)K/(2 sqrt(nu))");
  check("gradient_shrink_4n", false,
        rep.grad_shrink_ratio >= 0.35 && rep.grad_shrink_ratio <= 0.65,
        "quantile ratio " + fmt(rep.grad_shrink_ratio) + " (expected ~0.5)");
  check("gradient_c1_spread", false, rep.c1_spread <= 2.0,
        "max/min c1 " + fmt(rep.c1_spread));

  // Cone condition at lambda = 2 * (1 - delta) gradient quantile.
  const Coefficients beta0 = gen_beta0(base.p, base.s);
  const double lambda = 2.0 * rep.grad_supnorm;
  std::vector<ConeCheck> cones(static_cast<std::size_t>(ps.cone_reps));
  parallel_for(ps.cone_reps, threads, [&](int r) {
    Rng rng(replication_seed(splitmix64(seed ^ 0x2), r));
    const Dataset d = gen_dataset(base.n, base, beta0, rng);
    FitConfig at = cfg;
    at.lambda = lambda;
    const FitResult fit = em_fit(d, at);
    const double g = sup_norm(gradient(d, beta0, cfg));
    cones[static_cast<std::size_t>(r)] = cone_check(fit.coef, beta0, lambda, g);
  });
  std::vector<double> ratios;
  std::size_t ok = 0, viol = 0;
  for (const auto& c : cones) {
    ratios.push_back(c.ratio);
    ok += c.ratio <= 3.0 ? 1 : 0;
    viol += c.violation ? 1 : 0;
  }
  rep.cone_ratio = median(ratios);
  rep.cone_fraction_ok = static_cast<double>(ok) / static_cast<double>(cones.size());
  check("cone_condition", false, rep.cone_fraction_ok >= 0.9,
        "fraction with ratio <= 3: " + fmt(rep.cone_fraction_ok) + ", guaranteed-event violations " +
            std::to_string(viol));

  // Restricted curvature around the truth.
  ScenarioSpec cs = base;
  cs.n = ps.curv_n;
  cs.p = ps.curv_p;
  Rng crng(splitmix64(seed ^ 0x3));
  const Coefficients cbeta0 = gen_beta0(cs.p, cs.s);
  const Dataset cd = gen_dataset(cs.n, cs, cbeta0, crng);
  const CurvatureProbe probe =
      curvature_probe(cd, cbeta0, cfg, 1.0, ps.curv_dirs, splitmix64(seed ^ 0x4));
  rep.curvature_est = probe.min_ratio;
  check("curvature_positive", false, probe.min_ratio > 0.0,
        "min ratio " + fmt(probe.min_ratio) + " over " + std::to_string(probe.directions) +
            " directions (mean " + fmt(probe.mean_ratio) + ")");
  return rep;
}

}  // namespace heavylasso
