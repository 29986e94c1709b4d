#pragma once

// Monte-Carlo benchmark harness: AR(1)-correlated Gaussian designs, the
// +1/-1 sparse truth, five noise scenarios, four error metrics and a
// replication runner aggregating mean and standard deviation.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "heavylasso/path.hpp"
#include "heavylasso/rng.hpp"
#include "heavylasso/types.hpp"

namespace heavylasso {

enum class NoiseKind { gauss, gauss_outlier, gauss_wide, student_t, cauchy };

std::string to_string(NoiseKind kind);
NoiseKind parse_noise_kind(const std::string& name);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::gauss;
  double outlier_rate = 0.3;
  // Contaminated responses get an additive shift sign * U(outlier_low, outlier_high).
  double outlier_low = 5.0;
  double outlier_high = 10.0;
  int t_df = 3;
  double wide_sigma = 3.0;
};

struct ScenarioSpec {
  std::size_t n = 100;
  std::size_t p = 120;
  std::size_t s = 20;
  double rho_x = 0.0;
  NoiseSpec noise;
  std::size_t n_test = 50;
  int reps = 50;
  std::uint64_t seed = 20250701;

  void validate() const;
};

/// One method column of a results table.
struct MethodSpec {
  std::string name;
  FitConfig cfg;
  Criterion criterion = Criterion::bic;
  ResidualScale scale = ResidualScale::rss;
  int grid_size = 100;
  // <= 0 selects default_grid_ratio(n, p).
  double grid_ratio = 0.0;
};

/// Standard method presets: "student" (nu = 3), "squared", "huber" (delta 1.345).
/// The robust losses select lambda on the MAD residual scale, squared on RSS.
MethodSpec method_preset(const std::string& name);

struct MetricsRecord {
  double l2sq = 0.0;     // ||b - b0||_2^2
  double l1 = 0.0;       // ||b - b0||_1
  double linpred = 0.0;  // (1/n) ||X (b - b0)||_2^2 on the training design
  double pred = 0.0;     // test mean squared prediction error
};

/// Rows i.i.d. N(0, Sigma) with Sigma_ij = rho^|i-j|, built by the recursion
/// x_1 = z_1, x_j = rho x_{j-1} + sqrt(1 - rho^2) z_j.
Matrix gen_design(std::size_t n, std::size_t p, double rho_x, Rng& rng);
Matrix gen_design(std::size_t n, std::size_t p, double rho_x, std::uint64_t seed);

/// First ceil(s/2) entries +1, next floor(s/2) entries -1, rest 0.
Coefficients gen_beta0(std::size_t p, std::size_t s);

std::vector<double> gen_noise(std::size_t n, const NoiseSpec& noise, Rng& rng);
std::vector<double> gen_noise(std::size_t n, const NoiseSpec& noise, std::uint64_t seed);

/// y = X beta0 + noise for a freshly drawn design.
Dataset gen_dataset(std::size_t n, const ScenarioSpec& spec, const Coefficients& beta0, Rng& rng);

MetricsRecord evaluate(const Coefficients& beta_hat, const Coefficients& beta0,
                       const Dataset& train, const Dataset& test);

/// Seed of replication `rep`: spec.seed XOR rep.
std::uint64_t replication_seed(std::uint64_t seed, int rep) noexcept;

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // sample sd (n - 1); NaN with a single replication
};

struct MethodOutcome {
  std::string name;
  std::vector<MetricsRecord> records;  // successful replications, in replication order
  std::vector<double> selected_lambda;
  std::vector<int> failed_reps;
  std::size_t kkt_checked = 0;
  std::size_t kkt_violations = 0;
  double kkt_worst = 0.0;
  Summary l2sq, l1, linpred, pred;
};

struct ScenarioResult {
  ScenarioSpec spec;
  std::vector<MethodOutcome> methods;
};

class ScenarioFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Summary summarize(const std::vector<double>& values);

/// Runs spec.reps replications; every method sees the same data in a given
/// replication. Each fit is a fit_path over the method's grid. Converged
/// selected fits are KKT-checked at 10 * tol. Throws ScenarioFailure when
/// more than 20% of a method's replications fail. Results do not depend on
/// `threads`.
ScenarioResult run_scenario(const ScenarioSpec& spec, const std::vector<MethodSpec>& methods,
                            int threads = 1);

}  // namespace heavylasso
