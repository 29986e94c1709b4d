#include <doctest.h>

#include <cmath>

#include "heavylasso/loss.hpp"
#include "heavylasso/model.hpp"
#include "test_util.hpp"

using namespace heavylasso;

namespace {

// Independent evaluation of the unpenalized student objective.
long double oracle_loss(const Dataset& d, const std::vector<double>& beta, double nu, double c) {
  long double total = 0.0L;
  for (std::size_t i = 0; i < d.n(); ++i) {
    long double r = d.y()[i];
    for (std::size_t j = 0; j < d.p(); ++j) r -= static_cast<long double>(d.x()(i, j)) * beta[j];
    total += (nu + 1.0L) * std::log1p(r * r / nu);
  }
  return c * total / (2.0L * d.n());
}

}  // namespace

TEST_SUITE("loss") {
  TEST_CASE("student loss examples") {
    CHECK(student_loss_point(0.0, 3.0) == 0.0);
    CHECK(student_loss_point(1.0, 1.0, 1.0) == doctest::Approx(2.0 * std::log(2.0)));
    CHECK(student_loss_point(-2.0, 3.0) == student_loss_point(2.0, 3.0));
    CHECK(student_loss_point(2.0, 3.0, 2.0) == doctest::Approx(2.0 * student_loss_point(2.0, 3.0)));
    CHECK_THROWS_AS(student_loss_point(1.0, 0.0), InvalidConfig);
    CHECK_THROWS_AS(student_loss_point(1.0, -1.0), InvalidConfig);
    CHECK_THROWS_AS(student_loss_point(1.0, 1.0, 0.0), InvalidConfig);
  }

  TEST_CASE("student loss strictly increasing in |r|") {
    double prev = -1.0;
    for (double r = 0.0; r < 50.0; r += 0.25) {
      const double v = student_loss_point(r, 3.0);
      CHECK(v > prev);
      prev = v;
    }
  }

  TEST_CASE("estep weight examples") {
    CHECK(estep_weight(0.0, 3.0) == doctest::Approx(4.0 / 3.0));
    CHECK(estep_weight(1.0, 1.0) == 1.0);
    CHECK(estep_weight(1e6, 3.0) == doctest::Approx(4e-12).epsilon(1e-6));
    for (double r : {-5.0, -0.3, 0.0, 0.7, 12.0}) {
      for (double nu : {0.5, 1.0, 3.0, 30.0}) {
        CHECK(estep_weight(r, nu) * (nu + r * r) == doctest::Approx(nu + 1.0).epsilon(1e-15));
        CHECK(estep_weight(r, nu) > 0.0);
        CHECK(estep_weight(r, nu) <= (nu + 1.0) / nu);
      }
    }
  }

  TEST_CASE("eval fields share one kernel") {
    for (double r : {-3.0, 0.0, 0.5, 40.0}) {
      const LossEval e = student_eval(r, 3.0, 1.5);
      CHECK(e.value == doctest::Approx(student_loss_point(r, 3.0, 1.5)));
      CHECK(e.weight == doctest::Approx(estep_weight(r, 3.0)));
      CHECK(e.score == doctest::Approx(student_score(r, 3.0)));
      CHECK(e.value >= 0.0);
    }
  }

  TEST_CASE("score bound with equality at sqrt(nu)") {
    for (double nu : {0.5, 1.0, 3.0, 10.0}) {
      const double bound = 1.0 / (2.0 * std::sqrt(nu));
      CHECK(std::abs(student_score(std::sqrt(nu), nu)) == doctest::Approx(bound).epsilon(1e-15));
      CHECK(std::abs(student_score(-std::sqrt(nu), nu)) == doctest::Approx(bound).epsilon(1e-15));
      Rng rng(static_cast<std::uint64_t>(nu * 100));
      for (int k = 0; k < 2000; ++k) {
        const double r = 50.0 * rng.cauchy();
        CHECK(std::abs(student_score(r, nu)) <= bound + 1e-15);
      }
    }
  }

  TEST_CASE("large nu limit approaches squared loss") {
    const double nu = 1e4;
    for (double r = -3.0; r <= 3.0; r += 0.125) {
      if (r == 0.0) continue;
      CHECK(student_loss_point(r, nu) * nu / (nu + 1.0) / (r * r) == doctest::Approx(1.0).epsilon(0.01));
    }
  }

  TEST_CASE("baseline weights") {
    CHECK(baseline_weight(123.0, LossKind::squared) == 1.0);
    CHECK(baseline_weight(0.0, LossKind::huber, 1.345) == 1.0);
    CHECK(baseline_weight(4.0, LossKind::huber, 1.0) == 0.25);
    CHECK(baseline_weight(-4.0, LossKind::huber, 1.0) == 0.25);
    CHECK(baseline_weight(0.5, LossKind::huber, 1.0) == 1.0);
    CHECK_THROWS_AS(baseline_weight(1.0, LossKind::huber, 0.0), InvalidConfig);
    CHECK_THROWS_AS(baseline_weight(1.0, LossKind::huber, -2.0), InvalidConfig);
    CHECK(huber_rho(0.5, 1.0) == 0.125);
    CHECK(huber_rho(3.0, 1.0) == 2.5);
  }

  TEST_CASE("gradient examples") {
    FitConfig cfg;
    cfg.nu = 1.0;
    const Dataset d(Matrix::from_rows({{1}}), {1.0});
    CHECK(gradient(d, Coefficients({0.0}), cfg)[0] == doctest::Approx(-1.0));

    const Dataset zero(Matrix::from_rows({{1, 2}, {3, 4}}), {3.0, 7.0});
    for (double g : gradient(zero, Coefficients({1.0, 1.0}), cfg)) CHECK(g == 0.0);
    CHECK_THROWS_AS(gradient(zero, Coefficients({1.0}), cfg), ContractViolation);
  }

  TEST_CASE("gradient matches central differences") {
    Rng rng(11);
    const double h = 1e-5;
    for (int t = 0; t < 50; ++t) {
      const std::size_t n = 5 + rng.below(20), p = 1 + rng.below(6);
      const Dataset d = testutil::random_dataset(rng, n, p);
      FitConfig cfg;
      cfg.nu = 0.5 + 5.0 * rng.uniform();
      cfg.scale_c = 0.5 + rng.uniform();
      const Coefficients b = testutil::random_coef(rng, p);
      const std::vector<double> g = gradient(d, b, cfg);
      double worst = 0.0, gmax = 0.0;
      for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> up = b.beta, dn = b.beta;
        up[j] += h;
        dn[j] -= h;
        const double fd = static_cast<double>(
            (oracle_loss(d, up, cfg.nu, cfg.scale_c) - oracle_loss(d, dn, cfg.nu, cfg.scale_c)) /
            (2.0L * h));
        worst = std::max(worst, std::abs(fd - g[j]));
        gmax = std::max(gmax, std::abs(g[j]));
      }
      CHECK(worst <= 1e-6 * std::max(gmax, 1.0));
    }
  }

  TEST_CASE("majorization bound") {
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
      const std::size_t n = 3 + rng.below(15), p = 1 + rng.below(5);
      const Dataset d = testutil::random_dataset(rng, n, p);
      FitConfig cfg;
      cfg.nu = 0.5 + 10.0 * rng.uniform();
      cfg.scale_c = 0.2 + 2.0 * rng.uniform();
      const Coefficients b0 = testutil::random_coef(rng, p, 2.0);
      const Coefficients b1 = testutil::random_coef(rng, p, 2.0);
      const std::vector<double> r0 = residuals(d, b0), r1 = residuals(d, b1);
      std::vector<double> w(n);
      majorizer_weights(r0, cfg, w);
      double surrogate = loss_value(r0, cfg);
      for (std::size_t i = 0; i < n; ++i) {
        surrogate += w[i] * (r1[i] * r1[i] - r0[i] * r0[i]) / (2.0 * static_cast<double>(n));
      }
      CHECK(loss_value(r1, cfg) <= surrogate + 1e-12 * (1.0 + std::abs(surrogate)));
    }
  }

  TEST_CASE("majorizer weights by kind") {
    const std::vector<double> r{0.0, 2.0, -10.0};
    std::vector<double> w(3);
    FitConfig cfg;
    cfg.scale_c = 2.0;
    majorizer_weights(r, cfg, w);
    CHECK(w[1] == doctest::Approx(2.0 * estep_weight(2.0, 3.0)));
    cfg.loss_kind = LossKind::squared;
    majorizer_weights(r, cfg, w);
    CHECK(w == std::vector<double>{1.0, 1.0, 1.0});
    cfg.loss_kind = LossKind::huber;
    cfg.huber_delta = 1.0;
    majorizer_weights(r, cfg, w);
    CHECK(w[2] == doctest::Approx(0.1));
  }

  TEST_CASE("loss value by kind") {
    const std::vector<double> r{1.0, -3.0};
    FitConfig cfg;
    cfg.loss_kind = LossKind::squared;
    CHECK(loss_value(r, cfg) == doctest::Approx(10.0 / 4.0));
    cfg.loss_kind = LossKind::huber;
    cfg.huber_delta = 1.0;
    CHECK(loss_value(r, cfg) == doctest::Approx((0.5 + 2.5) / 2.0));
  }
}
