#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "unimix/experiments.hpp"
#include "unimix/rng.hpp"

using namespace unimix;

namespace {

constexpr double kPi = 3.14159265358979323846;

double ks_statistic(std::vector<double> sample, const TestDensity& d) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = d.cdf(sample[i]);
    worst = std::max(worst, std::abs((i + 1) / n - f));
    worst = std::max(worst, std::abs(i / n - f));
  }
  return worst;
}

}  // namespace

TEST_CASE("test density lookup") {
  CHECK(TestDensity::by_name("lambda1").kind() == TestDensity::Kind::lambda1);
  CHECK(TestDensity::by_name("lambda3").kind() == TestDensity::Kind::lambda3);
  CHECK(std::string(TestDensity::by_name("lambda2").name()) == "lambda2");
  CHECK_THROWS_AS(TestDensity::by_name("lambda9"), std::invalid_argument);
}

TEST_CASE("density literals") {
  const TestDensity l1(TestDensity::Kind::lambda1);
  CHECK(l1.pdf(-0.5) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(l1.pdf(-3.0) == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(l1.pdf(-1.5) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(l1.pdf(1.0) == doctest::Approx(0.4 * std::exp(-1.0)).epsilon(1e-14));
  CHECK(l1.pdf(-8.0) == 0.0);
  const TestDensity l2(TestDensity::Kind::lambda2);
  CHECK(l2.pdf(0.05) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(l2.pdf(-1.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(l2.pdf(2.0) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(l2.pdf(3.7) == 0.0);
  const TestDensity l3(TestDensity::Kind::lambda3);
  CHECK(l3.pdf(0.0) == doctest::Approx(12.0 / (13.0 * kPi)).epsilon(1e-14));
  CHECK(l3.pdf(1.5) == doctest::Approx(6.0 / (13.0 * kPi)).epsilon(1e-14));
  // Unique mode at zero.
  CHECK(l3.pdf(0.0) > l3.pdf(0.1));
  CHECK(l3.pdf(0.0) > l3.pdf(-0.1));
}

TEST_CASE("cdf hits the piece masses") {
  const TestDensity l1(TestDensity::Kind::lambda1);
  CHECK(l1.cdf(-7.0) == doctest::Approx(0.0));
  CHECK(l1.cdf(-2.0) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(l1.cdf(-1.0) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(l1.cdf(0.0) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(l1.cdf(50.0) == doctest::Approx(1.0).epsilon(1e-14));
  const TestDensity l2(TestDensity::Kind::lambda2);
  CHECK(l2.cdf(-2.0) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(l2.cdf(0.0) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(l2.cdf(0.1) == doctest::Approx(0.65).epsilon(1e-14));
  CHECK(l2.cdf(3.6) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(l2.cdf(10.0) == 1.0);
  const TestDensity l3(TestDensity::Kind::lambda3);
  CHECK(l3.cdf(0.0) == doctest::Approx(4.0 / 13.0).epsilon(1e-13));
  CHECK(l3.cdf(-2.0 / 3.0) == doctest::Approx(2.0 / 13.0).epsilon(1e-13));
  CHECK(l3.cdf(1e9) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("quantile inverts the cdf") {
  for (const TestDensity d :
       {TestDensity(TestDensity::Kind::lambda1),
        TestDensity(TestDensity::Kind::lambda2),
        TestDensity(TestDensity::Kind::lambda3)}) {
    for (int i = 1; i < 100; ++i) {
      const double v = i / 100.0;
      CHECK(d.cdf(d.quantile(v)) == doctest::Approx(v).epsilon(1e-11));
    }
    CHECK(d.quantile(0.0) <= d.quantile(0.5));
  }
}

TEST_CASE("samples pass a Kolmogorov-Smirnov check") {
  const int n = 10000;
  const double threshold = 1.36 / std::sqrt(static_cast<double>(n));
  for (const TestDensity d :
       {TestDensity(TestDensity::Kind::lambda1),
        TestDensity(TestDensity::Kind::lambda2),
        TestDensity(TestDensity::Kind::lambda3)}) {
    Rng rng(2024);
    const std::vector<double> sample = d.sample(n, rng);
    CHECK(ks_statistic(sample, d) < threshold);
  }
}

TEST_CASE("lambda1 modal-interval frequency matches its mass") {
  const TestDensity d(TestDensity::Kind::lambda1);
  Rng rng(5);
  const int n = 10000;
  const std::vector<double> sample = d.sample(n, rng);
  int hits = 0;
  for (const double x : sample)
    if (x > -1.0 && x <= 0.0) ++hits;
  const double frac = static_cast<double>(hits) / n;
  CHECK(std::abs(frac - 0.4) < 3.0 * std::sqrt(0.4 * 0.6 / n));
}

TEST_CASE("longer samples extend shorter ones from the same seed") {
  const TestDensity d(TestDensity::Kind::lambda3);
  Rng a(42), b(42);
  const std::vector<double> small = d.sample(50, a);
  const std::vector<double> large = d.sample(200, b);
  for (std::size_t i = 0; i < small.size(); ++i)
    CHECK(small[i] == large[i]);
}

TEST_CASE("samples stay inside the support") {
  Rng rng(9);
  for (const double x : TestDensity(TestDensity::Kind::lambda2).sample(2000, rng)) {
    CHECK(x > -7.0);
    CHECK(x <= 3.6);
  }
  Rng rng1(9);
  for (const double x : TestDensity(TestDensity::Kind::lambda1).sample(2000, rng1))
    CHECK(x > -7.0);
}

TEST_CASE("uniform grid endpoints and spacing") {
  const std::vector<double> g = uniform_grid(0.0, 1.0, 0.25);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == doctest::Approx(1.0));
  const std::vector<double> wide = uniform_grid(-10.0, 10.0, 0.01);
  CHECK(wide.size() == 2001);
}

TEST_CASE("l1 distance separates the test densities") {
  const std::vector<double> grid = uniform_grid(-12.0, 12.0, 0.005);
  const TestDensity l1(TestDensity::Kind::lambda1);
  DensityGrid exact;
  exact.t = grid;
  for (const double t : grid) exact.estimate.push_back(l1.pdf(t));
  CHECK(l1_distance(exact, l1) < 1e-4);
  CHECK(l1_distance(exact, TestDensity(TestDensity::Kind::lambda2)) > 0.3);
}

TEST_CASE("median and mad") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({1.0, 2.0, 3.0, 4.0}) == doctest::Approx(2.5));
  CHECK(median_abs_deviation({1.0, 1.0, 3.0, 5.0, 5.0}) == doctest::Approx(2.0));
}

TEST_CASE("convergence preset produces one row per cell") {
  ConvergenceSpec spec;
  spec.theta0s = {-0.5};
  spec.pd_params = {{0.0, 1.0}};
  spec.sizes = {25, 50};
  spec.seeds = 1;
  spec.draws = 40;
  spec.seed = 3;
  spec.threads = 1;
  std::vector<std::string> labels;
  const std::vector<ConvergenceRow> rows = convergence_experiment(
      spec, [&labels](const std::string& label, const DensityGrid& grid) {
        labels.push_back(label);
        CHECK(!grid.t.empty());
      });
  REQUIRE(rows.size() == 2);
  for (const ConvergenceRow& r : rows) {
    CHECK(r.theta0 == -0.5);
    CHECK(r.l1 >= 0.0);
    CHECK(std::isfinite(r.l1));
    CHECK(r.ess > 0.0);
    CHECK(r.ess <= spec.draws);
    CHECK(r.runtime_ms >= 0.0);
  }
  CHECK(rows[0].size == 25);
  CHECK(rows[1].size == 50);
  REQUIRE(labels.size() == 2);
  CHECK(labels[0].find("n25") != std::string::npos);
  CHECK(labels[1].find("n50") != std::string::npos);
}

TEST_CASE("recovery preset row per density, spread, and size") {
  ModeRecoverySpec spec;
  spec.densities = {TestDensity::Kind::lambda1};
  spec.rho_sds = {0.5};
  spec.sizes = {25};
  spec.draws = 40;
  spec.seed = 4;
  spec.threads = 1;
  const std::vector<ModeRecoveryRow> rows = mode_recovery_experiment(spec);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].density == "lambda1");
  CHECK(rows[0].rho_sd == 0.5);
  CHECK(rows[0].size == 25);
  CHECK(std::isfinite(rows[0].theta_hat));
  CHECK(rows[0].ess > 0.0);
  CHECK(rows[0].l1 >= 0.0);
}

TEST_CASE("histogram preset pairs replications across spreads") {
  HistogramSpec spec;
  spec.replications = 3;
  spec.size = 12;
  spec.draws = 30;
  spec.seed = 6;
  spec.threads = 1;
  const HistogramResult result = mode_histogram_experiment(spec);
  REQUIRE(result.rows.size() == 6);
  int low = 0, high = 0;
  for (const HistogramRow& r : result.rows) {
    if (r.rho_sd == 0.25) ++low;
    if (r.rho_sd == 1.0) ++high;
    CHECK(r.replication >= 0);
    CHECK(r.replication < 3);
    CHECK(std::isfinite(r.theta_hat));
  }
  CHECK(low == 3);
  CHECK(high == 3);
  REQUIRE(result.summaries.size() == 2);
  CHECK(result.summaries[0].rho_sd == 0.25);
  CHECK(result.summaries[1].rho_sd == 1.0);
  for (const HistogramSummary& s : result.summaries) {
    CHECK(s.median_abs >= 0.0);
    CHECK(s.frac_within_half >= 0.0);
    CHECK(s.frac_within_half <= 1.0);
    CHECK(s.mad >= 0.0);
  }
}
