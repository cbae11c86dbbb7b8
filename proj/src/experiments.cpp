#include "unimix/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "unimix/base_measure.hpp"
#include "unimix/species.hpp"

namespace unimix {

namespace {

constexpr double pi = 3.14159265358979323846;

double cauchy_pdf(double u) { return 1.0 / (pi * (1.0 + u * u)); }

}  // namespace

TestDensity TestDensity::by_name(const std::string& name) {
  if (name == "lambda1") return TestDensity(Kind::lambda1);
  if (name == "lambda2") return TestDensity(Kind::lambda2);
  if (name == "lambda3") return TestDensity(Kind::lambda3);
  throw std::invalid_argument(
      "TestDensity: name must be lambda1, lambda2, or lambda3");
}

const char* TestDensity::name() const {
  switch (kind_) {
    case Kind::lambda1: return "lambda1";
    case Kind::lambda2: return "lambda2";
    default: return "lambda3";
  }
}

double TestDensity::pdf(double t) const {
  switch (kind_) {
    case Kind::lambda1:
      if (t <= -7.0) return 0.0;
      if (t <= -2.0) return 0.02;
      if (t <= -1.0) return 0.1;
      if (t <= 0.0) return 0.4;
      return 0.4 * std::exp(-t);
    case Kind::lambda2:
      if (t <= -7.0) return 0.0;
      if (t <= -2.0) return 0.02;
      if (t <= 0.0) return 0.25;
      if (t <= 0.1) return 0.5;
      if (t <= 3.6) return 0.1;
      return 0.0;
    default:
      if (t < 0.0) return (12.0 / 13.0) * cauchy_pdf(1.5 * t);
      if (t > 0.0) return (12.0 / 13.0) * cauchy_pdf(t / 1.5);
      return 12.0 / (13.0 * pi);  // both one-sided limits
  }
}

double TestDensity::cdf(double t) const {
  switch (kind_) {
    case Kind::lambda1:
      if (t <= -7.0) return 0.0;
      if (t <= -2.0) return 0.02 * (t + 7.0);
      if (t <= -1.0) return 0.1 + 0.1 * (t + 2.0);
      if (t <= 0.0) return 0.2 + 0.4 * (t + 1.0);
      return 0.6 + 0.4 * (1.0 - std::exp(-t));
    case Kind::lambda2:
      if (t <= -7.0) return 0.0;
      if (t <= -2.0) return 0.02 * (t + 7.0);
      if (t <= 0.0) return 0.1 + 0.25 * (t + 2.0);
      if (t <= 0.1) return 0.6 + 0.5 * t;
      if (t <= 3.6) return 0.65 + 0.1 * (t - 0.1);
      return 1.0;
    default:
      if (t < 0.0) return (8.0 / 13.0) * (0.5 + std::atan(1.5 * t) / pi);
      return 4.0 / 13.0 + (18.0 / 13.0) * (std::atan(t / 1.5) / pi);
  }
}

double TestDensity::quantile(double v) const {
  switch (kind_) {
    case Kind::lambda1:
      if (v < 0.1) return -7.0 + v / 0.02;
      if (v < 0.2) return -2.0 + (v - 0.1) / 0.1;
      if (v < 0.6) return -1.0 + (v - 0.2) / 0.4;
      return std::log(0.4 / (1.0 - v));
    case Kind::lambda2:
      if (v < 0.1) return -7.0 + v / 0.02;
      if (v < 0.6) return -2.0 + (v - 0.1) / 0.25;
      if (v < 0.65) return (v - 0.6) / 0.5;
      return 0.1 + (v - 0.65) / 0.1;
    default:
      if (v < 4.0 / 13.0)
        return (2.0 / 3.0) * std::tan(pi * (13.0 * v / 8.0 - 0.5));
      return 1.5 * std::tan(pi * (13.0 * v - 4.0) / 18.0);
  }
}

std::vector<double> TestDensity::sample(int n, Rng& rng) const {
  if (n < 0) throw std::invalid_argument("TestDensity: sample size negative");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (double& x : out) {
    // Bit midpoints keep v strictly inside (0,1), where the heavy-tailed
    // quantiles stay finite.
    const double v =
        (static_cast<double>(rng.bits() >> 11) + 0.5) * 0x1.0p-53;
    x = quantile(v);
  }
  return out;
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo)
    throw std::invalid_argument("uniform_grid: need hi >= lo and step > 0");
  const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] = lo + step * i;
  return out;
}

double l1_distance(const DensityGrid& estimate, const TestDensity& d) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < estimate.t.size(); ++i) {
    const double a = std::abs(estimate.estimate[i] - d.pdf(estimate.t[i]));
    const double b =
        std::abs(estimate.estimate[i + 1] - d.pdf(estimate.t[i + 1]));
    total += 0.5 * (a + b) * (estimate.t[i + 1] - estimate.t[i]);
  }
  return total;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty input");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double median_abs_deviation(const std::vector<double>& values) {
  const double center = median(values);
  std::vector<double> deviations(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    deviations[i] = std::abs(values[i] - center);
  return median(std::move(deviations));
}

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

std::string label_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

std::vector<ConvergenceRow> convergence_experiment(const ConvergenceSpec& spec,
                                                   const DensitySink& sink) {
  const TestDensity density(TestDensity::Kind::lambda1);
  const std::vector<double> grid = uniform_grid(-10.0, 10.0, 0.01);
  const ParetoMixture base(spec.pareto_alpha, spec.pareto_delta);
  const std::uint64_t data_master = substream_seed(spec.seed, 0);
  const std::uint64_t run_master = substream_seed(spec.seed, 1);
  int max_size = 1;
  for (const int n : spec.sizes) max_size = std::max(max_size, n);
  std::vector<ConvergenceRow> rows;
  std::uint64_t run_index = 0;
  for (int si = 0; si < spec.seeds; ++si) {
    Rng data_rng(substream_seed(data_master, static_cast<std::uint64_t>(si)));
    const std::vector<double> pool = density.sample(max_size, data_rng);
    for (const auto& [a, b] : spec.pd_params) {
      const PitmanYor model(a, b);
      for (const double theta0 : spec.theta0s) {
        for (const int n : spec.sizes) {
          const std::vector<double> obs(pool.begin(), pool.begin() + n);
          SisConfig cfg;
          cfg.draws = spec.draws;
          cfg.seed = substream_seed(run_master, run_index++);
          cfg.threads = spec.threads;
          cfg.mode_known = theta0;
          const auto start = std::chrono::steady_clock::now();
          const std::vector<SisDraw> draws = run_sis(
              model, base, obs, default_mode_prior(obs), default_rho(obs), cfg);
          const SisEstimates est = sis_estimates(model, base, obs, draws, grid);
          const double ms = ms_since(start);
          rows.push_back({theta0, a, b, n, si, l1_distance(est.density, density),
                          est.ess, ms});
          if (sink)
            sink("convergence_t" + label_num(theta0) + "_a" + label_num(a) +
                     "_b" + label_num(b) + "_n" + std::to_string(n) + "_s" +
                     std::to_string(si),
                 est.density);
        }
      }
    }
  }
  return rows;
}

std::vector<ModeRecoveryRow> mode_recovery_experiment(
    const ModeRecoverySpec& spec, const DensitySink& sink) {
  const std::vector<double> grid = uniform_grid(-10.0, 10.0, 0.01);
  const ParetoMixture base(spec.pareto_alpha, spec.pareto_delta);
  const PitmanYor model(spec.pd_a, spec.pd_b);
  const std::uint64_t data_master = substream_seed(spec.seed, 0);
  const std::uint64_t run_master = substream_seed(spec.seed, 1);
  int max_size = 1;
  for (const int n : spec.sizes) max_size = std::max(max_size, n);
  std::vector<ModeRecoveryRow> rows;
  std::uint64_t run_index = 0;
  for (std::size_t di = 0; di < spec.densities.size(); ++di) {
    const TestDensity density(spec.densities[di]);
    Rng data_rng(substream_seed(data_master, static_cast<std::uint64_t>(di)));
    const std::vector<double> pool = density.sample(max_size, data_rng);
    for (const double rho_sd : spec.rho_sds) {
      const RhoSpec rho = RhoSpec::normal(0.0, rho_sd);
      for (const int n : spec.sizes) {
        const std::vector<double> obs(pool.begin(), pool.begin() + n);
        const ModePrior prior = default_mode_prior(obs, spec.prior_width);
        SisConfig cfg;
        cfg.draws = spec.draws;
        cfg.seed = substream_seed(run_master, run_index++);
        cfg.threads = spec.threads;
        const auto start = std::chrono::steady_clock::now();
        const std::vector<SisDraw> draws =
            run_sis(model, base, obs, prior, rho, cfg);
        const SisEstimates est = sis_estimates(model, base, obs, draws, grid);
        const double ms = ms_since(start);
        rows.push_back({density.name(), rho_sd, n, est.theta_hat, est.ess,
                        l1_distance(est.density, density), ms});
        if (sink)
          sink("recovery_" + std::string(density.name()) + "_sd" +
                   label_num(rho_sd) + "_n" + std::to_string(n),
               est.density);
      }
    }
  }
  return rows;
}

HistogramResult mode_histogram_experiment(const HistogramSpec& spec) {
  const TestDensity density(TestDensity::Kind::lambda3);
  const ParetoMixture base(spec.pareto_alpha, spec.pareto_delta);
  const PitmanYor model(spec.pd_a, spec.pd_b);
  const std::uint64_t data_master = substream_seed(spec.seed, 0);
  const std::uint64_t run_master = substream_seed(spec.seed, 1);
  const std::uint64_t spreads = spec.rho_sds.size();
  HistogramResult result;
  for (std::size_t ri = 0; ri < spec.rho_sds.size(); ++ri) {
    const RhoSpec rho = RhoSpec::normal(0.0, spec.rho_sds[ri]);
    std::vector<double> hats;
    hats.reserve(static_cast<std::size_t>(spec.replications));
    for (int rep = 0; rep < spec.replications; ++rep) {
      Rng data_rng(substream_seed(data_master, static_cast<std::uint64_t>(rep)));
      const std::vector<double> obs = density.sample(spec.size, data_rng);
      const ModePrior prior = default_mode_prior(obs, spec.prior_width);
      SisConfig cfg;
      cfg.draws = spec.draws;
      cfg.seed = substream_seed(
          run_master, static_cast<std::uint64_t>(rep) * spreads + ri);
      cfg.threads = spec.threads;
      const std::vector<SisDraw> draws =
          run_sis(model, base, obs, prior, rho, cfg);
      const SisEstimates est = sis_estimates(model, base, obs, draws, {});
      result.rows.push_back({spec.rho_sds[ri], rep, est.theta_hat, est.ess});
      hats.push_back(est.theta_hat);
    }
    std::vector<double> abs_hats(hats.size());
    std::size_t within = 0;
    for (std::size_t i = 0; i < hats.size(); ++i) {
      abs_hats[i] = std::abs(hats[i]);
      if (abs_hats[i] <= 0.5) ++within;
    }
    result.summaries.push_back(
        {spec.rho_sds[ri], median(abs_hats),
         static_cast<double>(within) / static_cast<double>(hats.size()),
         median_abs_deviation(hats)});
  }
  return result;
}

}  // namespace unimix
