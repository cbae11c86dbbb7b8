// Acceptance gate: twelve numbered criteria, each printing one PASS/FAIL
// line with its pinned tolerance. Exit status is nonzero when any checked
// criterion fails. An optional argument restricts the run to one criterion.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "unimix/base_measure.hpp"
#include "unimix/experiments.hpp"
#include "unimix/io.hpp"
#include "unimix/logsum.hpp"
#include "unimix/partition_posterior.hpp"
#include "unimix/paths.hpp"
#include "unimix/posterior.hpp"
#include "unimix/rng.hpp"
#include "unimix/samplers.hpp"
#include "unimix/species.hpp"

using namespace unimix;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// --- criterion 1: reference complexity table ---------------------------

Outcome criterion1() {
  struct RefRow {
    int n_plus;
    const char* paths;
    const char* partitions;
    const char* ratio;
  };
  // The (2,18) reference products are internally inconsistent: each equals
  // exactly 1.5 times the Catalan and Bell products, while the reference
  // ratio 0.070 matches the true products. The computed row is kept and the
  // mismatch is reported rather than reproduced.
  const RefRow ref[] = {
      {10, "282105616", "13450200625", "2.097"},
      {8, "297457160", "17444291580", "1.705"},
      {6, "353026080", "38752562366", "0.911"},
      {4, "495007380", "157202132205", "0.315"},
      {2, "1432916100", "2046230418477", "0.070"},
      {0, "6564120420", "51724158235372", "0.013"},
  };
  const std::vector<CountRow> rows = count_table(20);
  if (rows.size() != 11) return {false, "expected 11 rows"};
  bool pass = true;
  std::ostringstream detail;
  for (const RefRow& r : ref) {
    const auto it =
        std::find_if(rows.begin(), rows.end(),
                     [&r](const CountRow& c) { return c.n_plus == r.n_plus; });
    if (it == rows.end()) {
      pass = false;
      detail << " missing row n = " << r.n_plus << ";";
      continue;
    }
    const CountRow& row = *it;
    const bool paths_ok = row.path_product == BigInt(r.paths);
    const bool parts_ok = row.partition_product == BigInt(r.partitions);
    const bool ratio_ok = fmt(100.0 * row.ratio, "%.3f") == r.ratio;
    if (!(paths_ok && parts_ok && ratio_ok)) {
      pass = false;
      detail << " row(" << row.n_plus << "," << row.n_minus << "):";
      if (!paths_ok)
        detail << " paths " << row.path_product.str() << " vs reference "
               << r.paths << ";";
      if (!parts_ok)
        detail << " partitions " << row.partition_product.str()
               << " vs reference " << r.partitions << ";";
      if (!ratio_ok)
        detail << " ratio " << fmt(100.0 * row.ratio, "%.3f")
               << " vs reference " << r.ratio << ";";
      if (row.path_product * 3 == BigInt(r.paths) * 2 &&
          row.partition_product * 3 == BigInt(r.partitions) * 2 && ratio_ok)
        detail << " each reference product is 1.5x the computed one while"
                  " the reference ratio agrees with the computed products,"
                  " so the reference row contradicts itself;";
    }
  }
  if (pass) return {true, "all 6 reference rows match bit for bit"};
  return {false, detail.str()};
}

// --- criterion 2: 20-per-side ratio formatting --------------------------

Outcome criterion2() {
  const double ratio = count_paths(20).convert_to<double>() /
                       count_partitions(20).convert_to<double>();
  const std::string printed = fmt(ratio, "%.5f");
  const double rounded = 0.00013;
  const std::string squared = fmt(rounded * rounded, "%.2e");
  const bool pass = printed == "0.00013" && squared == "1.69e-08";
  return {pass, "ratio formats to \"" + printed + "\", rounded square to \"" +
                    squared + "\""};
}

// --- shared randomized instances for criteria 3 and 4 -------------------

struct Instance {
  PitmanYor model;
  ParetoMixture base;
  CenteredData data;
};

std::vector<Instance> shared_instances() {
  const std::pair<double, double> pd[] = {{0.0, 1.0}, {0.9, 100.0}};
  const std::pair<double, double> pareto[] = {{1.0, 1.0}, {1e-6, 1e-6}};
  Rng rng(2468);
  std::vector<Instance> out;
  for (int i = 0; i < 20; ++i) {
    const int total = 2 + static_cast<int>(rng.below(7));
    std::vector<double> obs;
    for (int j = 0; j < total; ++j) {
      double x = 0.0;
      do {
        x = rng.uniform() * 6.0 - 3.0;
      } while (std::abs(x) < 0.05);
      if (i == 0) x = std::abs(x);  // exercise an empty minus side once
      obs.push_back(x);
    }
    const auto [a, b] = pd[i % 2];
    const auto [alpha, delta] = pareto[(i / 2) % 2];
    out.push_back(
        {PitmanYor(a, b), ParetoMixture(alpha, delta), center(obs, 0.0)});
  }
  return out;
}

Outcome criterion3() {
  const std::vector<double> grid = uniform_grid(-6.0, 6.0, 0.06);
  if (grid.size() != 201) return {false, "grid setup"};
  double worst = 0.0;
  for (const Instance& inst : shared_instances()) {
    const DensityGrid by_path =
        exact_density_given_theta(inst.model, inst.base, inst.data, grid);
    const DensityGrid by_partition =
        exact_density(inst.model, inst.base, inst.data, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double a = by_path.estimate[i];
      const double b = by_partition.estimate[i];
      const double rel =
          std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
      worst = std::max(worst, rel);
    }
  }
  return {worst <= 1e-10, "20 instances, N <= 8, 201 points: max relative "
                          "deviation " +
                              fmt(worst) + " (tolerance 1e-10)"};
}

Outcome criterion4() {
  double worst = 0.0;
  for (const Instance& inst : shared_instances())
    worst = std::max(worst, conditional_uniformity_check(inst.model, inst.base,
                                                         inst.data));
  return {worst <= 1e-12,
          "given the path pair, partition probabilities deviate from uniform "
          "by at most " +
              fmt(worst) + " (tolerance 1e-12)"};
}

// --- criterion 5: EPPF normalization and path multiplicities ------------

Outcome criterion5() {
  double worst = 0.0;
  for (const PitmanYor& model : {PitmanYor(0.0, 1.0), PitmanYor(0.9, 100.0)})
    for (int n = 1; n <= 8; ++n) {
      double total = 0.0;
      for (const Partition& p : enumerate_partitions(n))
        total += std::exp(model.log_chi(p.sizes()));
      worst = std::max(worst, std::abs(total - 1.0));
    }
  if (worst > 1e-12)
    return {false, "EPPF normalization deviates by " + fmt(worst)};
  for (int n = 0; n <= 12; ++n) {
    BigInt total = 0;
    for (const SPath& s : enumerate_paths(n, 14))
      total += count_corresponding_partitions(s);
    if (total != count_partitions(n))
      return {false, "path multiplicities at n = " + std::to_string(n) +
                         " sum to " + total.str() + ", expected " +
                         count_partitions(n).str()};
  }
  return {true, "EPPF sums to 1 within " + fmt(worst) +
                    " (tolerance 1e-12, n <= 8, both parameter pairs); path "
                    "multiplicities hit the Bell numbers exactly, n <= 12"};
}

// --- criterion 6: kernel mass --------------------------------------------

double kernel_tail(const SpeciesModel& model, const BaseMeasure& base,
                   const CenteredData& data, const PathPair& pair, double span) {
  const EtaWeights eta = model.eta_weights(pair.s_plus, pair.s_minus);
  double mass = 2.0 * eta.eta0 * std::exp(base.log_tail_moment_integral(1, span));
  for (int j = 1; j <= pair.s_plus.n(); ++j)
    if (pair.s_plus.is_jump(j))
      mass += eta.plus[static_cast<std::size_t>(j)] *
              std::exp(base.log_tail_moment_integral(pair.s_plus.increment(j) + 1, span) -
                       base.log_tail_moment(pair.s_plus.increment(j),
                                            data.y[static_cast<std::size_t>(j - 1)]));
  for (int j = 1; j <= pair.s_minus.n(); ++j)
    if (pair.s_minus.is_jump(j))
      mass += eta.minus[static_cast<std::size_t>(j)] *
              std::exp(base.log_tail_moment_integral(pair.s_minus.increment(j) + 1, span) -
                       base.log_tail_moment(pair.s_minus.increment(j),
                                            data.z_abs[static_cast<std::size_t>(j - 1)]));
  return mass;
}

Outcome criterion6() {
  Rng rng(1357);
  double worst = 0.0;
  const PitmanYor models[] = {PitmanYor(0.0, 1.0), PitmanYor(0.9, 100.0)};
  const ParetoMixture bases[] = {ParetoMixture(1.0, 1.0),
                                 ParetoMixture(2.0, 0.6)};
  for (int rep = 0; rep < 10; ++rep) {
    const int total = 3 + static_cast<int>(rng.below(5));
    std::vector<double> obs;
    for (int j = 0; j < total; ++j) {
      double x = 0.0;
      do {
        x = rng.uniform() * 5.0 - 2.5;
      } while (std::abs(x) < 0.05);
      obs.push_back(x);
    }
    const PitmanYor& model = models[rep % 2];
    const ParetoMixture& base = bases[(rep / 2) % 2];
    const CenteredData data = center(obs, 0.0);
    const std::vector<SPath> plus = enumerate_paths(data.n_plus());
    const std::vector<SPath> minus = enumerate_paths(data.n_minus());
    const PathPair pair{plus[rng.below(plus.size())],
                        minus[rng.below(minus.size())]};
    const DensityKernel kernel(model, base, data, pair.s_plus, pair.s_minus);
    // Midpoint panels on each side of the mode; the kernel jumps at the
    // mode itself, so no node may land there.
    const double span = 50.0;
    double inner = 0.0;
    const double step = 1e-3;
    for (const auto& seg : {std::pair{-span, 0.0}, std::pair{0.0, span}}) {
      const int panels = static_cast<int>((seg.second - seg.first) / step);
      for (int i = 0; i < panels; ++i)
        inner += step * kernel(seg.first + (i + 0.5) * step);
    }
    const double mass = inner + kernel_tail(model, base, data, pair, span);
    worst = std::max(worst, std::abs(mass - 1.0));
  }
  return {worst <= 1e-4, "10 random path pairs: kernel mass off by at most " +
                             fmt(worst) + " (tolerance 1e-4)"};
}

// --- criterion 7: one-coordinate trial over all orders -------------------

Outcome criterion7() {
  const PitmanYor model(0.5, 0.5);
  const ParetoMixture base(1.0, 1.0);
  const auto cutoffs = [](int n) {
    std::vector<double> out;
    for (int i = 1; i <= n; ++i) out.push_back(0.25 + 0.4 * i);
    return out;
  };
  double worst = 0.0;
  for (int n = 2; n <= 6; ++n) {
    const PathTarget target(model, base, cutoffs(n));
    const std::vector<SPath> paths = enumerate_paths(n);
    std::vector<int> order(static_cast<std::size_t>(n - 1));
    std::iota(order.begin(), order.end(), 1);
    do {
      double total = 0.0;
      for (const SPath& s : paths)
        total += std::exp(sip_log_kappa(target, s, order));
      worst = std::max(worst, std::abs(total - 1.0));
    } while (std::next_permutation(order.begin(), order.end()));
  }
  Rng order_rng(555);
  for (const int n : {7, 8}) {
    const PathTarget target(model, base, cutoffs(n));
    const std::vector<SPath> paths = enumerate_paths(n);
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<int> order(static_cast<std::size_t>(n - 1));
      std::iota(order.begin(), order.end(), 1);
      shuffle(order, order_rng);
      double total = 0.0;
      for (const SPath& s : paths)
        total += std::exp(sip_log_kappa(target, s, order));
      worst = std::max(worst, std::abs(total - 1.0));
    }
  }
  if (worst > 1e-12)
    return {false, "trial normalization deviates by " + fmt(worst)};

  // Monte Carlo consistency on the n = 6 target.
  const PathTarget target(model, base, cutoffs(6));
  LogSum z;
  const std::vector<SPath> paths = enumerate_paths(6);
  for (const SPath& s : paths) z.add(target.log_phi(s));
  double exact_blocks = 0.0;
  std::size_t top = 0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const double p = std::exp(target.log_phi(paths[i]) - z.log_total());
    exact_blocks += p * paths[i].block_count();
    if (target.log_phi(paths[i]) > target.log_phi(paths[top])) top = i;
  }
  const double exact_top =
      std::exp(target.log_phi(paths[top]) - z.log_total());
  Rng rng(90210);
  const int draws = 10000;
  const PathEstimate blocks = path_expectation(
      target, [](const SPath& s) { return double(s.block_count()); }, draws,
      rng);
  Rng rng2(90211);
  const SPath chosen = paths[top];
  const PathEstimate indicator = path_expectation(
      target, [&chosen](const SPath& s) { return s == chosen ? 1.0 : 0.0; },
      draws, rng2);
  const double dev_blocks =
      std::abs(blocks.estimate - exact_blocks) / blocks.stderr_value;
  const double dev_top =
      std::abs(indicator.estimate - exact_top) / indicator.stderr_value;
  const bool pass = dev_blocks <= 3.0 && dev_top <= 3.0;
  return {pass, "normalization off by " + fmt(worst) +
                    " (tolerance 1e-12; exhaustive orders n <= 6, 200 sampled "
                    "orders n = 7, 8); block-count and modal-path estimates at "
                    "M = 10000 sit " +
                    fmt(dev_blocks, "%.2f") + " and " + fmt(dev_top, "%.2f") +
                    " stderr from exact (limit 3)"};
}

// --- criterion 8: ESS against the left-to-right baseline ----------------

Outcome criterion8() {
  // Data-like target: the 20 smallest plus-side gaps of a unimodal sample
  // around its modal region, so cutoffs cluster near zero and spread out,
  // as they do in the estimation pipeline.
  const PitmanYor model(0.0, 1.0);
  const ParetoMixture base(1.0, 1.0);
  const TestDensity lambda1(TestDensity::Kind::lambda1);
  Rng data_rng(12);
  const std::vector<double> obs = lambda1.sample(60, data_rng);
  const CenteredData data = center(obs, -0.5);
  if (data.n_plus() < 20) return {false, "data setup"};
  const std::vector<double> cutoffs(data.y.begin(), data.y.begin() + 20);
  const PathTarget target(model, base, cutoffs);
  const auto h = [](const SPath& s) { return double(s.block_count()); };
  std::vector<double> ess_sip, ess_naive;
  for (int seed = 0; seed < 50; ++seed) {
    Rng a(substream_seed(777, static_cast<std::uint64_t>(seed)));
    ess_sip.push_back(path_expectation(target, h, 1000, a).ess);
    Rng b(substream_seed(888, static_cast<std::uint64_t>(seed)));
    ess_naive.push_back(
        path_expectation(target, h, 1000, b, TrialForm::exact, true).ess);
  }
  const double med_sip = median(ess_sip);
  const double med_naive = median(ess_naive);
  return {med_sip >= med_naive,
          "median ESS over 50 seeds at N = 20, M = 1000: random-order " +
              fmt(med_sip, "%.1f") + " vs left-to-right " +
              fmt(med_naive, "%.1f")};
}

// --- criterion 9: full scheme against the exact unknown-mode density ----

Outcome criterion9() {
  const PitmanYor model(0.0, 1.0);
  const ParetoMixture base(1.0, 1.0);
  const std::vector<double> obs = {-1.3, -0.4, 0.7, 1.9};
  const ModePrior prior = default_mode_prior(obs, 1.0);
  const std::vector<double> theta_grid = make_theta_grid(prior, obs, 801);
  const std::vector<double> t_grid = uniform_grid(-4.0, 4.0, 0.4);
  const DensityGrid exact = exact_density_unknown_theta(
      model, base, obs, prior, theta_grid, t_grid);
  SisConfig cfg;
  cfg.draws = 100000;
  cfg.seed = 4242;
  cfg.threads = 0;
  const RhoSpec rho = RhoSpec::uniform(prior.lo, prior.hi);
  const std::vector<SisDraw> draws = run_sis(model, base, obs, prior, rho, cfg);
  const SisEstimates est = sis_estimates(model, base, obs, draws, t_grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double dev = std::abs(est.density.estimate[i] - exact.estimate[i]) /
                       est.density_stderr[i];
    worst = std::max(worst, dev);
  }
  return {worst <= 3.0, "N = 4, M = 100000: estimate sits at most " +
                            fmt(worst, "%.2f") +
                            " stderr from the exact density over 21 points "
                            "(limit 3); ESS " +
                            fmt(est.ess, "%.0f")};
}

// --- criterion 10: mode-known convergence in sample size -----------------

Outcome criterion10() {
  const TestDensity lambda1(TestDensity::Kind::lambda1);
  const ParetoMixture base(1e-6, 1e-6);
  const std::vector<double> grid = uniform_grid(-10.0, 10.0, 0.05);
  const double theta0s[] = {-1.0, -0.5, 0.0};
  const std::pair<double, double> pd[] = {{0.0, 1.0}, {0.9, 100.0}};
  // Nested data: the small sample is a prefix of the large one.
  const int seeds = 5;
  std::vector<std::vector<double>> pools;
  for (int k = 0; k < seeds; ++k) {
    Rng data_rng(substream_seed(41, static_cast<std::uint64_t>(k)));
    pools.push_back(lambda1.sample(3000, data_rng));
  }
  bool pass = true;
  std::ostringstream detail;
  int config_index = 0;
  for (const auto& [a, b] : pd)
    for (const double theta0 : theta0s) {
      const PitmanYor model(a, b);
      int improved = 0;
      for (int k = 0; k < seeds; ++k) {
        double l1[2] = {0.0, 0.0};
        const int sizes[2] = {500, 3000};
        for (int si = 0; si < 2; ++si) {
          const std::vector<double> obs(pools[static_cast<std::size_t>(k)].begin(),
                                        pools[static_cast<std::size_t>(k)].begin() + sizes[si]);
          SisConfig cfg;
          cfg.draws = 1000;
          cfg.seed = substream_seed(
              97, static_cast<std::uint64_t>(config_index * 100 + k * 10 + si));
          cfg.threads = 0;
          cfg.mode_known = theta0;
          const std::vector<SisDraw> draws = run_sis(
              model, base, obs, default_mode_prior(obs, 1.0),
              default_rho(obs), cfg);
          const SisEstimates est = sis_estimates(model, base, obs, draws, grid);
          l1[si] = l1_distance(est.density, lambda1);
        }
        if (l1[1] < l1[0]) ++improved;
      }
      if (improved < 4) pass = false;
      detail << " (a=" << a << ",b=" << b << ",theta0=" << theta0 << "): "
             << improved << "/5;";
      ++config_index;
    }
  return {pass, "seeds where L1 shrinks from N = 500 to N = 3000, M = 1000 "
                "(need >= 4/5 per configuration):" +
                    detail.str()};
}

// --- criterion 11: replicated mode recovery ------------------------------

Outcome criterion11() {
  HistogramSpec spec;
  spec.replications = 200;
  spec.size = 500;
  spec.rho_sds = {0.25, 1.0};
  spec.draws = 1000;
  spec.seed = 11;
  spec.threads = 0;
  const HistogramResult result = mode_histogram_experiment(spec);
  const HistogramSummary& narrow = result.summaries[0];
  const HistogramSummary& wide = result.summaries[1];
  const bool pass = narrow.median_abs < 0.3 && narrow.frac_within_half >= 0.8 &&
                    wide.mad > narrow.mad;
  return {pass, "200 replications, N = 500, M = 1000: narrow-proposal "
                "median|theta| " +
                    fmt(narrow.median_abs, "%.3f") + " (< 0.3), within-0.5 "
                    "fraction " +
                    fmt(narrow.frac_within_half, "%.3f") +
                    " (>= 0.8), MAD narrow " + fmt(narrow.mad, "%.3f") +
                    " vs wide " + fmt(wide.mad, "%.3f") + " (wide larger)"};
}

// --- criterion 12: estimand variance across the two spaces ---------------

Outcome criterion12() {
  Rng rng(864);
  double worst = -1.0;
  for (int rep = 0; rep < 3; ++rep) {
    const int total = 4 + static_cast<int>(rng.below(3));
    std::vector<double> obs;
    for (int j = 0; j < total; ++j) {
      double x = 0.0;
      do {
        x = rng.uniform() * 4.0 - 2.0;
      } while (std::abs(x) < 0.05);
      obs.push_back(x);
    }
    const PitmanYor model(rep % 2 == 0 ? 0.0 : 0.9, rep % 2 == 0 ? 1.0 : 100.0);
    const ParetoMixture base(1.0, 1.0);
    const CenteredData data = center(obs, 0.0);
    const ExactJoint joint = exact_joint(model, base, data);
    const ExactPartitionPosterior parts =
        exact_partition_posterior(model, base, data);
    const std::vector<double> grid = uniform_grid(-5.0, 5.0, 0.2);
    for (const double t : grid) {
      double mean_p = 0.0, second_p = 0.0;
      for (std::size_t i = 0; i < joint.pairs.size(); ++i) {
        const double v = a_f(model, base, data, joint.pairs[i], t);
        mean_p += joint.prob[i] * v;
        second_p += joint.prob[i] * v * v;
      }
      double mean_q = 0.0, second_q = 0.0;
      for (std::size_t i = 0; i < parts.parts.size(); ++i) {
        const double v =
            partition_density_value(model, base, data, parts.parts[i], t);
        mean_q += parts.prob[i] * v;
        second_q += parts.prob[i] * v * v;
      }
      const double var_p = second_p - mean_p * mean_p;
      const double var_q = second_q - mean_q * mean_q;
      worst = std::max(worst, var_p - var_q);
      if (std::abs(mean_p - mean_q) >
          1e-12 * std::max({std::abs(mean_p), std::abs(mean_q), 1e-300}))
        return {false, "estimand means disagree at t = " + fmt(t)};
    }
  }
  return {worst <= 1e-12,
          "path-space estimand variance exceeds the partition-space one by "
          "at most " +
              fmt(worst) + " (tolerance 1e-12, N <= 6, 51 points)"};
}

}  // namespace

int main(int argc, char** argv) {
  const int which = argc > 1 ? std::atoi(argv[1]) : 0;
  struct Entry {
    int id;
    Outcome (*fn)();
    const char* title;
  };
  const Entry entries[] = {
      {1, criterion1, "complexity table"},
      {2, criterion2, "headline ratio"},
      {3, criterion3, "path engine vs partition oracle"},
      {4, criterion4, "conditional uniformity"},
      {5, criterion5, "EPPF and multiplicity sums"},
      {6, criterion6, "kernel mass"},
      {7, criterion7, "trial normalization and consistency"},
      {8, criterion8, "ESS advantage"},
      {9, criterion9, "full scheme vs exact"},
      {10, criterion10, "convergence in sample size"},
      {11, criterion11, "replicated mode recovery"},
      {12, criterion12, "estimand variance"},
  };
  bool all = true;
  bool ran = false;
  for (const Entry& e : entries) {
    if (which != 0 && which != e.id) continue;
    ran = true;
    const Outcome o = e.fn();
    std::printf("criterion %02d (%s): %s  %s\n", e.id, e.title,
                o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) all = false;
  }
  if (!ran) {
    std::fprintf(stderr, "unknown criterion %d\n", which);
    return 2;
  }
  return all ? 0 : 1;
}
