#include "unimix/samplers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <utility>

#include "unimix/logsum.hpp"

namespace unimix {

PathTarget::PathTarget(const SpeciesModel& model, const BaseMeasure& base,
                       std::vector<double> cutoffs, int block_offset,
                       int first_total)
    : model_(&model),
      base_(&base),
      cutoffs_(std::move(cutoffs)),
      block_offset_(block_offset),
      first_total_(first_total),
      lf_(std::max<int>(1, static_cast<int>(cutoffs_.size()))) {
  for (std::size_t i = 0; i < cutoffs_.size(); ++i) {
    if (!(cutoffs_[i] > 0.0))
      throw std::invalid_argument("PathTarget: cutoffs must be positive");
    if (i > 0 && cutoffs_[i] < cutoffs_[i - 1])
      throw std::invalid_argument("PathTarget: cutoffs must be ascending");
  }
  if (block_offset_ < 0 || first_total_ < block_offset_ ||
      (block_offset_ == 0) != (first_total_ == 0))
    throw std::invalid_argument(
        "PathTarget: conditional side needs 1 <= block_offset <= first_total");
  beta_.assign(cutoffs_.size() + 1, 0.0);
  for (std::size_t e = 2; e < beta_.size(); ++e)
    beta_[e] = beta_[e - 1] + model_->log_grow_factor(static_cast<int>(e) - 1);
}

double PathTarget::log_m(int nu, int position) const {
  return base_->log_tail_moment(nu, cutoffs_[static_cast<std::size_t>(position) - 1]);
}

double PathTarget::log_phi(const SPath& path) const {
  if (path.n() != n())
    throw std::invalid_argument("PathTarget: path length differs from cutoff count");
  double out = lf_.log_path_count(path) +
               model_->log_chi_conditional(block_offset_, first_total_,
                                           path.jump_sizes());
  for (int j = 1; j <= n(); ++j)
    if (path.is_jump(j)) out += log_m(path.increment(j), j);
  return out;
}

double sip_candidate_logw(const PathTarget& target, int index, int p, int q,
                          int s_p, int s_q, int k, int k_rest, TrialForm form) {
  const bool jump_at_index = k > s_p;
  const bool jump_at_q = s_q > k;
  // The closed form divides by s_q - s_p - 1, so adjacent neighbour levels
  // force the exact form.
  if (form == TrialForm::approximate && s_q - s_p <= 1) form = TrialForm::exact;
  if (form == TrialForm::exact) {
    // Proportional in k to the weight of the flattened path with this
    // coordinate set to k: only the jumps at index and q depend on k, plus
    // one extra open factor when both exist.
    double lw = 0.0;
    if (jump_at_index)
      lw += target.log_binom(index - 1 - s_p, index - k) +
            target.log_block_product(k - s_p) + target.log_m(k - s_p, index);
    if (jump_at_q)
      lw += target.log_binom(q - 1 - k, q - s_q) +
            target.log_block_product(s_q - k) + target.log_m(s_q - k, q);
    if (jump_at_index && jump_at_q) lw += target.open_step(k_rest + 1);
    return lw;
  }
  // Closed form: boundary levels merge the segment into one block, interior
  // levels split it at k. It references the cutoff at p, which does not
  // exist when p = 0; the index's own cutoff substitutes.
  const int left = p >= 1 ? p : index;
  const double span = static_cast<double>(index - s_p);
  if (!jump_at_index)
    return std::log(span) - std::log(static_cast<double>(s_q - s_p - 1)) +
           target.log_m(s_q - s_p, q);
  if (!jump_at_q) {
    double lw = std::log(span) - std::log(static_cast<double>(s_q - s_p - 1));
    for (int i = s_p + 1; i <= s_q - 1; ++i)
      lw += std::log(static_cast<double>(index - i)) -
            std::log(static_cast<double>(q - i));
    return lw + target.log_m(s_q - s_p, left);
  }
  double lw = target.log_binom(s_q - s_p - 2, s_q - k - 1);
  for (int i = index + 1; i <= q - 1; ++i)
    lw += std::log(static_cast<double>(i - k)) - std::log(span);
  lw += target.open_step(k_rest + 1) + target.log_block_product(k - s_p) +
        target.log_block_product(s_q - k) -
        target.log_block_product(s_q - s_p);
  return lw + target.log_m(k - s_p, left) + target.log_m(s_q - k, q);
}

namespace {

// Walks the determination order shared by sampling and evaluation: computes
// each step's support and trial weights, lets pick choose a level, and
// accumulates the log trial probability. coords receives the finished
// coordinates. pick(step, lo, lws, lmax, total) returns a level in
// [lo, lo + lws.size() - 1].
template <typename Pick>
double sip_walk(const PathTarget& target, const std::vector<int>& order,
                TrialForm form, std::vector<int>& coords, Pick&& pick) {
  const int n = target.n();
  coords.assign(static_cast<std::size_t>(n) + 1, 0);
  coords[static_cast<std::size_t>(n)] = n;
  if (n <= 1) return 0.0;
  const int steps = n - 1;
  // Forward determination order equals reverse deletion order, so unlinking
  // coordinates from a full list records each one's determined neighbours.
  std::vector<int> prev(static_cast<std::size_t>(n) + 1);
  std::vector<int> next(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    prev[static_cast<std::size_t>(i)] = i - 1;
    next[static_cast<std::size_t>(i)] = i + 1;
  }
  std::vector<int> left(static_cast<std::size_t>(steps));
  std::vector<int> right(static_cast<std::size_t>(steps));
  for (int r = steps - 1; r >= 0; --r) {
    const int i = order[static_cast<std::size_t>(r)];
    left[static_cast<std::size_t>(r)] = prev[static_cast<std::size_t>(i)];
    right[static_cast<std::size_t>(r)] = next[static_cast<std::size_t>(i)];
    next[static_cast<std::size_t>(prev[static_cast<std::size_t>(i)])] =
        next[static_cast<std::size_t>(i)];
    prev[static_cast<std::size_t>(next[static_cast<std::size_t>(i)])] =
        prev[static_cast<std::size_t>(i)];
  }
  double log_kappa = 0.0;
  int blocks = 1;  // the undetermined flattened path has its only jump at n
  std::vector<double> lws;
  for (int r = 0; r < steps; ++r) {
    const int i = order[static_cast<std::size_t>(r)];
    const int p = left[static_cast<std::size_t>(r)];
    const int q = right[static_cast<std::size_t>(r)];
    const int s_p = coords[static_cast<std::size_t>(p)];
    const int s_q = coords[static_cast<std::size_t>(q)];
    if (s_p == s_q) {
      coords[static_cast<std::size_t>(i)] = s_p;  // forced, trial mass 1
      continue;
    }
    const int k_rest = blocks - 1;
    const int lo = s_p;
    const int hi = std::min(i, s_q);
    lws.assign(static_cast<std::size_t>(hi - lo) + 1, 0.0);
    double lmax = neg_inf;
    for (int k = lo; k <= hi; ++k) {
      const double lw =
          sip_candidate_logw(target, i, p, q, s_p, s_q, k, k_rest, form);
      lws[static_cast<std::size_t>(k - lo)] = lw;
      if (lw > lmax) lmax = lw;
    }
    double total = 0.0;
    for (double lw : lws) total += std::exp(lw - lmax);
    const int k = pick(r, lo, lws, lmax, total);
    log_kappa += lws[static_cast<std::size_t>(k - lo)] -
                 (lmax + std::log(total));
    coords[static_cast<std::size_t>(i)] = k;
    blocks = k_rest + (k > s_p ? 1 : 0) + (s_q > k ? 1 : 0);
  }
  return log_kappa;
}

int pick_from_weights(Rng& rng, int lo, const std::vector<double>& lws,
                      double lmax, double total) {
  const double u = rng.uniform() * total;
  double cum = 0.0;
  for (std::size_t j = 0; j < lws.size(); ++j) {
    cum += std::exp(lws[j] - lmax);
    if (u < cum) return lo + static_cast<int>(j);
  }
  return lo + static_cast<int>(lws.size()) - 1;
}

SipDraw finish_draw(const PathTarget& target, std::vector<int> coords,
                    std::vector<int> order, double log_kappa) {
  SipDraw d{SPath(std::move(coords)), std::move(order), log_kappa, 0.0, 0.0};
  d.log_phi = target.log_phi(d.path);
  d.log_w = d.log_phi - d.log_kappa;
  return d;
}

}  // namespace

SipDraw sip_draw(const PathTarget& target, Rng& rng, TrialForm form) {
  const int n = target.n();
  std::vector<int> order(static_cast<std::size_t>(std::max(n - 1, 0)));
  std::iota(order.begin(), order.end(), 1);
  shuffle(order, rng);
  std::vector<int> coords;
  const double log_kappa = sip_walk(
      target, order, form, coords,
      [&rng](int, int lo, const std::vector<double>& lws, double lmax,
             double total) { return pick_from_weights(rng, lo, lws, lmax, total); });
  return finish_draw(target, std::move(coords), std::move(order), log_kappa);
}

double sip_log_kappa(const PathTarget& target, const SPath& path,
                     const std::vector<int>& order, TrialForm form) {
  const int n = target.n();
  if (path.n() != n)
    throw std::invalid_argument("sip_log_kappa: path length differs from target");
  if (order.size() != static_cast<std::size_t>(std::max(n - 1, 0)))
    throw std::invalid_argument("sip_log_kappa: order must cover coordinates 1..n-1");
  std::vector<char> seen(order.size() + 2, 0);
  for (const int i : order) {
    if (i < 1 || i > n - 1 || seen[static_cast<std::size_t>(i)])
      throw std::invalid_argument(
          "sip_log_kappa: order must be a permutation of 1..n-1");
    seen[static_cast<std::size_t>(i)] = 1;
  }
  std::vector<int> coords;
  return sip_walk(target, order, form, coords,
                  [&path, &order](int r, int, const std::vector<double>&, double,
                                  double) {
                    return path[order[static_cast<std::size_t>(r)]];
                  });
}

SipDraw naive_sis_draw(const PathTarget& target, Rng& rng) {
  const int n = target.n();
  std::vector<int> coords(static_cast<std::size_t>(n) + 1, 0);
  coords[static_cast<std::size_t>(n)] = n;
  std::vector<int> order(static_cast<std::size_t>(std::max(n - 1, 0)));
  std::iota(order.begin(), order.end(), 1);
  double log_kappa = 0.0;
  int blocks = 0;  // jumps among the coordinates fixed so far
  std::vector<double> lws;
  for (int r = 1; r <= n - 1; ++r) {
    const int lo = coords[static_cast<std::size_t>(r) - 1];
    const int hi = r;
    lws.assign(static_cast<std::size_t>(hi - lo) + 1, 0.0);
    double lmax = neg_inf;
    for (int k = lo; k <= hi; ++k) {
      // Weight of the truncated path (0, s_1..s_{r-1}, k, r+1): a terminal
      // jump at r+1 always, one at r when k rises above s_{r-1}.
      double lw = target.log_block_product(r + 1 - k) + target.log_m(r + 1 - k, r + 1);
      if (k > lo)
        lw += target.log_binom(r - 1 - lo, r - k) +
              target.log_block_product(k - lo) + target.log_m(k - lo, r) +
              target.open_step(blocks + 1);
      lws[static_cast<std::size_t>(k - lo)] = lw;
      if (lw > lmax) lmax = lw;
    }
    double total = 0.0;
    for (double lw : lws) total += std::exp(lw - lmax);
    const int k = pick_from_weights(rng, lo, lws, lmax, total);
    log_kappa += lws[static_cast<std::size_t>(k - lo)] -
                 (lmax + std::log(total));
    coords[static_cast<std::size_t>(r)] = k;
    if (k > lo) ++blocks;
  }
  return finish_draw(target, std::move(coords), std::move(order), log_kappa);
}

PathEstimate path_expectation(const PathTarget& target,
                              const std::function<double(const SPath&)>& h,
                              int draws, Rng& rng, TrialForm form, bool naive) {
  if (draws <= 0)
    throw std::invalid_argument("path_expectation: draws must be positive");
  WeightAccum acc;
  for (int i = 0; i < draws; ++i) {
    const SipDraw d = naive ? naive_sis_draw(target, rng)
                            : sip_draw(target, rng, form);
    acc.add(d.log_w, h(d.path));
  }
  return {acc.mean(), acc.stderr_mean(), acc.ess()};
}

RhoSpec RhoSpec::normal(double mean, double sd) {
  if (!(sd > 0.0))
    throw std::invalid_argument("RhoSpec: standard deviation must be positive");
  return {Kind::normal, mean, sd};
}

RhoSpec RhoSpec::uniform(double lo, double hi) {
  if (!(hi > lo))
    throw std::invalid_argument("RhoSpec: upper bound must exceed lower bound");
  return {Kind::uniform, lo, hi};
}

double RhoSpec::log_density(double x) const {
  if (kind == Kind::normal) {
    const double z = (x - p1) / p2;
    return -0.5 * z * z - std::log(p2) - 0.91893853320467274178;
  }
  if (x < p1 || x > p2) return neg_inf;
  return -std::log(p2 - p1);
}

double RhoSpec::sample(Rng& rng) const {
  if (kind == Kind::normal) return p1 + p2 * rng.normal();
  return p1 + (p2 - p1) * rng.uniform();
}

RhoSpec default_rho(const std::vector<double>& observations) {
  double median = 0.0;
  if (!observations.empty()) {
    std::vector<double> sorted(observations);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    median = sorted.size() % 2 == 1 ? sorted[mid]
                                    : 0.5 * (sorted[mid - 1] + sorted[mid]);
  }
  return RhoSpec::normal(median, 0.25);
}

namespace {

struct PairDraw {
  SPath s_minus;
  SPath s_plus;
  double log_w;
  bool plus_first;
};

// Two chained path draws; the side drawn second sees the first side's block
// count and size through its conditional target. The order is randomized,
// which leaves the product weight invariant because the joint factors both
// ways whenever the conditional law is symmetric.
PairDraw draw_pair(const SpeciesModel& model, const BaseMeasure& base,
                   const CenteredData& data, Rng& rng, TrialForm form) {
  const bool plus_first =
      model.conditional_symmetric() ? rng.uniform() < 0.5 : true;
  if (plus_first) {
    const PathTarget first(model, base, data.y);
    SipDraw dp = sip_draw(first, rng, form);
    const PathTarget second(model, base, data.z_abs, dp.path.block_count(),
                            data.n_plus());
    SipDraw dm = sip_draw(second, rng, form);
    return {std::move(dm.path), std::move(dp.path), dp.log_w + dm.log_w, true};
  }
  const PathTarget first(model, base, data.z_abs);
  SipDraw dm = sip_draw(first, rng, form);
  const PathTarget second(model, base, data.y, dm.path.block_count(),
                          data.n_minus());
  SipDraw dp = sip_draw(second, rng, form);
  return {std::move(dm.path), std::move(dp.path), dp.log_w + dm.log_w, false};
}

SisDraw dead_draw(const CenteredData& data, double theta) {
  return {singleton_path(data.n_minus()), singleton_path(data.n_plus()), theta,
          neg_inf, true};
}

}  // namespace

SisDraw sis_full_draw(const SpeciesModel& model, const BaseMeasure& base,
                      const std::vector<double>& observations,
                      const ModePrior& prior, const RhoSpec& rho, Rng& rng,
                      TrialForm form) {
  const double theta = rho.sample(rng);
  const double log_pi = prior.log_density(theta);
  const CenteredData data = center(observations, theta);
  if (data.zero_gaps > 0 || log_pi == neg_inf) return dead_draw(data, theta);
  PairDraw pd = draw_pair(model, base, data, rng, form);
  const double log_w = pd.log_w + log_pi - rho.log_density(theta);
  return {std::move(pd.s_minus), std::move(pd.s_plus), theta, log_w,
          pd.plus_first};
}

SisDraw sis_mode_known_draw(const SpeciesModel& model, const BaseMeasure& base,
                            const std::vector<double>& observations,
                            double theta0, Rng& rng, TrialForm form) {
  const CenteredData data = center(observations, theta0);
  if (data.zero_gaps > 0) return dead_draw(data, theta0);
  PairDraw pd = draw_pair(model, base, data, rng, form);
  return {std::move(pd.s_minus), std::move(pd.s_plus), theta0, pd.log_w,
          pd.plus_first};
}

std::vector<SisDraw> run_sis(const SpeciesModel& model, const BaseMeasure& base,
                             const std::vector<double>& observations,
                             const ModePrior& prior, const RhoSpec& rho,
                             const SisConfig& config) {
  if (config.draws <= 0)
    throw std::invalid_argument("run_sis: draws must be positive");
  const int total = config.draws;
  std::vector<SisDraw> out(static_cast<std::size_t>(total));
  constexpr int chunk = 64;
  const int chunks = (total + chunk - 1) / chunk;
  int threads = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, chunks);
  std::atomic<int> next_chunk{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    try {
      for (;;) {
        const int c = next_chunk.fetch_add(1);
        if (c >= chunks) return;
        const int lo = c * chunk;
        const int hi = std::min(total, lo + chunk);
        for (int j = lo; j < hi; ++j) {
          Rng rng(substream_seed(config.seed, static_cast<std::uint64_t>(j)));
          out[static_cast<std::size_t>(j)] =
              config.mode_known
                  ? sis_mode_known_draw(model, base, observations,
                                        *config.mode_known, rng, config.trial)
                  : sis_full_draw(model, base, observations, prior, rho, rng,
                                  config.trial);
        }
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

SisEstimates sis_estimates(const SpeciesModel& model, const BaseMeasure& base,
                           const std::vector<double>& observations,
                           const std::vector<SisDraw>& draws,
                           const std::vector<double>& t_grid) {
  WeightAccum theta_acc;
  std::vector<WeightAccum> density_acc(t_grid.size());
  for (const SisDraw& d : draws) {
    if (d.log_w == neg_inf) continue;
    const CenteredData data = center(observations, d.theta);
    const DensityKernel kernel(model, base, data, d.s_plus, d.s_minus);
    theta_acc.add(d.log_w, d.theta);
    for (std::size_t i = 0; i < t_grid.size(); ++i)
      density_acc[i].add(d.log_w, kernel(t_grid[i]));
  }
  SisEstimates est;
  est.theta_hat = theta_acc.mean();
  est.theta_stderr = theta_acc.stderr_mean();
  est.ess = theta_acc.ess();
  est.density.t = t_grid;
  est.density.estimate.resize(t_grid.size());
  est.density_stderr.resize(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    est.density.estimate[i] = density_acc[i].mean();
    est.density_stderr[i] = density_acc[i].stderr_mean();
  }
  return est;
}

}  // namespace unimix
