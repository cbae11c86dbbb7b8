#pragma once

// Sequential importance samplers over paths. A PathTarget fixes one side's
// unnormalized weight phi; sip_draw builds a path by determining coordinates
// in random order between their already-determined neighbours, and the full
// scheme composes two such draws with a proposed mode into one weighted
// sample from the joint posterior.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "unimix/base_measure.hpp"
#include "unimix/paths.hpp"
#include "unimix/posterior.hpp"
#include "unimix/rng.hpp"
#include "unimix/species.hpp"

namespace unimix {

// Unnormalized weight phi(s) = |C_s| chi(increments) prod m over one side's
// cutoffs, with tables shared across evaluations. block_offset and
// first_total switch chi to the law conditional on an already-seated first
// side with that many blocks and elements; both zero means unconditional.
class PathTarget {
 public:
  PathTarget(const SpeciesModel& model, const BaseMeasure& base,
             std::vector<double> cutoffs, int block_offset = 0,
             int first_total = 0);

  int n() const { return static_cast<int>(cutoffs_.size()); }
  int block_offset() const { return block_offset_; }
  int first_total() const { return first_total_; }
  const std::vector<double>& cutoffs() const { return cutoffs_; }
  const SpeciesModel& model() const { return *model_; }
  const BaseMeasure& base() const { return *base_; }

  // log m^(nu)(Q_position); position in 1..n indexes the ascending cutoffs.
  double log_m(int nu, int position) const;
  // Sum of grow factors; the within-block weight of one block of this size.
  double log_block_product(int size) const {
    return beta_[static_cast<std::size_t>(size)];
  }
  double log_binom(int total, int chosen) const {
    return lf_.log_binom(total, chosen);
  }
  // Log factor for opening one more block when `blocks` of this side's own
  // blocks exist; the offset shifts the count for conditional targets.
  double open_step(int blocks) const {
    return model_->log_open_factor(block_offset_ + blocks);
  }
  double log_phi(const SPath& path) const;

 private:
  const SpeciesModel* model_;
  const BaseMeasure* base_;
  std::vector<double> cutoffs_;
  int block_offset_;
  int first_total_;
  LogFact lf_;
  std::vector<double> beta_;
};

// Trial family for one coordinate choice. `exact` is proportional to the
// flattened-path weight and is what the invariants assume; `approximate` is
// a cheaper closed form kept for efficiency comparisons, falling back to
// exact whenever its prefactors degenerate (adjacent neighbour levels).
enum class TrialForm { exact, approximate };

// Relative log trial weight of candidate level k for the coordinate at
// `index`, whose nearest determined neighbours are p < index < q with levels
// s_p <= k <= min(index, s_q). k_rest is the flattened-path block count
// excluding the one or two jumps this choice creates.
double sip_candidate_logw(const PathTarget& target, int index, int p, int q,
                          int s_p, int s_q, int k, int k_rest, TrialForm form);

struct SipDraw {
  SPath path;
  std::vector<int> order;  // determination order of coordinates 1..n-1
  double log_kappa = 0.0;  // log probability of the path under the trial
  double log_phi = 0.0;
  double log_w = 0.0;      // log_phi - log_kappa
};

SipDraw sip_draw(const PathTarget& target, Rng& rng,
                 TrialForm form = TrialForm::exact);

// Log probability that sip_draw with this determination order produces this
// path; order must be a permutation of 1..n-1.
double sip_log_kappa(const PathTarget& target, const SPath& path,
                     const std::vector<int>& order,
                     TrialForm form = TrialForm::exact);

// Left-to-right sampler whose step-r trial weights candidate k by the full
// weight of the truncated path (0, s_1..s_{r-1}, k, r+1); the baseline the
// random-order scheme is measured against.
SipDraw naive_sis_draw(const PathTarget& target, Rng& rng);

struct PathEstimate {
  double estimate;
  double stderr_value;
  double ess;
};

// Self-normalized estimate of E[h(S)] under the normalized target.
PathEstimate path_expectation(const PathTarget& target,
                              const std::function<double(const SPath&)>& h,
                              int draws, Rng& rng,
                              TrialForm form = TrialForm::exact,
                              bool naive = false);

// Proposal law for the mode.
struct RhoSpec {
  enum class Kind { normal, uniform };

  Kind kind = Kind::normal;
  double p1 = 0.0;  // mean, or lower bound
  double p2 = 1.0;  // standard deviation, or upper bound

  static RhoSpec normal(double mean, double sd);
  static RhoSpec uniform(double lo, double hi);

  double log_density(double x) const;
  double sample(Rng& rng) const;
};

// Normal proposal centered at the sample median with spread 0.25.
RhoSpec default_rho(const std::vector<double>& observations);

// One weighted draw of (paths, mode). A proposed mode that lands on an
// observation or outside the prior support gets log_w = -inf with
// placeholder paths; such draws count toward the Monte Carlo size but carry
// no weight.
struct SisDraw {
  SPath s_minus;
  SPath s_plus;
  double theta = 0.0;
  double log_w = neg_inf;
  bool plus_first = true;
};

SisDraw sis_full_draw(const SpeciesModel& model, const BaseMeasure& base,
                      const std::vector<double>& observations,
                      const ModePrior& prior, const RhoSpec& rho, Rng& rng,
                      TrialForm form = TrialForm::exact);

// Known-mode variant: theta is fixed, the weight is the product of the two
// path weights alone.
SisDraw sis_mode_known_draw(const SpeciesModel& model, const BaseMeasure& base,
                            const std::vector<double>& observations,
                            double theta0, Rng& rng,
                            TrialForm form = TrialForm::exact);

struct SisConfig {
  int draws = 1000;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 resolves to the hardware thread count
  TrialForm trial = TrialForm::exact;
  std::optional<double> mode_known;
};

// config.draws independent draws. Draw j depends only on
// substream_seed(config.seed, j), so results are identical for every thread
// count.
std::vector<SisDraw> run_sis(const SpeciesModel& model, const BaseMeasure& base,
                             const std::vector<double>& observations,
                             const ModePrior& prior, const RhoSpec& rho,
                             const SisConfig& config);

struct SisEstimates {
  double theta_hat = 0.0;
  double theta_stderr = 0.0;
  double ess = 0.0;
  DensityGrid density;
  std::vector<double> density_stderr;
};

// Self-normalized posterior-mean estimates from weighted draws: mode mean,
// density on t_grid, delta-method standard errors, and effective sample
// size. Draws are folded in index order so results do not depend on how
// they were produced.
SisEstimates sis_estimates(const SpeciesModel& model, const BaseMeasure& base,
                           const std::vector<double>& observations,
                           const std::vector<SisDraw>& draws,
                           const std::vector<double>& t_grid);

}  // namespace unimix
