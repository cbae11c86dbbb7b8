#pragma once

// Path-based posterior of a unimodal density under a species sampling
// mixture prior, conditional on the mode: per-side path weights, the exact
// joint over path pairs, the posterior-mean density kernel, and exact
// estimators by enumeration for small samples, including deterministic
// quadrature over an unknown mode.

#include <utility>
#include <vector>

#include "unimix/base_measure.hpp"
#include "unimix/logsum.hpp"
#include "unimix/paths.hpp"
#include "unimix/species.hpp"

namespace unimix {

// Observations re-expressed as gaps from the mode. y holds positive gaps
// ascending; z_abs holds magnitudes of negative gaps ascending, so index 1
// is the gap closest to zero on each side. zero_gaps counts observations
// exactly at the mode, each of which has zero likelihood.
struct CenteredData {
  double theta = 0.0;
  std::vector<double> y;
  std::vector<double> z_abs;
  int zero_gaps = 0;

  int n_plus() const { return static_cast<int>(y.size()); }
  int n_minus() const { return static_cast<int>(z_abs.size()); }
  int total() const { return n_plus() + n_minus(); }
};

CenteredData center(const std::vector<double>& observations, double theta);

struct PathPair {
  SPath s_plus;
  SPath s_minus;
};

// log of the plus-side path weight: log of the partition count of the path,
// plus log chi of its increments, plus one tail moment per jump at the
// jump's cutoff. 0 for an empty side.
double log_phi_plus(const SpeciesModel& model, const BaseMeasure& base, const CenteredData& data,
                    const SPath& s_plus);

// log of the minus-side path weight given the plus path; carries the
// conditional EPPF ratio, which depends on the plus path only through its
// block count. 0 for an empty side.
double log_phi_minus(const SpeciesModel& model, const BaseMeasure& base, const CenteredData& data,
                     const SPath& s_minus, int plus_blocks);
double log_phi_minus(const SpeciesModel& model, const BaseMeasure& base, const CenteredData& data,
                     const SPath& s_minus, const SPath& s_plus);

// Normalized posterior over all path pairs; pairs in plus-major
// lexicographic order. Throws std::length_error past the enumeration cap
// and std::domain_error when an observation sits exactly at the mode.
struct ExactJoint {
  std::vector<PathPair> pairs;
  std::vector<double> prob;
  double log_normalizer;
};

ExactJoint exact_joint(const SpeciesModel& model, const BaseMeasure& base, const CenteredData& data,
                       int path_cap = 14);

// Posterior-mean density kernel of one path pair: for t >= theta the
// new-block weight times the prior tail component plus one tail-ratio term
// per plus-side jump; mirrored below theta. t = theta takes the right
// limit. Integrates to 1 in t for any fixed pair.
class DensityKernel {
 public:
  DensityKernel(const SpeciesModel& model, const BaseMeasure& base, const CenteredData& data,
                const SPath& s_plus, const SPath& s_minus);

  double operator()(double t) const;
  double theta() const { return theta_; }

 private:
  struct Term {
    int nu;
    double cutoff;
    double eta;
  };
  const BaseMeasure* base_;
  double theta_;
  double eta0_;
  std::vector<Term> plus_;
  std::vector<Term> minus_;
};

double a_f(const SpeciesModel& model, const BaseMeasure& base, const CenteredData& data,
           const PathPair& pair, double t);

struct DensityGrid {
  std::vector<double> t;
  std::vector<double> estimate;
};

// Exact combine of the two sides' enumerations over block counts, without
// materializing path pairs: the minus side's weight depends on the plus
// side only through its block count, so per-count totals suffice. Both the
// path engine and the partition engine feed objects as (increment, cutoff)
// block lists plus the object's own log multiplicity (the log partition
// count for a path, 0 for a partition); EPPF and tail factors are applied
// here so the two engines share one definition.
class TwoSideExactEngine {
 public:
  TwoSideExactEngine(const SpeciesModel& model, const BaseMeasure& base, const CenteredData& data,
                     std::vector<double> t_grid);

  void add_plus(double log_multiplicity, const std::vector<std::pair<int, double>>& blocks);
  void add_minus(double log_multiplicity, const std::vector<std::pair<int, double>>& blocks);

  // log of the unnormalized posterior mass summed over all pairs.
  double log_normalizer() const;
  // Posterior-mean density at the t grid.
  std::vector<double> density() const;

 private:
  double open_sum(int plus_blocks, int minus_blocks) const;

  const SpeciesModel* model_;
  const BaseMeasure* base_;
  double theta_;
  int n_;
  int m_;
  std::vector<double> t_grid_;
  std::size_t split_;            // first t index with t >= theta
  std::vector<double> copen_;    // copen[j] = sum of open factors 1..j
  double seat_plus_;
  double seat_minus_;
  std::vector<LogSum> f_;                  // per plus block count
  std::vector<LogSum> e_;                  // per minus block count
  std::vector<std::vector<LogSum>> up_;    // [plus count][t >= theta]
  std::vector<std::vector<LogSum>> um_;    // [minus count][t < theta]
};

// Exact posterior-mean density given the mode, by full path enumeration of
// both sides.
DensityGrid exact_density_given_theta(const SpeciesModel& model, const BaseMeasure& base,
                                      const CenteredData& data, const std::vector<double>& t_grid,
                                      int path_cap = 14);

// Uniform mode prior over [lo, hi].
struct ModePrior {
  double lo;
  double hi;
  double log_density(double theta) const;
};

// [min - width * s, max + width * s] with s the sample standard deviation
// (1 when undefined or zero).
ModePrior default_mode_prior(const std::vector<double>& observations, double width = 1.0);

// log of the unnormalized joint of (pair, theta): both side weights plus
// the log prior density. -inf outside the prior support or when an
// observation sits exactly at theta.
double log_theta_integrand(const SpeciesModel& model, const BaseMeasure& base,
                           const std::vector<double>& observations, const ModePrior& prior,
                           double theta, const PathPair& pair);

// Quadrature nodes over the prior support: a uniform grid of `count` nodes
// plus a pair of nodes tightly bracketing each interior observation, with
// nodes falling on an observation removed. The integrand jumps across each
// observation and vanishes at it, so brackets keep the trapezoid rule
// accurate.
std::vector<double> make_theta_grid(const ModePrior& prior, const std::vector<double>& observations,
                                    int count);

// Posterior-mean density with the mode integrated out by trapezoid
// quadrature over theta_grid.
DensityGrid exact_density_unknown_theta(const SpeciesModel& model, const BaseMeasure& base,
                                        const std::vector<double>& observations, const ModePrior& prior,
                                        const std::vector<double>& theta_grid,
                                        const std::vector<double>& t_grid, int path_cap = 14);

// Normalized posterior density of the mode on theta_grid, and its mean.
struct ModePosterior {
  std::vector<double> theta;
  std::vector<double> density;
  double mean;
};

ModePosterior exact_mode_posterior(const SpeciesModel& model, const BaseMeasure& base,
                                   const std::vector<double>& observations, const ModePrior& prior,
                                   const std::vector<double>& theta_grid, int path_cap = 14);

}  // namespace unimix
