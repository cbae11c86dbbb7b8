#pragma once

// Species sampling models through their exchangeable partition probability
// function (EPPF) chi. Models are specified by three sequential-seating log
// factors:
//   open factor  log v(i): numerator for opening block i+1 when i blocks exist
//   grow factor  log g(e): numerator for a block of size e gaining one element
//   seat factor  log d(k): denominator for seating element k, k >= 2
// chi(sizes) assembles by summing factors. The first block's open numerator
// and element 1's seat denominator cancel by convention, so every remaining
// factor is positive on the full parameter range.

#include <vector>

#include "unimix/paths.hpp"

namespace unimix {

// eta weights of a path pair: new-block mass eta0 plus one weight per
// coordinate (nonzero exactly at jumps). Indexed 1..n; slot 0 unused.
struct EtaWeights {
  double eta0;
  std::vector<double> plus;
  std::vector<double> minus;
};

// One-step prediction rule after seating k elements into the given blocks.
struct PredictiveWeights {
  double new_block;
  std::vector<double> per_block;
};

class SpeciesModel {
 public:
  virtual ~SpeciesModel() = default;

  // existing >= 1.
  virtual double log_open_factor(int existing) const = 0;
  // size >= 1.
  virtual double log_grow_factor(int size) const = 0;
  // k >= 2.
  virtual double log_seat_factor(int k) const = 0;
  // Whether chi(first, second)/chi(first) is a symmetric function of the
  // second multiset; required for drawing the two sides in either order.
  virtual bool conditional_symmetric() const = 0;

  // log chi(sizes): prior probability that the seating of sum(sizes)
  // elements produces blocks of exactly these sizes. 0 for the empty
  // multiset; invariant under permutation of sizes.
  double log_chi(const std::vector<int>& sizes) const;

  // log [chi(first union second) / chi(first)] where the first side has
  // first_blocks blocks over first_total elements. first_blocks = 0 with
  // first_total = 0 reduces to log_chi(second_sizes).
  double log_chi_conditional(int first_blocks, int first_total,
                             const std::vector<int>& second_sizes) const;
  double log_chi_conditional(const std::vector<int>& first_sizes,
                             const std::vector<int>& second_sizes) const;

  // Sum over blocks of size e of grow factors for sizes 1..e-1; the log
  // within-block weight of one block.
  double log_block_product(int size) const;

  // eta0 plus per-coordinate jump weights for the pair; all sum to 1.
  EtaWeights eta_weights(const SPath& s_plus, const SPath& s_minus) const;

  // Prediction rule given current block sizes; weights sum to 1. An empty
  // multiset gives new_block = 1.
  PredictiveWeights predictive_weights(const std::vector<int>& sizes) const;
};

// Two-parameter Poisson-Dirichlet process with discount a and strength b,
// 0 <= a < 1, b > -a. a = 0 is the Dirichlet process with total mass b.
class PitmanYor final : public SpeciesModel {
 public:
  PitmanYor(double a, double b);

  double discount() const { return a_; }
  double strength() const { return b_; }

  double log_open_factor(int existing) const override;
  double log_grow_factor(int size) const override;
  double log_seat_factor(int k) const override;
  bool conditional_symmetric() const override { return true; }

 private:
  double a_;
  double b_;
};

}  // namespace unimix
