#include "unimix/species.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace unimix {

double SpeciesModel::log_chi(const std::vector<int>& sizes) const {
  if (sizes.empty()) return 0.0;
  int blocks = static_cast<int>(sizes.size());
  int total = std::accumulate(sizes.begin(), sizes.end(), 0);
  double out = 0.0;
  for (int i = 1; i < blocks; ++i) out += log_open_factor(i);
  for (int e : sizes) out += log_block_product(e);
  for (int k = 2; k <= total; ++k) out -= log_seat_factor(k);
  return out;
}

double SpeciesModel::log_chi_conditional(int first_blocks, int first_total,
                                         const std::vector<int>& second_sizes) const {
  if (second_sizes.empty()) return 0.0;
  if (first_blocks == 0) return log_chi(second_sizes);
  int blocks = static_cast<int>(second_sizes.size());
  int total = std::accumulate(second_sizes.begin(), second_sizes.end(), 0);
  double out = 0.0;
  for (int i = 1; i <= blocks; ++i) out += log_open_factor(first_blocks + i - 1);
  for (int e : second_sizes) out += log_block_product(e);
  for (int k = first_total + 1; k <= first_total + total; ++k) out -= log_seat_factor(k);
  return out;
}

double SpeciesModel::log_chi_conditional(const std::vector<int>& first_sizes,
                                         const std::vector<int>& second_sizes) const {
  int first_total = std::accumulate(first_sizes.begin(), first_sizes.end(), 0);
  return log_chi_conditional(static_cast<int>(first_sizes.size()), first_total, second_sizes);
}

double SpeciesModel::log_block_product(int size) const {
  double out = 0.0;
  for (int i = 1; i < size; ++i) out += log_grow_factor(i);
  return out;
}

EtaWeights SpeciesModel::eta_weights(const SPath& s_plus, const SPath& s_minus) const {
  EtaWeights w;
  w.plus.assign(static_cast<std::size_t>(s_plus.n()) + 1, 0.0);
  w.minus.assign(static_cast<std::size_t>(s_minus.n()) + 1, 0.0);
  int total = s_plus.n() + s_minus.n();
  if (total == 0) {
    w.eta0 = 1.0;
    return w;
  }
  int blocks = s_plus.block_count() + s_minus.block_count();
  double log_denom = log_seat_factor(total + 1);
  w.eta0 = std::exp(log_open_factor(blocks) - log_denom);
  for (int j = 1; j <= s_plus.n(); ++j) {
    if (s_plus.is_jump(j)) {
      w.plus[static_cast<std::size_t>(j)] = std::exp(log_grow_factor(s_plus.increment(j)) - log_denom);
    }
  }
  for (int j = 1; j <= s_minus.n(); ++j) {
    if (s_minus.is_jump(j)) {
      w.minus[static_cast<std::size_t>(j)] = std::exp(log_grow_factor(s_minus.increment(j)) - log_denom);
    }
  }
  return w;
}

PredictiveWeights SpeciesModel::predictive_weights(const std::vector<int>& sizes) const {
  PredictiveWeights w;
  if (sizes.empty()) {
    w.new_block = 1.0;
    return w;
  }
  int total = std::accumulate(sizes.begin(), sizes.end(), 0);
  double log_denom = log_seat_factor(total + 1);
  w.new_block = std::exp(log_open_factor(static_cast<int>(sizes.size())) - log_denom);
  w.per_block.reserve(sizes.size());
  for (int e : sizes) w.per_block.push_back(std::exp(log_grow_factor(e) - log_denom));
  return w;
}

PitmanYor::PitmanYor(double a, double b) : a_(a), b_(b) {
  if (!(a >= 0.0 && a < 1.0)) {
    throw std::invalid_argument("discount constraint violated (0 <= a < 1): a = " + std::to_string(a));
  }
  if (!(b > -a)) {
    throw std::invalid_argument("strength constraint violated (b > -a): b = " + std::to_string(b) +
                                ", a = " + std::to_string(a));
  }
}

double PitmanYor::log_open_factor(int existing) const {
  return std::log(b_ + static_cast<double>(existing) * a_);
}

double PitmanYor::log_grow_factor(int size) const {
  return std::log(static_cast<double>(size) - a_);
}

double PitmanYor::log_seat_factor(int k) const {
  return std::log(b_ + static_cast<double>(k) - 1.0);
}

}  // namespace unimix
