#include "unimix/partition_posterior.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace unimix {

namespace {

const std::vector<double>& side_cutoffs(const CenteredData& data, bool positive_side) {
  return positive_side ? data.y : data.z_abs;
}

// (size, cutoff) per cell; the cutoff is the side value at the cell's
// maximal index, which is the largest gap magnitude in the cell.
std::vector<std::pair<int, double>> partition_blocks(const Partition& p, const std::vector<double>& cutoffs) {
  std::vector<std::pair<int, double>> blocks;
  blocks.reserve(p.cells().size());
  for (const auto& cell : p.cells()) {
    blocks.emplace_back(static_cast<int>(cell.size()), cutoffs[static_cast<std::size_t>(cell.back() - 1)]);
  }
  return blocks;
}

double log_psi_plus(const SpeciesModel& model, const BaseMeasure& base, const CenteredData& data,
                    const Partition& p_plus) {
  double out = model.log_chi(p_plus.sizes());
  for (const auto& cell : p_plus.cells()) out += log_varphi_integral(base, cell, true, data);
  return out;
}

double log_psi_minus(const SpeciesModel& model, const BaseMeasure& base, const CenteredData& data,
                     const Partition& p_minus, int plus_blocks) {
  double out = model.log_chi_conditional(plus_blocks, data.n_plus(), p_minus.sizes());
  for (const auto& cell : p_minus.cells()) out += log_varphi_integral(base, cell, false, data);
  return out;
}

}  // namespace

double log_varphi_integral(const BaseMeasure& base, const std::vector<int>& cell, bool positive_side,
                           const CenteredData& data) {
  if (cell.empty()) throw std::invalid_argument("cell integral requires a non-empty cell");
  const std::vector<double>& cutoffs = side_cutoffs(data, positive_side);
  int max_index = *std::max_element(cell.begin(), cell.end());
  if (max_index < 1 || max_index > static_cast<int>(cutoffs.size())) {
    throw std::invalid_argument("cell index outside the side's range");
  }
  return base.log_tail_moment(static_cast<int>(cell.size()), cutoffs[static_cast<std::size_t>(max_index - 1)]);
}

ExactPartitionPosterior exact_partition_posterior(const SpeciesModel& model, const BaseMeasure& base,
                                                  const CenteredData& data, int partition_cap) {
  if (data.zero_gaps > 0) {
    throw std::domain_error("an observation coincides with the mode; the conditional posterior has zero mass");
  }
  auto plus = enumerate_partitions(data.n_plus(), partition_cap);
  auto minus = enumerate_partitions(data.n_minus(), partition_cap);
  ExactPartitionPosterior out;
  out.parts.reserve(plus.size() * minus.size());
  std::vector<double> lw;
  lw.reserve(plus.size() * minus.size());
  LogSum z;
  for (const Partition& pp : plus) {
    double lp = log_psi_plus(model, base, data, pp);
    int kp = pp.cell_count();
    for (const Partition& pm : minus) {
      double l = lp + log_psi_minus(model, base, data, pm, kp);
      out.parts.push_back(SplitPartition{pp, pm});
      lw.push_back(l);
      z.add(l);
    }
  }
  out.log_normalizer = z.log_total();
  out.prob.reserve(lw.size());
  for (double l : lw) out.prob.push_back(std::exp(l - out.log_normalizer));
  return out;
}

double partition_density_value(const SpeciesModel& model, const BaseMeasure& base,
                               const CenteredData& data, const SplitPartition& split, double t) {
  int total = data.total();
  double shift = t - data.theta;
  double dist = std::fabs(shift);
  if (total == 0) return std::exp(base.log_tail_moment(1, dist));
  int blocks = split.p_plus.cell_count() + split.p_minus.cell_count();
  double log_denom = model.log_seat_factor(total + 1);
  double v = std::exp(model.log_open_factor(blocks) - log_denom + base.log_tail_moment(1, dist));
  const Partition& side = shift >= 0.0 ? split.p_plus : split.p_minus;
  const std::vector<double>& cutoffs = side_cutoffs(data, shift >= 0.0);
  for (const auto& cell : side.cells()) {
    int e = static_cast<int>(cell.size());
    double q = cutoffs[static_cast<std::size_t>(cell.back() - 1)];
    v += std::exp(model.log_grow_factor(e) - log_denom + log_d_plus(base, e, q, dist));
  }
  return v;
}

DensityGrid exact_density(const SpeciesModel& model, const BaseMeasure& base, const CenteredData& data,
                          const std::vector<double>& t_grid, int partition_cap) {
  TwoSideExactEngine engine(model, base, data, t_grid);
  for (const Partition& p : enumerate_partitions(data.n_plus(), partition_cap)) {
    engine.add_plus(0.0, partition_blocks(p, data.y));
  }
  for (const Partition& p : enumerate_partitions(data.n_minus(), partition_cap)) {
    engine.add_minus(0.0, partition_blocks(p, data.z_abs));
  }
  return DensityGrid{t_grid, engine.density()};
}

double conditional_uniformity_check(const SpeciesModel& model, const BaseMeasure& base,
                                    const CenteredData& data, int partition_cap) {
  ExactPartitionPosterior table = exact_partition_posterior(model, base, data, partition_cap);
  using Key = std::pair<std::vector<int>, std::vector<int>>;
  std::map<Key, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < table.parts.size(); ++i) {
    groups[Key{path_of_partition(table.parts[i].p_plus).coords(),
               path_of_partition(table.parts[i].p_minus).coords()}]
        .push_back(i);
  }
  double worst = 0.0;
  for (const auto& [key, members] : groups) {
    double pair_mass = 0.0;
    for (std::size_t i : members) pair_mass += table.prob[i];
    BigInt classes = count_corresponding_partitions(SPath(key.first)) *
                     count_corresponding_partitions(SPath(key.second));
    double uniform = 1.0 / static_cast<double>(classes);
    for (std::size_t i : members) {
      worst = std::max(worst, std::fabs(table.prob[i] / pair_mass - uniform));
    }
  }
  return worst;
}

}  // namespace unimix
