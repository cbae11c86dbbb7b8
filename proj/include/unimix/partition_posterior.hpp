#pragma once

// Partition-based posterior by brute-force enumeration: ground truth for
// the path-based engine on small samples. Cells never mix signs (cross-sign
// cells carry zero mass), so the two sides are enumerated separately.

#include <vector>

#include "unimix/posterior.hpp"

namespace unimix {

struct SplitPartition {
  Partition p_plus;
  Partition p_minus;
};

// log of the cell's likelihood integral: the e-th tail moment at the cell's
// largest cutoff, where e is the cell size. Indices are 1-based within the
// given side; positive_side selects y versus z_abs cutoffs.
double log_varphi_integral(const BaseMeasure& base, const std::vector<int>& cell, bool positive_side,
                           const CenteredData& data);

// Normalized posterior over split partitions, plus-major in enumeration
// order. Throws std::length_error past the cap and std::domain_error when
// an observation sits exactly at the mode.
struct ExactPartitionPosterior {
  std::vector<SplitPartition> parts;
  std::vector<double> prob;
  double log_normalizer;
};

ExactPartitionPosterior exact_partition_posterior(const SpeciesModel& model, const BaseMeasure& base,
                                                  const CenteredData& data, int partition_cap = 12);

// Partition-level posterior-mean density estimand: the predictive density
// given one split partition. Equals the path kernel of the corresponding
// path pair.
double partition_density_value(const SpeciesModel& model, const BaseMeasure& base,
                               const CenteredData& data, const SplitPartition& split, double t);

// Partition-based exact posterior-mean density; matches the path engine.
DensityGrid exact_density(const SpeciesModel& model, const BaseMeasure& base, const CenteredData& data,
                          const std::vector<double>& t_grid, int partition_cap = 12);

// Max over path pairs of the max deviation of the conditional partition
// probability from the uniform value 1 / (|C_plus| |C_minus|).
double conditional_uniformity_check(const SpeciesModel& model, const BaseMeasure& base,
                                    const CenteredData& data, int partition_cap = 12);

}  // namespace unimix
