#pragma once

// S-paths, set partitions, their correspondence, and exact counting.
// An S-path over n items is an integer vector (S_0,...,S_n) with S_0 = 0,
// S_n = n, S_j <= j, nondecreasing. Indices j with S_j > S_{j-1} are jump
// locations; the increments at jumps are the block sizes of any
// corresponding partition, whose cells have exactly those maxima and sizes.

#include <cstddef>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace unimix {

using BigInt = boost::multiprecision::cpp_int;

class SPath {
 public:
  // The degenerate path over zero items.
  SPath() : coords_{0} {}

  // Validates the three path conditions; throws std::invalid_argument
  // naming the violated one (endpoint, ceiling, monotonicity).
  explicit SPath(std::vector<int> coords);

  int n() const { return static_cast<int>(coords_.size()) - 1; }
  int operator[](int j) const { return coords_[static_cast<std::size_t>(j)]; }
  const std::vector<int>& coords() const { return coords_; }

  // j in 1..n.
  bool is_jump(int j) const { return coords_[j] > coords_[j - 1]; }
  int increment(int j) const { return coords_[j] - coords_[j - 1]; }

  std::vector<int> jump_positions() const;
  // Increments at jumps, in jump order; their sum is n.
  std::vector<int> jump_sizes() const;
  // N(S), the number of jumps.
  int block_count() const;

  bool operator==(const SPath& o) const { return coords_ == o.coords_; }
  bool operator<(const SPath& o) const { return coords_ < o.coords_; }

 private:
  std::vector<int> coords_;
};

// The path (0,1,...,n): every element its own block.
SPath singleton_path(int n);

// Set partition of {1..n}. Canonical form: each cell ascending, cells
// ordered by maximal element; this aligns cell order with the jump order of
// the corresponding path.
class Partition {
 public:
  // Validates disjointness, coverage of {1..n}, and non-empty cells; throws
  // std::invalid_argument naming the failure. n = 0 with no cells is the
  // empty partition.
  Partition(std::vector<std::vector<int>> cells, int n);

  int n() const { return n_; }
  int cell_count() const { return static_cast<int>(cells_.size()); }
  const std::vector<std::vector<int>>& cells() const { return cells_; }
  std::vector<int> sizes() const;

  bool operator==(const Partition& o) const { return cells_ == o.cells_; }
  bool operator<(const Partition& o) const { return cells_ < o.cells_; }

 private:
  std::vector<std::vector<int>> cells_;
  int n_;
};

// Number of partitions corresponding to s: product over jumps j of
// binom(j-1-S_{j-1}, j-S_j); 1 for the degenerate n = 0 path.
BigInt count_corresponding_partitions(const SPath& s);

// The unique path whose jump locations are the cell maxima of p and whose
// increments are the cell sizes.
SPath path_of_partition(const Partition& p);

// All valid paths over n, lexicographic on coordinate vectors. Throws
// std::length_error when n exceeds the enumeration cap.
std::vector<SPath> enumerate_paths(int n, int cap = 14);

// All set partitions of {1..n} in restricted-growth-string order. Throws
// std::length_error when n exceeds the cap.
std::vector<Partition> enumerate_partitions(int n, int cap = 12);

// Exact path count (the n-th Catalan number) and partition count (the n-th
// Bell number).
BigInt count_paths(int n);
BigInt count_partitions(int n);

// One row of the path-versus-partition complexity table for a two-sided
// split (n, total-n): products of per-side counts and their ratio.
struct CountRow {
  int n_plus;
  int n_minus;
  BigInt path_product;
  BigInt partition_product;
  double ratio;  // path_product / partition_product, in [0, 1]
};

// Rows for n = total, total-2, ..., down to 0.
std::vector<CountRow> count_table(int total);

// Exact binomial coefficient; 0 outside 0 <= k <= n.
BigInt binom_exact(int n, int k);

// Cumulative log factorials, shared by log-scale binomial evaluations.
class LogFact {
 public:
  explicit LogFact(int max_n);
  double operator()(int k) const { return table_[static_cast<std::size_t>(k)]; }
  int max_n() const { return static_cast<int>(table_.size()) - 1; }
  // log binom(n, k); -inf outside 0 <= k <= n.
  double log_binom(int n, int k) const;
  // log of count_corresponding_partitions(s).
  double log_path_count(const SPath& s) const;

 private:
  std::vector<double> table_;
};

}  // namespace unimix
