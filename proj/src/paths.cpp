#include "unimix/paths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace unimix {

namespace {

std::string coords_string(const std::vector<int>& c) {
  std::string out = "(";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(c[i]);
  }
  return out + ")";
}

}  // namespace

SPath::SPath(std::vector<int> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw std::invalid_argument("path must have at least one coordinate");
  int n = static_cast<int>(coords_.size()) - 1;
  if (coords_.front() != 0 || coords_.back() != n) {
    throw std::invalid_argument("path endpoint condition violated (S_0 = 0, S_n = n required): " +
                                coords_string(coords_));
  }
  for (int j = 1; j < n; ++j) {
    if (coords_[j] > j) {
      throw std::invalid_argument("path ceiling condition violated (S_" + std::to_string(j) + " = " +
                                  std::to_string(coords_[j]) + " > " + std::to_string(j) + ")");
    }
  }
  for (int j = 0; j < n; ++j) {
    if (coords_[j] > coords_[j + 1]) {
      throw std::invalid_argument("path monotonicity violated at index " + std::to_string(j + 1) +
                                  ": " + coords_string(coords_));
    }
  }
}

std::vector<int> SPath::jump_positions() const {
  std::vector<int> out;
  for (int j = 1; j <= n(); ++j) {
    if (is_jump(j)) out.push_back(j);
  }
  return out;
}

std::vector<int> SPath::jump_sizes() const {
  std::vector<int> out;
  for (int j = 1; j <= n(); ++j) {
    if (is_jump(j)) out.push_back(increment(j));
  }
  return out;
}

int SPath::block_count() const {
  int k = 0;
  for (int j = 1; j <= n(); ++j) k += is_jump(j);
  return k;
}

SPath singleton_path(int n) {
  std::vector<int> c(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) c[static_cast<std::size_t>(j)] = j;
  return SPath(std::move(c));
}

Partition::Partition(std::vector<std::vector<int>> cells, int n) : cells_(std::move(cells)), n_(n) {
  if (n_ < 0) throw std::invalid_argument("partition ground set size must be non-negative");
  std::vector<char> seen(static_cast<std::size_t>(n_) + 1, 0);
  int covered = 0;
  for (auto& cell : cells_) {
    if (cell.empty()) throw std::invalid_argument("partition cell is empty");
    std::sort(cell.begin(), cell.end());
    for (int e : cell) {
      if (e < 1 || e > n_) {
        throw std::invalid_argument("partition element " + std::to_string(e) + " outside {1.." +
                                    std::to_string(n_) + "}");
      }
      if (seen[static_cast<std::size_t>(e)]) {
        throw std::invalid_argument("partition cells are not disjoint at element " + std::to_string(e));
      }
      seen[static_cast<std::size_t>(e)] = 1;
      ++covered;
    }
  }
  if (covered != n_) throw std::invalid_argument("partition cells do not cover {1..n}");
  std::sort(cells_.begin(), cells_.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) { return a.back() < b.back(); });
}

std::vector<int> Partition::sizes() const {
  std::vector<int> out;
  out.reserve(cells_.size());
  for (const auto& cell : cells_) out.push_back(static_cast<int>(cell.size()));
  return out;
}

BigInt binom_exact(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

BigInt count_corresponding_partitions(const SPath& s) {
  BigInt total = 1;
  for (int j = 1; j <= s.n(); ++j) {
    if (s.is_jump(j)) total *= binom_exact(j - 1 - s[j - 1], j - s[j]);
  }
  return total;
}

SPath path_of_partition(const Partition& p) {
  std::vector<int> inc(static_cast<std::size_t>(p.n()) + 1, 0);
  for (const auto& cell : p.cells()) {
    inc[static_cast<std::size_t>(cell.back())] = static_cast<int>(cell.size());
  }
  std::vector<int> coords(static_cast<std::size_t>(p.n()) + 1, 0);
  for (int j = 1; j <= p.n(); ++j) {
    coords[static_cast<std::size_t>(j)] = coords[static_cast<std::size_t>(j - 1)] + inc[static_cast<std::size_t>(j)];
  }
  return SPath(std::move(coords));
}

namespace {

void extend_paths(std::vector<int>& coords, int j, int n, std::vector<SPath>& out) {
  if (j == n) {
    out.emplace_back(coords);
    return;
  }
  // Coordinate j ranges over S_{j-1}..j; ascending choice keeps the overall
  // order lexicographic.
  int lo = coords[static_cast<std::size_t>(j - 1)];
  for (int v = lo; v <= j; ++v) {
    coords[static_cast<std::size_t>(j)] = v;
    extend_paths(coords, j + 1, n, out);
  }
  coords[static_cast<std::size_t>(j)] = lo;
}

}  // namespace

std::vector<SPath> enumerate_paths(int n, int cap) {
  if (n < 0) throw std::invalid_argument("path enumeration needs n >= 0");
  if (n > cap) {
    throw std::length_error("path enumeration cap exceeded: n = " + std::to_string(n) + " > cap = " +
                            std::to_string(cap));
  }
  std::vector<SPath> out;
  if (n == 0) {
    out.emplace_back(std::vector<int>{0});
    return out;
  }
  std::vector<int> coords(static_cast<std::size_t>(n) + 1, 0);
  coords[static_cast<std::size_t>(n)] = n;
  extend_paths(coords, 1, n, out);
  return out;
}

namespace {

void extend_rgs(std::vector<int>& label, int i, int max_label, int n, std::vector<Partition>& out) {
  if (i == n) {
    int blocks = max_label + 1;
    std::vector<std::vector<int>> cells(static_cast<std::size_t>(blocks));
    for (int e = 0; e < n; ++e) cells[static_cast<std::size_t>(label[static_cast<std::size_t>(e)])].push_back(e + 1);
    out.emplace_back(std::move(cells), n);
    return;
  }
  for (int v = 0; v <= max_label + 1; ++v) {
    label[static_cast<std::size_t>(i)] = v;
    extend_rgs(label, i + 1, std::max(max_label, v), n, out);
  }
}

}  // namespace

std::vector<Partition> enumerate_partitions(int n, int cap) {
  if (n < 0) throw std::invalid_argument("partition enumeration needs n >= 0");
  if (n > cap) {
    throw std::length_error("partition enumeration cap exceeded: n = " + std::to_string(n) +
                            " > cap = " + std::to_string(cap));
  }
  std::vector<Partition> out;
  if (n == 0) {
    out.emplace_back(std::vector<std::vector<int>>{}, 0);
    return out;
  }
  std::vector<int> label(static_cast<std::size_t>(n), 0);
  extend_rgs(label, 1, 0, n, out);
  return out;
}

BigInt count_paths(int n) {
  // Catalan recurrence C_i = C_{i-1} * 2(2i-1) / (i+1); each division exact.
  BigInt c = 1;
  for (int i = 1; i <= n; ++i) {
    c *= 2 * (2 * i - 1);
    c /= i + 1;
  }
  return c;
}

BigInt count_partitions(int n) {
  // Bell triangle: row r starts with the previous row's last entry; each
  // entry adds its left neighbor and the one above it.
  std::vector<BigInt> row{1};
  for (int r = 1; r <= n; ++r) {
    std::vector<BigInt> next;
    next.reserve(row.size() + 1);
    next.push_back(row.back());
    for (std::size_t i = 0; i < row.size(); ++i) next.push_back(next[i] + row[i]);
    row = std::move(next);
  }
  return row.front();
}

std::vector<CountRow> count_table(int total) {
  if (total < 0) throw std::invalid_argument("count table needs a non-negative total");
  std::vector<CountRow> rows;
  for (int n = total; n >= 0; n -= 2) {
    CountRow row;
    row.n_plus = n;
    row.n_minus = total - n;
    row.path_product = count_paths(n) * count_paths(total - n);
    row.partition_product = count_partitions(n) * count_partitions(total - n);
    row.ratio = static_cast<double>(row.path_product) / static_cast<double>(row.partition_product);
    rows.push_back(std::move(row));
  }
  return rows;
}

LogFact::LogFact(int max_n) {
  if (max_n < 0) max_n = 0;
  table_.resize(static_cast<std::size_t>(max_n) + 1);
  table_[0] = 0.0;
  for (int k = 1; k <= max_n; ++k) {
    table_[static_cast<std::size_t>(k)] = table_[static_cast<std::size_t>(k - 1)] + std::log(static_cast<double>(k));
  }
}

double LogFact::log_binom(int n, int k) const {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return (*this)(n) - (*this)(k) - (*this)(n - k);
}

double LogFact::log_path_count(const SPath& s) const {
  double total = 0.0;
  for (int j = 1; j <= s.n(); ++j) {
    if (s.is_jump(j)) total += log_binom(j - 1 - s[j - 1], j - s[j]);
  }
  return total;
}

}  // namespace unimix
