#pragma once

// Log-scale accumulation utilities. Importance weights routinely span
// hundreds of orders of magnitude, so sums are kept as (max, sum of
// exp-offsets) pairs and only exponentiated relative to the running maximum.

#include <cmath>
#include <limits>

namespace unimix {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow.
inline double log_add(double a, double b) {
  if (a == neg_inf) return b;
  if (b == neg_inf) return a;
  double hi = a > b ? a : b;
  double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

// Streaming sum of exp(log_w) * value terms, rescaled whenever a new maximum
// log weight arrives. value defaults to 1 so the same type accumulates plain
// weight totals.
class LogSum {
 public:
  void add(double log_w, double value = 1.0) {
    if (log_w == neg_inf || value == 0.0) return;
    if (log_w > max_) {
      double shrink = std::exp(max_ - log_w);
      sum_ *= shrink;
      max_ = log_w;
    }
    sum_ += std::exp(log_w - max_) * value;
  }

  bool empty() const { return max_ == neg_inf; }

  // log of the accumulated total; requires all values nonnegative.
  double log_total() const {
    if (empty() || sum_ <= 0.0) return neg_inf;
    return max_ + std::log(sum_);
  }

  // Total relative to an external offset: total = exp(offset) * rel_total.
  double rel_total(double offset) const {
    if (empty()) return 0.0;
    return std::exp(max_ - offset) * sum_;
  }

  double max_log() const { return max_; }

  void merge(const LogSum& other) {
    if (other.empty()) return;
    if (empty()) {
      *this = other;
      return;
    }
    if (other.max_ > max_) {
      sum_ = sum_ * std::exp(max_ - other.max_) + other.sum_;
      max_ = other.max_;
    } else {
      sum_ += other.sum_ * std::exp(other.max_ - max_);
    }
  }

 private:
  double max_ = neg_inf;
  double sum_ = 0.0;
};

// Weighted mean of scalar values under log-scale weights, with second
// moments retained for effective sample size and standard errors.
class WeightAccum {
 public:
  void add(double log_w, double value) {
    w_.add(log_w);
    w2_.add(2.0 * log_w);
    wv_.add(log_w, value);
    w2v_.add(2.0 * log_w, value);
    w2v2_.add(2.0 * log_w, value * value);
  }

  bool empty() const { return w_.empty(); }

  double mean() const {
    double off = w_.max_log();
    double denom = w_.rel_total(off);
    if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return wv_.rel_total(off) / denom;
  }

  // (sum w)^2 / sum w^2.
  double ess() const {
    if (empty()) return 0.0;
    double lw = w_.log_total();
    double lw2 = w2_.log_total();
    if (lw2 == neg_inf) return 0.0;
    return std::exp(2.0 * lw - lw2);
  }

  // Delta-method standard error of the self-normalized mean.
  double stderr_mean() const {
    double m = mean();
    double off = w_.max_log();
    double denom = w_.rel_total(off);
    if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    double off2 = 2.0 * off;
    double var_num = w2v2_.rel_total(off2) - 2.0 * m * w2v_.rel_total(off2) +
                     m * m * w2_.rel_total(off2);
    if (var_num < 0.0) var_num = 0.0;
    return std::sqrt(var_num) / denom;
  }

  double log_weight_total() const { return w_.log_total(); }

  void merge(const WeightAccum& other) {
    w_.merge(other.w_);
    w2_.merge(other.w2_);
    wv_.merge(other.wv_);
    w2v_.merge(other.w2v_);
    w2v2_.merge(other.w2v2_);
  }

 private:
  LogSum w_, w2_, wv_, w2v_, w2v2_;
};

}  // namespace unimix
