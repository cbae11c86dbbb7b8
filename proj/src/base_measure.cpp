#include "unimix/base_measure.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "unimix/logsum.hpp"

namespace unimix {

ParetoMixture::ParetoMixture(double alpha, double delta) : alpha_(alpha), delta_(delta) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("shape constraint violated (alpha > 0): alpha = " + std::to_string(alpha));
  }
  if (!(delta > 0.0)) {
    throw std::invalid_argument("scale constraint violated (delta > 0): delta = " + std::to_string(delta));
  }
  log_scale_ = std::log(alpha_) + alpha_ * std::log(delta_) - std::log(2.0);
}

double ParetoMixture::density(double x) const {
  double ax = std::fabs(x);
  if (ax <= delta_) return 0.0;
  return std::exp(log_scale_ - (alpha_ + 1.0) * std::log(ax));
}

double ParetoMixture::log_tail_moment(int nu, double q) const {
  double cut = std::max(std::fabs(q), delta_);
  double anu = alpha_ + static_cast<double>(nu);
  return log_scale_ - std::log(anu) - anu * std::log(cut);
}

double ParetoMixture::log_tail_moment_integral(int nu, double hi) const {
  double anu = alpha_ + static_cast<double>(nu);
  // anu > 1 holds for every nu >= 1, so the power-law tail integrates.
  double log_tail_from_delta = log_scale_ - std::log(anu) - std::log(anu - 1.0) - (anu - 1.0) * std::log(delta_);
  if (hi >= delta_) {
    return log_scale_ - std::log(anu) - std::log(anu - 1.0) - (anu - 1.0) * std::log(hi);
  }
  // Plateau piece over [hi, delta) plus the power-law tail.
  double log_plateau_rate = log_tail_moment(nu, delta_);
  return log_add(log_plateau_rate + std::log(delta_ - hi), log_tail_from_delta);
}

double log_d_plus(const BaseMeasure& base, int nu, double y, double shift) {
  if (nu == 0) return base.log_tail_moment(1, shift);
  return base.log_tail_moment(nu + 1, std::max(shift, y)) - base.log_tail_moment(nu, y);
}

double log_d_minus(const BaseMeasure& base, int nu, double z_abs, double shift) {
  return log_d_plus(base, nu, z_abs, shift);
}

}  // namespace unimix
