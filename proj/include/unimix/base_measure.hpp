#pragma once

// Base measure H of the species sampling model: the shape distribution of
// mixture components. The posterior needs only its density and the inverse
// tail moments m^(nu)(q) = integral over u >= max(|q|, support floor) of
// u^(-nu) H(du), evaluated in log scale.

namespace unimix {

class BaseMeasure {
 public:
  virtual ~BaseMeasure() = default;

  virtual double density(double x) const = 0;

  // nu >= 1 integer; the cutoff enters through |q|. Non-increasing in |q|,
  // constant below the support floor.
  virtual double log_tail_moment(int nu, double q) const = 0;

  // log of the integral of the nu-th tail moment's cutoff function over
  // cutoffs above hi: integral over u >= hi of m^(nu)(u) du, hi >= 0. Used
  // for closed-form tail mass of the posterior-mean density.
  virtual double log_tail_moment_integral(int nu, double hi) const = 0;
};

// Symmetric two-sided Pareto mixture with a gap: density
// alpha delta^alpha / (2 |x|^(alpha+1)) for |x| > delta, 0 inside the gap.
class ParetoMixture final : public BaseMeasure {
 public:
  ParetoMixture(double alpha, double delta);

  double alpha() const { return alpha_; }
  double delta() const { return delta_; }

  double density(double x) const override;
  double log_tail_moment(int nu, double q) const override;
  double log_tail_moment_integral(int nu, double hi) const override;

 private:
  double alpha_;
  double delta_;
  double log_scale_;  // log alpha + alpha log delta - log 2
};

// log of the plus-side density component d_nu at displacement shift = t -
// theta >= 0: for nu >= 1 the tail-moment ratio m^(nu+1)(max(shift, y)) /
// m^(nu)(y); for nu = 0 the new-block component m^(1)(shift), y unused.
double log_d_plus(const BaseMeasure& base, int nu, double y, double shift);

// Mirror for t < theta; shift = theta - t >= 0 and z_abs = |Z_j|.
double log_d_minus(const BaseMeasure& base, int nu, double z_abs, double shift);

}  // namespace unimix
