#include "unimix/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace unimix {

CenteredData center(const std::vector<double>& observations, double theta) {
  if (observations.empty()) throw std::invalid_argument("centering requires at least one observation");
  CenteredData out;
  out.theta = theta;
  for (double obs : observations) {
    double gap = obs - theta;
    if (gap > 0.0) {
      out.y.push_back(gap);
    } else if (gap < 0.0) {
      out.z_abs.push_back(-gap);
    } else {
      ++out.zero_gaps;
    }
  }
  std::sort(out.y.begin(), out.y.end());
  std::sort(out.z_abs.begin(), out.z_abs.end());
  return out;
}

double log_phi_plus(const SpeciesModel& model, const BaseMeasure& base, const CenteredData& data,
                    const SPath& s_plus) {
  if (s_plus.n() != data.n_plus()) {
    throw std::invalid_argument("plus path length must equal the positive gap count");
  }
  if (s_plus.n() == 0) return 0.0;
  LogFact lf(s_plus.n());
  double out = lf.log_path_count(s_plus) + model.log_chi(s_plus.jump_sizes());
  for (int j = 1; j <= s_plus.n(); ++j) {
    if (s_plus.is_jump(j)) {
      out += base.log_tail_moment(s_plus.increment(j), data.y[static_cast<std::size_t>(j - 1)]);
    }
  }
  return out;
}

double log_phi_minus(const SpeciesModel& model, const BaseMeasure& base, const CenteredData& data,
                     const SPath& s_minus, int plus_blocks) {
  if (s_minus.n() != data.n_minus()) {
    throw std::invalid_argument("minus path length must equal the negative gap count");
  }
  if (s_minus.n() == 0) return 0.0;
  LogFact lf(s_minus.n());
  double out = lf.log_path_count(s_minus) +
               model.log_chi_conditional(plus_blocks, data.n_plus(), s_minus.jump_sizes());
  for (int j = 1; j <= s_minus.n(); ++j) {
    if (s_minus.is_jump(j)) {
      out += base.log_tail_moment(s_minus.increment(j), data.z_abs[static_cast<std::size_t>(j - 1)]);
    }
  }
  return out;
}

double log_phi_minus(const SpeciesModel& model, const BaseMeasure& base, const CenteredData& data,
                     const SPath& s_minus, const SPath& s_plus) {
  return log_phi_minus(model, base, data, s_minus, s_plus.block_count());
}

ExactJoint exact_joint(const SpeciesModel& model, const BaseMeasure& base, const CenteredData& data,
                       int path_cap) {
  if (data.zero_gaps > 0) {
    throw std::domain_error("an observation coincides with the mode; the conditional posterior has zero mass");
  }
  auto plus = enumerate_paths(data.n_plus(), path_cap);
  auto minus = enumerate_paths(data.n_minus(), path_cap);
  ExactJoint out;
  out.pairs.reserve(plus.size() * minus.size());
  std::vector<double> lw;
  lw.reserve(plus.size() * minus.size());
  LogSum z;
  for (const SPath& sp : plus) {
    double lp = log_phi_plus(model, base, data, sp);
    int kp = sp.block_count();
    for (const SPath& sm : minus) {
      double l = lp + log_phi_minus(model, base, data, sm, kp);
      out.pairs.push_back(PathPair{sp, sm});
      lw.push_back(l);
      z.add(l);
    }
  }
  out.log_normalizer = z.log_total();
  out.prob.reserve(lw.size());
  for (double l : lw) out.prob.push_back(std::exp(l - out.log_normalizer));
  return out;
}

DensityKernel::DensityKernel(const SpeciesModel& model, const BaseMeasure& base,
                             const CenteredData& data, const SPath& s_plus, const SPath& s_minus)
    : base_(&base), theta_(data.theta) {
  if (s_plus.n() != data.n_plus() || s_minus.n() != data.n_minus()) {
    throw std::invalid_argument("kernel paths must match the centered data's side counts");
  }
  int total = data.total();
  if (total == 0) {
    eta0_ = 1.0;
    return;
  }
  int blocks = s_plus.block_count() + s_minus.block_count();
  double log_denom = model.log_seat_factor(total + 1);
  eta0_ = std::exp(model.log_open_factor(blocks) - log_denom);
  for (int j = 1; j <= s_plus.n(); ++j) {
    if (s_plus.is_jump(j)) {
      int nu = s_plus.increment(j);
      plus_.push_back(Term{nu, data.y[static_cast<std::size_t>(j - 1)],
                           std::exp(model.log_grow_factor(nu) - log_denom)});
    }
  }
  for (int j = 1; j <= s_minus.n(); ++j) {
    if (s_minus.is_jump(j)) {
      int nu = s_minus.increment(j);
      minus_.push_back(Term{nu, data.z_abs[static_cast<std::size_t>(j - 1)],
                            std::exp(model.log_grow_factor(nu) - log_denom)});
    }
  }
}

double DensityKernel::operator()(double t) const {
  double shift = t - theta_;
  const std::vector<Term>& terms = shift >= 0.0 ? plus_ : minus_;
  double dist = std::fabs(shift);
  double v = eta0_ * std::exp(base_->log_tail_moment(1, dist));
  for (const Term& term : terms) {
    v += term.eta * std::exp(log_d_plus(*base_, term.nu, term.cutoff, dist));
  }
  return v;
}

double a_f(const SpeciesModel& model, const BaseMeasure& base, const CenteredData& data,
           const PathPair& pair, double t) {
  return DensityKernel(model, base, data, pair.s_plus, pair.s_minus)(t);
}

TwoSideExactEngine::TwoSideExactEngine(const SpeciesModel& model, const BaseMeasure& base,
                                       const CenteredData& data, std::vector<double> t_grid)
    : model_(&model),
      base_(&base),
      theta_(data.theta),
      n_(data.n_plus()),
      m_(data.n_minus()),
      t_grid_(std::move(t_grid)) {
  if (data.zero_gaps > 0) {
    throw std::domain_error("an observation coincides with the mode; the conditional posterior has zero mass");
  }
  int total = n_ + m_;
  if (total == 0) throw std::invalid_argument("exact engine needs at least one observation");
  if (!std::is_sorted(t_grid_.begin(), t_grid_.end())) {
    throw std::invalid_argument("density grid must be ascending");
  }
  split_ = static_cast<std::size_t>(
      std::lower_bound(t_grid_.begin(), t_grid_.end(), theta_) - t_grid_.begin());
  copen_.resize(static_cast<std::size_t>(total) + 1);
  copen_[0] = 0.0;
  for (int j = 1; j <= total; ++j) {
    copen_[static_cast<std::size_t>(j)] = copen_[static_cast<std::size_t>(j - 1)] + model_->log_open_factor(j);
  }
  seat_plus_ = 0.0;
  for (int k = 2; k <= n_; ++k) seat_plus_ += model_->log_seat_factor(k);
  seat_minus_ = 0.0;
  for (int k = std::max(n_, 1) + 1; k <= total; ++k) seat_minus_ += model_->log_seat_factor(k);
  f_.resize(static_cast<std::size_t>(n_) + 1);
  e_.resize(static_cast<std::size_t>(m_) + 1);
  up_.assign(static_cast<std::size_t>(n_) + 1, std::vector<LogSum>(t_grid_.size() - split_));
  um_.assign(static_cast<std::size_t>(m_) + 1, std::vector<LogSum>(split_));
}

double TwoSideExactEngine::open_sum(int plus_blocks, int minus_blocks) const {
  if (minus_blocks == 0) return 0.0;
  if (plus_blocks == 0) return copen_[static_cast<std::size_t>(minus_blocks - 1)];
  return copen_[static_cast<std::size_t>(plus_blocks + minus_blocks - 1)] -
         copen_[static_cast<std::size_t>(plus_blocks - 1)];
}

void TwoSideExactEngine::add_plus(double log_multiplicity,
                                  const std::vector<std::pair<int, double>>& blocks) {
  int k = static_cast<int>(blocks.size());
  double lw = log_multiplicity - seat_plus_;
  if (k >= 1) lw += copen_[static_cast<std::size_t>(k - 1)];
  for (const auto& [e, q] : blocks) {
    lw += model_->log_block_product(e) + base_->log_tail_moment(e, q);
  }
  f_[static_cast<std::size_t>(k)].add(lw);
  for (std::size_t ti = split_; ti < t_grid_.size(); ++ti) {
    double shift = t_grid_[ti] - theta_;
    double u = 0.0;
    for (const auto& [e, q] : blocks) {
      u += std::exp(model_->log_grow_factor(e) + log_d_plus(*base_, e, q, shift));
    }
    up_[static_cast<std::size_t>(k)][ti - split_].add(lw, u);
  }
}

void TwoSideExactEngine::add_minus(double log_multiplicity,
                                   const std::vector<std::pair<int, double>>& blocks) {
  int mb = static_cast<int>(blocks.size());
  double lw = log_multiplicity - seat_minus_;
  for (const auto& [e, q] : blocks) {
    lw += model_->log_block_product(e) + base_->log_tail_moment(e, q);
  }
  e_[static_cast<std::size_t>(mb)].add(lw);
  for (std::size_t ti = 0; ti < split_; ++ti) {
    double shift = theta_ - t_grid_[ti];
    double u = 0.0;
    for (const auto& [e, q] : blocks) {
      u += std::exp(model_->log_grow_factor(e) + log_d_minus(*base_, e, q, shift));
    }
    um_[static_cast<std::size_t>(mb)][ti].add(lw, u);
  }
}

double TwoSideExactEngine::log_normalizer() const {
  LogSum z;
  for (int k = 0; k <= n_; ++k) {
    double lf = f_[static_cast<std::size_t>(k)].log_total();
    if (lf == neg_inf) continue;
    for (int mb = 0; mb <= m_; ++mb) {
      double le = e_[static_cast<std::size_t>(mb)].log_total();
      if (le == neg_inf) continue;
      z.add(lf + le + open_sum(k, mb));
    }
  }
  return z.log_total();
}

std::vector<double> TwoSideExactEngine::density() const {
  std::vector<double> out(t_grid_.size(), 0.0);
  double lz = log_normalizer();
  if (lz == neg_inf) return out;
  int total = n_ + m_;
  double lseat = model_->log_seat_factor(total + 1);
  std::vector<double> lf(static_cast<std::size_t>(n_) + 1);
  std::vector<double> le(static_cast<std::size_t>(m_) + 1);
  for (int k = 0; k <= n_; ++k) lf[static_cast<std::size_t>(k)] = f_[static_cast<std::size_t>(k)].log_total();
  for (int mb = 0; mb <= m_; ++mb) le[static_cast<std::size_t>(mb)] = e_[static_cast<std::size_t>(mb)].log_total();
  for (std::size_t ti = 0; ti < t_grid_.size(); ++ti) {
    bool plus_side = ti >= split_;
    double dist = std::fabs(t_grid_[ti] - theta_);
    double d0 = std::exp(base_->log_tail_moment(1, dist));
    LogSum num;
    for (int k = 0; k <= n_; ++k) {
      double lup = neg_inf;
      if (plus_side) lup = up_[static_cast<std::size_t>(k)][ti - split_].log_total();
      if (lf[static_cast<std::size_t>(k)] == neg_inf && lup == neg_inf) continue;
      for (int mb = 0; mb <= m_; ++mb) {
        if (le[static_cast<std::size_t>(mb)] == neg_inf) continue;
        double lopen = open_sum(k, mb);
        if (lf[static_cast<std::size_t>(k)] != neg_inf) {
          // New-block component; k + mb >= 1 whenever mass exists.
          num.add(lf[static_cast<std::size_t>(k)] + le[static_cast<std::size_t>(mb)] + lopen +
                      model_->log_open_factor(k + mb),
                  d0);
          if (!plus_side) {
            num.add(lf[static_cast<std::size_t>(k)] +
                    um_[static_cast<std::size_t>(mb)][ti].log_total() + lopen);
          }
        }
        if (plus_side && lup != neg_inf) {
          num.add(lup + le[static_cast<std::size_t>(mb)] + lopen);
        }
      }
    }
    out[ti] = std::exp(num.log_total() - lz - lseat);
  }
  return out;
}

namespace {

std::vector<std::pair<int, double>> path_blocks(const SPath& s, const std::vector<double>& cutoffs) {
  std::vector<std::pair<int, double>> blocks;
  for (int j = 1; j <= s.n(); ++j) {
    if (s.is_jump(j)) blocks.emplace_back(s.increment(j), cutoffs[static_cast<std::size_t>(j - 1)]);
  }
  return blocks;
}

}  // namespace

DensityGrid exact_density_given_theta(const SpeciesModel& model, const BaseMeasure& base,
                                      const CenteredData& data, const std::vector<double>& t_grid,
                                      int path_cap) {
  TwoSideExactEngine engine(model, base, data, t_grid);
  LogFact lf(std::max(data.n_plus(), data.n_minus()) + 1);
  for (const SPath& s : enumerate_paths(data.n_plus(), path_cap)) {
    engine.add_plus(lf.log_path_count(s), path_blocks(s, data.y));
  }
  for (const SPath& s : enumerate_paths(data.n_minus(), path_cap)) {
    engine.add_minus(lf.log_path_count(s), path_blocks(s, data.z_abs));
  }
  return DensityGrid{t_grid, engine.density()};
}

double ModePrior::log_density(double theta) const {
  if (theta < lo || theta > hi) return neg_inf;
  return -std::log(hi - lo);
}

ModePrior default_mode_prior(const std::vector<double>& observations, double width) {
  if (observations.empty()) throw std::invalid_argument("mode prior requires observations");
  double mn = observations.front();
  double mx = observations.front();
  double mean = 0.0;
  for (double v : observations) {
    mn = std::min(mn, v);
    mx = std::max(mx, v);
    mean += v;
  }
  mean /= static_cast<double>(observations.size());
  double s = 0.0;
  if (observations.size() >= 2) {
    double ss = 0.0;
    for (double v : observations) ss += (v - mean) * (v - mean);
    s = std::sqrt(ss / static_cast<double>(observations.size() - 1));
  }
  if (!(s > 0.0) || !std::isfinite(s)) s = 1.0;
  ModePrior prior{mn - width * s, mx + width * s};
  if (!(prior.hi > prior.lo)) {
    prior.lo -= 0.5;
    prior.hi += 0.5;
  }
  return prior;
}

double log_theta_integrand(const SpeciesModel& model, const BaseMeasure& base,
                           const std::vector<double>& observations, const ModePrior& prior,
                           double theta, const PathPair& pair) {
  double lp = prior.log_density(theta);
  if (lp == neg_inf) return neg_inf;
  CenteredData data = center(observations, theta);
  if (data.zero_gaps > 0) return neg_inf;
  return log_phi_plus(model, base, data, pair.s_plus) +
         log_phi_minus(model, base, data, pair.s_minus, pair.s_plus) + lp;
}

std::vector<double> make_theta_grid(const ModePrior& prior, const std::vector<double>& observations,
                                    int count) {
  if (count < 2) throw std::invalid_argument("theta grid needs at least 2 nodes");
  double span = prior.hi - prior.lo;
  double eps = std::max(span * 1e-9, 1e-12);
  std::vector<double> nodes;
  nodes.reserve(static_cast<std::size_t>(count) + 2 * observations.size());
  for (int i = 0; i < count; ++i) {
    nodes.push_back(prior.lo + span * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  for (double obs : observations) {
    if (obs > prior.lo + eps && obs < prior.hi - eps) {
      nodes.push_back(obs - eps);
      nodes.push_back(obs + eps);
    }
  }
  std::sort(nodes.begin(), nodes.end());
  std::vector<double> sorted_obs = observations;
  std::sort(sorted_obs.begin(), sorted_obs.end());
  std::vector<double> out;
  out.reserve(nodes.size());
  for (double node : nodes) {
    auto it = std::lower_bound(sorted_obs.begin(), sorted_obs.end(), node);
    double best = std::numeric_limits<double>::infinity();
    if (it != sorted_obs.end()) best = std::min(best, *it - node);
    if (it != sorted_obs.begin()) best = std::min(best, node - *(it - 1));
    if (best < 0.5 * eps) continue;  // node sits on an observation, where the integrand vanishes
    if (!out.empty() && node <= out.back()) continue;
    out.push_back(node);
  }
  return out;
}

namespace {

struct ThetaSweep {
  std::vector<double> weight;             // exp(log posterior mass - max), 0 where unsupported
  std::vector<std::vector<double>> rows;  // conditional density per node; empty when unsupported
};

ThetaSweep sweep_theta(const SpeciesModel& model, const BaseMeasure& base,
                       const std::vector<double>& observations, const ModePrior& prior,
                       const std::vector<double>& theta_grid, const std::vector<double>& t_grid,
                       int path_cap) {
  std::size_t g = theta_grid.size();
  std::vector<double> logw(g, neg_inf);
  ThetaSweep sweep;
  sweep.rows.resize(g);
  LogFact lf(static_cast<int>(observations.size()) + 1);
  for (std::size_t gi = 0; gi < g; ++gi) {
    double th = theta_grid[gi];
    double lp = prior.log_density(th);
    if (lp == neg_inf) continue;
    CenteredData data = center(observations, th);
    if (data.zero_gaps > 0) continue;
    TwoSideExactEngine engine(model, base, data, t_grid);
    for (const SPath& s : enumerate_paths(data.n_plus(), path_cap)) {
      engine.add_plus(lf.log_path_count(s), path_blocks(s, data.y));
    }
    for (const SPath& s : enumerate_paths(data.n_minus(), path_cap)) {
      engine.add_minus(lf.log_path_count(s), path_blocks(s, data.z_abs));
    }
    logw[gi] = engine.log_normalizer() + lp;
    if (!t_grid.empty()) sweep.rows[gi] = engine.density();
  }
  double max_lw = neg_inf;
  for (double l : logw) max_lw = std::max(max_lw, l);
  sweep.weight.assign(g, 0.0);
  if (max_lw == neg_inf) throw std::domain_error("mode posterior has zero mass on the whole grid");
  for (std::size_t gi = 0; gi < g; ++gi) {
    if (logw[gi] != neg_inf) sweep.weight[gi] = std::exp(logw[gi] - max_lw);
  }
  return sweep;
}

}  // namespace

DensityGrid exact_density_unknown_theta(const SpeciesModel& model, const BaseMeasure& base,
                                        const std::vector<double>& observations, const ModePrior& prior,
                                        const std::vector<double>& theta_grid,
                                        const std::vector<double>& t_grid, int path_cap) {
  if (theta_grid.size() < 2) throw std::invalid_argument("theta quadrature needs at least 2 nodes");
  ThetaSweep sweep = sweep_theta(model, base, observations, prior, theta_grid, t_grid, path_cap);
  std::size_t g = theta_grid.size();
  double denom = 0.0;
  std::vector<double> num(t_grid.size(), 0.0);
  for (std::size_t gi = 0; gi + 1 < g; ++gi) {
    double dt = theta_grid[gi + 1] - theta_grid[gi];
    denom += 0.5 * dt * (sweep.weight[gi] + sweep.weight[gi + 1]);
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
      double a = sweep.rows[gi].empty() ? 0.0 : sweep.weight[gi] * sweep.rows[gi][ti];
      double b = sweep.rows[gi + 1].empty() ? 0.0 : sweep.weight[gi + 1] * sweep.rows[gi + 1][ti];
      num[ti] += 0.5 * dt * (a + b);
    }
  }
  if (!(denom > 0.0)) throw std::domain_error("mode posterior has zero mass on the whole grid");
  DensityGrid out;
  out.t = t_grid;
  out.estimate.resize(t_grid.size());
  for (std::size_t ti = 0; ti < t_grid.size(); ++ti) out.estimate[ti] = num[ti] / denom;
  return out;
}

ModePosterior exact_mode_posterior(const SpeciesModel& model, const BaseMeasure& base,
                                   const std::vector<double>& observations, const ModePrior& prior,
                                   const std::vector<double>& theta_grid, int path_cap) {
  if (theta_grid.size() < 2) throw std::invalid_argument("theta quadrature needs at least 2 nodes");
  ThetaSweep sweep = sweep_theta(model, base, observations, prior, theta_grid, {}, path_cap);
  std::size_t g = theta_grid.size();
  double norm = 0.0;
  double first_moment = 0.0;
  for (std::size_t gi = 0; gi + 1 < g; ++gi) {
    double dt = theta_grid[gi + 1] - theta_grid[gi];
    norm += 0.5 * dt * (sweep.weight[gi] + sweep.weight[gi + 1]);
    first_moment += 0.5 * dt *
                    (theta_grid[gi] * sweep.weight[gi] + theta_grid[gi + 1] * sweep.weight[gi + 1]);
  }
  if (!(norm > 0.0)) throw std::domain_error("mode posterior has zero mass on the whole grid");
  ModePosterior out;
  out.theta = theta_grid;
  out.density.resize(g);
  for (std::size_t gi = 0; gi < g; ++gi) out.density[gi] = sweep.weight[gi] / norm;
  out.mean = first_moment / norm;
  return out;
}

}  // namespace unimix
