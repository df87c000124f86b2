#include "dcw/choice_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <unordered_map>

#include "dcw/common.hpp"
#include "dcw/quadrature.hpp"
#include "dcw/rng.hpp"
#include "dcw/stats.hpp"

namespace dcw {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTailMass = 1e-14;  // quantile clipping for offset supports
}  // namespace

void BudgetPoint::validate() const {
  if (prices.empty()) throw config_error("budget point: at least one inside alternative required");
  for (double p : prices) {
    if (std::isnan(p) || p < 0.0) {
      throw config_error("budget point: prices must be non-negative");
    }
  }
  if (!(income > 0.0) || !std::isfinite(income)) {
    throw config_error("budget point: income must be positive and finite");
  }
}

// ---------------------------------------------------------------------------
// UtilityCurve
// ---------------------------------------------------------------------------

UtilityCurve::UtilityCurve(Kind k, double a, double b, double nu, double g)
    : kind_(k), intercept_(a), slope_(b), shift_(nu), exponent_(g) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(nu) || !std::isfinite(g)) {
    throw config_error("utility curve: parameters must be finite");
  }
}

UtilityCurve UtilityCurve::linear(double intercept, double slope) {
  return UtilityCurve(Kind::Linear, intercept, slope, 0.0, 1.0);
}

UtilityCurve UtilityCurve::log(double intercept, double slope, double shift) {
  if (!(shift > 0.0)) throw config_error("utility curve: log shift must be positive");
  return UtilityCurve(Kind::Log, intercept, slope, shift, 1.0);
}

UtilityCurve UtilityCurve::power(double intercept, double slope, double shift,
                                 double exponent) {
  if (!(shift >= 0.0)) throw config_error("utility curve: power shift must be non-negative");
  if (!(exponent > 0.0 && exponent <= 1.0)) {
    throw config_error("utility curve: exponent must lie in (0, 1]");
  }
  return UtilityCurve(Kind::Power, intercept, slope, shift, exponent);
}

double UtilityCurve::eval(double numeraire) const {
  switch (kind_) {
    case Kind::Linear:
      return std::isinf(numeraire) && numeraire < 0.0
                 ? (slope_ > 0.0 ? -kInf : (slope_ < 0.0 ? kInf : intercept_))
                 : intercept_ + slope_ * numeraire;
    case Kind::Log: {
      const double t = shift_ + numeraire;
      if (!(t > 0.0)) return slope_ > 0.0 ? -kInf : kInf;
      return intercept_ + slope_ * std::log(t);
    }
    case Kind::Power: {
      const double t = shift_ + numeraire;
      if (!(t >= 0.0)) return slope_ > 0.0 ? -kInf : kInf;
      return intercept_ + slope_ * std::pow(t, exponent_);
    }
  }
  return 0.0;
}

double UtilityCurve::inverse(double utility) const {
  switch (kind_) {
    case Kind::Linear:
      return (utility - intercept_) / slope_;
    case Kind::Log:
      return std::exp((utility - intercept_) / slope_) - shift_;
    case Kind::Power: {
      const double t = (utility - intercept_) / slope_;
      if (!(t >= 0.0)) return -shift_;  // below the curve's range
      return std::pow(t, 1.0 / exponent_) - shift_;
    }
  }
  return 0.0;
}

double UtilityCurve::slope_at(double numeraire) const {
  switch (kind_) {
    case Kind::Linear:
      return slope_;
    case Kind::Log: {
      const double t = shift_ + numeraire;
      return t > 0.0 ? slope_ / t : kInf;
    }
    case Kind::Power: {
      const double t = shift_ + numeraire;
      return t > 0.0 ? slope_ * exponent_ * std::pow(t, exponent_ - 1.0) : kInf;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// ChoiceModel implementation
// ---------------------------------------------------------------------------

namespace {

struct PointKey {
  std::vector<long long> q;
  bool operator==(const PointKey& o) const { return q == o.q; }
};

struct PointKeyHash {
  std::size_t operator()(const PointKey& k) const {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (long long v : k.q) h = mix64(h ^ static_cast<std::uint64_t>(v));
    return static_cast<std::size_t>(h);
  }
};

PointKey quantize(const BudgetPoint& point) {
  PointKey key;
  key.q.reserve(point.prices.size() + 1);
  for (double p : point.prices) {
    key.q.push_back(std::isinf(p) ? std::numeric_limits<long long>::max()
                                  : std::llround(p * 1e9));
  }
  key.q.push_back(std::llround(point.income * 1e9));
  return key;
}

}  // namespace

struct ChoiceModel::Impl {
  Kind kind;
  QuasilinearSpec ql;
  SyntheticSpec syn;
  SplineProbitSpec sp;

  // Synthetic bookkeeping: distribution of D_j = offset_j - offset_0 when
  // the rows are independent scalars; empty if the analytic route is off.
  std::vector<Distribution> offset_diffs;
  bool analytic = false;
  bool diffs_continuous = false;

  std::optional<SplineBasis> basis;  // spline-probit income basis

  mutable std::mutex cache_mu;
  mutable std::unordered_map<PointKey, std::vector<double>, PointKeyHash> sim_cache;

  int J() const {
    switch (kind) {
      case Kind::Quasilinear: return static_cast<int>(ql.taste_offsets.size());
      case Kind::Synthetic: return static_cast<int>(syn.curves.size()) - 1;
      case Kind::SplineProbit: return 1;
    }
    return 0;
  }

  std::vector<double> probs(const BudgetPoint& point) const;
  std::vector<double> probs_quasilinear(const BudgetPoint& point) const;
  std::vector<double> probs_synthetic(const BudgetPoint& point) const;
  std::vector<double> probs_simulated(const BudgetPoint& point) const;
  std::vector<double> probs_spline_probit(const BudgetPoint& point) const;

  double utility(int j, double numeraire, std::span<const double> eta) const;
};

namespace {

// Inside split for independent continuous offsets: q_j is a 1-D integral of
// f_j(t) * prod_{k != j} F_k(t - T_j + T_k) over t > T_j. The inside block
// is then rescaled to match the exact outside probability.
std::vector<double> independent_offset_probs(const std::vector<Distribution>& diffs,
                                             const std::vector<double>& thresholds) {
  const int J = static_cast<int>(diffs.size());
  std::vector<double> q(J + 1, 0.0);
  double q0 = 1.0;
  for (int j = 0; j < J; ++j) q0 *= diffs[j].cdf(thresholds[j]);
  q[0] = q0;
  if (J == 1) {
    q[1] = 1.0 - q0;
    return q;
  }
  double inside_sum = 0.0;
  for (int j = 0; j < J; ++j) {
    if (std::isinf(thresholds[j])) { q[j + 1] = 0.0; continue; }
    const double lo = std::max(thresholds[j], diffs[j].quantile(kTailMass));
    const double hi = diffs[j].quantile(1.0 - kTailMass);
    if (!(hi > lo)) { q[j + 1] = 0.0; continue; }
    const auto integrand = [&](double t) {
      double v = diffs[j].density(t);
      for (int k = 0; k < J; ++k) {
        if (k == j) continue;
        v *= diffs[k].cdf(t - thresholds[j] + thresholds[k]);
      }
      return v;
    };
    q[j + 1] = integrate_adaptive(integrand, lo, hi, 16, 1 << 15, 1e-11);
    inside_sum += q[j + 1];
  }
  // Enforce completeness exactly against the closed-form outside share.
  if (inside_sum > 0.0) {
    const double scale = (1.0 - q0) / inside_sum;
    for (int j = 1; j <= J; ++j) q[j] *= scale;
  }
  return q;
}

}  // namespace

std::vector<double> ChoiceModel::Impl::probs_quasilinear(const BudgetPoint& point) const {
  const int n = J();
  // Thresholds depend on prices only; income never enters.
  std::vector<double> thresholds(point.prices.begin(), point.prices.end());
  bool all_continuous = true;
  for (const auto& d : ql.taste_offsets) all_continuous &= d.is_continuous();
  if (n == 1) {
    std::vector<double> q(2, 0.0);
    q[0] = ql.taste_offsets[0].cdf(thresholds[0]);
    q[1] = 1.0 - q[0];
    return q;
  }
  if (all_continuous) return independent_offset_probs(ql.taste_offsets, thresholds);
  return probs_simulated(point);
}

std::vector<double> ChoiceModel::Impl::probs_synthetic(const BudgetPoint& point) const {
  const bool want_quadrature =
      syn.integration == SyntheticSpec::Integration::Quadrature ||
      (syn.integration == SyntheticSpec::Integration::Auto && analytic);
  if (!want_quadrature) return probs_simulated(point);
  if (!analytic) {
    throw numerical_error(
        "synthetic model: quadrature evaluation requires independent scalar offsets");
  }
  const int n = J();
  const double u0 = syn.curves[0].eval(point.income);
  if (!std::isfinite(u0)) {
    throw numerical_error("synthetic model: outside utility not finite at this income");
  }
  std::vector<double> thresholds(n);
  for (int j = 0; j < n; ++j) {
    const double uj = syn.curves[j + 1].eval(point.income - point.prices[j]);
    thresholds[j] = std::isfinite(uj) ? u0 - uj : kInf;
  }
  if (n == 1) {
    std::vector<double> q(2, 0.0);
    q[0] = offset_diffs[0].cdf(thresholds[0]);
    q[1] = 1.0 - q[0];
    return q;
  }
  if (!diffs_continuous) return probs_simulated(point);
  return independent_offset_probs(offset_diffs, thresholds);
}

std::vector<double> ChoiceModel::Impl::probs_simulated(const BudgetPoint& point) const {
  const PointKey key = quantize(point);
  {
    std::lock_guard<std::mutex> lock(cache_mu);
    auto it = sim_cache.find(key);
    if (it != sim_cache.end()) return it->second;
  }
  const int n = J();
  const int K = kind == Kind::Quasilinear ? n : static_cast<int>(syn.eta.size());
  const std::uint64_t seed = kind == Kind::Quasilinear ? 1 : syn.seed;
  const int n_sim = kind == Kind::Quasilinear ? 100000 : syn.n_sim;
  const CounterRng rng(seed);
  std::vector<long long> counts(n + 1, 0);
  std::vector<double> eta(K);
  for (int i = 0; i < n_sim; ++i) {
    for (int k = 0; k < K; ++k) {
      eta[k] = (kind == Kind::Quasilinear ? ql.taste_offsets[k] : syn.eta[k])
                   .quantile(rng.uniform(k + 1, i));
    }
    int best = 0;
    double best_u = utility(0, point.income, eta);
    for (int j = 1; j <= n; ++j) {
      const double u = utility(j, point.income - point.prices[j - 1], eta);
      if (u > best_u) { best_u = u; best = j; }
    }
    ++counts[best];
  }
  std::vector<double> q(n + 1);
  for (int j = 0; j <= n; ++j) q[j] = static_cast<double>(counts[j]) / n_sim;
  {
    std::lock_guard<std::mutex> lock(cache_mu);
    sim_cache.emplace(key, q);
  }
  return q;
}

std::vector<double> ChoiceModel::Impl::probs_spline_probit(const BudgetPoint& point) const {
  const double p = point.prices[0];
  double index = 0.0;
  if (std::isinf(p)) {
    if (sp.beta_price < 0.0) {
      return {1.0, 0.0};
    }
    // beta_price == 0: the price term vanishes.
  } else {
    index += sp.beta_price * p;
  }
  const double y = std::clamp(point.income, sp.y_min, sp.y_max);
  index += basis->value(sp.beta_spline, y);
  index += sp.beta_covariates[0];
  for (std::size_t i = 0; i < sp.covariate_profile.size(); ++i) {
    index += sp.beta_covariates[i + 1] * sp.covariate_profile[i];
  }
  const double q1 = norm_cdf(index);
  return {1.0 - q1, q1};
}

std::vector<double> ChoiceModel::Impl::probs(const BudgetPoint& point) const {
  point.validate();
  if (point.num_inside() != J()) {
    throw std::invalid_argument("choice model: price vector length does not match J");
  }
  switch (kind) {
    case Kind::Quasilinear: return probs_quasilinear(point);
    case Kind::Synthetic: return probs_synthetic(point);
    case Kind::SplineProbit: return probs_spline_probit(point);
  }
  return {};
}

double ChoiceModel::Impl::utility(int j, double numeraire, std::span<const double> eta) const {
  if (kind == Kind::Quasilinear) {
    if (j == 0) return numeraire;
    return numeraire + eta[j - 1];
  }
  if (kind == Kind::Synthetic) {
    double offset = syn.offset_constants[j];
    for (std::size_t k = 0; k < syn.eta.size(); ++k) {
      offset += syn.loadings[j][k] * eta[k];
    }
    const double base = syn.curves[j].eval(numeraire);
    return std::isfinite(base) ? base + offset : base;
  }
  throw std::invalid_argument("utilities are not available for estimated models");
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

ChoiceModel ChoiceModel::quasilinear(QuasilinearSpec spec) {
  if (spec.taste_offsets.empty()) {
    throw config_error("quasilinear model: at least one taste offset required");
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Quasilinear;
  impl->ql = std::move(spec);
  return ChoiceModel(std::move(impl));
}

ChoiceModel ChoiceModel::synthetic(SyntheticSpec spec) {
  const std::size_t n_alts = spec.curves.size();
  if (n_alts < 2) throw config_error("synthetic model: need outside option plus one alternative");
  if (spec.offset_constants.size() != n_alts || spec.loadings.size() != n_alts) {
    throw config_error("synthetic model: offset blocks must cover every alternative");
  }
  const std::size_t K = spec.eta.size();
  for (const auto& row : spec.loadings) {
    if (row.size() != K) throw config_error("synthetic model: loading row length mismatch");
    for (double v : row) {
      if (!std::isfinite(v)) throw config_error("synthetic model: loadings must be finite");
    }
  }
  for (double v : spec.offset_constants) {
    if (!std::isfinite(v)) throw config_error("synthetic model: offsets must be finite");
  }
  if (spec.n_sim < 1) throw config_error("synthetic model: n_sim must be positive");

  // Monotonicity check: 1000 eta draws x 20 numeraire points.
  {
    const CounterRng rng(spec.seed ^ 0xA5A5A5A5ULL);
    std::vector<double> eta(K);
    constexpr int kDraws = 1000;
    constexpr int kPoints = 20;
    for (int d = 0; d < kDraws; ++d) {
      for (std::size_t k = 0; k < K; ++k) {
        eta[k] = spec.eta[k].quantile(rng.uniform(k + 1, d));
      }
      for (std::size_t j = 0; j < n_alts; ++j) {
        double prev = -kInf;
        bool seen_finite = false;
        for (int t = 0; t < kPoints; ++t) {
          const double n = 1000.0 * t / (kPoints - 1);
          double offset = spec.offset_constants[j];
          for (std::size_t k = 0; k < K; ++k) offset += spec.loadings[j][k] * eta[k];
          const double base = spec.curves[j].eval(n);
          const double u = std::isfinite(base) ? base + offset : base;
          if (std::isfinite(u)) {
            if (seen_finite && !(u > prev)) {
              throw config_error("synthetic model: utility not strictly increasing in the numeraire");
            }
            seen_finite = true;
            prev = u;
          } else if (seen_finite) {
            throw config_error("synthetic model: utility leaves its domain at high numeraire");
          }
        }
        if (!seen_finite) {
          throw config_error("synthetic model: utility undefined on the validation range");
        }
      }
    }
  }

  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Synthetic;
  impl->syn = std::move(spec);
  const auto& s = impl->syn;
  const int J = static_cast<int>(n_alts) - 1;

  // Detect independent scalar offset differences D_j = offset_j - offset_0.
  bool analytic = true;
  bool continuous = true;
  std::vector<int> used_cols;
  std::vector<Distribution> diffs;
  for (int j = 1; j <= J && analytic; ++j) {
    int col = -1;
    for (std::size_t k = 0; k < K; ++k) {
      const double d = s.loadings[j][k] - s.loadings[0][k];
      if (d != 0.0) {
        if (col >= 0) { analytic = false; break; }
        col = static_cast<int>(k);
      }
    }
    if (!analytic) break;
    const double delta = s.offset_constants[j] - s.offset_constants[0];
    if (col < 0) {
      diffs.push_back(Distribution::degenerate(delta));
      continuous = false;
    } else {
      if (std::find(used_cols.begin(), used_cols.end(), col) != used_cols.end()) {
        analytic = false;
        break;
      }
      used_cols.push_back(col);
      const double a = s.loadings[j][col] - s.loadings[0][col];
      diffs.push_back(s.eta[col].affine(a, delta));
      continuous &= diffs.back().is_continuous();
    }
  }
  impl->analytic = analytic;
  impl->diffs_continuous = continuous && analytic;
  if (analytic) impl->offset_diffs = std::move(diffs);
  return ChoiceModel(std::move(impl));
}

ChoiceModel ChoiceModel::spline_probit(SplineProbitSpec spec) {
  if (spec.beta_price > 0.0) throw config_error("spline probit: price coefficient must be <= 0");
  if (spec.beta_covariates.size() != spec.covariate_profile.size() + 1) {
    throw config_error("spline probit: covariate coefficient block must be profile size + 1");
  }
  for (double v : spec.beta_spline) {
    if (!std::isfinite(v)) throw config_error("spline probit: spline coefficients must be finite");
  }
  auto impl = std::make_shared<Impl>();
  impl->basis.emplace(spec.y_min, spec.y_max, spec.segments, spec.degree);
  if (static_cast<int>(spec.beta_spline.size()) > impl->basis->size()) {
    throw config_error("spline probit: more spline coefficients than basis functions");
  }
  impl->kind = Kind::SplineProbit;
  impl->sp = std::move(spec);
  return ChoiceModel(std::move(impl));
}

// ---------------------------------------------------------------------------
// Public surface
// ---------------------------------------------------------------------------

ChoiceModel::Kind ChoiceModel::kind() const { return impl_->kind; }

int ChoiceModel::num_inside() const { return impl_->J(); }

double ChoiceModel::choice_prob(int j, const BudgetPoint& point) const {
  if (j < 0 || j > num_inside()) {
    throw std::invalid_argument("choice_prob: alternative index out of range");
  }
  return impl_->probs(point)[j];
}

std::vector<double> ChoiceModel::choice_probs(const BudgetPoint& point) const {
  return impl_->probs(point);
}

double ChoiceModel::outside_prob(const BudgetPoint& point) const {
  point.validate();
  if (point.num_inside() != num_inside()) {
    throw std::invalid_argument("outside_prob: price vector length does not match J");
  }
  // Fast paths with closed-form q_0.
  if (impl_->kind == Kind::Quasilinear) {
    double q0 = 1.0;
    for (int j = 0; j < num_inside(); ++j) {
      q0 *= impl_->ql.taste_offsets[j].cdf(point.prices[j]);
    }
    return q0;
  }
  if (impl_->kind == Kind::Synthetic && impl_->analytic &&
      impl_->syn.integration != SyntheticSpec::Integration::Simulate) {
    const double u0 = impl_->syn.curves[0].eval(point.income);
    if (!std::isfinite(u0)) {
      throw numerical_error("synthetic model: outside utility not finite at this income");
    }
    double q0 = 1.0;
    for (int j = 0; j < num_inside(); ++j) {
      const double uj = impl_->syn.curves[j + 1].eval(point.income - point.prices[j]);
      q0 *= impl_->offset_diffs[j].cdf(std::isfinite(uj) ? u0 - uj : kInf);
    }
    return q0;
  }
  return impl_->probs(point)[0];
}

std::vector<double> ChoiceModel::path_breakpoints(const BudgetPoint& point,
                                                  double zmax) const {
  std::vector<double> breaks;
  if (!(zmax > 0.0)) return breaks;
  if (impl_->kind == Kind::Quasilinear) {
    for (int j = 0; j < num_inside(); ++j) {
      for (double atom : impl_->ql.taste_offsets[j].atoms()) {
        const double z = atom - point.prices[j];  // threshold is the price itself
        if (z > 0.0 && z < zmax) breaks.push_back(z);
      }
    }
    return breaks;
  }
  if (impl_->kind == Kind::Synthetic && impl_->analytic) {
    // Along the path the inside numeraire y - p_j is fixed, so the
    // threshold T_j(z) = U_0(y + z) - U_j(y - p_j) is strictly increasing;
    // bisect for the atom crossing.
    for (int j = 0; j < num_inside(); ++j) {
      const double uj = impl_->syn.curves[j + 1].eval(point.income - point.prices[j]);
      if (!std::isfinite(uj)) continue;
      const auto threshold = [&](double z) {
        return impl_->syn.curves[0].eval(point.income + z) - uj;
      };
      for (double atom : impl_->offset_diffs[j].atoms()) {
        if (!(threshold(0.0) < atom && atom <= threshold(zmax))) continue;
        double lo = 0.0, hi = zmax;
        while (hi - lo > 1e-12 * std::fmax(1.0, zmax)) {
          const double mid = 0.5 * (lo + hi);
          if (threshold(mid) < atom) lo = mid; else hi = mid;
        }
        breaks.push_back(0.5 * (lo + hi));
      }
    }
  }
  return breaks;
}

bool ChoiceModel::has_utilities() const { return impl_->kind != Kind::SplineProbit; }

int ChoiceModel::eta_dim() const {
  switch (impl_->kind) {
    case Kind::Quasilinear: return num_inside();
    case Kind::Synthetic: return static_cast<int>(impl_->syn.eta.size());
    case Kind::SplineProbit: return 0;
  }
  return 0;
}

const Distribution& ChoiceModel::eta_dist(int k) const {
  if (k < 0 || k >= eta_dim()) throw std::invalid_argument("eta_dist: index out of range");
  return impl_->kind == Kind::Quasilinear ? impl_->ql.taste_offsets[k] : impl_->syn.eta[k];
}

double ChoiceModel::utility(int j, double numeraire, std::span<const double> eta) const {
  if (j < 0 || j > num_inside()) {
    throw std::invalid_argument("utility: alternative index out of range");
  }
  if (static_cast<int>(eta.size()) != eta_dim()) {
    throw std::invalid_argument("utility: eta dimension mismatch");
  }
  return impl_->utility(j, numeraire, eta);
}

const UtilityCurve& ChoiceModel::outside_curve() const {
  static const UtilityCurve identity = UtilityCurve::linear(0.0, 1.0);
  if (impl_->kind == Kind::Quasilinear) return identity;
  if (impl_->kind == Kind::Synthetic) return impl_->syn.curves[0];
  throw std::invalid_argument("outside_curve: utilities are not available for estimated models");
}

const QuasilinearSpec* ChoiceModel::quasilinear_spec() const {
  return impl_->kind == Kind::Quasilinear ? &impl_->ql : nullptr;
}
const SyntheticSpec* ChoiceModel::synthetic_spec() const {
  return impl_->kind == Kind::Synthetic ? &impl_->syn : nullptr;
}
const SplineProbitSpec* ChoiceModel::spline_probit_spec() const {
  return impl_->kind == Kind::SplineProbit ? &impl_->sp : nullptr;
}

}  // namespace dcw
