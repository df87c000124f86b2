#include "dcw/welfare.hpp"

#include <cmath>

#include "dcw/common.hpp"

namespace dcw {

void InequalityAversion::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw config_error("inequality aversion must lie in [0, 1]");
  }
}

WelfareCdf::WelfareCdf(ChoiceModel model, BudgetPoint point)
    : model_(std::move(model)), point_(std::move(point)) {
  point_.validate();
  if (point_.num_inside() != model_.num_inside()) {
    throw std::invalid_argument("welfare cdf: price vector length does not match J");
  }
}

double WelfareCdf::operator()(double c) const {
  if (std::isnan(c)) throw std::invalid_argument("welfare cdf: c must not be NaN");
  const double y = point_.income;
  if (c < y) return 0.0;
  BudgetPoint shifted = point_;
  for (double& p : shifted.prices) p += c - y;
  shifted.income = c;
  return model_.outside_prob(shifted);
}

double WelfareCdf::jump_at_income() const { return model_.outside_prob(point_); }

double WelfareCdf::quantile(double u, double tol) const {
  if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("quantile: u must lie in [0, 1)");
  const double y = point_.income;
  if (u <= jump_at_income()) return y;
  double lo = y;
  double hi = y + 1.0;
  int doublings = 0;
  while ((*this)(hi) < u) {
    hi = y + 2.0 * (hi - y);
    if (++doublings > 60) {
      throw numerical_error("welfare quantile: CDF does not reach the requested level");
    }
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if ((*this)(mid) < u) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double welfare_cdf(const ChoiceModel& model, const BudgetPoint& point, double c) {
  return WelfareCdf(model, point)(c);
}

namespace {

// 1 - q_0 along the diagonal path (z + p, z + y).
double survivor_at(const ChoiceModel& model, const BudgetPoint& point, double z) {
  BudgetPoint shifted = point;
  for (double& p : shifted.prices) p += z;
  shifted.income += z;
  return 1.0 - model.outside_prob(shifted);
}

double weighted_survivor_integral(const ChoiceModel& model, const BudgetPoint& point,
                                  double epsilon, const QuadratureConfig& quad) {
  const double y = point.income;
  const double zmax = quad.zmax(y);
  if (!(zmax > 0.0)) {
    throw numerical_error("welfare integral: income is at or above the y_max truncation point");
  }
  const auto integrand = [&](double z) {
    return std::pow(z + y, -epsilon) * survivor_at(model, point, z);
  };
  const double tail = integrand(zmax);
  if (tail > quad.tail_tol) {
    throw numerical_error("welfare integral: tail integrand above tolerance at zmax; raise y_max");
  }
  return integrate_adaptive_segmented(integrand, 0.0, zmax,
                                      model.path_breakpoints(point, zmax), quad);
}

}  // namespace

double asw(const ChoiceModel& model, const BudgetPoint& point,
           InequalityAversion aversion, const QuadratureConfig& quad) {
  point.validate();
  aversion.validate();
  const double eps = aversion.epsilon;
  if (eps >= 1.0) {
    throw std::invalid_argument("asw: epsilon must lie in [0, 1); use asw_epsilon_one");
  }
  const double y = point.income;
  const double base = std::pow(y, 1.0 - eps) / (1.0 - eps);
  return base + weighted_survivor_integral(model, point, eps, quad);
}

double asw_epsilon_one(const ChoiceModel& model, const BudgetPoint& point,
                       const QuadratureConfig& quad) {
  point.validate();
  return std::log(point.income) + weighted_survivor_integral(model, point, 1.0, quad);
}

double asw_any(const ChoiceModel& model, const BudgetPoint& point, double epsilon,
               const QuadratureConfig& quad) {
  if (epsilon == 1.0) return asw_epsilon_one(model, point, quad);
  return asw(model, point, InequalityAversion{epsilon}, quad);
}

double welfare_inequality_index(const ChoiceModel& model, const BudgetPoint& point,
                                const InequalityIndexKind& kind, int quantile_points) {
  if (quantile_points < 2) throw std::invalid_argument("inequality index: too few quantile points");
  if (kind.family == InequalityIndexKind::Family::Atkinson &&
      !(kind.epsilon >= 0.0 && kind.epsilon <= 5.0)) {
    throw config_error("atkinson index: epsilon must lie in [0, 5]");
  }
  const WelfareCdf cdf(model, point);
  const int n = quantile_points;
  std::vector<double> q(n);
  for (int i = 0; i < n; ++i) {
    const double u = (i + 0.5) / n;
    q[i] = cdf.quantile(u);
  }
  double mean = 0.0;
  for (double v : q) mean += v;
  mean /= n;
  if (!(mean > 0.0)) throw numerical_error("inequality index: non-positive mean welfare");

  if (kind.family == InequalityIndexKind::Family::Gini) {
    // G = 2 cov(u, Q(u)) / mean, midpoint rule over u.
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += ((i + 0.5) / n) * q[i];
    s /= n;
    return 2.0 * s / mean - 1.0;
  }
  // Atkinson: 1 - EDE / mean.
  double ede;
  if (kind.epsilon == 1.0) {
    double s = 0.0;
    for (double v : q) s += std::log(v);
    ede = std::exp(s / n);
  } else {
    double s = 0.0;
    for (double v : q) s += std::pow(v, 1.0 - kind.epsilon);
    s /= n;
    ede = std::pow(s, 1.0 / (1.0 - kind.epsilon));
  }
  return 1.0 - ede / mean;
}

}  // namespace dcw
