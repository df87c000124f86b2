#include "dcw/binary_welfare.hpp"

#include <cmath>

#include "dcw/common.hpp"

namespace dcw {

namespace {

double q1(const ChoiceModel& model, double price, double income) {
  return model.choice_prob(1, BudgetPoint(price, income));
}

void require_binary(const ChoiceModel& model) {
  if (model.num_inside() != 1) {
    throw std::invalid_argument("binary welfare: model must have exactly one inside alternative");
  }
}

double checked_zmax(const SubsidyScenario& s, const QuadratureConfig& quad) {
  const double zmax = quad.zmax(s.income);
  if (!(zmax > 0.0)) {
    throw numerical_error("binary welfare: income at or above the y_max truncation point");
  }
  return zmax;
}

}  // namespace

void SubsidyScenario::validate() const {
  if (!(base_price > 0.0) || !std::isfinite(base_price)) {
    throw config_error("scenario: base price must be positive");
  }
  if (!std::isfinite(subsidy) || base_price - subsidy < 0.0) {
    throw config_error("scenario: post-subsidy price must be non-negative");
  }
  if (!(income > 0.0) || !std::isfinite(income)) {
    throw config_error("scenario: income must be positive");
  }
  if (!(aversion >= 0.0)) throw config_error("scenario: aversion must be >= 0");
}

double delta_asw(const ChoiceModel& model, const SubsidyScenario& s,
                 const QuadratureConfig& quad) {
  require_binary(model);
  s.validate();
  if (s.subsidy == 0.0) return 0.0;
  const double y = s.income;
  const double eps = s.aversion;
  const double zmax = checked_zmax(s, quad);
  const auto integrand = [&](double z) {
    const double diff = q1(model, s.base_price - s.subsidy + z, y + z) -
                        q1(model, s.base_price + z, y + z);
    return eps == 0.0 ? diff : std::pow(z + y, -eps) * diff;
  };
  if (std::fabs(integrand(zmax)) > quad.tail_tol) {
    throw numerical_error("delta_asw: tail integrand above tolerance at zmax; raise y_max");
  }
  auto breaks = model.path_breakpoints(BudgetPoint(s.base_price - s.subsidy, y), zmax);
  const auto base = model.path_breakpoints(BudgetPoint(s.base_price, y), zmax);
  breaks.insert(breaks.end(), base.begin(), base.end());
  return integrate_adaptive_segmented(integrand, 0.0, zmax, breaks, quad);
}

double acv(const ChoiceModel& model, const SubsidyScenario& s,
           const QuadratureConfig& quad) {
  require_binary(model);
  s.validate();
  if (s.subsidy == 0.0) return 0.0;
  if (s.subsidy < 0.0) {
    // Tax: minus the CV of the reverse move (price fall from pbar - s to pbar).
    SubsidyScenario reverse = s;
    reverse.base_price = s.base_price - s.subsidy;
    reverse.subsidy = -s.subsidy;
    return -acv(model, reverse, quad);
  }
  const auto integrand = [&](double z) {
    return q1(model, s.base_price - s.subsidy + z, s.income + z);
  };
  const auto breaks =
      model.path_breakpoints(BudgetPoint(s.base_price - s.subsidy, s.income), s.subsidy);
  return integrate_adaptive_segmented(integrand, 0.0, s.subsidy, breaks, quad);
}

double ate(const ChoiceModel& model, const SubsidyScenario& s) {
  require_binary(model);
  s.validate();
  return q1(model, s.base_price - s.subsidy, s.income) -
         q1(model, s.base_price, s.income);
}

DwlDecomposition dwl_decomposition(const ChoiceModel& model, const SubsidyScenario& s,
                                   const QuadratureConfig& quad) {
  require_binary(model);
  s.validate();
  if (s.aversion != 0.0) {
    throw std::invalid_argument("dwl: defined for aversion epsilon = 0 only");
  }
  DwlDecomposition out;
  const double pbar = s.base_price;
  const double sig = s.subsidy;
  const double y = s.income;
  out.cost = sig * q1(model, pbar - sig, y);
  out.delta = delta_asw(model, s, quad);
  out.dwl = out.cost - out.delta;
  if (sig != 0.0) {
    // Mechanical term over t in [pbar - s, pbar], written in diagonal path
    // coordinates so degenerate-offset jumps are split exactly. For a
    // subsidy the path starts at (pbar - s, y); for a tax the oriented
    // integral starts at (pbar, y + s) and carries a minus sign.
    const double qa = q1(model, pbar - sig, y);
    if (sig > 0.0) {
      const auto mech = [&](double u) { return qa - q1(model, pbar - sig + u, y + u); };
      const auto breaks = model.path_breakpoints(BudgetPoint(pbar - sig, y), sig);
      out.price_term = integrate_adaptive_segmented(mech, 0.0, sig, breaks, quad);
    } else {
      const auto mech = [&](double u) { return qa - q1(model, pbar + u, y + sig + u); };
      const auto breaks = model.path_breakpoints(BudgetPoint(pbar, y + sig), -sig);
      out.price_term = -integrate_adaptive_segmented(mech, 0.0, -sig, breaks, quad);
    }
    // Income-composition term over [pbar, y_max - y + pbar].
    const double zmax = checked_zmax(s, quad);
    const auto inc = [&](double u) {
      return q1(model, pbar + u, y + u) - q1(model, pbar + u, y + sig + u);
    };
    auto inc_breaks = model.path_breakpoints(BudgetPoint(pbar, y), zmax);
    const auto b2 = model.path_breakpoints(BudgetPoint(pbar, y + sig), zmax);
    inc_breaks.insert(inc_breaks.end(), b2.begin(), b2.end());
    out.income_term = integrate_adaptive_segmented(inc, 0.0, zmax, inc_breaks, quad);
  }
  return out;
}

double dwl(const ChoiceModel& model, const SubsidyScenario& s,
           const QuadratureConfig& quad) {
  return dwl_decomposition(model, s, quad).dwl;
}

namespace {

// d/dp q_1 at (price, income): Richardson-extrapolated central difference.
double price_derivative(const ChoiceModel& model, double price, double income,
                        double h) {
  const auto central = [&](double step) {
    const double lo = std::max(price - step, 1e-12);
    return (q1(model, price + step, income) - q1(model, lo, income)) / (price + step - lo);
  };
  const double d_h = central(h);
  const double d_h2 = central(0.5 * h);
  return (4.0 * d_h2 - d_h) / 3.0;
}

}  // namespace

double mvpf(const ChoiceModel& model, double base_price, double income,
            const QuadratureConfig& quad) {
  require_binary(model);
  if (!(base_price > 0.0) || !(income > 0.0)) {
    throw std::invalid_argument("mvpf: base price and income must be positive");
  }
  const double denom = q1(model, base_price, income);
  if (denom < 1e-10) {
    throw numerical_error("mvpf: demand at the status quo is numerically zero");
  }
  const double zmax = quad.zmax(income);
  if (!(zmax > 0.0)) {
    throw numerical_error("mvpf: income at or above the y_max truncation point");
  }
  const double h = 1e-4 * std::fmax(1.0, base_price);
  const auto integrand = [&](double z) {
    return -price_derivative(model, base_price + z, income + z, h);
  };
  const double numer = integrate_adaptive(integrand, 0.0, zmax, quad);
  return numer / denom;
}

double mvpf_linear_net_benefit(const ChoiceModel& model, double base_price,
                               double income, double sigma,
                               const QuadratureConfig& quad) {
  require_binary(model);
  const double denom = q1(model, base_price, income);
  if (denom < 1e-10) {
    throw numerical_error("mvpf: demand at the status quo is numerically zero");
  }
  const double ratio = mvpf(model, base_price, income, quad);
  return sigma * (ratio * denom - denom);
}

}  // namespace dcw
