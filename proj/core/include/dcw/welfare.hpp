#pragma once

#include "dcw/choice_model.hpp"
#include "dcw/quadrature.hpp"

namespace dcw {

/// Planner's inequality aversion. Values in [0, 1]; epsilon = 1 is served
/// by the logarithmic form (asw_epsilon_one).
struct InequalityAversion {
  double epsilon = 0.0;
  void validate() const;
};

/// CDF of money-metric indirect utility at a fixed budget point:
/// zero below income, q_0(c - y + p_1, ..., c - y + p_J, c) at c >= y.
/// Right-continuous, with a possible mass point at c = income.
class WelfareCdf {
 public:
  WelfareCdf(ChoiceModel model, BudgetPoint point);

  double operator()(double c) const;

  /// Mass at the income point, q_0(p, y).
  double jump_at_income() const;

  /// Right-continuous quantile; bisection to `tol` in c.
  double quantile(double u, double tol = 1e-9) const;

  const BudgetPoint& point() const { return point_; }
  const ChoiceModel& model() const { return model_; }

 private:
  ChoiceModel model_;
  BudgetPoint point_;
};

double welfare_cdf(const ChoiceModel& model, const BudgetPoint& point, double c);

/// Average social welfare with curvature epsilon in [0, 1):
///   y^(1-e)/(1-e) + integral_0^zmax (z+y)^(-e) [1 - q_0(z+p, z+y)] dz,
/// truncated at zmax = y_max - y with a hard tail check.
double asw(const ChoiceModel& model, const BudgetPoint& point,
           InequalityAversion aversion, const QuadratureConfig& quad = {});

/// The epsilon = 1 (logarithmic) limit: E[log W].
double asw_epsilon_one(const ChoiceModel& model, const BudgetPoint& point,
                       const QuadratureConfig& quad = {});

/// Dispatches on epsilon, using the log form at epsilon = 1.
double asw_any(const ChoiceModel& model, const BudgetPoint& point,
               double epsilon, const QuadratureConfig& quad = {});

struct InequalityIndexKind {
  enum class Family { Gini, Atkinson };
  Family family = Family::Gini;
  double epsilon = 0.0;  // Atkinson only

  static InequalityIndexKind gini() { return {Family::Gini, 0.0}; }
  static InequalityIndexKind atkinson(double eps) { return {Family::Atkinson, eps}; }
};

/// Gini or Atkinson index of the welfare distribution, computed by
/// quantile integration (512 midpoints, quantiles by bisection).
double welfare_inequality_index(const ChoiceModel& model, const BudgetPoint& point,
                                const InequalityIndexKind& kind,
                                int quantile_points = 512);

}  // namespace dcw
