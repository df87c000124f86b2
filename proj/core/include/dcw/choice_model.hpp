#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dcw/distributions.hpp"
#include "dcw/spline.hpp"

namespace dcw {

/// Prices of the J inside alternatives plus the consumer's income. The
/// outside option has price zero by convention.
struct BudgetPoint {
  std::vector<double> prices;
  double income = 0.0;

  BudgetPoint() = default;
  BudgetPoint(std::vector<double> p, double y) : prices(std::move(p)), income(y) {}
  BudgetPoint(double p, double y) : prices{p}, income(y) {}

  int num_inside() const { return static_cast<int>(prices.size()); }
  void validate() const;  // throws config_error on violation
};

/// Strictly increasing map from numeraire to utility units, with a closed
/// form inverse. Out-of-domain numeraire (an unaffordable option) maps to
/// -infinity.
class UtilityCurve {
 public:
  enum class Kind { Linear, Log, Power };

  static UtilityCurve linear(double intercept, double slope);
  /// intercept + slope * log(shift + n), defined for n > -shift.
  static UtilityCurve log(double intercept, double slope, double shift);
  /// intercept + slope * (shift + n)^exponent with exponent in (0, 1].
  static UtilityCurve power(double intercept, double slope, double shift,
                            double exponent);

  double eval(double numeraire) const;
  double inverse(double utility) const;
  /// Derivative in the numeraire, +infinity outside the domain boundary.
  double slope_at(double numeraire) const;

  Kind kind() const { return kind_; }
  double intercept() const { return intercept_; }
  double slope() const { return slope_; }
  double shift() const { return shift_; }
  double exponent() const { return exponent_; }

 private:
  UtilityCurve(Kind k, double a, double b, double nu, double g);
  Kind kind_;
  double intercept_;
  double slope_;
  double shift_;
  double exponent_;
};

/// Quasilinear family: U_0(n) = n, U_j(n, eta) = n + D_j where the taste
/// offsets D_j are independent draws from the given distributions. Choice
/// probabilities do not depend on income by construction.
struct QuasilinearSpec {
  std::vector<Distribution> taste_offsets;  // one per inside alternative
};

/// General random-utility family: U_j(n, eta) = curve_j(n) + delta_j +
/// sum_k loading_jk * eta_k with independent eta components. Index 0 is the
/// outside option.
struct SyntheticSpec {
  enum class Integration { Auto, Quadrature, Simulate };

  std::vector<UtilityCurve> curves;            // J + 1 entries
  std::vector<double> offset_constants;        // J + 1 entries
  std::vector<std::vector<double>> loadings;   // (J + 1) x K
  std::vector<Distribution> eta;               // K independent components
  std::uint64_t seed = 1;
  int n_sim = 100000;
  Integration integration = Integration::Auto;
};

/// Binary probit demand with a spline income profile, produced by the
/// estimation pipeline. Income is clamped to [basis.y_min, basis.y_max]
/// before evaluation.
struct SplineProbitSpec {
  double beta_price = 0.0;                  // <= 0
  std::vector<double> beta_spline;          // coefficients on the leading basis functions
  std::vector<double> beta_covariates;      // intercept first
  std::vector<double> covariate_profile;    // fixed profile, same length minus intercept
  double rho = 0.0;                         // control-function coefficient (zero at evaluation)
  double y_min = 0.0;
  double y_max = 1.0;
  int segments = 8;
  int degree = 3;
};

/// Immutable evaluator of structural choice probabilities q_j(p, y),
/// j = 0..J. Thread-safe for concurrent evaluation.
class ChoiceModel {
 public:
  enum class Kind { Quasilinear, Synthetic, SplineProbit };

  /// Builds a quasilinear model; probabilities are income-invariant.
  static ChoiceModel quasilinear(QuasilinearSpec spec);

  /// Builds a synthetic random-utility model. Utility monotonicity in the
  /// numeraire is validated on a sample of eta draws and numeraire points;
  /// violations raise config_error.
  static ChoiceModel synthetic(SyntheticSpec spec);

  static ChoiceModel spline_probit(SplineProbitSpec spec);

  Kind kind() const;
  int num_inside() const;  // J

  /// q_j(p, y); j in 0..J.
  double choice_prob(int j, const BudgetPoint& point) const;

  /// All probabilities q_0..q_J; sums to one.
  std::vector<double> choice_probs(const BudgetPoint& point) const;

  /// q_0(p, y) without computing the inside split.
  double outside_prob(const BudgetPoint& point) const;

  /// Jump locations z in (0, zmax) of q_0 along the diagonal path
  /// (p + z, y + z) starting at `point`. Non-empty only for models with
  /// degenerate taste offsets; welfare integrals split there.
  std::vector<double> path_breakpoints(const BudgetPoint& point, double zmax) const;

  /// True when per-agent utilities are available (quasilinear and
  /// synthetic kinds), enabling simulation oracles.
  bool has_utilities() const;

  /// Dimension of the heterogeneity vector eta.
  int eta_dim() const;

  /// Distribution of eta component k.
  const Distribution& eta_dist(int k) const;

  /// U_j(numeraire, eta) under the money-metric normalization used here
  /// (outside utility passes through curve 0). Throws when utilities are
  /// not available.
  double utility(int j, double numeraire, std::span<const double> eta) const;

  /// Outside-option utility curve (identity for quasilinear models).
  const UtilityCurve& outside_curve() const;

  const QuasilinearSpec* quasilinear_spec() const;
  const SyntheticSpec* synthetic_spec() const;
  const SplineProbitSpec* spline_probit_spec() const;

 private:
  struct Impl;
  explicit ChoiceModel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

}  // namespace dcw
