#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcw/choice_model.hpp"
#include "dcw/spline.hpp"

namespace dcw {

struct EstimationRow {
  int choice = 0;              // 0/1
  double price = 0.0;
  bool price_missing = false;  // non-purchaser with unobserved price
  double income = 0.0;
  std::vector<double> covariates;
  double instrument = 0.0;
  int cluster = 0;
  int stratum = 0;
};

/// Microdata for binary demand estimation. Covariate vectors must agree in
/// length with covariate_names.
struct EstimationDataset {
  std::vector<EstimationRow> rows;
  std::vector<std::string> covariate_names;

  int n() const { return static_cast<int>(rows.size()); }
  double income_min() const;
  double income_max() const;
  double income_quantile(double p) const;

  /// Checks shape consistency; with `require_complete`, also that no price
  /// is missing (the post-imputation invariant).
  void validate(bool require_complete) const;
};

struct ImputeReport {
  int cluster_imputed = 0;   // non-purchasers priced from their own cluster
  int stratum_fallback = 0;  // clusters with no purchasers, priced from the stratum
};

/// Fills missing prices with the cluster mean of purchasers' prices,
/// falling back to the stratum mean when a cluster has no purchasers.
/// Throws data_error when a stratum has no purchasers either.
EstimationDataset impute_prices(const EstimationDataset& raw,
                                ImputeReport* report = nullptr);

/// Least-squares first stage: price on instrument, income splines and
/// covariates. Reports the instrument-exclusion F statistic.
struct FirstStageFit {
  std::vector<double> coeffs;    // [intercept, spline..., covariates..., instrument]
  std::vector<double> residuals; // one per row
  double sigma2 = 0.0;
  double f_stat = 0.0;
  double f_pvalue = 1.0;
  bool f_unbounded = false;  // zero residual variance (instrument == price)
  int n = 0;
  int k = 0;
};

FirstStageFit first_stage(const EstimationDataset& data, const SplineBasis& basis);

struct ProbitFitOptions {
  bool constrained = true;
  bool use_control_function = true;
  int max_newton_iter = 200;
  double newton_tol = 1e-10;
};

/// Constrained probit demand fit. The income profile uses the leading M
/// basis functions of the given spline basis; the price coefficient is
/// non-positive and the index is non-increasing in the (1,1) direction on
/// the constraint grid.
struct DemandFit {
  double beta_price = 0.0;
  std::vector<double> beta_spline;  // length = basis.segments()
  std::vector<double> beta_cov;     // intercept first, then covariates
  double rho = 0.0;                 // control-function coefficient
  FirstStageFit first_stage;
  double y_min = 0.0, y_max = 0.0;
  int segments = 0, degree = 0;
  std::vector<double> constraint_grid;
  double loglik = 0.0;
  double unconstrained_loglik = 0.0;
  bool constraints_active = false;
  double audit_max_violation = 0.0;  // on the 10x finer grid

  /// Index directional derivative d/dp + d/dy at income y (price part is
  /// constant beta_price).
  double directional_derivative(const SplineBasis& basis, double y) const;
};

/// 50 equally spaced incomes between the 1st and 99th percentiles.
std::vector<double> default_constraint_grid(const EstimationDataset& data,
                                            int points = 50);

DemandFit fit_constrained_probit(const EstimationDataset& data,
                                 const SplineBasis& basis,
                                 const std::vector<double>& grid,
                                 const ProbitFitOptions& options = {});

/// One bootstrap draw: the refitted parameters plus the resampled income
/// sample compressed to equally weighted quantiles.
struct PosteriorDraw {
  DemandFit fit;
  std::vector<double> income_quantiles;
};

struct PosteriorDraws {
  std::vector<PosteriorDraw> draws;
  int attempted = 0;
  int failures = 0;
  std::uint64_t seed = 0;
};

/// B row-resampled refits of both stages, reproducible given the seed and
/// parallelized over draws. Fails when more than 5% of draws error out.
PosteriorDraws bootstrap_fit(const EstimationDataset& data, const SplineBasis& basis,
                             const std::vector<double>& grid, int B,
                             std::uint64_t seed,
                             const ProbitFitOptions& options = {},
                             int workers = 0);

/// Binds a fit to a fixed covariate profile, yielding the estimated demand
/// as a ChoiceModel (income clamped to the basis support outside it).
ChoiceModel fit_to_model(const DemandFit& fit,
                         const std::vector<double>& covariate_profile);

}  // namespace dcw
