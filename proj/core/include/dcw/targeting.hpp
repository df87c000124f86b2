#pragma once

#include <cstdint>
#include <vector>

#include "dcw/choice_model.hpp"
#include "dcw/quadrature.hpp"
#include "dcw/spline.hpp"

namespace dcw {

/// Marginal income distribution: a finite support with positive weights
/// summing to one (exact weighted sums, no smoothing).
struct IncomeDistribution {
  std::vector<double> points;
  std::vector<double> weights;

  static IncomeDistribution from_grid(std::vector<double> points,
                                      std::vector<double> weights);
  static IncomeDistribution from_sample(std::vector<double> sample);

  int size() const { return static_cast<int>(points.size()); }
  double mean() const;
  void validate() const;
};

/// Feasible schedule space: spline coefficients confined to a box. The
/// convex-hull property keeps sigma(y) inside [sigma_min, sigma_max].
struct ScheduleSpace {
  SplineBasis basis;
  double sigma_min = 0.0;
  double sigma_max = 0.0;

  ScheduleSpace(SplineBasis b, double lo, double hi);
};

/// Spline-parameterized subsidy schedule (negative values are taxes).
struct SubsidySchedule {
  SplineBasis basis;
  std::vector<double> coeffs;
  double sigma_min = 0.0;
  double sigma_max = 0.0;

  double operator()(double y) const { return basis.value(coeffs, y); }
};

enum class TargetObjective { Ate, Acv, Casw };

struct TargetCriterion {
  TargetObjective kind = TargetObjective::Ate;
  double epsilon = 0.0;  // Casw curvature
};

enum class BudgetMode { Equality, AtMost };

struct TargetingOptions {
  int multistarts = 5;
  std::uint64_t seed = 2024;
  int max_iter = 300;
  double budget_tol = 1e-4;        // scaled by max(1, |M|)
  double stationarity_tol = 1e-5;  // projected gradient norm
  int objective_panels = 96;       // fixed quadrature panels inside the solver
};

struct TargetReport {
  SubsidySchedule schedule;
  double objective = 0.0;
  double cost = 0.0;
  double budget_residual = 0.0;
  double projected_gradient_norm = 0.0;
  double foc_max_residual = 0.0;  // spread of B'/C' across interior incomes
  double lambda = 0.0;            // budget multiplier estimate
  bool flat_objective = false;    // multistart objectives within 1e-8
  bool at_bounds = false;         // some coefficient on the box boundary
};

/// Per-capita program cost of a schedule:
/// sum_k pi_k * sigma(y_k) * q_1(pbar - sigma(y_k), y_k). Taxes contribute
/// negative cost. Throws config_error when the schedule pushes some price
/// non-positive.
double program_cost(const ChoiceModel& model, double pbar,
                    const SubsidySchedule& schedule, const IncomeDistribution& fy);

/// Budget-constrained optimal schedule for the chosen criterion. Penalty
/// continuation with deterministic multistarts, then a KKT polish; the
/// returned schedule satisfies the budget within budget_tol and projected
/// stationarity within stationarity_tol.
TargetReport optimal_schedule(const ChoiceModel& model, double pbar,
                              const TargetCriterion& criterion,
                              const IncomeDistribution& fy, double budget,
                              const ScheduleSpace& space,
                              BudgetMode mode = BudgetMode::Equality,
                              const QuadratureConfig& quad = {},
                              const TargetingOptions& opts = {});

/// One posterior draw for the Bayesian variant.
struct PosteriorPoint {
  ChoiceModel model;
  IncomeDistribution incomes;
};

/// Minimizes the posterior-averaged loss
///   E[ -benefit + c (M - cost)^2 ]
/// over the schedule space. With a single draw and large c this reproduces
/// optimal_schedule.
TargetReport bayes_optimal_schedule(const std::vector<PosteriorPoint>& posterior,
                                    double pbar, const TargetCriterion& criterion,
                                    double penalty_c, double budget,
                                    const ScheduleSpace& space,
                                    const QuadratureConfig& quad = {},
                                    const TargetingOptions& opts = {});

/// Second-order diagnostics at a two-income-point solution: bordered
/// Hessian determinant, the sufficient curvature-ratio conditions and the
/// tangency (equal B'/C') identity, all by finite differences.
struct SocReport {
  double det_bordered_hessian = 0.0;
  bool det_positive = false;
  double ratio_gap_low = 0.0;   // C''/C' - B''/B' at the low income
  double ratio_gap_high = 0.0;  // and at the high income
  bool ratio_ok_low = false;
  bool ratio_ok_high = false;
  double tangency_gap = 0.0;    // |B'_1/C'_1 - B'_2/C'_2|
  bool inconclusive = false;    // derivatives too small to sign
};

SocReport soc_check(const ChoiceModel& model, double pbar,
                    const TargetCriterion& criterion, const IncomeDistribution& fy,
                    const SubsidySchedule& solution,
                    const QuadratureConfig& quad = {});

}  // namespace dcw
