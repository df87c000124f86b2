#pragma once

#include <cstdint>
#include <vector>

#include "dcw/choice_model.hpp"

namespace dcw {

struct AgentRecord {
  std::vector<double> eta;
  int choice = 0;       // attains the max of normalized utilities
  double welfare = 0.0; // money-metric indirect utility, >= income
};

/// A simulated heterogeneous population at a fixed budget point. Ground
/// truth for the identification formulas: per-agent welfare is computed
/// from the utilities directly, not through choice probabilities.
struct SimulatedPopulation {
  BudgetPoint point;
  std::uint64_t seed = 0;
  std::vector<AgentRecord> agents;

  std::vector<double> shares() const;          // q_0..q_J, counts / n
  std::vector<double> welfare_values() const;  // per-agent W

  /// Empirical CDF of welfare at c (share of agents with W <= c).
  double empirical_cdf(double c) const;
};

/// Draws the heterogeneity vector of agent `index` (deterministic in
/// (seed, index), independent of evaluation order).
std::vector<double> draw_eta(const ChoiceModel& model, std::uint64_t seed,
                             std::uint64_t index);

/// Money-metric indirect utility of one agent: the outside utility curve is
/// inverted by bisection on the numeraire to tolerance 1e-10 (brackets
/// expand geometrically, up to 60 doublings). Requires accessible utilities.
double agent_welfare(const ChoiceModel& model, const BudgetPoint& point,
                     const std::vector<double>& eta, int* chosen = nullptr);

/// Simulates n agents at the budget point. Throws std::invalid_argument for
/// models without accessible utilities and numerical_error on bracket
/// failure (non-monotone outside utility).
SimulatedPopulation simulate_welfare(const ChoiceModel& model,
                                     const BudgetPoint& point, int n,
                                     std::uint64_t seed);

/// Compensating variation of the move p_from -> p_to for one agent: solves
/// W(p_to, y + cv) = W(p_from, y) by bisection (tolerance 1e-8 in income).
/// Infinite entries in a price vector remove the corresponding alternative;
/// an all-infinite p_from is the "no inside options" baseline.
double agent_cv(const ChoiceModel& model, double income,
                const std::vector<double>& p_from,
                const std::vector<double>& p_to,
                const std::vector<double>& eta);

}  // namespace dcw
