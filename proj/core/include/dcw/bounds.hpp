#pragma once

#include <vector>

#include "dcw/choice_model.hpp"

namespace dcw {

/// One observed demand point: prices, income and the outside-option share.
struct DemandObservation {
  std::vector<double> prices;
  double income = 0.0;
  double q0 = 0.0;
};

/// Finite set of observed price-income combinations with their outside
/// shares. Entries must share a common J, carry probabilities in [0, 1]
/// and be distinct in (prices, income).
class ObservedDemandSet {
 public:
  ObservedDemandSet() = default;
  explicit ObservedDemandSet(std::vector<DemandObservation> entries);

  /// Load variant for the ordered/continuous case: every entry must have
  /// J = 2 with the second price exactly twice the first (relative
  /// tolerance 1e-9); offending entries raise data_error.
  static ObservedDemandSet ordered(std::vector<DemandObservation> entries);

  const std::vector<DemandObservation>& entries() const { return entries_; }
  int num_inside() const { return J_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<DemandObservation> entries_;
  int J_ = 0;
};

struct CdfBounds {
  double lower = 0.0;
  double upper = 1.0;
  bool lower_vacuous = false;  // no feasible entry; trivial bound 0
  bool upper_vacuous = false;  // no feasible entry; trivial bound 1
};

/// Bounds on the welfare CDF at c >= income from finitely many observed
/// demand points (multinomial case). Feasibility comparisons carry a 1e-12
/// slack to absorb round-trip noise.
CdfBounds multinomial_cdf_bounds(const ObservedDemandSet& s, double c,
                                 const BudgetPoint& point);

/// Bounds for the ordered case with unit price p (two inside quantities at
/// prices p and 2p). The set must have been loaded with
/// ObservedDemandSet::ordered.
CdfBounds ordered_cdf_bounds(const ObservedDemandSet& s, double c,
                             double unit_price, double income);

}  // namespace dcw
