#pragma once

#include "dcw/choice_model.hpp"
#include "dcw/quadrature.hpp"

namespace dcw {

/// A price change on the single inside alternative: from base_price to
/// base_price - subsidy (negative subsidy = tax). The post-change price
/// must stay positive.
struct SubsidyScenario {
  double base_price = 0.0;
  double subsidy = 0.0;
  double income = 0.0;
  double aversion = 0.0;  // epsilon >= 0

  void validate() const;
};

/// Change in average social welfare at the scenario's income:
///   integral_0^zmax (z+y)^(-e) [q_1(pbar - s + z, y + z) - q_1(pbar + z, y + z)] dz.
double delta_asw(const ChoiceModel& model, const SubsidyScenario& s,
                 const QuadratureConfig& quad = {});

/// Average compensating variation integral_0^s q_1(pbar - s + z, y + z) dz.
/// For a tax (s < 0) this returns minus the CV of the reverse price fall,
/// so the value is negative.
double acv(const ChoiceModel& model, const SubsidyScenario& s,
           const QuadratureConfig& quad = {});

/// Average treatment effect q_1(pbar - s, y) - q_1(pbar, y).
double ate(const ChoiceModel& model, const SubsidyScenario& s);

struct DwlDecomposition {
  double dwl = 0.0;
  double cost = 0.0;        // s * q_1(pbar - s, y)
  double delta = 0.0;       // welfare change at epsilon = 0
  double price_term = 0.0;  // mechanical term, always >= 0
  double income_term = 0.0; // <= 0 when the good is normal
};

/// Deadweight loss cost - delta at epsilon = 0 (the scenario's aversion
/// must be zero), plus its two-term decomposition.
DwlDecomposition dwl_decomposition(const ChoiceModel& model, const SubsidyScenario& s,
                                   const QuadratureConfig& quad = {});
double dwl(const ChoiceModel& model, const SubsidyScenario& s,
           const QuadratureConfig& quad = {});

/// Marginal value of public funds at the status quo:
///   [- integral_0^zmax d/dp q_1(pbar + z, y + z) dz] / q_1(pbar, y).
/// The price derivative uses Richardson-extrapolated central differences
/// with step 1e-4 * max(1, pbar).
double mvpf(const ChoiceModel& model, double base_price, double income,
            const QuadratureConfig& quad = {});

/// First-order net benefit sigma * (numerator - denominator) of the MVPF
/// ratio; a straight line in sigma through the origin.
double mvpf_linear_net_benefit(const ChoiceModel& model, double base_price,
                               double income, double sigma,
                               const QuadratureConfig& quad = {});

}  // namespace dcw
