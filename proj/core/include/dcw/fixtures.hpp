#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcw/choice_model.hpp"
#include "dcw/estimation.hpp"

namespace dcw {

/// Named built-in models used by the CLI and the test suites:
///   quasilinear-logit       q_1(p) = 1/(1 + e^p)
///   quasilinear-probit      q_1(p) = Phi(-p)
///   quasilinear-degenerate  q_1(p) = 1{2 > p}
///   synthetic-probit        linear-curve random utility, equals the probit
///   income-effect           log-curve binary model, normal good
///   strong-income-effect    log-curve model with severe curvature
///   multinomial-j2          two inside alternatives, log curves
///   ordered-3               two quantities priced at (p, 2p) by convention
ChoiceModel fixture_model(const std::string& name);

std::vector<std::string> fixture_names();

/// Synthetic microdata generator for the demand estimation pipeline. The
/// latent index is beta_p * price + spline(income) + x'beta + u with
/// u = endogeneity * v + e, v the first-stage price disturbance and e
/// standard normal, so the control-function probit is exactly specified.
struct EstimationDgpConfig {
  int n = 20000;
  std::uint64_t seed = 7;
  double endogeneity = 0.8;       // coefficient on v in the latent error
  double beta_price = -0.5;
  double y_min = 1.0;
  double y_max = 20.0;
  int segments = 6;               // income spline of the true index
  int degree = 3;
  int strata = 25;
  int clusters_per_stratum = 8;
  double instrument_strength = 0.8;  // cluster cost shifter loading in price
  bool hausman_instrument = false;   // leave-own-cluster-out stratum price mean
  bool drop_nonbuyer_prices = false;
};

struct EstimationDgp {
  EstimationDataset data;
  double beta_price = 0.0;
  std::vector<double> beta_spline;  // on the leading basis functions
  std::vector<double> beta_cov;     // intercept, hh_size, child_age, male
  double control_coeff = 0.0;       // true coefficient on the first-stage residual
  double y_min = 0.0, y_max = 0.0;
  int segments = 0, degree = 0;

  /// Structural demand Phi(index) at the given price, income and profile.
  double true_q1(double price, double income,
                 const std::vector<double>& covariates) const;
};

EstimationDgp simulate_estimation_data(const EstimationDgpConfig& config);

}  // namespace dcw
