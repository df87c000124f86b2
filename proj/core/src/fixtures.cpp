#include "dcw/fixtures.hpp"

#include <algorithm>
#include <cmath>

#include "dcw/common.hpp"
#include "dcw/rng.hpp"
#include "dcw/spline.hpp"
#include "dcw/stats.hpp"

namespace dcw {

namespace {

ChoiceModel log_curve_binary(double shift, const Distribution& eta) {
  SyntheticSpec spec;
  spec.curves = {UtilityCurve::log(0.0, 1.0, shift), UtilityCurve::log(0.0, 1.0, shift)};
  spec.offset_constants = {0.0, 0.0};
  spec.loadings = {{0.0}, {1.0}};
  spec.eta = {eta};
  return ChoiceModel::synthetic(spec);
}

}  // namespace

ChoiceModel fixture_model(const std::string& name) {
  if (name == "quasilinear-logit") {
    return ChoiceModel::quasilinear({{Distribution::logistic(0.0, 1.0)}});
  }
  if (name == "quasilinear-probit") {
    return ChoiceModel::quasilinear({{Distribution::normal(0.0, 1.0)}});
  }
  if (name == "quasilinear-degenerate") {
    return ChoiceModel::quasilinear({{Distribution::degenerate(2.0)}});
  }
  if (name == "synthetic-probit") {
    SyntheticSpec spec;
    spec.curves = {UtilityCurve::linear(0.0, 1.0), UtilityCurve::linear(0.0, 1.0)};
    spec.offset_constants = {0.0, 0.0};
    spec.loadings = {{0.0}, {1.0}};
    spec.eta = {Distribution::normal(0.0, 1.0)};
    return ChoiceModel::synthetic(spec);
  }
  if (name == "income-effect") {
    return log_curve_binary(1.0, Distribution::logistic(0.1, 0.4));
  }
  if (name == "strong-income-effect") {
    return log_curve_binary(0.1, Distribution::logistic(1.0, 0.4));
  }
  if (name == "multinomial-j2") {
    SyntheticSpec spec;
    spec.curves = {UtilityCurve::log(0.0, 1.0, 1.0), UtilityCurve::log(0.0, 1.0, 1.0),
                   UtilityCurve::log(0.0, 1.0, 1.0)};
    spec.offset_constants = {0.0, 0.0, 0.0};
    spec.loadings = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    spec.eta = {Distribution::logistic(0.2, 0.3), Distribution::normal(0.4, 0.5)};
    return ChoiceModel::synthetic(spec);
  }
  if (name == "ordered-3") {
    SyntheticSpec spec;
    spec.curves = {UtilityCurve::log(0.0, 1.0, 1.0), UtilityCurve::log(0.0, 1.0, 1.0),
                   UtilityCurve::log(0.0, 1.0, 1.0)};
    spec.offset_constants = {0.0, 0.3, 0.45};
    spec.loadings = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    spec.eta = {Distribution::logistic(0.0, 0.3), Distribution::logistic(0.0, 0.4)};
    return ChoiceModel::synthetic(spec);
  }
  throw config_error("unknown fixture model: " + name);
}

std::vector<std::string> fixture_names() {
  return {"quasilinear-logit",  "quasilinear-probit", "quasilinear-degenerate",
          "synthetic-probit",   "income-effect",      "strong-income-effect",
          "multinomial-j2",     "ordered-3"};
}

// ---------------------------------------------------------------------------
// Estimation DGP
// ---------------------------------------------------------------------------

namespace {
// Hump-shaped income profile on the leading basis functions. Clamped-knot
// spans are short near the boundary, so the leading increment is kept small
// enough that the true index satisfies the shape constraints with slack.
const double kTrueSpline[] = {0.0, 0.3, 0.55, 0.65, 0.4, 0.1};
}  // namespace

double EstimationDgp::true_q1(double price, double income,
                              const std::vector<double>& covariates) const {
  const SplineBasis basis(y_min, y_max, segments, degree);
  double index = beta_price * price + basis.value(beta_spline, std::clamp(income, y_min, y_max));
  index += beta_cov[0];
  for (std::size_t c = 0; c < covariates.size(); ++c) index += beta_cov[c + 1] * covariates[c];
  return norm_cdf(index);
}

EstimationDgp simulate_estimation_data(const EstimationDgpConfig& config) {
  if (config.n < 10) throw config_error("estimation dgp: n too small");
  if (config.segments < 2 || config.segments > 12) {
    throw config_error("estimation dgp: segments out of range");
  }
  const CounterRng rng(config.seed);
  constexpr std::uint64_t kIncome = 1, kHh = 2, kAge = 3, kMale = 4, kV = 5,
                          kEps = 6, kShifter = 7;
  constexpr double kSqrt3 = 1.7320508075688772;

  EstimationDgp out;
  out.beta_price = config.beta_price;
  out.beta_spline.assign(kTrueSpline, kTrueSpline + std::min(config.segments, 6));
  out.beta_spline.resize(config.segments, 0.0);
  out.beta_cov = {1.0, -0.05, 0.03, 0.1};
  out.control_coeff = config.endogeneity;
  out.y_min = config.y_min;
  out.y_max = config.y_max;
  out.segments = config.segments;
  out.degree = config.degree;

  const SplineBasis basis(config.y_min, config.y_max, config.segments, config.degree);
  const int n_clusters = config.strata * config.clusters_per_stratum;

  EstimationDataset& data = out.data;
  data.covariate_names = {"hh_size", "child_age", "male"};
  data.rows.resize(config.n);
  std::vector<double> shifter(n_clusters);
  for (int c = 0; c < n_clusters; ++c) {
    shifter[c] = kSqrt3 * (2.0 * rng.uniform(kShifter, c) - 1.0);  // mean 0, var 1
  }

  for (int i = 0; i < config.n; ++i) {
    EstimationRow& r = data.rows[i];
    const int cluster = i % n_clusters;
    r.cluster = cluster;
    r.stratum = cluster / config.clusters_per_stratum;
    r.income = config.y_min + (config.y_max - config.y_min) * rng.uniform(kIncome, i);
    r.covariates = {1.0 + std::floor(8.0 * rng.uniform(kHh, i)),
                    5.0 + std::floor(14.0 * rng.uniform(kAge, i)),
                    rng.uniform(kMale, i) < 0.54 ? 1.0 : 0.0};
    const double v = kSqrt3 * (2.0 * rng.uniform(kV, i) - 1.0);  // bounded, mean 0, var 1
    const double price_resid = 0.8 * v;
    r.price = 4.0 + config.instrument_strength * shifter[cluster] + price_resid;
    r.instrument = shifter[cluster];

    double index = config.beta_price * r.price + basis.value(out.beta_spline, r.income);
    index += out.beta_cov[0];
    for (std::size_t c = 0; c < r.covariates.size(); ++c) {
      index += out.beta_cov[c + 1] * r.covariates[c];
    }
    const double eps = norm_ppf(rng.uniform(kEps, i));
    r.choice = index + config.endogeneity * price_resid + eps > 0.0 ? 1 : 0;
  }

  if (config.hausman_instrument) {
    // Average price over the other clusters in the same stratum.
    std::vector<double> cluster_sum(n_clusters, 0.0);
    std::vector<long long> cluster_n(n_clusters, 0);
    for (const auto& r : data.rows) {
      cluster_sum[r.cluster] += r.price;
      ++cluster_n[r.cluster];
    }
    std::vector<double> stratum_sum(config.strata, 0.0);
    std::vector<long long> stratum_n(config.strata, 0);
    for (int c = 0; c < n_clusters; ++c) {
      stratum_sum[c / config.clusters_per_stratum] += cluster_sum[c];
      stratum_n[c / config.clusters_per_stratum] += cluster_n[c];
    }
    for (auto& r : data.rows) {
      const int s = r.stratum;
      const double sum = stratum_sum[s] - cluster_sum[r.cluster];
      const long long cnt = stratum_n[s] - cluster_n[r.cluster];
      r.instrument = cnt > 0 ? sum / static_cast<double>(cnt) : 0.0;
    }
  }

  if (config.drop_nonbuyer_prices) {
    for (auto& r : data.rows) {
      if (r.choice == 0) {
        r.price = 0.0;
        r.price_missing = true;
      }
    }
  }
  return out;
}

}  // namespace dcw
