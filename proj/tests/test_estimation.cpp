#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dcw/common.hpp"
#include "dcw/estimation.hpp"
#include "dcw/fixtures.hpp"
#include "dcw/rng.hpp"
#include "dcw/stats.hpp"
#include "test_util.hpp"

using namespace dcw;
using dcw::testutil::mean;
using dcw::testutil::sample_sd;

namespace {

EstimationRow make_row(int choice, double price, double income, int cluster, int stratum,
                       bool missing = false) {
  EstimationRow r;
  r.choice = choice;
  r.price = price;
  r.price_missing = missing;
  r.income = income;
  r.covariates = {4.0, 12.0, 1.0};
  r.instrument = 0.1;
  r.cluster = cluster;
  r.stratum = stratum;
  return r;
}

std::vector<double> bootstrap_beta_p(const PosteriorDraws& draws) {
  std::vector<double> v;
  for (const auto& d : draws.draws) v.push_back(d.fit.beta_price);
  return v;
}

}  // namespace

TEST_CASE("price imputation from cluster purchasers") {
  EstimationDataset data;
  data.covariate_names = {"hh_size", "child_age", "male"};
  data.rows = {make_row(1, 100.0, 5.0, 1, 1), make_row(1, 200.0, 6.0, 1, 1),
               make_row(0, 0.0, 7.0, 1, 1, true)};
  ImputeReport rep;
  const auto full = impute_prices(data, &rep);
  CHECK(full.rows[2].price == doctest::Approx(150.0));
  CHECK_FALSE(full.rows[2].price_missing);
  CHECK(rep.cluster_imputed == 1);
  CHECK(rep.stratum_fallback == 0);
}

TEST_CASE("all-buyer dataset passes through unchanged") {
  EstimationDataset data;
  data.covariate_names = {"hh_size", "child_age", "male"};
  data.rows = {make_row(1, 100.0, 5.0, 1, 1), make_row(1, 140.0, 6.0, 2, 1)};
  const auto full = impute_prices(data);
  CHECK(full.rows[0].price == 100.0);
  CHECK(full.rows[1].price == 140.0);
}

TEST_CASE("cluster without purchasers falls back to the stratum") {
  EstimationDataset data;
  data.covariate_names = {"hh_size", "child_age", "male"};
  data.rows = {make_row(1, 100.0, 5.0, 1, 1), make_row(1, 300.0, 6.0, 2, 1),
               make_row(0, 0.0, 7.0, 3, 1, true)};  // cluster 3 has no buyers
  ImputeReport rep;
  const auto full = impute_prices(data, &rep);
  CHECK(full.rows[2].price == doctest::Approx(200.0));
  CHECK(rep.stratum_fallback == 1);

  // No purchasers anywhere in the stratum: hard error.
  EstimationDataset bad;
  bad.covariate_names = data.covariate_names;
  bad.rows = {make_row(0, 0.0, 5.0, 1, 9, true), make_row(1, 50.0, 6.0, 2, 8)};
  CHECK_THROWS_AS(impute_prices(bad), data_error);
}

TEST_CASE("first stage flags an exactly fitting instrument") {
  EstimationDgpConfig cfg;
  cfg.n = 500;
  cfg.seed = 3;
  auto dgp = simulate_estimation_data(cfg);
  for (auto& r : dgp.data.rows) r.instrument = r.price;  // degenerate
  const SplineBasis basis(cfg.y_min, cfg.y_max, 4, 3);
  const auto fs = first_stage(dgp.data, basis);
  CHECK(fs.f_unbounded);
  CHECK(std::isinf(fs.f_stat));
  for (double r : fs.residuals) CHECK(std::fabs(r) < 1e-8);
}

TEST_CASE("first stage recovers the instrument loading") {
  EstimationDgpConfig cfg;
  cfg.n = 10000;
  cfg.seed = 21;
  cfg.instrument_strength = 0.8;
  const auto dgp = simulate_estimation_data(cfg);
  const SplineBasis basis(cfg.y_min, cfg.y_max, 4, 3);
  const auto fs = first_stage(dgp.data, basis);
  // Coefficient layout: [intercept, splines, covariates, instrument].
  CHECK(fs.coeffs.back() == doctest::Approx(0.8).epsilon(0.05));
  CHECK(fs.f_stat > 100.0);
  CHECK(fs.f_pvalue < 1e-6);
}

TEST_CASE("irrelevant instrument yields uniform p-values") {
  // 200 independent replications under the null; Kolmogorov-Smirnov at 5%.
  const int reps = 200;
  std::vector<double> pvals;
  pvals.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    EstimationDgpConfig cfg;
    cfg.n = 400;
    cfg.seed = 1000 + r;
    cfg.instrument_strength = 0.0;  // the shifter no longer moves prices
    const auto dgp = simulate_estimation_data(cfg);
    const SplineBasis basis(cfg.y_min, cfg.y_max, 3, 2);
    pvals.push_back(first_stage(dgp.data, basis).f_pvalue);
  }
  std::sort(pvals.begin(), pvals.end());
  double ks = 0.0;
  for (int i = 0; i < reps; ++i) {
    const double u = (i + 1.0) / reps;
    ks = std::max(ks, std::max(std::fabs(u - pvals[i]),
                               std::fabs(pvals[i] - static_cast<double>(i) / reps)));
  }
  CHECK(ks < 1.358 / std::sqrt(static_cast<double>(reps)));  // 5% critical value
}

TEST_CASE("constrained fit equals the unconstrained one when constraints are slack") {
  EstimationDgpConfig cfg;
  cfg.n = 8000;
  cfg.seed = 5;
  cfg.endogeneity = 0.0;
  const auto dgp = simulate_estimation_data(cfg);
  const SplineBasis basis(cfg.y_min, cfg.y_max, cfg.segments, cfg.degree);
  const auto grid = default_constraint_grid(dgp.data);

  ProbitFitOptions free_opts;
  free_opts.constrained = false;
  const auto unconstrained = fit_constrained_probit(dgp.data, basis, grid, free_opts);
  const auto constrained = fit_constrained_probit(dgp.data, basis, grid);
  CHECK_FALSE(constrained.constraints_active);
  CHECK(constrained.beta_price == doctest::Approx(unconstrained.beta_price).epsilon(1e-5));
  for (std::size_t i = 0; i < constrained.beta_spline.size(); ++i) {
    CHECK(constrained.beta_spline[i] ==
          doctest::Approx(unconstrained.beta_spline[i]).epsilon(1e-5));
  }
  CHECK(constrained.loglik == doctest::Approx(unconstrained.loglik).epsilon(1e-9));
}

TEST_CASE("exogenous-price recovery within three bootstrap standard errors") {
  EstimationDgpConfig cfg;
  cfg.n = 20000;
  cfg.seed = 11;
  cfg.endogeneity = 0.0;
  const auto dgp = simulate_estimation_data(cfg);
  const SplineBasis basis(cfg.y_min, cfg.y_max, cfg.segments, cfg.degree);
  const auto grid = default_constraint_grid(dgp.data);
  const auto fit = fit_constrained_probit(dgp.data, basis, grid);
  const auto draws = bootstrap_fit(dgp.data, basis, grid, 60, 404);
  const double se = sample_sd(bootstrap_beta_p(draws));
  CHECK(std::fabs(fit.beta_price - dgp.beta_price) < 3.0 * se);
}

TEST_CASE("control function fixes the endogeneity bias") {
  EstimationDgpConfig cfg;
  cfg.n = 20000;
  cfg.seed = 12;
  cfg.endogeneity = 0.8;
  const auto dgp = simulate_estimation_data(cfg);
  const SplineBasis basis(cfg.y_min, cfg.y_max, cfg.segments, cfg.degree);
  const auto grid = default_constraint_grid(dgp.data);

  ProbitFitOptions naive_opts;
  naive_opts.use_control_function = false;
  const auto naive = fit_constrained_probit(dgp.data, basis, grid, naive_opts);
  const auto corrected = fit_constrained_probit(dgp.data, basis, grid);
  const auto draws = bootstrap_fit(dgp.data, basis, grid, 60, 405);
  const double se = sample_sd(bootstrap_beta_p(draws));

  CHECK(std::fabs(corrected.beta_price - dgp.beta_price) < 3.0 * se);
  CHECK(std::fabs(naive.beta_price - dgp.beta_price) > 5.0 * se);
  CHECK(corrected.rho == doctest::Approx(dgp.control_coeff).epsilon(0.15));
}

TEST_CASE("active shape constraints hold exactly on the grid") {
  // A nearly price-flat truth with a steep income profile forces the
  // directional constraint to bind.
  EstimationDataset data;
  data.covariate_names = {};
  const CounterRng rng(31);
  const SplineBasis truth_basis(1.0, 11.0, 4, 3);
  const std::vector<double> steep = {0.0, 1.2, 2.4, 3.2};
  for (int i = 0; i < 4000; ++i) {
    EstimationRow r;
    r.income = 1.0 + 10.0 * rng.uniform(1, i);
    r.price = 1.0 + 3.0 * rng.uniform(2, i);
    r.instrument = rng.uniform(3, i);
    r.cluster = i % 50;
    r.stratum = r.cluster / 10;
    const double index = -0.02 * r.price + truth_basis.value(steep, r.income) - 1.4;
    r.choice = index + norm_ppf(rng.uniform(4, i)) > 0.0 ? 1 : 0;
    data.rows.push_back(std::move(r));
  }
  const SplineBasis basis(1.0, 11.0, 4, 3);
  std::vector<double> grid;
  for (int i = 0; i < 30; ++i) grid.push_back(1.2 + 9.6 * i / 29.0);
  ProbitFitOptions opts;
  opts.use_control_function = false;  // price is exogenous here
  const auto fit = fit_constrained_probit(data, basis, grid, opts);
  CHECK(fit.constraints_active);
  CHECK(fit.beta_price <= 0.0);
  for (double g : grid) {
    CHECK(fit.directional_derivative(basis, g) <= 1e-10);
  }
  CHECK(fit.loglik <= fit.unconstrained_loglik + 1e-9);
  CHECK(fit.audit_max_violation < 1e-3);
}

TEST_CASE("fitted model behaves like the closed-form index") {
  EstimationDgpConfig cfg;
  cfg.n = 6000;
  cfg.seed = 19;
  const auto dgp = simulate_estimation_data(cfg);
  const SplineBasis basis(cfg.y_min, cfg.y_max, cfg.segments, cfg.degree);
  const auto grid = default_constraint_grid(dgp.data);
  const auto fit = fit_constrained_probit(dgp.data, basis, grid);
  const std::vector<double> profile = {4.0, 12.0, 1.0};
  const auto model = fit_to_model(fit, profile);

  // Hand-computed index at a data-like point.
  const double p = 3.1, y = 9.7;
  double index = fit.beta_price * p + basis.value(fit.beta_spline, y) + fit.beta_cov[0];
  for (std::size_t c = 0; c < profile.size(); ++c) index += fit.beta_cov[c + 1] * profile[c];
  CHECK(model.choice_prob(1, BudgetPoint(p, y)) == doctest::Approx(norm_cdf(index)).epsilon(1e-12));

  // Monotone in price everywhere.
  double prev = 1.1;
  for (int i = 0; i <= 100; ++i) {
    const double q = model.choice_prob(1, BudgetPoint(0.5 + 0.06 * i, 10.0));
    CHECK(q <= prev + 1e-12);
    prev = q;
  }
  // Directional derivative non-positive on the constraint grid.
  for (double g : grid) {
    const double h = 1e-5;
    const double up = model.choice_prob(1, BudgetPoint(2.0 + h, g + h));
    const double dn = model.choice_prob(1, BudgetPoint(2.0 - h, g - h));
    CHECK((up - dn) / (2.0 * h) <= 1e-6);
  }
  // Income clamps outside the support.
  CHECK(model.choice_prob(1, BudgetPoint(2.0, cfg.y_max + 50.0)) ==
        model.choice_prob(1, BudgetPoint(2.0, cfg.y_max)));
}

TEST_CASE("bootstrap draws are deterministic given the seed") {
  EstimationDgpConfig cfg;
  cfg.n = 1500;
  cfg.seed = 23;
  const auto dgp = simulate_estimation_data(cfg);
  const SplineBasis basis(cfg.y_min, cfg.y_max, 4, 3);
  const auto grid = default_constraint_grid(dgp.data, 20);
  const auto a = bootstrap_fit(dgp.data, basis, grid, 8, 99, {}, 4);
  const auto b = bootstrap_fit(dgp.data, basis, grid, 8, 99, {}, 2);
  REQUIRE(a.draws.size() == b.draws.size());
  for (std::size_t i = 0; i < a.draws.size(); ++i) {
    CHECK(a.draws[i].fit.beta_price == b.draws[i].fit.beta_price);
    CHECK(a.draws[i].income_quantiles == b.draws[i].income_quantiles);
  }
}

TEST_CASE("bootstrap standard error tracks the sampling distribution") {
  // Monte Carlo truth: 120 independent datasets, one fit each.
  const double pbar = 4.0, sigma = 1.5, y_eval = 10.0;
  const std::vector<double> profile = {4.0, 12.0, 1.0};
  std::vector<double> ates;
  for (int r = 0; r < 120; ++r) {
    EstimationDgpConfig cfg;
    cfg.n = 2000;
    cfg.seed = 5000 + r;
    const auto dgp = simulate_estimation_data(cfg);
    const SplineBasis basis(cfg.y_min, cfg.y_max, 4, 3);
    const auto grid = default_constraint_grid(dgp.data, 25);
    const auto fit = fit_constrained_probit(dgp.data, basis, grid);
    const auto model = fit_to_model(fit, profile);
    ates.push_back(model.choice_prob(1, BudgetPoint(pbar - sigma, y_eval)) -
                   model.choice_prob(1, BudgetPoint(pbar, y_eval)));
  }
  const double mc_sd = sample_sd(ates);

  EstimationDgpConfig cfg;
  cfg.n = 2000;
  cfg.seed = 5999;
  const auto dgp = simulate_estimation_data(cfg);
  const SplineBasis basis(cfg.y_min, cfg.y_max, 4, 3);
  const auto grid = default_constraint_grid(dgp.data, 25);
  const auto draws = bootstrap_fit(dgp.data, basis, grid, 200, 71);
  std::vector<double> boot_ates;
  for (const auto& d : draws.draws) {
    const auto model = fit_to_model(d.fit, profile);
    boot_ates.push_back(model.choice_prob(1, BudgetPoint(pbar - sigma, y_eval)) -
                        model.choice_prob(1, BudgetPoint(pbar, y_eval)));
  }
  const double boot_sd = sample_sd(boot_ates);
  CHECK(boot_sd > 0.7 * mc_sd);
  CHECK(boot_sd < 1.3 * mc_sd);
}

TEST_CASE("bootstrap at the reference replication count") {
  EstimationDgpConfig cfg;
  cfg.n = 600;
  cfg.seed = 29;
  const auto dgp = simulate_estimation_data(cfg);
  const SplineBasis basis(cfg.y_min, cfg.y_max, 3, 2);
  const auto grid = default_constraint_grid(dgp.data, 15);
  const auto draws = bootstrap_fit(dgp.data, basis, grid, 400, 2222);
  CHECK(draws.attempted == 400);
  CHECK(static_cast<int>(draws.draws.size()) + draws.failures == 400);
  CHECK(draws.failures <= 20);
}

TEST_CASE("estimation input validation") {
  EstimationDataset empty;
  CHECK_THROWS_AS(empty.validate(true), data_error);
  CHECK_THROWS_AS(bootstrap_fit(empty, SplineBasis(0, 1, 2, 2), {0.5}, 1, 1), config_error);
}
