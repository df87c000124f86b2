#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dcw/choice_model.hpp"
#include "dcw/common.hpp"
#include "dcw/fixtures.hpp"
#include "dcw/model_io.hpp"
#include "dcw/rng.hpp"
#include "dcw/simulate.hpp"
#include "dcw/stats.hpp"
#include "test_util.hpp"

using namespace dcw;
using dcw::testutil::binomial_se;

TEST_CASE("quasilinear logit probabilities") {
  const auto m = fixture_model("quasilinear-logit");
  CHECK(m.choice_prob(1, BudgetPoint(0.0, 3.0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m.choice_prob(1, BudgetPoint(0.0, 500.0)) == doctest::Approx(0.5).epsilon(1e-15));
  for (double p : {0.0, 1.0, 5.0}) {
    const BudgetPoint pt(p, 10.0);
    CHECK(m.choice_prob(0, pt) + m.choice_prob(1, pt) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.choice_prob(1, pt) == doctest::Approx(logistic_cdf(-p)).epsilon(1e-14));
  }
}

TEST_CASE("quasilinear income invariance is exact") {
  for (const char* name : {"quasilinear-logit", "quasilinear-probit"}) {
    const auto m = fixture_model(name);
    for (double p : {0.3, 1.7, 4.0}) {
      const double q_low = m.choice_prob(1, BudgetPoint(p, 1.0));
      const double q_mid = m.choice_prob(1, BudgetPoint(p, 10.0));
      const double q_high = m.choice_prob(1, BudgetPoint(p, 100.0));
      CHECK(q_low == q_mid);  // bitwise, income never enters
      CHECK(q_mid == q_high);
    }
  }
}

TEST_CASE("degenerate offset gives a step demand") {
  const auto m = fixture_model("quasilinear-degenerate");  // atom at 2
  CHECK(m.choice_prob(1, BudgetPoint(1.9, 5.0)) == 1.0);
  CHECK(m.choice_prob(1, BudgetPoint(2.1, 5.0)) == 0.0);
  CHECK(m.choice_prob(1, BudgetPoint(2.0, 5.0)) == 0.0);  // ties go to the outside option
}

TEST_CASE("normal offset with unit shift") {
  const auto m = ChoiceModel::quasilinear({{Distribution::normal(1.0, 1.0)}});
  CHECK(m.choice_prob(1, BudgetPoint(1.0, 7.0)) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("synthetic linear model reduces to the probit closed form") {
  const auto m = fixture_model("synthetic-probit");
  for (double p : {0.0, 0.5, 1.0, 2.5}) {
    for (double y : {4.0, 40.0}) {
      CHECK(m.choice_prob(1, BudgetPoint(p, y)) ==
            doctest::Approx(norm_cdf(-p)).epsilon(1e-12));
    }
  }
}

TEST_CASE("income-effect model is a normal good") {
  const auto m = fixture_model("income-effect");
  const double p = 1.0;
  double prev = 0.0;
  for (double y : {2.0, 5.0, 10.0, 20.0, 50.0}) {
    const double q = m.choice_prob(1, BudgetPoint(p, y));
    CHECK(q > prev);
    prev = q;
  }
}

TEST_CASE("completeness within 1e-12 on random budget points") {
  const CounterRng rng(99);
  for (const char* name : {"quasilinear-logit", "quasilinear-probit", "synthetic-probit",
                           "income-effect", "strong-income-effect", "multinomial-j2"}) {
    const auto m = fixture_model(name);
    for (int i = 0; i < 100; ++i) {
      BudgetPoint pt;
      for (int j = 0; j < m.num_inside(); ++j) {
        pt.prices.push_back(5.0 * rng.uniform(10 + j, i));
      }
      pt.income = 1.0 + 30.0 * rng.uniform(20, i);
      const auto q = m.choice_probs(pt);
      double s = 0.0;
      for (double v : q) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        s += v;
      }
      CHECK(std::fabs(s - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("own-price monotonicity on a grid") {
  for (const char* name : {"synthetic-probit", "income-effect", "multinomial-j2"}) {
    const auto m = fixture_model(name);
    const double y = 12.0;
    for (int j = 1; j <= m.num_inside(); ++j) {
      double prev = 2.0;
      for (int step = 0; step <= 20; ++step) {
        BudgetPoint pt(std::vector<double>(m.num_inside(), 1.0), y);
        pt.prices[j - 1] = 0.1 + 0.2 * step;
        const double q = m.choice_prob(j, pt);
        CHECK(q <= prev + 1e-12);
        prev = q;
      }
    }
  }
}

TEST_CASE("multinomial probabilities match simulated shares") {
  const auto m = fixture_model("multinomial-j2");
  const BudgetPoint pt({0.6, 1.1}, 8.0);
  const auto q = m.choice_probs(pt);
  const auto pop = simulate_welfare(m, pt, 200000, 314159);
  const auto shares = pop.shares();
  REQUIRE(shares.size() == q.size());
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double se = binomial_se(q[j], 200000.0);
    CHECK(std::fabs(shares[j] - q[j]) < 3.0 * se);
  }
}

TEST_CASE("simulation backend is deterministic and complete") {
  SyntheticSpec spec;
  spec.curves = {UtilityCurve::log(0.0, 1.0, 1.0), UtilityCurve::log(0.0, 1.0, 1.0),
                 UtilityCurve::log(0.0, 1.0, 1.0)};
  spec.offset_constants = {0.0, 0.1, 0.2};
  // Shared eta component: offsets are correlated, analytic route is off.
  spec.loadings = {{0.0, 0.0}, {1.0, 0.3}, {0.0, 1.0}};
  spec.eta = {Distribution::logistic(0.0, 0.5), Distribution::normal(0.2, 0.4)};
  spec.seed = 77;
  spec.n_sim = 20000;
  const auto m = ChoiceModel::synthetic(spec);
  const BudgetPoint pt({0.5, 0.8}, 6.0);
  const auto q1 = m.choice_probs(pt);
  const auto q2 = m.choice_probs(pt);  // memoized
  CHECK(q1 == q2);
  double s = 0.0;
  for (double v : q1) s += v;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-15));

  const auto m_same = ChoiceModel::synthetic(spec);
  CHECK(m_same.choice_probs(pt) == q1);
}

TEST_CASE("synthetic validation rejects decreasing outside utility") {
  SyntheticSpec spec;
  spec.curves = {UtilityCurve::linear(0.0, -1.0), UtilityCurve::linear(0.0, 1.0)};
  spec.offset_constants = {0.0, 0.0};
  spec.loadings = {{0.0}, {1.0}};
  spec.eta = {Distribution::normal(0.0, 1.0)};
  CHECK_THROWS_AS(ChoiceModel::synthetic(spec), config_error);
}

TEST_CASE("model evaluation guards its preconditions") {
  const auto m = fixture_model("quasilinear-logit");
  CHECK_THROWS_AS(m.choice_prob(2, BudgetPoint(1.0, 5.0)), std::invalid_argument);
  CHECK_THROWS_AS(m.choice_prob(-1, BudgetPoint(1.0, 5.0)), std::invalid_argument);
  CHECK_THROWS_AS(m.choice_prob(1, BudgetPoint(-1.0, 5.0)), config_error);
  CHECK_THROWS_AS(m.choice_prob(1, BudgetPoint(1.0, 0.0)), config_error);
  CHECK_THROWS_AS(m.choice_prob(1, BudgetPoint({1.0, 2.0}, 5.0)), std::invalid_argument);
}

TEST_CASE("model json round trip is deterministic") {
  for (const auto& name : fixture_names()) {
    const auto m = fixture_model(name);
    const std::string j1 = model_to_json(m);
    const auto back = model_from_json(j1);
    const std::string j2 = model_to_json(back);
    CHECK(j1 == j2);
    // Same probabilities after the round trip.
    BudgetPoint pt(std::vector<double>(m.num_inside(), 0.8), 9.0);
    CHECK(back.choice_prob(0, pt) == m.choice_prob(0, pt));
  }
  SplineProbitSpec sp;
  sp.beta_price = -0.4;
  sp.beta_spline = {0.0, 0.2, 0.5, 0.4, 0.1, 0.0};
  sp.beta_covariates = {0.7, -0.05, 0.03, 0.1};
  sp.covariate_profile = {4.0, 12.0, 1.0};
  sp.y_min = 1.0;
  sp.y_max = 20.0;
  sp.segments = 6;
  sp.degree = 3;
  const auto m = ChoiceModel::spline_probit(sp);
  const std::string j1 = model_to_json(m);
  CHECK(model_to_json(model_from_json(j1)) == j1);
}

TEST_CASE("infinite prices remove alternatives") {
  const auto m = fixture_model("income-effect");
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(m.choice_prob(0, BudgetPoint(inf, 10.0)) == 1.0);
  CHECK(m.choice_prob(1, BudgetPoint(inf, 10.0)) == 0.0);
}
