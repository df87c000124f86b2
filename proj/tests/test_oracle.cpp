#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dcw/choice_model.hpp"
#include "dcw/common.hpp"
#include "dcw/fixtures.hpp"
#include "dcw/simulate.hpp"
#include "dcw/stats.hpp"
#include "test_util.hpp"

using namespace dcw;
using dcw::testutil::binomial_se;
using dcw::testutil::mean;
using dcw::testutil::mean_se;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("degenerate offsets give a deterministic welfare level") {
  const auto m = fixture_model("quasilinear-degenerate");  // atom at 2
  const BudgetPoint pt(0.5, 10.0);
  const auto pop = simulate_welfare(m, pt, 500, 1);
  for (const auto& a : pop.agents) {
    CHECK(a.welfare == doctest::Approx(10.0 + (2.0 - 0.5)).epsilon(1e-9));
    CHECK(a.choice == 1);
  }
  // Priced out: welfare equals income exactly.
  const auto pop2 = simulate_welfare(m, BudgetPoint(3.0, 10.0), 500, 1);
  for (const auto& a : pop2.agents) {
    CHECK(a.welfare == 10.0);
    CHECK(a.choice == 0);
  }
}

TEST_CASE("welfare never falls below income") {
  for (const char* name : {"quasilinear-logit", "income-effect", "multinomial-j2"}) {
    const auto m = fixture_model(name);
    const BudgetPoint pt(std::vector<double>(m.num_inside(), 1.2), 7.0);
    const auto pop = simulate_welfare(m, pt, 10000, 3);
    for (const auto& a : pop.agents) CHECK(a.welfare >= pt.income);
  }
}

TEST_CASE("probit surplus matches the analytic censored-normal mean") {
  // E max(0, D - p) for D ~ N(0,1) equals phi(p) - p (1 - Phi(p)).
  const auto m = fixture_model("quasilinear-probit");
  const double p = 1.0;
  const BudgetPoint pt(p, 5.0);
  const int n = 200000;
  const auto pop = simulate_welfare(m, pt, n, 2718);
  std::vector<double> gains;
  gains.reserve(n);
  for (const auto& a : pop.agents) gains.push_back(a.welfare - pt.income);
  const double analytic = norm_pdf(p) - p * (1.0 - norm_cdf(p));
  CHECK(std::fabs(mean(gains) - analytic) < 3.0 * mean_se(gains));
}

TEST_CASE("simulated shares agree with choice probabilities") {
  for (const char* name :
       {"quasilinear-logit", "quasilinear-probit", "income-effect", "multinomial-j2"}) {
    const auto m = fixture_model(name);
    const BudgetPoint pt(std::vector<double>(m.num_inside(), 0.9), 6.0);
    const int n = 100000;
    const auto pop = simulate_welfare(m, pt, n, 55);
    const auto shares = pop.shares();
    const auto q = m.choice_probs(pt);
    for (std::size_t j = 0; j < q.size(); ++j) {
      CHECK(std::fabs(shares[j] - q[j]) < 3.0 * binomial_se(q[j], n));
    }
  }
}

TEST_CASE("cv of a null move is zero") {
  const auto m = fixture_model("income-effect");
  for (int i = 0; i < 50; ++i) {
    const auto eta = draw_eta(m, 9, i);
    const double cv = agent_cv(m, 8.0, {1.3}, {1.3}, eta);
    CHECK(std::fabs(cv) < 1e-8);
  }
}

TEST_CASE("removal cv identity: y + cv equals welfare") {
  for (const char* name : {"quasilinear-logit", "income-effect", "multinomial-j2"}) {
    const auto m = fixture_model(name);
    const std::vector<double> prices(m.num_inside(), 0.8);
    const std::vector<double> removed(m.num_inside(), kInf);
    const double y = 6.0;
    for (int i = 0; i < 200; ++i) {
      const auto eta = draw_eta(m, 123, i);
      const double w = agent_welfare(m, BudgetPoint(prices, y), eta);
      const double cv = agent_cv(m, y, prices, removed, eta);
      CHECK(y + cv == doctest::Approx(w).epsilon(1e-8));
    }
  }
}

TEST_CASE("quasilinear cv identity holds agent by agent") {
  for (const char* name : {"quasilinear-logit", "quasilinear-probit"}) {
    const auto m = fixture_model(name);
    const std::vector<double> p0 = {1.5};
    const std::vector<double> p1 = {0.6};
    const double y = 9.0;
    for (int i = 0; i < 200; ++i) {
      const auto eta = draw_eta(m, 321, i);
      const double w0 = agent_welfare(m, BudgetPoint(p0, y), eta);
      const double w1 = agent_welfare(m, BudgetPoint(p1, y), eta);
      const double cv01 = agent_cv(m, y, p0, p1, eta);
      CHECK(w1 - w0 == doctest::Approx(-cv01).epsilon(1e-7));
    }
  }
}

TEST_CASE("cv decomposition fails off the quasilinear case") {
  // CV(y, p0 -> removal) != CV(y, p0 -> p1) + CV(y, p1 -> removal) for most
  // agents when income effects are present.
  const auto m = fixture_model("income-effect");
  const std::vector<double> p0 = {1.5};
  const std::vector<double> p1 = {0.6};
  const std::vector<double> removed = {kInf};
  const double y = 6.0;
  int broken = 0;
  const int n = 400;
  for (int i = 0; i < n; ++i) {
    const auto eta = draw_eta(m, 777, i);
    const double whole = agent_cv(m, y, p0, removed, eta);
    const double part1 = agent_cv(m, y, p0, p1, eta);
    const double part2 = agent_cv(m, y, p1, removed, eta);
    if (std::fabs(whole - (part1 + part2)) > 1e-6) ++broken;
  }
  CHECK(broken > n / 2);
}

TEST_CASE("welfare differences are not minus the cv with income effects") {
  const auto m = fixture_model("income-effect");
  const std::vector<double> p0 = {1.5};
  const std::vector<double> p1 = {0.6};
  const double y = 6.0;
  int large_gap = 0;
  const int n = 400;
  for (int i = 0; i < n; ++i) {
    const auto eta = draw_eta(m, 888, i);
    const double w0 = agent_welfare(m, BudgetPoint(p0, y), eta);
    const double w1 = agent_welfare(m, BudgetPoint(p1, y), eta);
    const double cv01 = agent_cv(m, y, p0, p1, eta);
    if (std::fabs((w1 - w0) + cv01) > 1e-3) ++large_gap;
  }
  CHECK(large_gap > n / 20);  // a positive-measure set of agents
}

TEST_CASE("oracle rejects models without utilities") {
  SplineProbitSpec sp;
  sp.beta_price = -0.2;
  sp.beta_spline = {0.1, 0.1, 0.1};
  sp.beta_covariates = {0.0};
  sp.covariate_profile = {};
  sp.y_min = 1.0;
  sp.y_max = 10.0;
  sp.segments = 3;
  sp.degree = 2;
  const auto m = ChoiceModel::spline_probit(sp);
  CHECK_THROWS_AS(simulate_welfare(m, BudgetPoint(1.0, 5.0), 10, 1), std::invalid_argument);
}
