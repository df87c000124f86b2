#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dcw/bounds.hpp"
#include "dcw/common.hpp"
#include "dcw/fixtures.hpp"
#include "dcw/rng.hpp"
#include "dcw/welfare.hpp"
#include "test_util.hpp"

using namespace dcw;

namespace {

// Demand observations from a model on a price/income grid.
ObservedDemandSet sample_demand(const ChoiceModel& model, const std::vector<double>& prices,
                                const std::vector<double>& incomes) {
  std::vector<DemandObservation> entries;
  const int J = model.num_inside();
  for (double y : incomes) {
    if (J == 1) {
      for (double p : prices) {
        entries.push_back({{p}, y, model.outside_prob(BudgetPoint(p, y))});
      }
    } else {
      for (double p1 : prices) {
        for (double p2 : prices) {
          entries.push_back({{p1, p2}, y, model.outside_prob(BudgetPoint({p1, p2}, y))});
        }
      }
    }
  }
  return ObservedDemandSet(std::move(entries));
}

}  // namespace

TEST_CASE("empty observation set gives vacuous bounds") {
  const ObservedDemandSet empty;
  const auto b = multinomial_cdf_bounds(empty, 12.0, BudgetPoint(1.0, 10.0));
  CHECK(b.lower == 0.0);
  CHECK(b.upper == 1.0);
  CHECK(b.lower_vacuous);
  CHECK(b.upper_vacuous);
  const auto o = ordered_cdf_bounds(empty, 12.0, 1.0, 10.0);
  CHECK(o.lower == 0.0);
  CHECK(o.upper == 1.0);
}

TEST_CASE("an exactly matching entry pins both bounds") {
  const double y = 10.0, p = 1.0, c = 12.5;
  const double q0 = 0.37;
  ObservedDemandSet s({{{c - y + p}, c, q0}});
  const auto b = multinomial_cdf_bounds(s, c, BudgetPoint(p, y));
  CHECK(b.lower == doctest::Approx(q0));
  CHECK(b.upper == doctest::Approx(q0));
  CHECK_FALSE(b.lower_vacuous);
  CHECK_FALSE(b.upper_vacuous);
}

TEST_CASE("bounds contain the truth for a binary logit model") {
  const auto m = fixture_model("quasilinear-logit");
  std::vector<double> grid_p, grid_y;
  for (int i = 0; i < 20; ++i) {
    grid_p.push_back(0.2 + 0.25 * i);
    grid_y.push_back(2.0 + 1.2 * i);
  }
  const auto s = sample_demand(m, grid_p, grid_y);
  const CounterRng rng(31);
  int informative = 0;
  for (int i = 0; i < 50; ++i) {
    const double p = 0.5 + 3.0 * rng.uniform(1, i);
    const double y = 4.0 + 15.0 * rng.uniform(2, i);
    const double c = y + 6.0 * rng.uniform(3, i);
    const double truth = welfare_cdf(m, BudgetPoint(p, y), c);
    const auto b = multinomial_cdf_bounds(s, c, BudgetPoint(p, y));
    CHECK(b.lower <= truth + 1e-9);
    CHECK(b.upper >= truth - 1e-9);
    CHECK(b.lower <= b.upper + 1e-9);
    informative += !b.lower_vacuous || !b.upper_vacuous;
  }
  CHECK(informative > 25);  // the grid actually binds most draws
}

TEST_CASE("bounds contain the truth for the multinomial model") {
  const auto m = fixture_model("multinomial-j2");
  std::vector<double> grid_p, grid_y;
  for (int i = 0; i < 8; ++i) grid_p.push_back(0.2 + 0.4 * i);
  for (int i = 0; i < 12; ++i) grid_y.push_back(2.0 + 1.5 * i);
  const auto s = sample_demand(m, grid_p, grid_y);
  const CounterRng rng(32);
  for (int i = 0; i < 50; ++i) {
    const BudgetPoint pt({0.5 + 2.0 * rng.uniform(1, i), 0.5 + 2.0 * rng.uniform(2, i)},
                         3.0 + 10.0 * rng.uniform(3, i));
    const double c = pt.income + 5.0 * rng.uniform(4, i);
    const double truth = welfare_cdf(m, pt, c);
    const auto b = multinomial_cdf_bounds(s, c, pt);
    CHECK(b.lower <= truth + 1e-9);
    CHECK(b.upper >= truth - 1e-9);
  }
}

TEST_CASE("enlarging the observation set tightens the bounds") {
  const auto m = fixture_model("quasilinear-logit");
  std::vector<double> coarse_p, coarse_y, fine_p, fine_y;
  for (int i = 0; i < 5; ++i) {
    coarse_p.push_back(0.3 + 0.9 * i);
    coarse_y.push_back(3.0 + 4.0 * i);
  }
  for (int i = 0; i < 17; ++i) {
    fine_p.push_back(0.3 + 0.225 * i);
    fine_y.push_back(3.0 + 1.0 * i);
  }
  const auto small = sample_demand(m, coarse_p, coarse_y);
  const auto large = sample_demand(m, fine_p, fine_y);  // superset of the coarse grid
  const CounterRng rng(33);
  for (int i = 0; i < 40; ++i) {
    const BudgetPoint pt(0.5 + 3.0 * rng.uniform(1, i), 4.0 + 12.0 * rng.uniform(2, i));
    const double c = pt.income + 5.0 * rng.uniform(3, i);
    const auto bs = multinomial_cdf_bounds(small, c, pt);
    const auto bl = multinomial_cdf_bounds(large, c, pt);
    CHECK(bl.lower >= bs.lower - 1e-12);
    CHECK(bl.upper <= bs.upper + 1e-12);
  }
}

TEST_CASE("ordered bounds: validation, membership, monotonicity, containment") {
  const auto m = fixture_model("ordered-3");

  // Doubled-price restriction enforced at load.
  CHECK_THROWS_AS(ObservedDemandSet::ordered({{{1.0, 2.5}, 5.0, 0.5}}), data_error);
  CHECK_THROWS_AS(ObservedDemandSet::ordered({{{1.0}, 5.0, 0.5}}), data_error);

  std::vector<DemandObservation> entries;
  for (int i = 0; i < 18; ++i) {
    for (int k = 0; k < 18; ++k) {
      const double pt = 0.2 + 0.15 * i;
      const double yt = 2.0 + 0.9 * k;
      entries.push_back({{pt, 2.0 * pt}, yt, m.outside_prob(BudgetPoint({pt, 2.0 * pt}, yt))});
    }
  }
  const auto s = ObservedDemandSet::ordered(std::move(entries));

  // An entry at (p, y) itself is feasible for the lower bound at c = y.
  {
    const double p = 0.5, y = 6.5;  // on the grid
    const double q0 = m.outside_prob(BudgetPoint({p, 2.0 * p}, y));
    const auto b = ordered_cdf_bounds(s, y, p, y);
    CHECK(b.lower >= q0 - 1e-12);
  }

  const CounterRng rng(34);
  for (int i = 0; i < 50; ++i) {
    const double p = 0.3 + 2.0 * rng.uniform(1, i);
    const double y = 3.0 + 12.0 * rng.uniform(2, i);
    const double c = y + 6.0 * rng.uniform(3, i);
    const double truth = welfare_cdf(m, BudgetPoint({p, 2.0 * p}, y), c);
    const auto b = ordered_cdf_bounds(s, c, p, y);
    CHECK(b.lower <= truth + 1e-9);
    CHECK(b.upper >= truth - 1e-9);
    CHECK(b.lower <= b.upper + 1e-9);
  }

  // L and H are non-decreasing in c.
  for (double p : {0.5, 1.1}) {
    const double y = 7.0;
    double prev_l = -1.0, prev_h = -1.0;
    for (int i = 0; i <= 40; ++i) {
      const double c = y + 0.35 * i;
      const auto b = ordered_cdf_bounds(s, c, p, y);
      CHECK(b.lower >= prev_l - 1e-12);
      CHECK(b.upper >= prev_h - 1e-12);
      CHECK(b.lower >= 0.0);
      CHECK(b.upper <= 1.0);
      prev_l = b.lower;
      prev_h = b.upper;
    }
  }
}

TEST_CASE("bounds input validation") {
  ObservedDemandSet s({{{1.0}, 5.0, 0.4}});
  CHECK_THROWS_AS(multinomial_cdf_bounds(s, 4.0, BudgetPoint(1.0, 5.0)),
                  std::invalid_argument);  // c below income
  CHECK_THROWS_AS(ObservedDemandSet({{{1.0}, 5.0, 1.4}}), data_error);
  CHECK_THROWS_AS(ObservedDemandSet({{{1.0}, 5.0, 0.4}, {{1.0}, 5.0, 0.6}}), data_error);
  CHECK_THROWS_AS(ObservedDemandSet({{{1.0}, 5.0, 0.4}, {{1.0, 2.0}, 5.0, 0.6}}), data_error);
}
