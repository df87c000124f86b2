#include "dcw/bounds.hpp"

#include <cmath>
#include <set>

#include "dcw/common.hpp"

namespace dcw {

namespace {
constexpr double kSlack = 1e-12;
}

ObservedDemandSet::ObservedDemandSet(std::vector<DemandObservation> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) return;
  J_ = static_cast<int>(entries_.front().prices.size());
  std::set<std::pair<std::vector<double>, double>> seen;
  for (const auto& e : entries_) {
    if (static_cast<int>(e.prices.size()) != J_) {
      throw data_error("demand set: entries must share a common number of alternatives");
    }
    for (double r : e.prices) {
      if (!std::isfinite(r) || r < 0.0) throw data_error("demand set: prices must be non-negative");
    }
    if (!std::isfinite(e.income) || !(e.income > 0.0)) {
      throw data_error("demand set: incomes must be positive");
    }
    if (!(e.q0 >= 0.0 && e.q0 <= 1.0)) {
      throw data_error("demand set: outside shares must lie in [0, 1]");
    }
    if (!seen.insert({e.prices, e.income}).second) {
      throw data_error("demand set: duplicate (prices, income) entry");
    }
  }
}

ObservedDemandSet ObservedDemandSet::ordered(std::vector<DemandObservation> entries) {
  for (const auto& e : entries) {
    if (e.prices.size() != 2) {
      throw data_error("ordered demand set: entries must carry exactly two prices");
    }
    const double p1 = e.prices[0];
    const double p2 = e.prices[1];
    if (std::fabs(p2 - 2.0 * p1) > 1e-9 * std::fmax(1.0, std::fabs(p2))) {
      throw data_error("ordered demand set: second price must be twice the first");
    }
  }
  return ObservedDemandSet(std::move(entries));
}

CdfBounds multinomial_cdf_bounds(const ObservedDemandSet& s, double c,
                                 const BudgetPoint& point) {
  point.validate();
  if (!std::isfinite(c)) throw std::invalid_argument("bounds: c must be finite");
  if (c < point.income) {
    throw std::invalid_argument("bounds: c must be at least income (the CDF is exactly 0 below)");
  }
  if (!s.empty() && s.num_inside() != point.num_inside()) {
    throw data_error("bounds: demand set and budget point disagree on J");
  }
  CdfBounds out;
  bool have_lower = false;
  bool have_upper = false;
  const double y = point.income;
  for (const auto& e : s.entries()) {
    bool lower_ok = e.income <= c + kSlack;
    bool upper_ok = e.income >= c - kSlack;
    for (int j = 0; j < point.num_inside() && (lower_ok || upper_ok); ++j) {
      const double lhs = e.income - e.prices[j];
      const double rhs = y - point.prices[j];
      if (lhs < rhs - kSlack) lower_ok = false;
      if (lhs > rhs + kSlack) upper_ok = false;
    }
    if (lower_ok) {
      out.lower = have_lower ? std::max(out.lower, e.q0) : e.q0;
      have_lower = true;
    }
    if (upper_ok) {
      out.upper = have_upper ? std::min(out.upper, e.q0) : e.q0;
      have_upper = true;
    }
  }
  out.lower_vacuous = !have_lower;
  out.upper_vacuous = !have_upper;
  if (!have_lower) out.lower = 0.0;
  if (!have_upper) out.upper = 1.0;
  return out;
}

CdfBounds ordered_cdf_bounds(const ObservedDemandSet& s, double c,
                             double unit_price, double income) {
  if (!(unit_price >= 0.0) || !(income > 0.0)) {
    throw std::invalid_argument("ordered bounds: bad price or income");
  }
  if (!std::isfinite(c)) throw std::invalid_argument("ordered bounds: c must be finite");
  if (c < income) {
    throw std::invalid_argument("ordered bounds: c must be at least income");
  }
  CdfBounds out;
  bool have_lower = false;
  bool have_upper = false;
  for (const auto& e : s.entries()) {
    const double pt = e.prices[0];
    const double yt = e.income;
    const bool lower_ok = yt - pt >= income - unit_price - kSlack &&
                          yt - 2.0 * pt >= income - 2.0 * unit_price - kSlack &&
                          yt <= c + kSlack;
    const bool upper_ok = yt - pt <= income - unit_price + kSlack &&
                          yt - 2.0 * pt <= income - 2.0 * unit_price + kSlack &&
                          yt >= c - kSlack;
    if (lower_ok) {
      out.lower = have_lower ? std::max(out.lower, e.q0) : e.q0;
      have_lower = true;
    }
    if (upper_ok) {
      out.upper = have_upper ? std::min(out.upper, e.q0) : e.q0;
      have_upper = true;
    }
  }
  out.lower_vacuous = !have_lower;
  out.upper_vacuous = !have_upper;
  if (!have_lower) out.lower = 0.0;
  if (!have_upper) out.upper = 1.0;
  return out;
}

}  // namespace dcw
