#include "dcw/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dcw/common.hpp"
#include "dcw/rng.hpp"

namespace dcw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBisectTol = 1e-10;

// Solves U_0(n, eta) = target for n by bisection. The lower bracket end is
// 0; the upper end starts at `hint` and doubles up to 60 times.
double invert_outside_by_bisection(const ChoiceModel& model,
                                   std::span<const double> eta, double target,
                                   double hint) {
  const auto u0 = [&](double n) { return model.utility(0, n, eta); };
  double lo = 0.0;
  const double u_lo = u0(lo);
  if (!(target >= u_lo)) {
    // Target below U_0(0): the inverse is negative, which can never beat
    // income in the welfare max. Signal with -inf.
    return -kInf;
  }
  double hi = std::max(hint, 1.0);
  int doublings = 0;
  while (u0(hi) < target) {
    hi *= 2.0;
    if (++doublings > 60) {
      throw numerical_error("agent welfare: bisection bracket failure (outside utility bounded?)");
    }
  }
  while (hi - lo > kBisectTol) {
    const double mid = 0.5 * (lo + hi);
    if (u0(mid) < target) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double heterogeneity_scale(const ChoiceModel& model) {
  double s = 0.0;
  for (int k = 0; k < model.eta_dim(); ++k) {
    s = std::max(s, model.eta_dist(k).bracket_radius());
  }
  return s;
}

}  // namespace

std::vector<double> SimulatedPopulation::shares() const {
  std::vector<long long> counts;
  int max_j = 0;
  for (const auto& a : agents) max_j = std::max(max_j, a.choice);
  counts.assign(static_cast<std::size_t>(std::max(max_j, point.num_inside())) + 1, 0);
  for (const auto& a : agents) ++counts[a.choice];
  std::vector<double> q(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j) {
    q[j] = static_cast<double>(counts[j]) / static_cast<double>(agents.size());
  }
  return q;
}

std::vector<double> SimulatedPopulation::welfare_values() const {
  std::vector<double> w;
  w.reserve(agents.size());
  for (const auto& a : agents) w.push_back(a.welfare);
  return w;
}

double SimulatedPopulation::empirical_cdf(double c) const {
  long long n = 0;
  for (const auto& a : agents) n += a.welfare <= c;
  return static_cast<double>(n) / static_cast<double>(agents.size());
}

std::vector<double> draw_eta(const ChoiceModel& model, std::uint64_t seed,
                             std::uint64_t index) {
  const CounterRng rng(seed);
  std::vector<double> eta(model.eta_dim());
  for (int k = 0; k < model.eta_dim(); ++k) {
    eta[k] = model.eta_dist(k).quantile(rng.uniform(k + 1, index));
  }
  return eta;
}

double agent_welfare(const ChoiceModel& model, const BudgetPoint& point,
                     const std::vector<double>& eta, int* chosen) {
  if (!model.has_utilities()) {
    throw std::invalid_argument("agent_welfare: model does not expose utilities");
  }
  const double y = point.income;
  const double scale = heterogeneity_scale(model);
  double w = y;
  int best = 0;
  double best_u = model.utility(0, y, eta);
  for (int j = 1; j <= point.num_inside(); ++j) {
    const double numeraire = y - point.prices[j - 1];
    const double uj = model.utility(j, numeraire, eta);
    if (!std::isfinite(uj)) continue;  // unaffordable or removed alternative
    if (uj > best_u) {
      best_u = uj;
      best = j;
    }
    const double inv = invert_outside_by_bisection(model, eta, uj, y + 10.0 * std::max(scale, 1.0));
    if (inv > w) w = inv;
  }
  if (chosen != nullptr) *chosen = best;
  return w;
}

SimulatedPopulation simulate_welfare(const ChoiceModel& model,
                                     const BudgetPoint& point, int n,
                                     std::uint64_t seed) {
  point.validate();
  if (n < 1) throw std::invalid_argument("simulate_welfare: n must be positive");
  if (point.num_inside() != model.num_inside()) {
    throw std::invalid_argument("simulate_welfare: price vector length does not match J");
  }
  SimulatedPopulation pop;
  pop.point = point;
  pop.seed = seed;
  pop.agents.resize(n);
  for (int i = 0; i < n; ++i) {
    AgentRecord& a = pop.agents[i];
    a.eta = draw_eta(model, seed, static_cast<std::uint64_t>(i));
    a.welfare = agent_welfare(model, point, a.eta, &a.choice);
  }
  return pop;
}

double agent_cv(const ChoiceModel& model, double income,
                const std::vector<double>& p_from,
                const std::vector<double>& p_to,
                const std::vector<double>& eta) {
  if (!(income > 0.0)) throw std::invalid_argument("agent_cv: income must be positive");
  const BudgetPoint from(p_from, income);
  const double w_from = agent_welfare(model, from, eta);

  const auto w_to_at = [&](double y) {
    return agent_welfare(model, BudgetPoint(p_to, y), eta);
  };
  // W(p_to, y + cv) is strictly increasing in cv; bracket then bisect.
  double lo = -income + 1e-12;
  double hi = std::max(w_from, income);
  int doublings = 0;
  while (w_to_at(income + hi) < w_from) {
    hi = 2.0 * hi + 1.0;
    if (++doublings > 60) throw numerical_error("agent_cv: no root in search bracket");
  }
  if (w_to_at(income + lo) > w_from) {
    throw numerical_error("agent_cv: target below the searchable income range");
  }
  constexpr double kTol = 1e-8;
  while (hi - lo > kTol * 0.5) {
    const double mid = 0.5 * (lo + hi);
    if (w_to_at(income + mid) < w_from) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace dcw
