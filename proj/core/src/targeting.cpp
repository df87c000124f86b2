#include "dcw/targeting.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "dcw/common.hpp"
#include "dcw/rng.hpp"

namespace dcw {

// ---------------------------------------------------------------------------
// IncomeDistribution / ScheduleSpace
// ---------------------------------------------------------------------------

IncomeDistribution IncomeDistribution::from_grid(std::vector<double> points,
                                                 std::vector<double> weights) {
  IncomeDistribution f;
  f.points = std::move(points);
  f.weights = std::move(weights);
  f.validate();
  double s = 0.0;
  for (double w : f.weights) s += w;
  for (double& w : f.weights) w /= s;
  return f;
}

IncomeDistribution IncomeDistribution::from_sample(std::vector<double> sample) {
  if (sample.empty()) throw config_error("income distribution: empty sample");
  std::sort(sample.begin(), sample.end());
  IncomeDistribution f;
  f.weights.assign(sample.size(), 1.0 / static_cast<double>(sample.size()));
  f.points = std::move(sample);
  f.validate();
  return f;
}

double IncomeDistribution::mean() const {
  double m = 0.0;
  for (int i = 0; i < size(); ++i) m += weights[i] * points[i];
  return m;
}

void IncomeDistribution::validate() const {
  if (points.empty() || points.size() != weights.size()) {
    throw config_error("income distribution: points/weights mismatch");
  }
  for (double y : points) {
    if (!(y > 0.0) || !std::isfinite(y)) {
      throw config_error("income distribution: incomes must be positive");
    }
  }
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw config_error("income distribution: weights must be positive");
    }
  }
}

ScheduleSpace::ScheduleSpace(SplineBasis b, double lo, double hi)
    : basis(std::move(b)), sigma_min(lo), sigma_max(hi) {
  if (!(hi > lo)) throw config_error("schedule space: sigma_max must exceed sigma_min");
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw config_error("schedule space: bounds must be finite");
  }
}

// ---------------------------------------------------------------------------
// Criterion evaluation (fixed-panel quadrature: smooth in the parameters)
// ---------------------------------------------------------------------------

namespace {

struct Problem {
  const ChoiceModel* model;
  double pbar;
  TargetCriterion criterion;
  const IncomeDistribution* fy;
  QuadratureConfig quad;
  int panels;

  double q1(double price, double income) const {
    return model->choice_prob(1, BudgetPoint(price, income));
  }

  // Per-capita benefit at one income point.
  double benefit(double sigma, double y) const {
    if (sigma == 0.0) return 0.0;
    switch (criterion.kind) {
      case TargetObjective::Ate:
        return q1(pbar - sigma, y) - q1(pbar, y);
      case TargetObjective::Acv: {
        if (sigma > 0.0) {
          const auto f = [&](double z) { return q1(pbar - sigma + z, y + z); };
          return integrate_fixed(f, 0.0, sigma, 32);
        }
        const auto f = [&](double z) { return q1(pbar + z, y + z); };
        return -integrate_fixed(f, 0.0, -sigma, 32);
      }
      case TargetObjective::Casw: {
        const double zmax = quad.zmax(y);
        if (!(zmax > 0.0)) {
          throw numerical_error("targeting: income at or above the y_max truncation point");
        }
        const double eps = criterion.epsilon;
        const auto f = [&](double z) {
          const double diff = q1(pbar - sigma + z, y + z) - q1(pbar + z, y + z);
          return eps == 0.0 ? diff : std::pow(z + y, -eps) * diff;
        };
        return integrate_fixed(f, 0.0, zmax, panels);
      }
    }
    return 0.0;
  }

  double point_cost(double sigma, double y) const {
    if (pbar - sigma < 0.0) {
      throw config_error("targeting: schedule pushes the price negative");
    }
    return sigma * q1(pbar - sigma, y);
  }

  double objective(const std::vector<double>& sigmas) const {
    double v = 0.0;
    for (int k = 0; k < fy->size(); ++k) {
      v += fy->weights[k] * benefit(sigmas[k], fy->points[k]);
    }
    return v;
  }

  double cost(const std::vector<double>& sigmas) const {
    double v = 0.0;
    for (int k = 0; k < fy->size(); ++k) {
      v += fy->weights[k] * point_cost(sigmas[k], fy->points[k]);
    }
    return v;
  }
};

// Schedule values at the income points for a coefficient vector.
std::vector<double> schedule_values(const SplineBasis& basis,
                                    const Eigen::VectorXd& theta,
                                    const IncomeDistribution& fy) {
  std::vector<double> s(fy.size());
  std::vector<double> coeffs(theta.data(), theta.data() + theta.size());
  for (int k = 0; k < fy.size(); ++k) s[k] = basis.value(coeffs, fy.points[k]);
  return s;
}

// ---------------------------------------------------------------------------
// Box-projected BFGS for smooth objectives in few dimensions
// ---------------------------------------------------------------------------

struct BoxMinimizer {
  double lo, hi;
  int max_iter;
  double tol;

  Eigen::VectorXd clampv(Eigen::VectorXd x) const {
    for (int i = 0; i < x.size(); ++i) x(i) = std::clamp(x(i), lo, hi);
    return x;
  }

  Eigen::VectorXd fd_grad(const std::function<double(const Eigen::VectorXd&)>& f,
                          const Eigen::VectorXd& x) const {
    const int d = static_cast<int>(x.size());
    Eigen::VectorXd g(d);
    for (int i = 0; i < d; ++i) {
      const double h = 1e-6 * std::max(1.0, std::fabs(x(i)));
      Eigen::VectorXd xp = x, xm = x;
      xp(i) = std::min(x(i) + h, hi);
      xm(i) = std::max(x(i) - h, lo);
      g(i) = (f(xp) - f(xm)) / (xp(i) - xm(i));
    }
    return g;
  }

  Eigen::VectorXd projected_grad(const Eigen::VectorXd& x, const Eigen::VectorXd& g) const {
    Eigen::VectorXd pg = g;
    for (int i = 0; i < x.size(); ++i) {
      if ((x(i) <= lo + 1e-12 && g(i) > 0.0) || (x(i) >= hi - 1e-12 && g(i) < 0.0)) {
        pg(i) = 0.0;
      }
    }
    return pg;
  }

  // Minimizes f over the box; returns the final projected gradient norm.
  double minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                  Eigen::VectorXd& x) const {
    const int d = static_cast<int>(x.size());
    x = clampv(x);
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd g = fd_grad(f, x);
    double fx = f(x);
    for (int it = 0; it < max_iter; ++it) {
      const Eigen::VectorXd pg = projected_grad(x, g);
      if (pg.norm() <= tol) return pg.norm();
      Eigen::VectorXd dir = -(H * g);
      for (int i = 0; i < d; ++i) {
        if ((x(i) <= lo + 1e-12 && dir(i) < 0.0) || (x(i) >= hi - 1e-12 && dir(i) > 0.0)) {
          dir(i) = 0.0;
        }
      }
      if (dir.dot(g) > -1e-14 * g.norm() * dir.norm()) {
        dir = -pg;  // fall back to projected steepest descent
        H.setIdentity();
      }
      double alpha = 1.0;
      Eigen::VectorXd x_new = x;
      double f_new = fx;
      bool moved = false;
      for (int ls = 0; ls < 50; ++ls) {
        const Eigen::VectorXd cand = clampv(x + alpha * dir);
        const double fc = f(cand);
        if (fc < fx - 1e-12 * std::fabs(fx) || (fc < fx && (cand - x).norm() > 0.0)) {
          x_new = cand;
          f_new = fc;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) return projected_grad(x, g).norm();
      const Eigen::VectorXd g_new = fd_grad(f, x_new);
      const Eigen::VectorXd s = x_new - x;
      const Eigen::VectorXd yv = g_new - g;
      const double sy = s.dot(yv);
      if (sy > 1e-12) {
        const Eigen::VectorXd Hy = H * yv;
        const double yHy = yv.dot(Hy);
        H += ((sy + yHy) / (sy * sy)) * (s * s.transpose()) -
             (Hy * s.transpose() + s * Hy.transpose()) / sy;
      } else {
        H.setIdentity();
      }
      x = x_new;
      g = g_new;
      fx = f_new;
    }
    return projected_grad(x, g).norm();
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

double program_cost(const ChoiceModel& model, double pbar,
                    const SubsidySchedule& schedule, const IncomeDistribution& fy) {
  if (model.num_inside() != 1) {
    throw std::invalid_argument("program_cost: model must be binary");
  }
  fy.validate();
  double total = 0.0;
  for (int k = 0; k < fy.size(); ++k) {
    const double sigma = schedule(fy.points[k]);
    if (pbar - sigma < 0.0) {
      throw config_error("program_cost: schedule pushes the price negative");
    }
    total += fy.weights[k] * sigma *
             model.choice_prob(1, BudgetPoint(pbar - sigma, fy.points[k]));
  }
  return total;
}

namespace {

struct Candidate {
  Eigen::VectorXd theta;
  double objective = -std::numeric_limits<double>::infinity();
  double cost = 0.0;
  double residual = 0.0;
  double pg_norm = 0.0;
  double lambda = 0.0;
  bool feasible = false;
};

// Newton polish of the equality-constrained KKT system on the free
// coordinates; bounded coordinates stay fixed.
void kkt_polish(const Problem& pb, const ScheduleSpace& space, double budget,
                Eigen::VectorXd& theta, double& lambda) {
  const int d = static_cast<int>(theta.size());
  const auto obj = [&](const Eigen::VectorXd& t) {
    return pb.objective(schedule_values(space.basis, t, *pb.fy));
  };
  const auto cost = [&](const Eigen::VectorXd& t) {
    return pb.cost(schedule_values(space.basis, t, *pb.fy));
  };
  for (int attempt = 0; attempt < 3; ++attempt) {
    std::vector<int> free_idx;
    for (int i = 0; i < d; ++i) {
      if (theta(i) > space.sigma_min + 1e-9 && theta(i) < space.sigma_max - 1e-9) {
        free_idx.push_back(i);
      }
    }
    if (free_idx.empty()) return;
    const int nf = static_cast<int>(free_idx.size());
    const auto residual = [&](const Eigen::VectorXd& tf, double lam) {
      Eigen::VectorXd full = theta;
      for (int i = 0; i < nf; ++i) full(free_idx[i]) = tf(i);
      Eigen::VectorXd r(nf + 1);
      for (int i = 0; i < nf; ++i) {
        const int ix = free_idx[i];
        const double h = 1e-6 * std::max(1.0, std::fabs(full(ix)));
        Eigen::VectorXd p = full, m = full;
        p(ix) += h;
        m(ix) -= h;
        const double dobj = (obj(p) - obj(m)) / (2.0 * h);
        const double dcost = (cost(p) - cost(m)) / (2.0 * h);
        r(i) = -dobj + lam * dcost;
      }
      r(nf) = cost(full) - budget;
      return r;
    };
    Eigen::VectorXd tf(nf);
    for (int i = 0; i < nf; ++i) tf(i) = theta(free_idx[i]);
    bool hit_bound = false;
    for (int iter = 0; iter < 40; ++iter) {
      const Eigen::VectorXd r = residual(tf, lambda);
      if (r.norm() < 1e-10) break;
      Eigen::MatrixXd J(nf + 1, nf + 1);
      for (int j = 0; j < nf; ++j) {
        const double h = 1e-5 * std::max(1.0, std::fabs(tf(j)));
        Eigen::VectorXd tp = tf, tm = tf;
        tp(j) += h;
        tm(j) -= h;
        J.col(j) = (residual(tp, lambda) - residual(tm, lambda)) / (2.0 * h);
      }
      {
        const double h = 1e-5 * std::max(1.0, std::fabs(lambda));
        J.col(nf) = (residual(tf, lambda + h) - residual(tf, lambda - h)) / (2.0 * h);
      }
      const Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
      Eigen::VectorXd step = svd.solve(-r);
      if (!step.allFinite()) break;
      // Damp and respect the box.
      double scale = 1.0;
      for (int i = 0; i < nf; ++i) {
        const double next = tf(i) + step(i);
        if (next < space.sigma_min) {
          scale = std::min(scale, (space.sigma_min - tf(i)) / step(i));
          hit_bound = true;
        }
        if (next > space.sigma_max) {
          scale = std::min(scale, (space.sigma_max - tf(i)) / step(i));
          hit_bound = true;
        }
      }
      tf += scale * step.head(nf);
      lambda += scale * step(nf);
      if (hit_bound) break;
    }
    for (int i = 0; i < nf; ++i) theta(free_idx[i]) = tf(i);
    for (int i = 0; i < d; ++i) theta(i) = std::clamp(theta(i), space.sigma_min, space.sigma_max);
    if (!hit_bound) return;
  }
}

}  // namespace

TargetReport optimal_schedule(const ChoiceModel& model, double pbar,
                              const TargetCriterion& criterion,
                              const IncomeDistribution& fy, double budget,
                              const ScheduleSpace& space, BudgetMode mode,
                              const QuadratureConfig& quad,
                              const TargetingOptions& opts) {
  if (model.num_inside() != 1) {
    throw std::invalid_argument("optimal_schedule: model must be binary");
  }
  fy.validate();
  if (!(pbar > 0.0)) throw config_error("optimal_schedule: base price must be positive");
  if (!(space.sigma_max < pbar)) {
    throw config_error("optimal_schedule: sigma_max must stay below the base price");
  }

  Problem pb{&model, pbar, criterion, &fy, quad, opts.objective_panels};
  const int d = space.basis.size();
  const double budget_scale = std::max(1.0, std::fabs(budget));

  const auto obj_of = [&](const Eigen::VectorXd& t) {
    return pb.objective(schedule_values(space.basis, t, fy));
  };
  const auto cost_of = [&](const Eigen::VectorXd& t) {
    return pb.cost(schedule_values(space.basis, t, fy));
  };

  // Deterministic multistarts.
  std::vector<Eigen::VectorXd> starts;
  starts.push_back(Eigen::VectorXd::Zero(d));
  {
    Eigen::VectorXd t(d);
    for (int i = 0; i < d; ++i) {
      const double u = d > 1 ? static_cast<double>(i) / (d - 1) : 0.0;
      t(i) = space.sigma_max * 0.5 * (1.0 - u) + space.sigma_min * 0.5 * u;
    }
    starts.push_back(t);            // decreasing ramp
    starts.push_back(t.reverse());  // increasing ramp
  }
  {
    SeqRng rng(opts.seed, 77);
    for (int s = static_cast<int>(starts.size()); s < opts.multistarts; ++s) {
      Eigen::VectorXd t(d);
      for (int i = 0; i < d; ++i) {
        t(i) = space.sigma_min + (space.sigma_max - space.sigma_min) * rng.uniform();
      }
      starts.push_back(t);
    }
  }

  // AtMost: when the unconstrained optimum already fits the budget, the
  // multiplier is zero and no penalty phase is needed.
  if (mode == BudgetMode::AtMost) {
    BoxMinimizer box{space.sigma_min, space.sigma_max, opts.max_iter,
                     opts.stationarity_tol * 0.5};
    Eigen::VectorXd best;
    double best_obj = -std::numeric_limits<double>::infinity();
    double best_pg = 0.0;
    for (auto t : starts) {
      const double pg = box.minimize([&](const Eigen::VectorXd& x) { return -obj_of(x); }, t);
      const double o = obj_of(t);
      if (o > best_obj) { best_obj = o; best = t; best_pg = pg; }
    }
    if (cost_of(best) <= budget + opts.budget_tol * budget_scale) {
      TargetReport rep;
      rep.schedule = SubsidySchedule{space.basis,
                                     std::vector<double>(best.data(), best.data() + d),
                                     space.sigma_min, space.sigma_max};
      rep.objective = best_obj;
      rep.cost = cost_of(best);
      rep.budget_residual = std::max(0.0, rep.cost - budget);
      rep.projected_gradient_norm = best_pg;
      rep.lambda = 0.0;
      for (int i = 0; i < d; ++i) {
        rep.at_bounds |= best(i) <= space.sigma_min + 1e-9 || best(i) >= space.sigma_max - 1e-9;
      }
      return rep;
    }
    // Budget binds: fall through to the equality machinery.
  }

  std::vector<Candidate> finished;
  for (const auto& start : starts) {
    Eigen::VectorXd t = start;
    double pg_norm = 0.0;
    // Penalty continuation.
    for (double c : {1e1, 1e3, 1e5}) {
      BoxMinimizer box{space.sigma_min, space.sigma_max, opts.max_iter,
                       opts.stationarity_tol * 0.1};
      const auto penalized = [&](const Eigen::VectorXd& x) {
        const double r = cost_of(x) - budget;
        const double viol = mode == BudgetMode::AtMost ? std::max(0.0, r) : r;
        return -obj_of(x) + c * viol * viol;
      };
      pg_norm = box.minimize(penalized, t);
    }
    // Multiplier estimate, then a KKT polish.
    double lambda = 0.0;
    {
      BoxMinimizer box{space.sigma_min, space.sigma_max, 1, 1.0};
      const Eigen::VectorXd go = box.fd_grad(obj_of, t);
      const Eigen::VectorXd gc = box.fd_grad(cost_of, t);
      const double denom = gc.squaredNorm();
      lambda = denom > 1e-14 ? go.dot(gc) / denom : 0.0;
    }
    const bool tax_active = mode == BudgetMode::Equality ||
                            cost_of(t) > budget - opts.budget_tol * budget_scale;
    if (tax_active) kkt_polish(pb, space, budget, t, lambda);

    Candidate cand;
    cand.theta = t;
    cand.objective = obj_of(t);
    cand.cost = cost_of(t);
    cand.residual = cand.cost - budget;
    if (mode == BudgetMode::AtMost) cand.residual = std::max(0.0, cand.residual);
    cand.lambda = lambda;
    {
      // Projected gradient of the Lagrangian.
      BoxMinimizer box{space.sigma_min, space.sigma_max, 1, 1.0};
      const auto lagrangian = [&](const Eigen::VectorXd& x) {
        return -obj_of(x) + lambda * (cost_of(x) - budget);
      };
      const Eigen::VectorXd gl = box.fd_grad(lagrangian, t);
      cand.pg_norm = box.projected_grad(t, gl).norm();
    }
    cand.feasible = std::fabs(cand.residual) <= opts.budget_tol * budget_scale;
    finished.push_back(std::move(cand));
    (void)pg_norm;
  }

  const Candidate* best = nullptr;
  for (const auto& c : finished) {
    if (!c.feasible || c.pg_norm > opts.stationarity_tol) continue;
    if (best == nullptr || c.objective > best->objective) best = &c;
  }
  if (best == nullptr) {
    // Distinguish an infeasible budget from solver failure: scan constant
    // schedules for the reachable cost range.
    double lo_cost = std::numeric_limits<double>::infinity();
    double hi_cost = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 64; ++i) {
      const double s = space.sigma_min + (space.sigma_max - space.sigma_min) * i / 64.0;
      const double c = pb.cost(std::vector<double>(fy.size(), s));
      lo_cost = std::min(lo_cost, c);
      hi_cost = std::max(hi_cost, c);
    }
    if (budget < lo_cost - opts.budget_tol || budget > hi_cost + opts.budget_tol) {
      throw config_error("optimal_schedule: budget unreachable within the box");
    }
    throw numerical_error("optimal_schedule: no start converged to a feasible stationary point");
  }

  TargetReport rep;
  rep.schedule = SubsidySchedule{space.basis,
                                 std::vector<double>(best->theta.data(), best->theta.data() + d),
                                 space.sigma_min, space.sigma_max};
  rep.objective = best->objective;
  rep.cost = best->cost;
  rep.budget_residual = best->residual;
  rep.projected_gradient_norm = best->pg_norm;
  rep.lambda = best->lambda;
  for (int i = 0; i < d; ++i) {
    rep.at_bounds |= best->theta(i) <= space.sigma_min + 1e-9 ||
                     best->theta(i) >= space.sigma_max - 1e-9;
  }
  {
    double obj_lo = std::numeric_limits<double>::infinity();
    double obj_hi = -std::numeric_limits<double>::infinity();
    for (const auto& c : finished) {
      if (!c.feasible) continue;
      obj_lo = std::min(obj_lo, c.objective);
      obj_hi = std::max(obj_hi, c.objective);
    }
    rep.flat_objective = obj_hi - obj_lo < 1e-8 * std::max(1.0, std::fabs(obj_hi));
  }
  {
    // Spread of B'/C' over interior income points.
    const auto sig = schedule_values(space.basis, best->theta, fy);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < fy.size(); ++k) {
      if (sig[k] <= space.sigma_min + 1e-7 || sig[k] >= space.sigma_max - 1e-7) continue;
      const double h = 1e-5 * std::max(1.0, std::fabs(sig[k]));
      const double y = fy.points[k];
      const double db = (pb.benefit(sig[k] + h, y) - pb.benefit(sig[k] - h, y)) / (2.0 * h);
      const double dc = (pb.point_cost(sig[k] + h, y) - pb.point_cost(sig[k] - h, y)) / (2.0 * h);
      if (std::fabs(dc) < 1e-10) continue;
      const double ratio = db / dc;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    rep.foc_max_residual = (hi >= lo) ? hi - lo : 0.0;
  }
  return rep;
}

TargetReport bayes_optimal_schedule(const std::vector<PosteriorPoint>& posterior,
                                    double pbar, const TargetCriterion& criterion,
                                    double penalty_c, double budget,
                                    const ScheduleSpace& space,
                                    const QuadratureConfig& quad,
                                    const TargetingOptions& opts) {
  if (posterior.empty()) throw config_error("bayes schedule: posterior is empty");
  if (!(penalty_c >= 0.0)) throw config_error("bayes schedule: penalty must be non-negative");
  for (const auto& p : posterior) {
    if (p.model.num_inside() != 1) {
      throw std::invalid_argument("bayes schedule: models must be binary");
    }
    p.incomes.validate();
  }
  if (!(space.sigma_max < pbar)) {
    throw config_error("bayes schedule: sigma_max must stay below the base price");
  }
  const int d = space.basis.size();
  const double w = 1.0 / static_cast<double>(posterior.size());

  const auto loss = [&](const Eigen::VectorXd& t) {
    double total = 0.0;
    for (const auto& p : posterior) {
      Problem pb{&p.model, pbar, criterion, &p.incomes, quad, opts.objective_panels};
      const auto sig = schedule_values(space.basis, t, p.incomes);
      const double r = budget - pb.cost(sig);
      total += w * (-pb.objective(sig) + penalty_c * r * r);
    }
    return total;
  };

  std::vector<Eigen::VectorXd> starts;
  starts.push_back(Eigen::VectorXd::Zero(d));
  SeqRng rng(opts.seed, 78);
  for (int s = 1; s < opts.multistarts; ++s) {
    Eigen::VectorXd t(d);
    for (int i = 0; i < d; ++i) {
      t(i) = space.sigma_min + (space.sigma_max - space.sigma_min) * rng.uniform();
    }
    starts.push_back(t);
  }

  BoxMinimizer box{space.sigma_min, space.sigma_max, opts.max_iter,
                   opts.stationarity_tol};
  Eigen::VectorXd best;
  double best_loss = std::numeric_limits<double>::infinity();
  double best_pg = 0.0;
  double lo_loss = std::numeric_limits<double>::infinity();
  double hi_loss = -std::numeric_limits<double>::infinity();
  for (auto t : starts) {
    const double pg = box.minimize(loss, t);
    const double l = loss(t);
    lo_loss = std::min(lo_loss, l);
    hi_loss = std::max(hi_loss, l);
    if (l < best_loss) { best_loss = l; best = t; best_pg = pg; }
  }

  TargetReport rep;
  rep.schedule = SubsidySchedule{space.basis,
                                 std::vector<double>(best.data(), best.data() + d),
                                 space.sigma_min, space.sigma_max};
  rep.projected_gradient_norm = best_pg;
  double mean_obj = 0.0;
  double mean_cost = 0.0;
  for (const auto& p : posterior) {
    Problem pb{&p.model, pbar, criterion, &p.incomes, quad, opts.objective_panels};
    const auto sig = schedule_values(space.basis, best, p.incomes);
    mean_obj += w * pb.objective(sig);
    mean_cost += w * pb.cost(sig);
  }
  rep.objective = mean_obj;
  rep.cost = mean_cost;
  rep.budget_residual = mean_cost - budget;
  rep.lambda = 2.0 * penalty_c * (budget - mean_cost);
  rep.flat_objective = hi_loss - lo_loss < 1e-8 * std::max(1.0, std::fabs(hi_loss));
  for (int i = 0; i < d; ++i) {
    rep.at_bounds |= best(i) <= space.sigma_min + 1e-9 || best(i) >= space.sigma_max - 1e-9;
  }
  return rep;
}

SocReport soc_check(const ChoiceModel& model, double pbar,
                    const TargetCriterion& criterion, const IncomeDistribution& fy,
                    const SubsidySchedule& solution, const QuadratureConfig& quad) {
  if (fy.size() != 2) {
    throw std::invalid_argument("soc_check: requires a two-point income distribution");
  }
  Problem pb{&model, pbar, criterion, &fy, quad, 128};

  double B1[3], C1[3];  // value, first, second derivative at each point
  double B2[3], C2[3];
  const auto fill = [&](double sigma, double y, double* B, double* C) {
    const double h = 1e-3 * std::max(1.0, std::fabs(sigma));
    const double bp = pb.benefit(sigma + h, y), bm = pb.benefit(sigma - h, y),
                 b0 = pb.benefit(sigma, y);
    const double cp = pb.point_cost(sigma + h, y), cm = pb.point_cost(sigma - h, y),
                 c0 = pb.point_cost(sigma, y);
    B[0] = b0; B[1] = (bp - bm) / (2.0 * h); B[2] = (bp - 2.0 * b0 + bm) / (h * h);
    C[0] = c0; C[1] = (cp - cm) / (2.0 * h); C[2] = (cp - 2.0 * c0 + cm) / (h * h);
  };
  const double s1 = solution(fy.points[0]);
  const double s2 = solution(fy.points[1]);
  fill(s1, fy.points[0], B1, C1);
  fill(s2, fy.points[1], B2, C2);

  SocReport rep;
  rep.inconclusive = std::fabs(B1[1]) < 1e-7 || std::fabs(B2[1]) < 1e-7 ||
                     std::fabs(C1[1]) < 1e-7 || std::fabs(C2[1]) < 1e-7;
  if (!rep.inconclusive) {
    const double pi1 = fy.weights[0];
    const double pi2 = fy.weights[1];
    const double m1 = B1[2] - B1[1] * C1[2] / C1[1];
    const double m2 = B2[2] - B2[1] * C2[2] / C2[1];
    rep.det_bordered_hessian = -pi2 * pi2 * C2[1] * C2[1] * m1 -
                               pi1 * pi1 * C1[1] * C1[1] * m2;
    rep.det_positive = rep.det_bordered_hessian > 0.0;
    rep.ratio_gap_low = C1[2] / C1[1] - B1[2] / B1[1];
    rep.ratio_gap_high = C2[2] / C2[1] - B2[2] / B2[1];
    rep.ratio_ok_low = rep.ratio_gap_low > 0.0;
    rep.ratio_ok_high = rep.ratio_gap_high > 0.0;
    rep.tangency_gap = std::fabs(B1[1] / C1[1] - B2[1] / C2[1]);
  }
  return rep;
}

}  // namespace dcw
