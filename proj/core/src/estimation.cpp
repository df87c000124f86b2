#include "dcw/estimation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

#include "dcw/common.hpp"
#include "dcw/rng.hpp"
#include "dcw/stats.hpp"

namespace dcw {

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

double EstimationDataset::income_min() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) m = std::min(m, r.income);
  return m;
}

double EstimationDataset::income_max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& r : rows) m = std::max(m, r.income);
  return m;
}

double EstimationDataset::income_quantile(double p) const {
  if (rows.empty()) throw data_error("dataset: empty");
  std::vector<double> ys;
  ys.reserve(rows.size());
  for (const auto& r : rows) ys.push_back(r.income);
  std::sort(ys.begin(), ys.end());
  const double pos = p * (ys.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, ys.size() - 1);
  const double w = pos - lo;
  return (1.0 - w) * ys[lo] + w * ys[hi];
}

void EstimationDataset::validate(bool require_complete) const {
  if (rows.empty()) throw data_error("dataset: empty");
  const std::size_t C = covariate_names.size();
  for (const auto& r : rows) {
    if (r.choice != 0 && r.choice != 1) throw data_error("dataset: choice must be 0 or 1");
    if (r.covariates.size() != C) throw data_error("dataset: covariate length mismatch");
    if (!(r.income > 0.0) || !std::isfinite(r.income)) {
      throw data_error("dataset: incomes must be positive");
    }
    if (!std::isfinite(r.instrument)) throw data_error("dataset: instrument must be finite");
    if (require_complete) {
      if (r.price_missing) throw data_error("dataset: missing price after imputation");
      if (!std::isfinite(r.price) || r.price < 0.0) {
        throw data_error("dataset: prices must be non-negative");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Price imputation
// ---------------------------------------------------------------------------

EstimationDataset impute_prices(const EstimationDataset& raw, ImputeReport* report) {
  raw.validate(/*require_complete=*/false);
  struct Acc { double sum = 0.0; long long n = 0; };
  std::map<int, Acc> cluster_mean;
  std::map<int, Acc> stratum_mean;
  std::map<int, int> cluster_stratum;
  for (const auto& r : raw.rows) {
    cluster_stratum[r.cluster] = r.stratum;
    if (r.choice == 1) {
      if (r.price_missing || !std::isfinite(r.price)) {
        throw data_error("impute: purchaser with missing price");
      }
      auto& c = cluster_mean[r.cluster];
      c.sum += r.price; ++c.n;
      auto& s = stratum_mean[r.stratum];
      s.sum += r.price; ++s.n;
    }
  }
  EstimationDataset out = raw;
  ImputeReport rep;
  for (auto& r : out.rows) {
    if (r.choice == 1 || !r.price_missing) continue;
    const auto itc = cluster_mean.find(r.cluster);
    if (itc != cluster_mean.end() && itc->second.n > 0) {
      r.price = itc->second.sum / itc->second.n;
      ++rep.cluster_imputed;
    } else {
      const auto its = stratum_mean.find(r.stratum);
      if (its == stratum_mean.end() || its->second.n == 0) {
        throw data_error("impute: stratum " + std::to_string(r.stratum) +
                         " has no purchasers to impute from");
      }
      r.price = its->second.sum / its->second.n;
      ++rep.stratum_fallback;
    }
    r.price_missing = false;
  }
  out.validate(/*require_complete=*/true);
  if (report != nullptr) *report = rep;
  return out;
}

// ---------------------------------------------------------------------------
// Design matrices
// ---------------------------------------------------------------------------

namespace {

// Exogenous block: intercept, leading M income splines, covariates.
Eigen::MatrixXd exogenous_design(const EstimationDataset& data, const SplineBasis& basis) {
  const int n = data.n();
  const int M = basis.segments();
  const int C = static_cast<int>(data.covariate_names.size());
  Eigen::MatrixXd X(n, 1 + M + C);
  for (int i = 0; i < n; ++i) {
    const auto& r = data.rows[i];
    X(i, 0) = 1.0;
    const auto b = basis.eval(std::clamp(r.income, basis.y_min(), basis.y_max()));
    for (int m = 0; m < M; ++m) X(i, 1 + m) = b[m];
    for (int c = 0; c < C; ++c) X(i, 1 + M + c) = r.covariates[c];
  }
  return X;
}

}  // namespace

FirstStageFit first_stage(const EstimationDataset& data, const SplineBasis& basis) {
  data.validate(/*require_complete=*/true);
  const int n = data.n();
  const Eigen::MatrixXd Xexo = exogenous_design(data, basis);
  const int k = static_cast<int>(Xexo.cols()) + 1;
  if (n <= k) throw data_error("first stage: more regressors than observations");

  Eigen::MatrixXd X(n, k);
  X.leftCols(k - 1) = Xexo;
  Eigen::VectorXd price(n);
  double instr_min = std::numeric_limits<double>::infinity();
  double instr_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    X(i, k - 1) = data.rows[i].instrument;
    instr_min = std::min(instr_min, data.rows[i].instrument);
    instr_max = std::max(instr_max, data.rows[i].instrument);
    price(i) = data.rows[i].price;
  }
  if (!(instr_max > instr_min)) throw data_error("first stage: instrument is constant");

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < k) throw data_error("first stage: collinear design");
  const Eigen::VectorXd beta = qr.solve(price);
  const Eigen::VectorXd resid = price - X * beta;
  const double rss_full = resid.squaredNorm();

  // Restricted fit without the instrument.
  const Eigen::VectorXd beta_r =
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(Xexo).solve(price);
  const double rss_restr = (price - Xexo * beta_r).squaredNorm();

  FirstStageFit fit;
  fit.n = n;
  fit.k = k;
  fit.coeffs.assign(beta.data(), beta.data() + k);
  fit.residuals.assign(resid.data(), resid.data() + n);
  fit.sigma2 = rss_full / (n - k);
  const double scale = std::max(1.0, price.squaredNorm());
  if (rss_full <= 1e-12 * scale) {
    fit.f_unbounded = true;
    fit.f_stat = std::numeric_limits<double>::infinity();
    fit.f_pvalue = 0.0;
  } else {
    fit.f_stat = std::max(0.0, (rss_restr - rss_full)) / (rss_full / (n - k));
    fit.f_pvalue = f_survival(fit.f_stat, 1.0, static_cast<double>(n - k));
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Probit likelihood with linear inequality constraints
// ---------------------------------------------------------------------------

namespace {

struct ProbitProblem {
  Eigen::MatrixXd X;  // n x k
  Eigen::VectorXi y;
  // Constraint rows a_i with a_i . theta <= 0.
  Eigen::MatrixXd A;  // m x k (may be empty)
};

double probit_nll(const ProbitProblem& pb, const Eigen::VectorXd& theta,
                  Eigen::VectorXd* grad, Eigen::MatrixXd* hess) {
  const int n = static_cast<int>(pb.X.rows());
  const int k = static_cast<int>(pb.X.cols());
  const Eigen::VectorXd z = pb.X * theta;
  double nll = 0.0;
  if (grad != nullptr) grad->setZero(k);
  if (hess != nullptr) hess->setZero(k, k);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) {
    const double zi = z(i);
    const double s = pb.y(i) == 1 ? 1.0 : -1.0;
    nll -= norm_logcdf(s * zi);
    if (grad != nullptr || hess != nullptr) {
      // Inverse Mills ratio of the signed index.
      const double lam = std::exp(std::log(norm_pdf(zi)) - norm_logcdf(s * zi));
      if (grad != nullptr) *grad -= s * lam * pb.X.row(i).transpose();
      if (hess != nullptr) w(i) = lam * (lam + s * zi);  // > 0: convex NLL
    }
  }
  if (hess != nullptr) {
    Eigen::MatrixXd xw = pb.X;
    for (int i = 0; i < n; ++i) xw.row(i) *= std::sqrt(std::max(w(i), 0.0));
    hess->noalias() = xw.transpose() * xw;
  }
  return nll;
}

// Smooth augmented-Lagrangian term for a_i . theta <= 0.
double al_penalty(const Eigen::MatrixXd& A, const Eigen::VectorXd& theta,
                  const Eigen::VectorXd& lambda, double mu,
                  Eigen::VectorXd* grad, Eigen::MatrixXd* hess) {
  double val = 0.0;
  for (int i = 0; i < A.rows(); ++i) {
    const double g = A.row(i).dot(theta);
    const double t = lambda(i) + mu * g;
    if (t > 0.0) {
      val += (t * t - lambda(i) * lambda(i)) / (2.0 * mu);
      if (grad != nullptr) *grad += t * A.row(i).transpose();
      if (hess != nullptr) *hess += mu * (A.row(i).transpose() * A.row(i));
    } else {
      val -= lambda(i) * lambda(i) / (2.0 * mu);
    }
  }
  return val;
}

// Damped Newton on a smooth convex objective.
void newton_minimize(const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*,
                                                Eigen::MatrixXd*)>& f,
                     Eigen::VectorXd& theta, int max_iter, double tol) {
  const int k = static_cast<int>(theta.size());
  Eigen::VectorXd grad(k);
  Eigen::MatrixXd hess(k, k);
  for (int it = 0; it < max_iter; ++it) {
    const double val = f(theta, &grad, &hess);
    if (!std::isfinite(val)) throw numerical_error("probit: non-finite likelihood");
    // Levenberg damping keeps the step defined if the Hessian degenerates.
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    Eigen::VectorXd step = ldlt.solve(-grad);
    if (ldlt.info() != Eigen::Success || !step.allFinite()) {
      const double ridge = 1e-8 * (1.0 + hess.diagonal().maxCoeff());
      Eigen::MatrixXd damped = hess + ridge * Eigen::MatrixXd::Identity(k, k);
      step = damped.ldlt().solve(-grad);
    }
    if (grad.norm() <= tol * std::max(1.0, std::fabs(val))) return;
    const double slope = grad.dot(step);
    // Newton decrement below the objective's floating-point floor: done.
    if (-slope <= 1e-13 * std::max(1.0, std::fabs(val))) return;
    double alpha = 1.0;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd cand = theta + alpha * step;
      const double v2 = f(cand, nullptr, nullptr);
      if (std::isfinite(v2) && v2 <= val + 1e-4 * alpha * slope) {
        theta = cand;
        break;
      }
      alpha *= 0.5;
      if (ls == 59) return;  // step stalled; gradient test decides next round
    }
  }
}

}  // namespace

double DemandFit::directional_derivative(const SplineBasis& basis, double y) const {
  return beta_price + basis.derivative(beta_spline, y);
}

std::vector<double> default_constraint_grid(const EstimationDataset& data, int points) {
  if (points < 2) throw config_error("constraint grid: need at least two points");
  const double lo = data.income_quantile(0.01);
  const double hi = data.income_quantile(0.99);
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = lo + (hi - lo) * i / (points - 1);
  return grid;
}

DemandFit fit_constrained_probit(const EstimationDataset& data,
                                 const SplineBasis& basis,
                                 const std::vector<double>& grid,
                                 const ProbitFitOptions& options) {
  data.validate(/*require_complete=*/true);
  if (basis.degree() < 2) throw config_error("demand fit: spline degree must be 2 or 3");
  if (basis.segments() < 2) throw config_error("demand fit: need at least two spline segments");
  for (double g : grid) {
    if (g < basis.y_min() - 1e-9 || g > basis.y_max() + 1e-9) {
      throw config_error("demand fit: constraint grid outside the income support");
    }
  }

  FirstStageFit fs;
  if (options.use_control_function) fs = first_stage(data, basis);

  const int n = data.n();
  const int M = basis.segments();
  const int C = static_cast<int>(data.covariate_names.size());
  // theta = [beta_p, beta_spline (M), intercept, covariates (C), rho?]
  const int k = 1 + M + 1 + C + (options.use_control_function ? 1 : 0);

  ProbitProblem pb;
  pb.X.resize(n, k);
  pb.y.resize(n);
  const Eigen::MatrixXd Xexo = exogenous_design(data, basis);
  for (int i = 0; i < n; ++i) {
    pb.y(i) = data.rows[i].choice;
    pb.X(i, 0) = data.rows[i].price;
    for (int m = 0; m < M; ++m) pb.X(i, 1 + m) = Xexo(i, 1 + m);
    pb.X(i, 1 + M) = 1.0;
    for (int c = 0; c < C; ++c) pb.X(i, 2 + M + c) = Xexo(i, 1 + M + c);
    if (options.use_control_function) pb.X(i, k - 1) = fs.residuals[i];
  }

  const auto nll_only = [&](const Eigen::VectorXd& th, Eigen::VectorXd* g,
                            Eigen::MatrixXd* h) { return probit_nll(pb, th, g, h); };

  // Unconstrained optimum first.
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(k);
  newton_minimize(nll_only, theta, options.max_newton_iter, options.newton_tol);
  const double unconstrained_ll = -probit_nll(pb, theta, nullptr, nullptr);

  DemandFit fit;
  fit.first_stage = fs;
  fit.y_min = basis.y_min();
  fit.y_max = basis.y_max();
  fit.segments = M;
  fit.degree = basis.degree();
  fit.constraint_grid = grid;
  fit.unconstrained_loglik = unconstrained_ll;

  if (options.constrained) {
    // Constraint rows: beta_p <= 0 and the (1,1) directional derivative of
    // the index at each grid income.
    const int m_rows = 1 + static_cast<int>(grid.size());
    pb.A.setZero(m_rows, k);
    pb.A(0, 0) = 1.0;
    for (std::size_t gidx = 0; gidx < grid.size(); ++gidx) {
      const auto db = basis.eval_derivative(grid[gidx]);
      pb.A(1 + gidx, 0) = 1.0;
      for (int m = 0; m < M; ++m) pb.A(1 + gidx, 1 + m) = db[m];
    }

    const auto max_violation = [&](const Eigen::VectorXd& th) {
      return (pb.A * th).maxCoeff();
    };

    if (max_violation(theta) > 1e-12) {
      // Augmented Lagrangian from a feasible warm start.
      Eigen::VectorXd th = theta;
      th(0) -= max_violation(theta) + 0.1;  // shifting beta_p lowers every row
      Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m_rows);
      double mu = 10.0;
      double prev_viol = std::numeric_limits<double>::infinity();
      for (int outer = 0; outer < 60; ++outer) {
        const auto al_obj = [&](const Eigen::VectorXd& t, Eigen::VectorXd* g,
                                Eigen::MatrixXd* h) {
          double v = probit_nll(pb, t, g, h);
          v += al_penalty(pb.A, t, lambda, mu, g, h);
          return v;
        };
        newton_minimize(al_obj, th, options.max_newton_iter, options.newton_tol);
        const Eigen::VectorXd g = pb.A * th;
        // Standard AL progress measure: max_i |max(g_i, -lambda_i / mu)|
        // vanishes at a KKT point (zero for slack rows, |g| for active ones).
        double viol = 0.0;
        for (int i = 0; i < m_rows; ++i) {
          viol = std::max(viol, std::fabs(std::max(g(i), -lambda(i) / mu)));
        }
        for (int i = 0; i < m_rows; ++i) lambda(i) = std::max(0.0, lambda(i) + mu * g(i));
        if (viol < 1e-11) break;
        if (viol > 0.25 * prev_viol) mu = std::min(mu * 10.0, 1e12);
        prev_viol = viol;
        if (outer == 59) throw numerical_error("demand fit: augmented Lagrangian did not converge");
      }
      // Exact feasibility: every row has unit beta_p coefficient, so a
      // downward shift of beta_p removes any residual violation.
      const double mv = max_violation(th);
      if (mv > 0.0) th(0) -= mv;
      theta = th;
      fit.constraints_active = true;
    }
  } else if (theta(0) > 0.0) {
    fit.constraints_active = false;
  }

  fit.beta_price = theta(0);
  fit.beta_spline.assign(theta.data() + 1, theta.data() + 1 + M);
  fit.beta_cov.assign(theta.data() + 1 + M, theta.data() + 2 + M + C);
  fit.rho = options.use_control_function ? theta(k - 1) : 0.0;
  fit.loglik = -probit_nll(pb, theta, nullptr, nullptr);

  if (options.constrained) {
    // Audit on a 10x finer grid; refit once with a denser grid if the
    // between-knot violation exceeds 1e-3.
    const auto audit = [&](const DemandFit& f) {
      double worst = 0.0;
      const int fine = static_cast<int>(grid.size()) * 10;
      const double lo = grid.front();
      const double hi = grid.back();
      for (int i = 0; i <= fine; ++i) {
        const double y = lo + (hi - lo) * i / fine;
        worst = std::max(worst, f.directional_derivative(basis, y));
      }
      return worst;
    };
    fit.audit_max_violation = audit(fit);
    if (fit.audit_max_violation > 1e-3) {
      std::vector<double> denser;
      for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        denser.push_back(grid[i]);
        denser.push_back(0.5 * (grid[i] + grid[i + 1]));
      }
      denser.push_back(grid.back());
      DemandFit refit = fit_constrained_probit(data, basis, denser, options);
      if (refit.audit_max_violation > 1e-3) {
        throw numerical_error("demand fit: shape constraints violated between grid points");
      }
      return refit;
    }
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Bootstrap
// ---------------------------------------------------------------------------

PosteriorDraws bootstrap_fit(const EstimationDataset& data, const SplineBasis& basis,
                             const std::vector<double>& grid, int B,
                             std::uint64_t seed, const ProbitFitOptions& options,
                             int workers) {
  if (B < 2) throw config_error("bootstrap: B must be at least 2");
  data.validate(/*require_complete=*/true);
  const int n = data.n();
  PosteriorDraws out;
  out.attempted = B;
  out.seed = seed;
  out.draws.resize(B);
  std::vector<char> ok(B, 0);

  const CounterRng rng(seed);
  const auto run_draw = [&](int b) {
    EstimationDataset resampled;
    resampled.covariate_names = data.covariate_names;
    resampled.rows.reserve(n);
    for (int i = 0; i < n; ++i) {
      const auto u = rng.uniform(static_cast<std::uint64_t>(b) + 1, i);
      const int idx = std::min(n - 1, static_cast<int>(u * n));
      resampled.rows.push_back(data.rows[idx]);
    }
    PosteriorDraw draw;
    draw.fit = fit_constrained_probit(resampled, basis, grid, options);
    // Compress the resampled income distribution to 64 quantile points.
    std::vector<double> ys;
    ys.reserve(n);
    for (const auto& r : resampled.rows) ys.push_back(r.income);
    std::sort(ys.begin(), ys.end());
    constexpr int kQ = 64;
    draw.income_quantiles.resize(kQ);
    for (int qidx = 0; qidx < kQ; ++qidx) {
      const double pos = (qidx + 0.5) / kQ * (ys.size() - 1);
      const std::size_t lo = static_cast<std::size_t>(pos);
      const std::size_t hi = std::min(lo + 1, ys.size() - 1);
      const double w = pos - lo;
      draw.income_quantiles[qidx] = (1.0 - w) * ys[lo] + w * ys[hi];
    }
    out.draws[b] = std::move(draw);
    ok[b] = 1;
  };

  int n_workers = workers > 0 ? workers
                              : static_cast<int>(std::thread::hardware_concurrency());
  n_workers = std::clamp(n_workers, 1, B);
  if (n_workers == 1) {
    for (int b = 0; b < B; ++b) {
      try { run_draw(b); } catch (const std::exception&) { ok[b] = 0; }
    }
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) {
      pool.emplace_back([&, w] {
        for (int b = w; b < B; b += n_workers) {
          try { run_draw(b); } catch (const std::exception&) { ok[b] = 0; }
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  // Drop failed draws, preserving order.
  std::vector<PosteriorDraw> kept;
  kept.reserve(B);
  for (int b = 0; b < B; ++b) {
    if (ok[b]) kept.push_back(std::move(out.draws[b])); else ++out.failures;
  }
  out.draws = std::move(kept);
  if (out.failures > 0.05 * B) {
    throw numerical_error("bootstrap: more than 5% of draws failed to fit");
  }
  return out;
}

ChoiceModel fit_to_model(const DemandFit& fit,
                         const std::vector<double>& covariate_profile) {
  if (covariate_profile.size() + 1 != fit.beta_cov.size()) {
    throw config_error("fit_to_model: covariate profile length mismatch");
  }
  SplineProbitSpec spec;
  spec.beta_price = fit.beta_price;
  spec.beta_spline = fit.beta_spline;
  spec.beta_covariates = fit.beta_cov;
  spec.covariate_profile = covariate_profile;
  spec.rho = fit.rho;
  spec.y_min = fit.y_min;
  spec.y_max = fit.y_max;
  spec.segments = fit.segments;
  spec.degree = fit.degree;
  return ChoiceModel::spline_probit(spec);
}

}  // namespace dcw
