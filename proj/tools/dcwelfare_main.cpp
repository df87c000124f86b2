// dcwelfare: welfare analysis for discrete-choice interventions.
//
// Subcommands: simulate, estimate, welfare, bounds, target, report.
// Every output file carries the hash of the effective configuration, and
// identical config+seed runs produce byte-identical bodies.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dcw/binary_welfare.hpp"
#include "dcw/bounds.hpp"
#include "dcw/choice_model.hpp"
#include "dcw/common.hpp"
#include "dcw/config.hpp"
#include "dcw/csv.hpp"
#include "dcw/estimation.hpp"
#include "dcw/fixtures.hpp"
#include "dcw/model_io.hpp"
#include "dcw/simulate.hpp"
#include "dcw/targeting.hpp"
#include "dcw/welfare.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

std::string fmt(double v) { return dcw::CsvWriter::format_double(v); }

// Effective (post-default) configuration of a subcommand run.
class RunConfig {
 public:
  void set(const std::string& key, const std::string& value) { map_[key] = value; }
  void set(const std::string& key, double value) { map_[key] = fmt(value); }
  void set(const std::string& key, int value) { map_[key] = std::to_string(value); }
  void set(const std::string& key, std::uint64_t value) { map_[key] = std::to_string(value); }
  void set(const std::string& key, const std::vector<double>& vs) {
    std::string s;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (i > 0) s += ";";
      s += fmt(vs[i]);
    }
    map_[key] = s;
  }

  std::string hash() const { return dcw::config_hash_hex(map_); }

  void print() const {
    for (const auto& [k, v] : map_) std::printf("%s=%s\n", k.c_str(), v.c_str());
    std::printf("config_hash=%s\n", hash().c_str());
  }

  void stamp(dcw::CsvWriter& w, const std::string& subcommand) const {
    w.comment("dcwelfare " + subcommand + " config_hash=" + hash());
  }

 private:
  dcw::ConfigMap map_;
};

dcw::ChoiceModel resolve_model(const std::string& fixture, const std::string& model_path) {
  if (!fixture.empty() && !model_path.empty()) {
    throw dcw::config_error("give either --fixture or --model, not both");
  }
  if (!fixture.empty()) return dcw::fixture_model(fixture);
  if (!model_path.empty()) return dcw::load_model(model_path);
  throw dcw::config_error("a model is required (--fixture or --model)");
}

std::vector<double> linear_grid(double lo, double hi, int n) {
  if (n < 1) throw dcw::config_error("grids need at least one point");
  if (n == 1) return {lo};
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

std::vector<double> read_income_column(const std::string& path) {
  const auto table = dcw::read_csv(path);
  const int col = table.require_column("income");
  std::vector<double> incomes;
  incomes.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    incomes.push_back(dcw::parse_double(row[col], path));
  }
  if (incomes.empty()) throw dcw::data_error("no income rows in " + path);
  return incomes;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string fixture, model_path, out;
  std::vector<double> prices = {1.0};
  double income = 10.0;
  int n = 10000;
  std::uint64_t seed = 1;
  bool dataset = false;
  bool print_config = false;
  // dataset mode
  double endogeneity = 0.8;
  double beta_price = -0.5;
  bool drop_prices = false;
  bool hausman = false;
};

int run_simulate(const SimulateArgs& a) {
  RunConfig cfg;
  cfg.set("subcommand", "simulate");
  cfg.set("seed", a.seed);
  cfg.set("n", a.n);
  cfg.set("out", a.out);
  if (a.dataset) {
    cfg.set("mode", "dataset");
    cfg.set("endogeneity", a.endogeneity);
    cfg.set("beta_price", a.beta_price);
    cfg.set("drop_prices", a.drop_prices ? 1 : 0);
    cfg.set("hausman", a.hausman ? 1 : 0);
  } else {
    cfg.set("mode", "population");
    cfg.set("fixture", a.fixture);
    cfg.set("model", a.model_path);
    cfg.set("prices", a.prices);
    cfg.set("income", a.income);
  }
  if (a.print_config) {
    cfg.print();
    return kExitOk;
  }
  if (a.out.empty()) throw dcw::config_error("--out is required");

  if (a.dataset) {
    dcw::EstimationDgpConfig dgp_cfg;
    dgp_cfg.n = a.n;
    dgp_cfg.seed = a.seed;
    dgp_cfg.endogeneity = a.endogeneity;
    dgp_cfg.beta_price = a.beta_price;
    dgp_cfg.drop_nonbuyer_prices = a.drop_prices;
    dgp_cfg.hausman_instrument = a.hausman;
    const auto dgp = dcw::simulate_estimation_data(dgp_cfg);
    dcw::CsvWriter w(a.out);
    cfg.stamp(w, "simulate");
    w.header({"choice", "price", "income", "hh_size", "child_age", "male", "instrument",
              "cluster", "stratum"});
    for (const auto& r : dgp.data.rows) {
      w.row_mixed({std::to_string(r.choice), r.price_missing ? "" : fmt(r.price),
                   fmt(r.income), fmt(r.covariates[0]), fmt(r.covariates[1]),
                   fmt(r.covariates[2]), fmt(r.instrument), std::to_string(r.cluster),
                   std::to_string(r.stratum)});
    }
    std::printf("wrote %d rows to %s\n", dgp.data.n(), a.out.c_str());
    return kExitOk;
  }

  const auto model = resolve_model(a.fixture, a.model_path);
  const dcw::BudgetPoint point(a.prices, a.income);
  const auto pop = dcw::simulate_welfare(model, point, a.n, a.seed);
  dcw::CsvWriter w(a.out);
  cfg.stamp(w, "simulate");
  std::vector<std::string> header = {"agent"};
  for (int k = 0; k < model.eta_dim(); ++k) header.push_back("eta_" + std::to_string(k));
  header.push_back("choice");
  header.push_back("welfare");
  w.header(header);
  for (std::size_t i = 0; i < pop.agents.size(); ++i) {
    std::vector<std::string> row = {std::to_string(i)};
    for (double e : pop.agents[i].eta) row.push_back(fmt(e));
    row.push_back(std::to_string(pop.agents[i].choice));
    row.push_back(fmt(pop.agents[i].welfare));
    w.row_mixed(row);
  }
  std::printf("wrote %zu agents to %s\n", pop.agents.size(), a.out.c_str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

struct EstimateArgs {
  std::string data_path, out_fit, out_draws;
  int segments = 8;
  int degree = 3;
  int grid_points = 50;
  int bootstrap = 0;
  std::uint64_t seed = 1;
  bool impute = false;
  bool print_config = false;
};

dcw::EstimationDataset read_estimation_csv(const std::string& path) {
  const auto table = dcw::read_csv(path);
  dcw::EstimationDataset data;
  data.covariate_names = {"hh_size", "child_age", "male"};
  const int c_choice = table.require_column("choice");
  const int c_price = table.require_column("price");
  const int c_income = table.require_column("income");
  const int c_hh = table.require_column("hh_size");
  const int c_age = table.require_column("child_age");
  const int c_male = table.require_column("male");
  const int c_instr = table.require_column("instrument");
  const int c_cluster = table.require_column("cluster");
  const int c_stratum = table.require_column("stratum");
  for (const auto& row : table.rows) {
    dcw::EstimationRow r;
    r.choice = static_cast<int>(dcw::parse_int(row[c_choice], path));
    const auto price = dcw::parse_optional_double(row[c_price]);
    if (price.has_value()) {
      r.price = *price;
    } else {
      r.price_missing = true;
    }
    r.income = dcw::parse_double(row[c_income], path);
    r.covariates = {dcw::parse_double(row[c_hh], path), dcw::parse_double(row[c_age], path),
                    dcw::parse_double(row[c_male], path)};
    r.instrument = dcw::parse_double(row[c_instr], path);
    r.cluster = static_cast<int>(dcw::parse_int(row[c_cluster], path));
    r.stratum = static_cast<int>(dcw::parse_int(row[c_stratum], path));
    data.rows.push_back(std::move(r));
  }
  return data;
}

int run_estimate(const EstimateArgs& a) {
  RunConfig cfg;
  cfg.set("subcommand", "estimate");
  cfg.set("data", a.data_path);
  cfg.set("segments", a.segments);
  cfg.set("degree", a.degree);
  cfg.set("grid_points", a.grid_points);
  cfg.set("bootstrap", a.bootstrap);
  cfg.set("seed", a.seed);
  cfg.set("impute", a.impute ? 1 : 0);
  cfg.set("out_fit", a.out_fit);
  cfg.set("out_draws", a.out_draws);
  if (a.print_config) {
    cfg.print();
    return kExitOk;
  }
  if (a.data_path.empty() || a.out_fit.empty()) {
    throw dcw::config_error("--data and --out are required");
  }

  auto data = read_estimation_csv(a.data_path);
  dcw::ImputeReport impute_report;
  if (a.impute) {
    data = dcw::impute_prices(data, &impute_report);
  }
  data.validate(/*require_complete=*/true);
  const dcw::SplineBasis basis(data.income_min(), data.income_max(), a.segments, a.degree);
  const auto grid = dcw::default_constraint_grid(data, a.grid_points);
  const auto fit = dcw::fit_constrained_probit(data, basis, grid);
  dcw::save_fit(fit, a.out_fit);
  std::printf("fit: beta_price=%.6g rho=%.6g loglik=%.6g first_stage_F=%.6g (p=%.3g)\n",
              fit.beta_price, fit.rho, fit.loglik, fit.first_stage.f_stat,
              fit.first_stage.f_pvalue);
  if (a.impute) {
    std::printf("imputed %d prices from clusters, %d from strata\n",
                impute_report.cluster_imputed, impute_report.stratum_fallback);
  }
  if (a.bootstrap > 0) {
    if (a.out_draws.empty()) throw dcw::config_error("--draws-out is required with --bootstrap");
    const auto draws = dcw::bootstrap_fit(data, basis, grid, a.bootstrap, a.seed);
    dcw::save_draws(draws, a.out_draws);
    std::printf("bootstrap: %zu draws kept, %d failures\n", draws.draws.size(),
                draws.failures);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// welfare
// ---------------------------------------------------------------------------

struct WelfareArgs {
  std::string fixture, model_path;
  std::vector<double> prices = {1.0};
  double income = 10.0;
  double cmax_offset = 10.0;
  int cpoints = 201;
  std::vector<double> epsilons = {0.0, 0.5, 1.0};
  double y_max = 1000.0;
  std::string out_cdf, out_asw;
  std::string incomes_path;
  bool binary = false;
  bool print_config = false;
  // binary mode
  double pbar = 1.0;
  double sigma_min = -0.5;
  double sigma_max = 0.9;
  int sigma_points = 29;
  std::string out;
};

int run_welfare(const WelfareArgs& a) {
  RunConfig cfg;
  cfg.set("subcommand", "welfare");
  cfg.set("fixture", a.fixture);
  cfg.set("model", a.model_path);
  cfg.set("income", a.income);
  cfg.set("y_max", a.y_max);
  dcw::QuadratureConfig quad;
  quad.y_max = a.y_max;

  if (a.binary) {
    cfg.set("mode", "binary");
    cfg.set("pbar", a.pbar);
    cfg.set("sigma_min", a.sigma_min);
    cfg.set("sigma_max", a.sigma_max);
    cfg.set("sigma_points", a.sigma_points);
    cfg.set("incomes", a.incomes_path);
    cfg.set("out", a.out);
    if (a.print_config) {
      cfg.print();
      return kExitOk;
    }
    if (a.out.empty()) throw dcw::config_error("--out is required");
    const auto model = resolve_model(a.fixture, a.model_path);

    std::vector<double> incomes = {a.income};
    if (!a.incomes_path.empty()) incomes = read_income_column(a.incomes_path);

    dcw::CsvWriter w(a.out);
    cfg.stamp(w, "welfare");
    w.header({"averaging", "sigma", "delta_asw", "acv", "ate", "dwl", "mvpf_linear"});
    const auto sigmas = linear_grid(a.sigma_min, a.sigma_max, a.sigma_points);

    const auto emit = [&](const std::string& label, const std::vector<double>& ys) {
      for (double sigma : sigmas) {
        double d = 0.0, s_acv = 0.0, t = 0.0, loss = 0.0, lin = 0.0;
        for (double y : ys) {
          const dcw::SubsidyScenario sc{a.pbar, sigma, y, 0.0};
          d += dcw::delta_asw(model, sc, quad);
          s_acv += dcw::acv(model, sc, quad);
          t += dcw::ate(model, sc);
          loss += dcw::dwl(model, sc, quad);
          lin += dcw::mvpf_linear_net_benefit(model, a.pbar, y, sigma, quad);
        }
        const double n = static_cast<double>(ys.size());
        w.row_mixed({label, fmt(sigma), fmt(d / n), fmt(s_acv / n), fmt(t / n),
                     fmt(loss / n), fmt(lin / n)});
      }
    };
    if (a.incomes_path.empty()) {
      emit("point", incomes);
    } else {
      // Both averaging conventions, labeled: the empirical sample and an
      // equally spaced grid spanning it.
      emit("empirical", incomes);
      double lo = incomes.front(), hi = incomes.front();
      for (double y : incomes) {
        lo = std::min(lo, y);
        hi = std::max(hi, y);
      }
      emit("grid", linear_grid(lo, hi, 65));
    }
    std::printf("wrote %s\n", a.out.c_str());
    return kExitOk;
  }

  cfg.set("mode", "distribution");
  cfg.set("prices", a.prices);
  cfg.set("cmax_offset", a.cmax_offset);
  cfg.set("cpoints", a.cpoints);
  cfg.set("epsilons", a.epsilons);
  cfg.set("out_cdf", a.out_cdf);
  cfg.set("out_asw", a.out_asw);
  if (a.print_config) {
    cfg.print();
    return kExitOk;
  }
  if (a.out_cdf.empty() || a.out_asw.empty()) {
    throw dcw::config_error("--out-cdf and --out-asw are required");
  }
  const auto model = resolve_model(a.fixture, a.model_path);
  const dcw::BudgetPoint point(a.prices, a.income);
  const dcw::WelfareCdf cdf(model, point);
  {
    dcw::CsvWriter w(a.out_cdf);
    cfg.stamp(w, "welfare");
    w.header({"c", "cdf"});
    for (double c : linear_grid(a.income, a.income + a.cmax_offset, a.cpoints)) {
      w.row({c, cdf(c)});
    }
  }
  {
    dcw::CsvWriter w(a.out_asw);
    cfg.stamp(w, "welfare");
    w.header({"epsilon", "asw", "gini", "atkinson"});
    const double gini =
        dcw::welfare_inequality_index(model, point, dcw::InequalityIndexKind::gini());
    for (double eps : a.epsilons) {
      const double atk =
          dcw::welfare_inequality_index(model, point, dcw::InequalityIndexKind::atkinson(eps));
      w.row({eps, dcw::asw_any(model, point, eps, quad), gini, atk});
    }
  }
  std::printf("wrote %s and %s\n", a.out_cdf.c_str(), a.out_asw.c_str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

struct BoundsArgs {
  std::string demand_path, out;
  std::vector<double> prices = {1.0};
  double income = 10.0;
  double unit_price = 1.0;
  double cmax_offset = 10.0;
  int cpoints = 101;
  bool ordered = false;
  bool print_config = false;
};

int run_bounds(const BoundsArgs& a) {
  RunConfig cfg;
  cfg.set("subcommand", "bounds");
  cfg.set("demand", a.demand_path);
  cfg.set("income", a.income);
  cfg.set("cmax_offset", a.cmax_offset);
  cfg.set("cpoints", a.cpoints);
  cfg.set("ordered", a.ordered ? 1 : 0);
  cfg.set("out", a.out);
  if (a.ordered) {
    cfg.set("unit_price", a.unit_price);
  } else {
    cfg.set("prices", a.prices);
  }
  if (a.print_config) {
    cfg.print();
    return kExitOk;
  }
  if (a.demand_path.empty() || a.out.empty()) {
    throw dcw::config_error("--demand and --out are required");
  }

  const auto table = dcw::read_csv(a.demand_path);
  const int c_z = table.require_column("z");
  const int c_q0 = table.require_column("q0");
  std::vector<int> price_cols;
  for (int j = 1; table.column("r_" + std::to_string(j)) >= 0; ++j) {
    price_cols.push_back(table.column("r_" + std::to_string(j)));
  }
  if (price_cols.empty()) throw dcw::data_error("bounds: no r_1.. price columns found");
  std::vector<dcw::DemandObservation> entries;
  for (const auto& row : table.rows) {
    dcw::DemandObservation e;
    for (int c : price_cols) e.prices.push_back(dcw::parse_double(row[c], a.demand_path));
    e.income = dcw::parse_double(row[c_z], a.demand_path);
    e.q0 = dcw::parse_double(row[c_q0], a.demand_path);
    entries.push_back(std::move(e));
  }
  const auto set = a.ordered ? dcw::ObservedDemandSet::ordered(std::move(entries))
                             : dcw::ObservedDemandSet(std::move(entries));

  dcw::CsvWriter w(a.out);
  cfg.stamp(w, "bounds");
  w.header({"c", "lower", "upper", "lower_vacuous", "upper_vacuous"});
  for (double c : linear_grid(a.income, a.income + a.cmax_offset, a.cpoints)) {
    const auto b = a.ordered
                       ? dcw::ordered_cdf_bounds(set, c, a.unit_price, a.income)
                       : dcw::multinomial_cdf_bounds(set, c, dcw::BudgetPoint(a.prices, a.income));
    w.row_mixed({fmt(c), fmt(b.lower), fmt(b.upper), b.lower_vacuous ? "1" : "0",
                 b.upper_vacuous ? "1" : "0"});
  }
  std::printf("wrote %s\n", a.out.c_str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// target
// ---------------------------------------------------------------------------

struct TargetArgs {
  std::string fixture, model_path, posterior_path, incomes_path;
  std::vector<double> income_grid;
  std::vector<double> weights;
  std::vector<double> profile;
  double pbar = 1.5;
  std::string criterion = "ate";
  double epsilon = 0.0;
  double budget = 0.0;
  std::string budget_mode = "eq";
  double sigma_min = -0.5;
  double sigma_max = 0.9;
  int segments = 3;
  int degree = 3;
  double penalty = 1e4;
  double y_max = 1000.0;
  std::uint64_t seed = 2024;
  std::string out_schedule, out_report;
  bool print_config = false;
};

int run_target(const TargetArgs& a) {
  RunConfig cfg;
  cfg.set("subcommand", "target");
  cfg.set("fixture", a.fixture);
  cfg.set("model", a.model_path);
  cfg.set("posterior", a.posterior_path);
  cfg.set("incomes", a.incomes_path);
  cfg.set("income_grid", a.income_grid);
  cfg.set("weights", a.weights);
  cfg.set("pbar", a.pbar);
  cfg.set("criterion", a.criterion);
  cfg.set("epsilon", a.epsilon);
  cfg.set("budget", a.budget);
  cfg.set("budget_mode", a.budget_mode);
  cfg.set("sigma_min", a.sigma_min);
  cfg.set("sigma_max", a.sigma_max);
  cfg.set("segments", a.segments);
  cfg.set("degree", a.degree);
  cfg.set("penalty", a.penalty);
  cfg.set("y_max", a.y_max);
  cfg.set("seed", a.seed);
  cfg.set("out_schedule", a.out_schedule);
  cfg.set("out_report", a.out_report);
  if (a.print_config) {
    cfg.print();
    return kExitOk;
  }
  if (a.out_schedule.empty() || a.out_report.empty()) {
    throw dcw::config_error("--out-schedule and --out-report are required");
  }

  dcw::TargetCriterion criterion;
  if (a.criterion == "ate") {
    criterion.kind = dcw::TargetObjective::Ate;
  } else if (a.criterion == "acv") {
    criterion.kind = dcw::TargetObjective::Acv;
  } else if (a.criterion == "casw") {
    criterion.kind = dcw::TargetObjective::Casw;
    criterion.epsilon = a.epsilon;
  } else {
    throw dcw::config_error("unknown criterion '" + a.criterion + "'");
  }

  dcw::IncomeDistribution fy;
  if (!a.incomes_path.empty()) {
    fy = dcw::IncomeDistribution::from_sample(read_income_column(a.incomes_path));
    // Large samples: compress to 64 quantile points for the solver.
    if (fy.size() > 64) {
      std::vector<double> pts(64);
      for (int i = 0; i < 64; ++i) {
        const double pos = (i + 0.5) / 64.0 * (fy.size() - 1);
        pts[i] = fy.points[static_cast<int>(pos)];
      }
      fy = dcw::IncomeDistribution::from_grid(pts, std::vector<double>(64, 1.0 / 64));
    }
  } else if (!a.income_grid.empty()) {
    std::vector<double> w = a.weights;
    if (w.empty()) w.assign(a.income_grid.size(), 1.0 / a.income_grid.size());
    fy = dcw::IncomeDistribution::from_grid(a.income_grid, w);
  } else {
    throw dcw::config_error("an income distribution is required (--incomes or --income-grid)");
  }

  dcw::ScheduleSpace space(
      dcw::SplineBasis(fy.points.front(), fy.points.back(), a.segments, a.degree),
      a.sigma_min, a.sigma_max);
  dcw::QuadratureConfig quad;
  quad.y_max = a.y_max;
  dcw::TargetingOptions opts;
  opts.seed = a.seed;

  dcw::TargetReport rep;
  if (!a.posterior_path.empty()) {
    const auto draws = dcw::load_draws(a.posterior_path);
    if (draws.draws.empty()) throw dcw::data_error("posterior file has no draws");
    std::vector<dcw::PosteriorPoint> posterior;
    for (const auto& d : draws.draws) {
      posterior.push_back({dcw::fit_to_model(d.fit, a.profile),
                           dcw::IncomeDistribution::from_sample(d.income_quantiles)});
    }
    rep = dcw::bayes_optimal_schedule(posterior, a.pbar, criterion, a.penalty, a.budget,
                                      space, quad, opts);
  } else {
    const auto model = resolve_model(a.fixture, a.model_path);
    const auto mode = a.budget_mode == "le" ? dcw::BudgetMode::AtMost
                                            : dcw::BudgetMode::Equality;
    rep = dcw::optimal_schedule(model, a.pbar, criterion, fy, a.budget, space, mode, quad,
                                opts);
  }

  {
    dcw::CsvWriter w(a.out_schedule);
    cfg.stamp(w, "target");
    w.header({"y", "sigma"});
    for (double y : linear_grid(fy.points.front(), fy.points.back(), 101)) {
      w.row({y, rep.schedule(y)});
    }
  }
  {
    // JSON report assembled with sorted keys for byte-stable output.
    std::FILE* f = std::fopen(a.out_report.c_str(), "wb");
    if (f == nullptr) throw dcw::data_error("cannot write " + a.out_report);
    std::fprintf(f, "{\n");
    std::fprintf(f, "  \"at_bounds\": %s,\n", rep.at_bounds ? "true" : "false");
    std::fprintf(f, "  \"budget_residual\": %s,\n", fmt(rep.budget_residual).c_str());
    std::fprintf(f, "  \"config_hash\": \"%s\",\n", cfg.hash().c_str());
    std::fprintf(f, "  \"cost\": %s,\n", fmt(rep.cost).c_str());
    std::fprintf(f, "  \"flat_objective\": %s,\n", rep.flat_objective ? "true" : "false");
    std::fprintf(f, "  \"foc_max_residual\": %s,\n", fmt(rep.foc_max_residual).c_str());
    std::fprintf(f, "  \"lambda\": %s,\n", fmt(rep.lambda).c_str());
    std::fprintf(f, "  \"objective\": %s,\n", fmt(rep.objective).c_str());
    std::fprintf(f, "  \"projected_gradient_norm\": %s", fmt(rep.projected_gradient_norm).c_str());
    if (fy.size() == 2 && a.posterior_path.empty()) {
      const auto model = resolve_model(a.fixture, a.model_path);
      const auto soc = dcw::soc_check(model, a.pbar, criterion, fy, rep.schedule, quad);
      std::fprintf(f, ",\n  \"soc\": {\n");
      std::fprintf(f, "    \"det_bordered_hessian\": %s,\n",
                   fmt(soc.det_bordered_hessian).c_str());
      std::fprintf(f, "    \"det_positive\": %s,\n", soc.det_positive ? "true" : "false");
      std::fprintf(f, "    \"inconclusive\": %s,\n", soc.inconclusive ? "true" : "false");
      std::fprintf(f, "    \"ratio_ok_high\": %s,\n", soc.ratio_ok_high ? "true" : "false");
      std::fprintf(f, "    \"ratio_ok_low\": %s,\n", soc.ratio_ok_low ? "true" : "false");
      std::fprintf(f, "    \"tangency_gap\": %s\n", fmt(soc.tangency_gap).c_str());
      std::fprintf(f, "  }\n");
    } else {
      std::fprintf(f, "\n");
    }
    std::fprintf(f, "}\n");
    std::fclose(f);
  }
  std::printf("objective=%.8g cost=%.8g residual=%.3g\n", rep.objective, rep.cost,
              rep.budget_residual);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

struct ReportArgs {
  std::string fixture, model_path, out;
  double pbar = 1.0;
  double income = 10.0;
  double sigma_min = -0.2;
  double sigma_max = 0.9;
  int sigma_points = 23;
  double y_max = 1000.0;
  bool print_config = false;
};

int run_report(const ReportArgs& a) {
  RunConfig cfg;
  cfg.set("subcommand", "report");
  cfg.set("fixture", a.fixture);
  cfg.set("model", a.model_path);
  cfg.set("pbar", a.pbar);
  cfg.set("income", a.income);
  cfg.set("sigma_min", a.sigma_min);
  cfg.set("sigma_max", a.sigma_max);
  cfg.set("sigma_points", a.sigma_points);
  cfg.set("y_max", a.y_max);
  cfg.set("out", a.out);
  if (a.print_config) {
    cfg.print();
    return kExitOk;
  }
  if (a.out.empty()) throw dcw::config_error("--out is required");
  const auto model = resolve_model(a.fixture, a.model_path);
  dcw::QuadratureConfig quad;
  quad.y_max = a.y_max;

  dcw::CsvWriter w(a.out);
  cfg.stamp(w, "report");
  w.header({"sigma", "delta_asw", "acv", "ate", "cost", "net_delta", "net_acv",
            "mvpf_linear"});
  for (double sigma : linear_grid(a.sigma_min, a.sigma_max, a.sigma_points)) {
    const dcw::SubsidyScenario sc{a.pbar, sigma, a.income, 0.0};
    const double d = dcw::delta_asw(model, sc, quad);
    const double s = dcw::acv(model, sc, quad);
    const double t = dcw::ate(model, sc);
    const double cost =
        sigma * model.choice_prob(1, dcw::BudgetPoint(a.pbar - sigma, a.income));
    const double lin = dcw::mvpf_linear_net_benefit(model, a.pbar, a.income, sigma, quad);
    w.row({sigma, d, s, t, cost, d - cost, s - cost, lin});
  }
  std::printf("wrote %s\n", a.out.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Welfare distributions, targeting and bounds for discrete-choice interventions"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate",
                                     "Simulate welfare populations or estimation datasets");
  sim_cmd->add_option("--fixture", sim.fixture, "Built-in model name");
  sim_cmd->add_option("--model", sim.model_path, "Model JSON path");
  sim_cmd->add_option("--price", sim.prices, "Inside-alternative prices");
  sim_cmd->add_option("--income", sim.income, "Income");
  sim_cmd->add_option("--n", sim.n, "Number of agents / rows");
  sim_cmd->add_option("--seed", sim.seed, "RNG seed");
  sim_cmd->add_flag("--dataset", sim.dataset, "Write an estimation dataset instead");
  sim_cmd->add_option("--endogeneity", sim.endogeneity, "Latent loading on the price shock");
  sim_cmd->add_option("--beta-price", sim.beta_price, "True price coefficient");
  sim_cmd->add_flag("--drop-prices", sim.drop_prices, "Blank non-purchaser prices");
  sim_cmd->add_flag("--hausman", sim.hausman, "Leave-cluster-out price instrument");
  sim_cmd->add_option("--out", sim.out, "Output CSV");
  sim_cmd->add_flag("--print-config", sim.print_config, "Print effective config and exit");

  EstimateArgs est;
  auto* est_cmd = app.add_subcommand("estimate", "Fit the constrained spline probit");
  est_cmd->add_option("--data", est.data_path, "Input CSV");
  est_cmd->add_option("--segments", est.segments, "Spline segments M");
  est_cmd->add_option("--degree", est.degree, "Spline degree q (2 or 3)");
  est_cmd->add_option("--grid-points", est.grid_points, "Constraint grid size");
  est_cmd->add_option("--bootstrap", est.bootstrap, "Bootstrap replications B");
  est_cmd->add_option("--seed", est.seed, "Bootstrap seed");
  est_cmd->add_flag("--impute", est.impute, "Impute missing prices first");
  est_cmd->add_option("--out", est.out_fit, "Fit JSON output");
  est_cmd->add_option("--draws-out", est.out_draws, "Bootstrap draws JSON output");
  est_cmd->add_flag("--print-config", est.print_config, "Print effective config and exit");

  WelfareArgs wel;
  auto* wel_cmd = app.add_subcommand("welfare", "Welfare distribution and functionals");
  wel_cmd->add_option("--fixture", wel.fixture, "Built-in model name");
  wel_cmd->add_option("--model", wel.model_path, "Model JSON path");
  wel_cmd->add_option("--price", wel.prices, "Prices");
  wel_cmd->add_option("--income", wel.income, "Income");
  wel_cmd->add_option("--cmax-offset", wel.cmax_offset, "CDF grid reach above income");
  wel_cmd->add_option("--cpoints", wel.cpoints, "CDF grid size");
  wel_cmd->add_option("--epsilon", wel.epsilons, "Aversion values");
  wel_cmd->add_option("--y-max", wel.y_max, "Integral truncation income");
  wel_cmd->add_option("--out-cdf", wel.out_cdf, "CDF CSV output");
  wel_cmd->add_option("--out-asw", wel.out_asw, "ASW CSV output");
  wel_cmd->add_flag("--binary", wel.binary, "Subsidy-grid table for a binary model");
  wel_cmd->add_option("--pbar", wel.pbar, "Base price (binary mode)");
  wel_cmd->add_option("--sigma-min", wel.sigma_min, "Smallest subsidy");
  wel_cmd->add_option("--sigma-max", wel.sigma_max, "Largest subsidy");
  wel_cmd->add_option("--sigma-points", wel.sigma_points, "Subsidy grid size");
  wel_cmd->add_option("--incomes", wel.incomes_path, "Income sample CSV (column 'income')");
  wel_cmd->add_option("--out", wel.out, "Binary-mode CSV output");
  wel_cmd->add_flag("--print-config", wel.print_config, "Print effective config and exit");

  BoundsArgs bnd;
  auto* bnd_cmd = app.add_subcommand("bounds", "Partial-identification bounds on the CDF");
  bnd_cmd->add_option("--demand", bnd.demand_path, "Observed demand CSV (r_1..r_J,z,q0)");
  bnd_cmd->add_option("--price", bnd.prices, "Evaluation prices");
  bnd_cmd->add_option("--unit-price", bnd.unit_price, "Unit price (ordered mode)");
  bnd_cmd->add_option("--income", bnd.income, "Evaluation income");
  bnd_cmd->add_option("--cmax-offset", bnd.cmax_offset, "Grid reach above income");
  bnd_cmd->add_option("--cpoints", bnd.cpoints, "Grid size");
  bnd_cmd->add_flag("--ordered", bnd.ordered, "Ordered-choice bounds (prices p, 2p)");
  bnd_cmd->add_option("--out", bnd.out, "Output CSV");
  bnd_cmd->add_flag("--print-config", bnd.print_config, "Print effective config and exit");

  TargetArgs tgt;
  auto* tgt_cmd = app.add_subcommand("target", "Budget-constrained optimal subsidy schedule");
  tgt_cmd->add_option("--fixture", tgt.fixture, "Built-in model name");
  tgt_cmd->add_option("--model", tgt.model_path, "Model JSON path");
  tgt_cmd->add_option("--posterior", tgt.posterior_path, "Bootstrap draws JSON (Bayes mode)");
  tgt_cmd->add_option("--profile", tgt.profile, "Covariate profile for posterior models");
  tgt_cmd->add_option("--incomes", tgt.incomes_path, "Income sample CSV");
  tgt_cmd->add_option("--income-grid", tgt.income_grid, "Discrete income points");
  tgt_cmd->add_option("--weights", tgt.weights, "Weights for --income-grid");
  tgt_cmd->add_option("--pbar", tgt.pbar, "Base price");
  tgt_cmd->add_option("--criterion", tgt.criterion, "ate | acv | casw");
  tgt_cmd->add_option("--epsilon", tgt.epsilon, "CASW curvature");
  tgt_cmd->add_option("--budget", tgt.budget, "Per-capita budget M");
  tgt_cmd->add_option("--budget-mode", tgt.budget_mode, "eq (equality) or le (at most)");
  tgt_cmd->add_option("--sigma-min", tgt.sigma_min, "Schedule lower bound");
  tgt_cmd->add_option("--sigma-max", tgt.sigma_max, "Schedule upper bound");
  tgt_cmd->add_option("--segments", tgt.segments, "Schedule spline segments");
  tgt_cmd->add_option("--degree", tgt.degree, "Schedule spline degree");
  tgt_cmd->add_option("--penalty", tgt.penalty, "Budget penalty c (Bayes mode)");
  tgt_cmd->add_option("--y-max", tgt.y_max, "Integral truncation income");
  tgt_cmd->add_option("--seed", tgt.seed, "Multistart seed");
  tgt_cmd->add_option("--out-schedule", tgt.out_schedule, "Schedule CSV output");
  tgt_cmd->add_option("--out-report", tgt.out_report, "Report JSON output");
  tgt_cmd->add_flag("--print-config", tgt.print_config, "Print effective config and exit");

  ReportArgs rpt;
  auto* rpt_cmd = app.add_subcommand("report", "Net-benefit curves over a subsidy grid");
  rpt_cmd->add_option("--fixture", rpt.fixture, "Built-in model name");
  rpt_cmd->add_option("--model", rpt.model_path, "Model JSON path");
  rpt_cmd->add_option("--pbar", rpt.pbar, "Base price");
  rpt_cmd->add_option("--income", rpt.income, "Income");
  rpt_cmd->add_option("--sigma-min", rpt.sigma_min, "Smallest subsidy");
  rpt_cmd->add_option("--sigma-max", rpt.sigma_max, "Largest subsidy");
  rpt_cmd->add_option("--sigma-points", rpt.sigma_points, "Subsidy grid size");
  rpt_cmd->add_option("--y-max", rpt.y_max, "Integral truncation income");
  rpt_cmd->add_option("--out", rpt.out, "Output CSV");
  rpt_cmd->add_flag("--print-config", rpt.print_config, "Print effective config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sim_cmd->parsed()) return run_simulate(sim);
    if (est_cmd->parsed()) return run_estimate(est);
    if (wel_cmd->parsed()) return run_welfare(wel);
    if (bnd_cmd->parsed()) return run_bounds(bnd);
    if (tgt_cmd->parsed()) return run_target(tgt);
    if (rpt_cmd->parsed()) return run_report(rpt);
  } catch (const dcw::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const dcw::data_error& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const dcw::numerical_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
  return kExitUsage;
}
