#include "dcw/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dcw/common.hpp"

namespace dcw {

using nlohmann::json;

namespace {

json dist_to_json(const Distribution& d) {
  json j;
  switch (d.kind()) {
    case DistKind::Normal: j["dist"] = "normal"; break;
    case DistKind::Logistic: j["dist"] = "logistic"; break;
    case DistKind::Uniform: j["dist"] = "uniform"; break;
    case DistKind::Degenerate: j["dist"] = "degenerate"; break;
    case DistKind::TwoPoint: j["dist"] = "two_point"; break;
  }
  j["location"] = d.location();
  if (d.kind() != DistKind::Degenerate) j["scale"] = d.scale();
  return j;
}

Distribution dist_from_json(const json& j) {
  const std::string kind = j.at("dist").get<std::string>();
  const double loc = j.at("location").get<double>();
  if (kind == "degenerate") return Distribution::degenerate(loc);
  const double scale = j.at("scale").get<double>();
  if (kind == "normal") return Distribution::normal(loc, scale);
  if (kind == "logistic") return Distribution::logistic(loc, scale);
  if (kind == "uniform") return Distribution::uniform(loc, scale);
  if (kind == "two_point") return Distribution::two_point(loc, scale);
  throw data_error("model json: unknown distribution kind '" + kind + "'");
}

json curve_to_json(const UtilityCurve& c) {
  json j;
  switch (c.kind()) {
    case UtilityCurve::Kind::Linear:
      j["kind"] = "linear";
      j["intercept"] = c.intercept();
      j["slope"] = c.slope();
      break;
    case UtilityCurve::Kind::Log:
      j["kind"] = "log";
      j["intercept"] = c.intercept();
      j["slope"] = c.slope();
      j["shift"] = c.shift();
      break;
    case UtilityCurve::Kind::Power:
      j["kind"] = "power";
      j["intercept"] = c.intercept();
      j["slope"] = c.slope();
      j["shift"] = c.shift();
      j["exponent"] = c.exponent();
      break;
  }
  return j;
}

UtilityCurve curve_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "linear") {
    return UtilityCurve::linear(j.at("intercept").get<double>(), j.at("slope").get<double>());
  }
  if (kind == "log") {
    return UtilityCurve::log(j.at("intercept").get<double>(), j.at("slope").get<double>(),
                             j.at("shift").get<double>());
  }
  if (kind == "power") {
    return UtilityCurve::power(j.at("intercept").get<double>(), j.at("slope").get<double>(),
                               j.at("shift").get<double>(), j.at("exponent").get<double>());
  }
  throw data_error("model json: unknown curve kind '" + kind + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write " + path);
  out << text;
}

}  // namespace

std::string model_to_json(const ChoiceModel& model) {
  json j;
  j["schema"] = "dcw-model/1";
  switch (model.kind()) {
    case ChoiceModel::Kind::Quasilinear: {
      j["kind"] = "quasilinear";
      json offs = json::array();
      for (const auto& d : model.quasilinear_spec()->taste_offsets) {
        offs.push_back(dist_to_json(d));
      }
      j["taste_offsets"] = std::move(offs);
      break;
    }
    case ChoiceModel::Kind::Synthetic: {
      const auto* s = model.synthetic_spec();
      j["kind"] = "synthetic";
      json curves = json::array();
      for (const auto& c : s->curves) curves.push_back(curve_to_json(c));
      j["curves"] = std::move(curves);
      j["offset_constants"] = s->offset_constants;
      j["loadings"] = s->loadings;
      json eta = json::array();
      for (const auto& d : s->eta) eta.push_back(dist_to_json(d));
      j["eta"] = std::move(eta);
      j["seed"] = s->seed;
      j["n_sim"] = s->n_sim;
      j["integration"] = s->integration == SyntheticSpec::Integration::Auto
                             ? "auto"
                             : (s->integration == SyntheticSpec::Integration::Quadrature
                                    ? "quadrature"
                                    : "simulate");
      break;
    }
    case ChoiceModel::Kind::SplineProbit: {
      const auto* s = model.spline_probit_spec();
      j["kind"] = "spline_probit";
      j["beta_price"] = s->beta_price;
      j["beta_spline"] = s->beta_spline;
      j["beta_covariates"] = s->beta_covariates;
      j["covariate_profile"] = s->covariate_profile;
      j["rho"] = s->rho;
      j["y_min"] = s->y_min;
      j["y_max"] = s->y_max;
      j["segments"] = s->segments;
      j["degree"] = s->degree;
      break;
    }
  }
  return j.dump(2) + "\n";
}

ChoiceModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw data_error(std::string("model json: parse failure: ") + e.what());
  }
  try {
    if (j.at("schema").get<std::string>() != "dcw-model/1") {
      throw data_error("model json: unsupported schema");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "quasilinear") {
      QuasilinearSpec spec;
      for (const auto& d : j.at("taste_offsets")) spec.taste_offsets.push_back(dist_from_json(d));
      return ChoiceModel::quasilinear(std::move(spec));
    }
    if (kind == "synthetic") {
      SyntheticSpec spec;
      for (const auto& c : j.at("curves")) spec.curves.push_back(curve_from_json(c));
      spec.offset_constants = j.at("offset_constants").get<std::vector<double>>();
      spec.loadings = j.at("loadings").get<std::vector<std::vector<double>>>();
      for (const auto& d : j.at("eta")) spec.eta.push_back(dist_from_json(d));
      spec.seed = j.at("seed").get<std::uint64_t>();
      spec.n_sim = j.at("n_sim").get<int>();
      const std::string integ = j.at("integration").get<std::string>();
      spec.integration = integ == "auto" ? SyntheticSpec::Integration::Auto
                         : integ == "quadrature" ? SyntheticSpec::Integration::Quadrature
                                                 : SyntheticSpec::Integration::Simulate;
      return ChoiceModel::synthetic(std::move(spec));
    }
    if (kind == "spline_probit") {
      SplineProbitSpec spec;
      spec.beta_price = j.at("beta_price").get<double>();
      spec.beta_spline = j.at("beta_spline").get<std::vector<double>>();
      spec.beta_covariates = j.at("beta_covariates").get<std::vector<double>>();
      spec.covariate_profile = j.at("covariate_profile").get<std::vector<double>>();
      spec.rho = j.at("rho").get<double>();
      spec.y_min = j.at("y_min").get<double>();
      spec.y_max = j.at("y_max").get<double>();
      spec.segments = j.at("segments").get<int>();
      spec.degree = j.at("degree").get<int>();
      return ChoiceModel::spline_probit(std::move(spec));
    }
    throw data_error("model json: unknown model kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw data_error(std::string("model json: ") + e.what());
  }
}

ChoiceModel load_model(const std::string& path) { return model_from_json(read_file(path)); }

void save_model(const ChoiceModel& model, const std::string& path) {
  write_file(path, model_to_json(model));
}

namespace {

json fit_to_json_obj(const DemandFit& fit) {
  json j;
  j["beta_price"] = fit.beta_price;
  j["beta_spline"] = fit.beta_spline;
  j["beta_covariates"] = fit.beta_cov;
  j["rho"] = fit.rho;
  j["y_min"] = fit.y_min;
  j["y_max"] = fit.y_max;
  j["segments"] = fit.segments;
  j["degree"] = fit.degree;
  j["constraint_grid"] = fit.constraint_grid;
  j["loglik"] = fit.loglik;
  j["unconstrained_loglik"] = fit.unconstrained_loglik;
  j["constraints_active"] = fit.constraints_active;
  j["audit_max_violation"] = fit.audit_max_violation;
  json fs;
  fs["coeffs"] = fit.first_stage.coeffs;
  fs["sigma2"] = fit.first_stage.sigma2;
  fs["f_stat"] = fit.first_stage.f_unbounded ? json("unbounded") : json(fit.first_stage.f_stat);
  fs["f_pvalue"] = fit.first_stage.f_pvalue;
  fs["n"] = fit.first_stage.n;
  fs["k"] = fit.first_stage.k;
  j["first_stage"] = std::move(fs);
  return j;
}

DemandFit fit_from_json_obj(const json& j) {
  DemandFit fit;
  fit.beta_price = j.at("beta_price").get<double>();
  fit.beta_spline = j.at("beta_spline").get<std::vector<double>>();
  fit.beta_cov = j.at("beta_covariates").get<std::vector<double>>();
  fit.rho = j.at("rho").get<double>();
  fit.y_min = j.at("y_min").get<double>();
  fit.y_max = j.at("y_max").get<double>();
  fit.segments = j.at("segments").get<int>();
  fit.degree = j.at("degree").get<int>();
  fit.constraint_grid = j.at("constraint_grid").get<std::vector<double>>();
  fit.loglik = j.at("loglik").get<double>();
  fit.unconstrained_loglik = j.at("unconstrained_loglik").get<double>();
  fit.constraints_active = j.at("constraints_active").get<bool>();
  fit.audit_max_violation = j.at("audit_max_violation").get<double>();
  const auto& fs = j.at("first_stage");
  fit.first_stage.coeffs = fs.at("coeffs").get<std::vector<double>>();
  fit.first_stage.sigma2 = fs.at("sigma2").get<double>();
  if (fs.at("f_stat").is_string()) {
    fit.first_stage.f_unbounded = true;
    fit.first_stage.f_stat = std::numeric_limits<double>::infinity();
  } else {
    fit.first_stage.f_stat = fs.at("f_stat").get<double>();
  }
  fit.first_stage.f_pvalue = fs.at("f_pvalue").get<double>();
  fit.first_stage.n = fs.at("n").get<int>();
  fit.first_stage.k = fs.at("k").get<int>();
  return fit;
}

}  // namespace

std::string fit_to_json(const DemandFit& fit) {
  json j = fit_to_json_obj(fit);
  j["schema"] = "dcw-fit/1";
  return j.dump(2) + "\n";
}

DemandFit fit_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("schema").get<std::string>() != "dcw-fit/1") {
      throw data_error("fit json: unsupported schema");
    }
    return fit_from_json_obj(j);
  } catch (const json::exception& e) {
    throw data_error(std::string("fit json: ") + e.what());
  }
}

DemandFit load_fit(const std::string& path) { return fit_from_json(read_file(path)); }

void save_fit(const DemandFit& fit, const std::string& path) {
  write_file(path, fit_to_json(fit));
}

std::string draws_to_json(const PosteriorDraws& draws) {
  json j;
  j["schema"] = "dcw-draws/1";
  j["attempted"] = draws.attempted;
  j["failures"] = draws.failures;
  j["seed"] = draws.seed;
  json arr = json::array();
  for (const auto& d : draws.draws) {
    json item;
    item["fit"] = fit_to_json_obj(d.fit);
    item["income_quantiles"] = d.income_quantiles;
    arr.push_back(std::move(item));
  }
  j["draws"] = std::move(arr);
  return j.dump(2) + "\n";
}

PosteriorDraws draws_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("schema").get<std::string>() != "dcw-draws/1") {
      throw data_error("draws json: unsupported schema");
    }
    PosteriorDraws out;
    out.attempted = j.at("attempted").get<int>();
    out.failures = j.at("failures").get<int>();
    out.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& item : j.at("draws")) {
      PosteriorDraw d;
      d.fit = fit_from_json_obj(item.at("fit"));
      d.income_quantiles = item.at("income_quantiles").get<std::vector<double>>();
      out.draws.push_back(std::move(d));
    }
    return out;
  } catch (const json::exception& e) {
    throw data_error(std::string("draws json: ") + e.what());
  }
}

PosteriorDraws load_draws(const std::string& path) { return draws_from_json(read_file(path)); }

void save_draws(const PosteriorDraws& draws, const std::string& path) {
  write_file(path, draws_to_json(draws));
}

}  // namespace dcw
