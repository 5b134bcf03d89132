#include "pairglm/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pairglm/errors.hpp"

namespace pairglm {

using nlohmann::json;

namespace {

json matrix_to_json(const arma::mat& M) {
  // row-major, with explicit shape alongside
  std::vector<double> values;
  values.reserve(M.n_elem);
  for (arma::uword j = 0; j < M.n_rows; ++j) {
    for (arma::uword k = 0; k < M.n_cols; ++k) values.push_back(M(j, k));
  }
  return json(values);
}

arma::mat matrix_from_json(const json& values, arma::uword rows, arma::uword cols) {
  if (values.size() != rows * cols) throw ConfigError("coefficient payload size mismatch");
  arma::mat M(rows, cols);
  arma::uword i = 0;
  for (arma::uword j = 0; j < rows; ++j) {
    for (arma::uword k = 0; k < cols; ++k) M(j, k) = values.at(i++).get<double>();
  }
  return M;
}

json vec_to_json(const arma::vec& v) {
  return json(std::vector<double>(v.begin(), v.end()));
}

arma::vec vec_from_json(const json& values) {
  arma::vec v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) v(i) = values.at(i).get<double>();
  return v;
}

json penalty_to_json(const PenaltySpec& spec) {
  json out{
      {"row_kind", to_string(spec.row_kind)},
      {"col_kind", to_string(spec.col_kind)},
      {"lambda1", spec.lambda1},
      {"lambda2", spec.lambda2},
      {"lambda3", spec.lambda3},
  };
  if (spec.alpha) out["alpha"] = *spec.alpha;
  if (spec.lambda) out["lambda"] = *spec.lambda;
  return out;
}

PenaltySpec penalty_from_json(const json& j) {
  PenaltySpec spec;
  spec.row_kind = penalty_kind_from_string(j.at("row_kind").get<std::string>());
  spec.col_kind = penalty_kind_from_string(j.at("col_kind").get<std::string>());
  spec.lambda1 = j.at("lambda1").get<double>();
  spec.lambda2 = j.at("lambda2").get<double>();
  spec.lambda3 = j.at("lambda3").get<double>();
  if (j.contains("alpha")) spec.alpha = j.at("alpha").get<double>();
  if (j.contains("lambda")) spec.lambda = j.at("lambda").get<double>();
  return spec;
}

}  // namespace

std::string fit_bundle_to_json(const FitBundle& bundle) {
  const FitResult& fit = bundle.fit;
  const arma::uword p1 = fit.B_hat.n_rows - 1, p2 = fit.B_hat.n_cols - 1;
  json out;
  out["schema_version"] = "1";
  out["kind"] = "fit_result";
  out["p1"] = p1;
  out["p2"] = p2;
  out["family"] = to_string(bundle.family);
  out["penalty"] = penalty_to_json(bundle.spec);
  out["coefficients"] = matrix_to_json(fit.B_hat);
  std::vector<int> support;
  support.reserve(fit.support.n_elem);
  for (arma::uword j = 0; j <= p1; ++j) {
    for (arma::uword k = 0; k <= p2; ++k) support.push_back(fit.support(j, k) ? 1 : 0);
  }
  out["support"] = support;
  out["objective"] = fit.objective;
  out["iterations"] = fit.iterations;
  out["converged"] = fit.converged;
  out["r_final"] = fit.r_final;
  out["s_final"] = fit.s_final;
  out["rho_final"] = fit.rho_final;
  out["flags"] = json{{"direct_lstsq", fit.direct_lstsq}, {"min_norm", fit.min_norm}};
  if (bundle.standardizer) {
    const Standardizer& s = *bundle.standardizer;
    out["standardizer"] = json{
        {"x_means", vec_to_json(s.x_means)}, {"x_sds", vec_to_json(s.x_sds)},
        {"z_means", vec_to_json(s.z_means)}, {"z_sds", vec_to_json(s.z_sds)},
        {"y_mean", s.y_mean},
    };
    out["coefficients_original_scale"] = matrix_to_json(s.to_original_scale(fit.B_hat));
  }
  out["config"] = json(bundle.config_echo);
  return out.dump(2) + "\n";
}

FitBundle fit_bundle_from_json(const std::string& text) {
  json in = json::parse(text);
  if (in.at("schema_version").get<std::string>() != "1") {
    throw ConfigError("unsupported schema version");
  }
  FitBundle bundle;
  const arma::uword p1 = in.at("p1").get<arma::uword>();
  const arma::uword p2 = in.at("p2").get<arma::uword>();
  bundle.family = family_from_string(in.at("family").get<std::string>());
  bundle.spec = penalty_from_json(in.at("penalty"));
  bundle.fit.B_hat = matrix_from_json(in.at("coefficients"), p1 + 1, p2 + 1);
  bundle.fit.support.set_size(p1 + 1, p2 + 1);
  {
    const auto& support = in.at("support");
    if (support.size() != (p1 + 1) * (p2 + 1)) throw ConfigError("support payload size");
    std::size_t i = 0;
    for (arma::uword j = 0; j <= p1; ++j) {
      for (arma::uword k = 0; k <= p2; ++k) {
        bundle.fit.support(j, k) = support.at(i++).get<int>() ? 1 : 0;
      }
    }
  }
  bundle.fit.objective = in.at("objective").get<double>();
  bundle.fit.iterations = in.at("iterations").get<int>();
  bundle.fit.converged = in.at("converged").get<bool>();
  bundle.fit.r_final = in.at("r_final").get<double>();
  bundle.fit.s_final = in.at("s_final").get<double>();
  bundle.fit.rho_final = in.at("rho_final").get<double>();
  if (in.contains("standardizer")) {
    Standardizer s;
    const auto& js = in.at("standardizer");
    s.x_means = vec_from_json(js.at("x_means"));
    s.x_sds = vec_from_json(js.at("x_sds"));
    s.z_means = vec_from_json(js.at("z_means"));
    s.z_sds = vec_from_json(js.at("z_sds"));
    s.y_mean = js.at("y_mean").get<double>();
    bundle.standardizer = std::move(s);
  }
  if (in.contains("config")) {
    for (const auto& [key, value] : in.at("config").items()) {
      bundle.config_echo[key] = value.get<std::string>();
    }
  }
  return bundle;
}

std::string scenario_to_json(const Scenario& scenario) {
  json out;
  out["schema_version"] = "1";
  out["kind"] = "scenario";
  out["n_train"] = scenario.n_train;
  out["n_test"] = scenario.n_test;
  out["n_valid"] = scenario.n_valid;
  out["p"] = scenario.p;
  out["n_true_main"] = scenario.n_true_main;
  out["n_true_inter"] = scenario.n_true_inter;
  out["snr_target"] = scenario.snr_target;
  out["covariance"] = to_string(scenario.covariance);
  out["cov_param"] = scenario.cov_param;
  out["family"] = to_string(scenario.family);
  out["seed"] = scenario.seed;
  return out.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  json in = json::parse(text);
  static const std::set<std::string> known{
      "schema_version", "kind",        "n_train",   "n_test",     "n_valid", "p",
      "n_true_main",    "n_true_inter", "snr_target", "covariance", "cov_param",
      "family",         "seed"};
  for (const auto& [key, value] : in.items()) {
    if (!known.count(key)) throw ConfigError("unknown scenario key '" + key + "'");
  }
  Scenario s;
  if (in.contains("n_train")) s.n_train = in.at("n_train").get<int>();
  if (in.contains("n_test")) s.n_test = in.at("n_test").get<int>();
  if (in.contains("n_valid")) s.n_valid = in.at("n_valid").get<int>();
  if (in.contains("p")) s.p = in.at("p").get<int>();
  if (in.contains("n_true_main")) s.n_true_main = in.at("n_true_main").get<int>();
  if (in.contains("n_true_inter")) s.n_true_inter = in.at("n_true_inter").get<int>();
  if (in.contains("snr_target")) s.snr_target = in.at("snr_target").get<double>();
  if (in.contains("covariance")) {
    s.covariance = covariance_from_string(in.at("covariance").get<std::string>());
  }
  if (in.contains("cov_param")) s.cov_param = in.at("cov_param").get<double>();
  if (in.contains("family")) s.family = family_from_string(in.at("family").get<std::string>());
  if (in.contains("seed")) s.seed = in.at("seed").get<std::uint64_t>();
  s.validate();
  return s;
}

std::string scenario_report_to_json(const ScenarioReport& report) {
  json out;
  out["schema_version"] = "1";
  out["kind"] = "scenario_report";
  out["scenario"] = json::parse(scenario_to_json(report.scenario));
  out["method"] = to_string(report.config.kind);
  out["replicate_count"] = report.config.replicates;
  json reps = json::array();
  for (const auto& r : report.replicates) {
    reps.push_back(json{
        {"replicate", r.replicate},
        {"sigma", r.sigma},
        {"rel_ssr_raw", r.rel_ssr_raw},
        {"rel_ssr_relaxed", r.rel_ssr_relaxed},
        {"fdr_raw", r.fdr_raw},
        {"fdr_relaxed", r.fdr_relaxed},
        {"tpr_raw", r.tpr_raw},
        {"tpr_relaxed", r.tpr_relaxed},
        {"n_inter_raw", r.n_inter_raw},
        {"n_inter_relaxed", r.n_inter_relaxed},
        {"oracle_ssr", r.oracle_ssr},
        {"true_model_ssr", r.true_model_ssr},
        {"alpha_raw", r.alpha_raw},
        {"lambda_raw", r.lambda_raw},
        {"alpha_relaxed", r.alpha_relaxed},
        {"lambda_relaxed", r.lambda_relaxed},
    });
  }
  out["replicates"] = reps;
  json rows = json::array();
  for (const auto& s : report.summary) {
    rows.push_back(json{
        {"method", s.method},
        {"relaxed", s.relaxed},
        {"rel_ssr", s.rel_ssr},
        {"rel_ssr_se", s.rel_ssr_se},
        {"fdr", s.fdr},
        {"fdr_se", s.fdr_se},
        {"tpr", s.tpr},
        {"tpr_se", s.tpr_se},
        {"n_interactions", s.n_inter},
        {"n_interactions_se", s.n_inter_se},
    });
  }
  out["summary"] = rows;
  return out.dump(2) + "\n";
}

std::string scenario_report_to_csv(const ScenarioReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "n_true_inter,method,relaxed,rel_ssr,rel_ssr_se,fdr,fdr_se,tpr,tpr_se,"
         "n_interactions,n_interactions_se\n";
  for (const auto& s : report.summary) {
    out << report.scenario.n_true_inter << ',' << s.method << ','
        << (s.relaxed ? "yes" : "no") << ',' << s.rel_ssr << ',' << s.rel_ssr_se << ','
        << s.fdr << ',' << s.fdr_se << ',' << s.tpr << ',' << s.tpr_se << ',' << s.n_inter
        << ',' << s.n_inter_se << '\n';
  }
  return out.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp + "'");
    out << content;
    out.flush();
    if (!out) throw Error("short write to '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw Error("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace pairglm
