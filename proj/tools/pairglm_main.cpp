// Command-line front end: fit, path, predict, df, simulate.
// Exit codes: 0 success, 1 input/config error, 2 solver did not converge
// (the partial result is still written).

#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pairglm/csv.hpp"
#include "pairglm/dof.hpp"
#include "pairglm/errors.hpp"
#include "pairglm/logistic.hpp"
#include "pairglm/parallel.hpp"
#include "pairglm/postfit.hpp"
#include "pairglm/serialize.hpp"
#include "pairglm/simulate.hpp"

namespace {

using namespace pairglm;

struct FitArgs {
  std::string data_path, response, out_path;
  std::string penalty = "l2";
  std::string family = "gaussian";
  double alpha = 0.5;
  double lambda = 0.1;
  double lambda3 = -1.0;  // < 0: keep the alpha-implied value
  int max_iter = 10000;
  double eps = 0.0;
  std::uint64_t seed = 1;
  bool relax = false;
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

PenaltySpec make_spec(const FitArgs& args, arma::uword p) {
  PenaltySpec spec = PenaltySpec::from_alpha_lambda(penalty_kind_from_string(args.penalty),
                                                    penalty_kind_from_string(args.penalty),
                                                    args.alpha, args.lambda, p);
  if (args.lambda3 >= 0.0) spec.lambda3 = args.lambda3;
  return spec;
}

AdmmOptions make_options(const FitArgs& args) {
  AdmmOptions opts;
  opts.max_iter = args.max_iter;
  opts.eps_pri = args.eps;
  opts.eps_dual = args.eps;
  return opts;
}

int cmd_fit(const FitArgs& args) {
  const LoadedData loaded = load_dataset_csv(args.data_path, args.response);
  auto [std_data, scaler] = standardize(loaded.data);
  const DesignTensor design = build_design(std_data);
  const PenaltySpec spec = make_spec(args, design.p1());
  const AdmmOptions opts = make_options(args);
  const Family family = family_from_string(args.family);

  FitResult fit = family == Family::Gaussian
                      ? admm_fit(design, loaded.data.y, spec, opts)
                      : admm_fit_logistic(design, loaded.data.y, spec, opts);
  if (args.relax) {
    const RefitResult refit = relax_refit(design, loaded.data.y, fit.support, family);
    fit.B_hat = refit.B;
    fit.objective = family == Family::Gaussian
                        ? objective_value(fit.B_hat, design, loaded.data.y, spec)
                        : logistic_objective_value(fit.B_hat, design, loaded.data.y, spec);
  }

  FitBundle bundle;
  bundle.fit = fit;
  bundle.spec = spec;
  bundle.family = family;
  bundle.standardizer = scaler;
  bundle.config_echo = {
      {"command", "fit"},           {"data", args.data_path},
      {"response", args.response},  {"penalty", args.penalty},
      {"family", args.family},      {"alpha", fmt(args.alpha)},
      {"lambda", fmt(args.lambda)}, {"lambda3", fmt(spec.lambda3)},
      {"max_iter", std::to_string(args.max_iter)},
      {"eps", fmt(opts.resolved(design.p1(), design.p2()).eps_pri)},
      {"seed", std::to_string(args.seed)},
      {"relax", args.relax ? "true" : "false"},
  };
  write_file_atomic(args.out_path, fit_bundle_to_json(bundle));
  if (!fit.converged) {
    std::cerr << "warning: solver stopped at max_iter without meeting tolerances\n";
    return 2;
  }
  return 0;
}

struct PathArgs {
  std::string data_path, response, out_prefix;
  std::string eval_path;
  std::string penalty = "l2";
  std::string family = "gaussian";
  std::string grid = "10x50";
  double lambda_min_ratio = 1e-3;
  int max_iter = 10000;
  std::uint64_t seed = 1;
  bool relax = false;
  int threads = 0;
};

std::pair<int, int> parse_grid(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw ConfigError("grid must look like 10x50");
  const int a = std::stoi(text.substr(0, x));
  const int l = std::stoi(text.substr(x + 1));
  if (a < 1 || l < 1) throw ConfigError("grid counts must be positive");
  return {a, l};
}

int cmd_path(const PathArgs& args) {
  const LoadedData loaded = load_dataset_csv(args.data_path, args.response);
  auto [std_data, scaler] = standardize(loaded.data);
  const DesignTensor design = build_design(std_data);
  const Family family = family_from_string(args.family);
  const auto [n_alpha, n_lambda] = parse_grid(args.grid);
  const PenaltyKind kind = penalty_kind_from_string(args.penalty);

  AdmmOptions opts;
  opts.max_iter = args.max_iter;

  const std::vector<PenaltySpec> grid =
      build_grid(design, loaded.data.y, kind, n_alpha, n_lambda, args.lambda_min_ratio);

  std::vector<FitResult> path;
  if (family == Family::Gaussian) {
    path = fit_path(design, loaded.data.y, grid, opts, args.threads);
  } else {
    path.resize(grid.size());
    const FactorCache cache(design);
    const AdmmState* warm = nullptr;
    std::optional<double> current_alpha;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i].alpha != current_alpha) {
        warm = nullptr;
        current_alpha = grid[i].alpha;
      }
      path[i] = admm_fit_logistic(design, loaded.data.y, grid[i], opts, &cache, warm);
      warm = &path[i].state;
    }
  }

  // evaluation split for the per-point metrics; default is the training data
  DesignTensor eval_design = design;
  arma::vec eval_y = loaded.data.y;
  if (!args.eval_path.empty()) {
    const LoadedData eval = load_dataset_csv(args.eval_path, args.response);
    eval_design = build_design(scaler.apply(eval.data));
    eval_y = eval.data.y;
  }

  std::vector<RefitResult> refits;
  if (args.relax) {
    refits.reserve(path.size());
    for (const auto& fit : path) {
      refits.push_back(relax_refit(design, loaded.data.y, fit.support, family));
    }
  }

  std::ostringstream csv;
  csv.precision(17);
  csv << "index,alpha,lambda,lambda1,lambda2,lambda3,objective,iterations,converged,"
         "n_mains,n_interactions,ssr"
      << (args.relax ? ",ssr_relaxed" : "") << "\n";
  std::size_t best = 0;
  double best_crit = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < path.size(); ++i) {
    const FitResult& fit = path[i];
    int n_mains = 0, n_inter = 0;
    for (arma::uword j = 1; j < fit.support.n_rows; ++j) n_mains += fit.support(j, 0) ? 1 : 0;
    for (arma::uword k = 1; k < fit.support.n_cols; ++k) n_mains += fit.support(0, k) ? 1 : 0;
    for (arma::uword j = 1; j < fit.support.n_rows; ++j) {
      for (arma::uword k = 1; k < fit.support.n_cols; ++k) {
        n_inter += fit.support(j, k) ? 1 : 0;
      }
    }
    const arma::vec eta = predict(eval_design, fit.B_hat);
    const double crit =
        family == Family::Gaussian ? ssr(eval_y, eta) : binomial_deviance(eval_y, eta);
    csv << i << ',' << grid[i].alpha.value_or(0.0) << ',' << grid[i].lambda.value_or(0.0)
        << ',' << grid[i].lambda1 << ',' << grid[i].lambda2 << ',' << grid[i].lambda3 << ','
        << fit.objective << ',' << fit.iterations << ',' << (fit.converged ? 1 : 0) << ','
        << n_mains << ',' << n_inter << ',' << crit;
    double select_crit = crit;
    if (args.relax) {
      const arma::vec eta_relaxed = predict(eval_design, refits[i].B);
      const double crit_relaxed = family == Family::Gaussian
                                      ? ssr(eval_y, eta_relaxed)
                                      : binomial_deviance(eval_y, eta_relaxed);
      csv << ',' << crit_relaxed;
      select_crit = crit_relaxed;
    }
    csv << '\n';
    if (select_crit < best_crit) {
      best_crit = select_crit;
      best = i;
    }
  }
  write_file_atomic(args.out_prefix + "_metrics.csv", csv.str());

  FitBundle bundle;
  bundle.fit = path[best];
  if (args.relax) bundle.fit.B_hat = refits[best].B;
  bundle.spec = grid[best];
  bundle.family = family;
  bundle.standardizer = scaler;
  bundle.config_echo = {
      {"command", "path"},
      {"data", args.data_path},
      {"response", args.response},
      {"penalty", args.penalty},
      {"family", args.family},
      {"grid", args.grid},
      {"lambda_min_ratio", fmt(args.lambda_min_ratio)},
      {"seed", std::to_string(args.seed)},
      {"relax", args.relax ? "true" : "false"},
      {"selected_index", std::to_string(best)},
  };
  write_file_atomic(args.out_prefix + "_best.json", fit_bundle_to_json(bundle));

  for (const auto& fit : path) {
    if (!fit.converged) {
      std::cerr << "warning: at least one grid point stopped at max_iter\n";
      return 2;
    }
  }
  return 0;
}

struct PredictArgs {
  std::string model_path, data_path, response, out_path;
};

int cmd_predict(const PredictArgs& args) {
  const FitBundle bundle = fit_bundle_from_json(read_file(args.model_path));
  const LoadedData loaded = load_dataset_csv(args.data_path, args.response);
  if (!bundle.standardizer) throw ConfigError("model file lacks a standardizer");
  const DesignTensor design = build_design(bundle.standardizer->apply(loaded.data));
  const arma::vec eta = predict(design, bundle.fit.B_hat);

  std::vector<std::string> headers{"linear_predictor"};
  arma::mat out(eta.n_elem, bundle.family == Family::Binomial ? 2 : 1);
  out.col(0) = eta;
  if (bundle.family == Family::Binomial) {
    headers.push_back("probability");
    for (arma::uword i = 0; i < eta.n_elem; ++i) out(i, 1) = logistic_cdf(eta(i));
  }
  write_csv(args.out_path, headers, out);
  return 0;
}

struct DfArgs {
  std::string model_path, data_path, response, out_path;
  int q = 500;
};

int cmd_df(const DfArgs& args) {
  const FitBundle bundle = fit_bundle_from_json(read_file(args.model_path));
  const LoadedData loaded = load_dataset_csv(args.data_path, args.response);
  if (!bundle.standardizer) throw ConfigError("model file lacks a standardizer");
  const DesignTensor design = build_design(bundle.standardizer->apply(loaded.data));

  DfEstimate est;
  if (bundle.spec.row_kind == PenaltyKind::GroupL2 &&
      bundle.spec.col_kind == PenaltyKind::GroupL2) {
    est = df_l2(design, bundle.fit, bundle.spec.lambda1, bundle.spec.lambda2);
  } else if (bundle.spec.row_kind == PenaltyKind::Linf &&
             bundle.spec.col_kind == PenaltyKind::Linf) {
    est = df_linf(design, bundle.fit, bundle.spec.lambda1, bundle.spec.lambda2, args.q);
  } else {
    throw ConfigError("df estimation covers the l2 and linf penalties");
  }

  std::ostringstream out;
  out.precision(17);
  out << "{\n"
      << "  \"schema_version\": \"1\",\n"
      << "  \"kind\": \"df_estimate\",\n"
      << "  \"df\": " << est.df << ",\n"
      << "  \"active_size\": " << est.active_size << ",\n"
      << "  \"condition\": " << est.condition << ",\n"
      << "  \"jitter\": " << est.jitter << ",\n"
      << "  \"q\": " << args.q << "\n"
      << "}\n";
  write_file_atomic(args.out_path, out.str());
  return 0;
}

struct SimulateArgs {
  std::string scenario_path, out_prefix;
  std::string method = "l2";
  int replicates = -1;
  std::int64_t seed = -1;
  int threads = 0;
  bool long_mode = false;
};

int cmd_simulate(const SimulateArgs& args) {
  Scenario scenario;
  if (!args.scenario_path.empty()) {
    scenario = scenario_from_json(read_file(args.scenario_path));
  }
  if (args.seed >= 0) scenario.seed = static_cast<std::uint64_t>(args.seed);

  MethodConfig config;
  config.kind = penalty_kind_from_string(args.method);
  config.n_threads = args.threads;
  if (args.replicates > 0) config.replicates = args.replicates;

  std::string csv;
  std::string reps_json;
  if (args.long_mode) {
    // publication-scale sweep: 100 replicates at 15/30/45 interactions
    config.replicates = 100;
    for (const int n_inter : {15, 30, 45}) {
      Scenario s = scenario;
      s.n_true_inter = n_inter;
      const ScenarioReport report = run_scenario(s, config);
      std::string rows = scenario_report_to_csv(report);
      if (!csv.empty()) rows = rows.substr(rows.find('\n') + 1);  // drop repeated header
      csv += rows;
      reps_json += scenario_report_to_json(report);
    }
  } else {
    const ScenarioReport report = run_scenario(scenario, config);
    csv = scenario_report_to_csv(report);
    reps_json = scenario_report_to_json(report);
  }
  write_file_atomic(args.out_prefix + "_summary.csv", csv);
  write_file_atomic(args.out_prefix + "_replicates.json", reps_json);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"penalized regression with pairwise interactions under strong heredity"};
  app.require_subcommand(1);

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "fit one penalized model");
  fit->add_option("--data", fit_args.data_path, "input CSV")->required();
  fit->add_option("--response", fit_args.response, "response column name")->required();
  fit->add_option("--penalty", fit_args.penalty, "l2|linf|hybrid|l1|none");
  fit->add_option("--alpha", fit_args.alpha, "mixing weight in (0,1)");
  fit->add_option("--lambda", fit_args.lambda, "overall penalty level");
  fit->add_option("--lambda3", fit_args.lambda3, "override the interaction l1 level");
  fit->add_option("--family", fit_args.family, "gaussian|binomial");
  fit->add_option("--max-iter", fit_args.max_iter, "solver iteration cap");
  fit->add_option("--eps", fit_args.eps, "solver tolerance (0: dimension-scaled default)");
  fit->add_option("--seed", fit_args.seed, "seed echoed into the output");
  fit->add_flag("--relax", fit_args.relax, "refit unpenalized on the selected support");
  fit->add_option("--out", fit_args.out_path, "output JSON path")->required();

  PathArgs path_args;
  CLI::App* path = app.add_subcommand("path", "fit an (alpha, lambda) grid");
  path->add_option("--data", path_args.data_path, "input CSV")->required();
  path->add_option("--response", path_args.response, "response column name")->required();
  path->add_option("--penalty", path_args.penalty, "l2|linf|hybrid|l1|none");
  path->add_option("--family", path_args.family, "gaussian|binomial");
  path->add_option("--grid", path_args.grid, "alpha x lambda counts, e.g. 10x50");
  path->add_option("--lambda-min-ratio", path_args.lambda_min_ratio, "grid floor ratio");
  path->add_option("--eval-data", path_args.eval_path, "held-out CSV for selection metrics");
  path->add_option("--max-iter", path_args.max_iter, "solver iteration cap");
  path->add_option("--seed", path_args.seed, "seed echoed into the output");
  path->add_flag("--relax", path_args.relax, "also score unpenalized refits");
  path->add_option("--threads", path_args.threads, "worker threads (0: PAIRGLM_THREADS)");
  path->add_option("--out", path_args.out_prefix, "output prefix")->required();

  PredictArgs predict_args;
  CLI::App* predict = app.add_subcommand("predict", "apply a saved fit to new data");
  predict->add_option("--model", predict_args.model_path, "fit JSON")->required();
  predict->add_option("--data", predict_args.data_path, "input CSV")->required();
  predict->add_option("--response", predict_args.response,
                      "response column to exclude, if present");
  predict->add_option("--out", predict_args.out_path, "predictions CSV")->required();

  DfArgs df_args;
  CLI::App* df = app.add_subcommand("df", "degrees-of-freedom estimate for a saved fit");
  df->add_option("--model", df_args.model_path, "fit JSON")->required();
  df->add_option("--data", df_args.data_path, "input CSV")->required();
  df->add_option("--response", df_args.response, "response column name")->required();
  df->add_option("--df-q", df_args.q, "even exponent approximating linf");
  df->add_option("--out", df_args.out_path, "output JSON path")->required();

  SimulateArgs sim_args;
  CLI::App* simulate = app.add_subcommand("simulate", "synthetic benchmark driver");
  simulate->add_option("--scenario", sim_args.scenario_path, "scenario JSON file");
  simulate->add_option("--method", sim_args.method, "penalty kind to benchmark");
  simulate->add_option("--replicates", sim_args.replicates, "replicate count");
  simulate->add_option("--seed", sim_args.seed, "scenario seed override");
  simulate->add_option("--threads", sim_args.threads, "worker threads (0: PAIRGLM_THREADS)");
  simulate->add_flag("--long", sim_args.long_mode, "100 replicates at 15/30/45 interactions");
  simulate->add_option("--out", sim_args.out_prefix, "output prefix")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) return cmd_fit(fit_args);
    if (path->parsed()) return cmd_path(path_args);
    if (predict->parsed()) return cmd_predict(predict_args);
    if (df->parsed()) return cmd_df(df_args);
    if (simulate->parsed()) return cmd_simulate(sim_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
