#include "pairglm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "pairglm/errors.hpp"
#include "pairglm/parallel.hpp"

namespace pairglm {

CovarianceKind covariance_from_string(std::string_view name) {
  if (name == "identity") return CovarianceKind::Identity;
  if (name == "ar") return CovarianceKind::Ar;
  if (name == "exchangeable") return CovarianceKind::Exchangeable;
  throw ConfigError("unknown covariance '" + std::string(name) + "'");
}

std::string to_string(CovarianceKind kind) {
  switch (kind) {
    case CovarianceKind::Identity: return "identity";
    case CovarianceKind::Ar: return "ar";
    case CovarianceKind::Exchangeable: return "exchangeable";
  }
  return "unknown";
}

void Scenario::validate() const {
  if (n_train < 2 || n_test < 1 || n_valid < 1) throw InfeasibleScenarioError("split sizes");
  if (p < 1) throw InfeasibleScenarioError("p must be >= 1");
  if (n_true_main < 0 || n_true_main > p) {
    throw InfeasibleScenarioError("n_true_main must lie in [0, p]");
  }
  const long long pairs =
      static_cast<long long>(n_true_main) * (n_true_main - 1) / 2;
  if (n_true_inter < 0 || n_true_inter > pairs) {
    throw InfeasibleScenarioError("n_true_inter exceeds the " + std::to_string(pairs) +
                                  " hereditary pairs");
  }
  if (!(snr_target > 0.0)) throw InfeasibleScenarioError("snr_target must be positive");
}

arma::mat gen_coefficients(const Scenario& scenario) {
  scenario.validate();
  const arma::uword p = static_cast<arma::uword>(scenario.p);
  arma::mat B(p + 1, p + 1, arma::fill::zeros);
  RngStream stream(scenario.seed, "coefficients");

  // main values: {-5..-1, 1..5}, zero excluded by the set itself
  for (int j = 1; j <= scenario.n_true_main; ++j) {
    const auto mag = stream.uniform_int(1, 5);
    const bool negative = stream.uniform() < 0.5;
    B(static_cast<arma::uword>(j), 0) = negative ? -static_cast<double>(mag)
                                                 : static_cast<double>(mag);
  }

  // interaction support: unordered pairs of active mains, no replacement
  std::vector<std::pair<int, int>> pairs;
  for (int j = 1; j <= scenario.n_true_main; ++j) {
    for (int k = j + 1; k <= scenario.n_true_main; ++k) pairs.emplace_back(j, k);
  }
  const auto chosen = stream.sample_without_replacement(
      pairs.size(), static_cast<std::size_t>(scenario.n_true_inter));
  for (const std::size_t idx : chosen) {
    const auto [j, k] = pairs[idx];
    const auto mag = 2 * stream.uniform_int(1, 5);  // {2, 4, ..., 10}
    const bool negative = stream.uniform() < 0.5;
    B(static_cast<arma::uword>(j), static_cast<arma::uword>(k)) =
        negative ? -static_cast<double>(mag) : static_cast<double>(mag);
  }
  return B;
}

namespace {

arma::mat covariance_matrix(const Scenario& scenario) {
  const arma::uword p = static_cast<arma::uword>(scenario.p);
  switch (scenario.covariance) {
    case CovarianceKind::Identity:
      return arma::eye(p, p);
    case CovarianceKind::Ar: {
      arma::mat sigma(p, p);
      for (arma::uword i = 0; i < p; ++i) {
        for (arma::uword j = 0; j < p; ++j) {
          sigma(i, j) = std::pow(scenario.cov_param, std::abs(static_cast<double>(i) -
                                                              static_cast<double>(j)));
        }
      }
      return sigma;
    }
    case CovarianceKind::Exchangeable: {
      arma::mat sigma(p, p);
      sigma.fill(scenario.cov_param);
      sigma.diag().ones();
      return sigma;
    }
  }
  return arma::eye(p, p);
}

}  // namespace

Dataset gen_gaussian_data(const Scenario& scenario, std::string_view split, int replicate,
                          int n) {
  scenario.validate();
  const arma::uword p = static_cast<arma::uword>(scenario.p);
  RngStream stream(scenario.seed, split, static_cast<std::uint64_t>(replicate));
  arma::mat X(static_cast<arma::uword>(n), p);
  for (arma::uword i = 0; i < X.n_rows; ++i) {
    for (arma::uword j = 0; j < p; ++j) X(i, j) = stream.normal();
  }
  if (scenario.covariance != CovarianceKind::Identity) {
    const arma::mat chol = arma::chol(covariance_matrix(scenario), "lower");
    X = X * chol.t();
  }
  Dataset data;
  data.X = X;
  data.Z = std::move(X);
  data.y = arma::vec(static_cast<arma::uword>(n), arma::fill::zeros);
  data.symmetric = true;
  return data;
}

ResponseDraw gen_response(const DesignTensor& design, const arma::mat& B_true,
                          double snr_target, RngStream& stream) {
  ResponseDraw out;
  const arma::vec signal = predict(design, B_true);
  const double signal_var = signal.n_elem > 1 ? arma::var(signal) : 0.0;
  if (signal_var > 0.0) {
    out.sigma = std::sqrt(signal_var / snr_target);
  } else {
    out.sigma = 1.0;
    out.sigma_floored = true;
  }
  out.y.set_size(signal.n_elem);
  for (arma::uword i = 0; i < signal.n_elem; ++i) {
    out.y(i) = signal(i) + out.sigma * stream.normal();
  }
  return out;
}

arma::vec gen_logistic_response(const DesignTensor& design, const arma::mat& B_true,
                                RngStream& stream) {
  const arma::vec eta = predict(design, B_true);
  arma::vec y(eta.n_elem);
  for (arma::uword i = 0; i < eta.n_elem; ++i) {
    y(i) = stream.uniform() < logistic_cdf(eta(i)) ? 1.0 : 0.0;
  }
  return y;
}

std::vector<PenaltySpec> build_grid(const DesignTensor& design, const arma::vec& y,
                                    PenaltyKind kind, int n_alpha, int n_lambda,
                                    double lambda_min_ratio) {
  if (n_alpha < 1 || n_lambda < 1) throw ConfigError("grid needs n_alpha, n_lambda >= 1");
  std::vector<PenaltySpec> grid;
  grid.reserve(static_cast<std::size_t>(n_alpha) * static_cast<std::size_t>(n_lambda));
  for (int a = 0; a < n_alpha; ++a) {
    // alpha on the open interval: 0.05 .. 0.95 for the default 10 values
    const double alpha = (a + 0.5) / static_cast<double>(n_alpha);
    const double lam_max = lambda_max(design, y, kind, kind, alpha);
    for (int l = 0; l < n_lambda; ++l) {
      const double t = n_lambda == 1
                           ? 0.0
                           : static_cast<double>(l) / static_cast<double>(n_lambda - 1);
      const double lam = lam_max * std::pow(lambda_min_ratio, t);
      grid.push_back(
          PenaltySpec::from_alpha_lambda(kind, kind, alpha, lam, design.p1()));
    }
  }
  return grid;
}

namespace {

std::size_t support_hash(const arma::umat& support) {
  std::size_t h = 1469598103934665603ULL;
  for (arma::uword i = 0; i < support.n_elem; ++i) {
    h ^= support(i) ? 0x9e3779b97f4a7c15ULL + i : i;
    h *= 1099511628211ULL;
  }
  return h;
}

double eval_criterion(Family family, const arma::vec& y, const arma::vec& eta) {
  return family == Family::Gaussian ? ssr(y, eta) : binomial_deviance(y, eta);
}

ReplicateResult run_replicate(const Scenario& scenario, const MethodConfig& config,
                              const arma::mat& B_true, int replicate) {
  ReplicateResult result;
  result.replicate = replicate;

  Dataset train = gen_gaussian_data(scenario, "train", replicate, scenario.n_train);
  Dataset test = gen_gaussian_data(scenario, "test", replicate, scenario.n_test);
  Dataset valid = gen_gaussian_data(scenario, "valid", replicate, scenario.n_valid);

  const DesignTensor raw_train = build_design(train);
  const DesignTensor raw_test = build_design(test);
  const DesignTensor raw_valid = build_design(valid);

  if (scenario.family == Family::Gaussian) {
    RngStream noise_train(scenario.seed, "noise-train", static_cast<std::uint64_t>(replicate));
    RngStream noise_test(scenario.seed, "noise-test", static_cast<std::uint64_t>(replicate));
    RngStream noise_valid(scenario.seed, "noise-valid", static_cast<std::uint64_t>(replicate));
    const ResponseDraw draw = gen_response(raw_train, B_true, scenario.snr_target, noise_train);
    train.y = draw.y;
    result.sigma = draw.sigma;
    const arma::vec mu_test = predict(raw_test, B_true);
    test.y.set_size(mu_test.n_elem);
    for (arma::uword i = 0; i < mu_test.n_elem; ++i) {
      test.y(i) = mu_test(i) + draw.sigma * noise_test.normal();
    }
    const arma::vec mu_valid = predict(raw_valid, B_true);
    valid.y.set_size(mu_valid.n_elem);
    for (arma::uword i = 0; i < mu_valid.n_elem; ++i) {
      valid.y(i) = mu_valid(i) + draw.sigma * noise_valid.normal();
    }
  } else {
    RngStream s1(scenario.seed, "logit-train", static_cast<std::uint64_t>(replicate));
    RngStream s2(scenario.seed, "logit-test", static_cast<std::uint64_t>(replicate));
    RngStream s3(scenario.seed, "logit-valid", static_cast<std::uint64_t>(replicate));
    train.y = gen_logistic_response(raw_train, B_true, s1);
    test.y = gen_logistic_response(raw_test, B_true, s2);
    valid.y = gen_logistic_response(raw_valid, B_true, s3);
  }

  // standardize on train; apply the same scales to the held-out splits
  auto [train_std, scaler] = standardize(train);
  Dataset test_std = scaler.apply(test);
  Dataset valid_std = scaler.apply(valid);
  const DesignTensor design = build_design(train_std);
  const DesignTensor design_test = build_design(test_std);
  const DesignTensor design_valid = build_design(valid_std);

  const std::vector<PenaltySpec> grid = build_grid(design, train.y, config.kind,
                                                   config.n_alpha, config.n_lambda,
                                                   config.lambda_min_ratio);
  // warm-started per alpha, sequentially (one replicate owns one thread);
  // a failing grid point is dropped from selection, not fatal
  std::vector<FitResult> path(grid.size());
  std::vector<bool> usable(grid.size(), false);
  {
    const FactorCache cache(design);
    const AdmmState* warm = nullptr;
    std::optional<double> current_alpha;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i].alpha != current_alpha) {
        warm = nullptr;
        current_alpha = grid[i].alpha;
      }
      try {
        path[i] = scenario.family == Family::Gaussian
                      ? admm_fit(design, train.y, grid[i], config.solver, &cache, warm)
                      : admm_fit_logistic(design, train.y, grid[i], config.solver, &cache,
                                          warm);
        usable[i] = true;
        warm = &path[i].state;
      } catch (const std::exception&) {
        warm = nullptr;  // restart the path after a failed point
      }
    }
  }
  if (std::none_of(usable.begin(), usable.end(), [](bool u) { return u; })) {
    throw Error("every grid point failed for replicate " + std::to_string(replicate));
  }

  // raw and relaxed test criteria per grid point; refits cached by support
  std::optional<RefitEngine> engine;
  if (scenario.family == Family::Gaussian) engine.emplace(design, train.y);
  std::unordered_map<std::size_t, RefitResult> refit_cache;
  const double unusable = std::numeric_limits<double>::infinity();
  std::vector<double> raw_crit(path.size(), unusable), relaxed_crit(path.size(), unusable);
  std::vector<const RefitResult*> refits(path.size(), nullptr);
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (!usable[i]) continue;
    raw_crit[i] = eval_criterion(scenario.family, test.y,
                                 predict(design_test, path[i].B_hat));
    const std::size_t key = support_hash(path[i].support);
    auto it = refit_cache.find(key);
    if (it == refit_cache.end()) {
      RefitResult refit = engine ? engine->refit(path[i].support)
                                 : relax_refit(design, train.y, path[i].support,
                                               scenario.family);
      it = refit_cache.emplace(key, std::move(refit)).first;
    }
    refits[i] = &it->second;
    relaxed_crit[i] = eval_criterion(scenario.family, test.y,
                                     predict(design_test, it->second.B));
  }

  const std::size_t best_raw =
      std::min_element(raw_crit.begin(), raw_crit.end()) - raw_crit.begin();
  const std::size_t best_relaxed =
      std::min_element(relaxed_crit.begin(), relaxed_crit.end()) - relaxed_crit.begin();

  const arma::umat truth = support_of_truth(B_true);
  const RefitResult oracle = oracle_fit(design, train.y, truth, scenario.family);
  result.oracle_ssr = eval_criterion(scenario.family, valid.y,
                                     predict(design_valid, oracle.B));
  result.true_model_ssr = eval_criterion(scenario.family, valid.y,
                                         predict(raw_valid, B_true));

  const double raw_valid_crit = eval_criterion(
      scenario.family, valid.y, predict(design_valid, path[best_raw].B_hat));
  const double relaxed_valid_crit = eval_criterion(
      scenario.family, valid.y, predict(design_valid, refits[best_relaxed]->B));
  result.rel_ssr_raw = raw_valid_crit / result.oracle_ssr;
  result.rel_ssr_relaxed = relaxed_valid_crit / result.oracle_ssr;

  auto detection = [&](const arma::umat& est, double& fdr, double& tpr, int& count) {
    const InteractionCounts c = count_interactions(est, truth, true);
    fdr = c.tp + c.fp > 0 ? static_cast<double>(c.fp) / static_cast<double>(c.tp + c.fp) : 0.0;
    tpr = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
    count = c.tp + c.fp;
  };
  detection(path[best_raw].support, result.fdr_raw, result.tpr_raw, result.n_inter_raw);
  detection(path[best_relaxed].support, result.fdr_relaxed, result.tpr_relaxed,
            result.n_inter_relaxed);

  result.alpha_raw = grid[best_raw].alpha.value_or(0.0);
  result.lambda_raw = grid[best_raw].lambda.value_or(0.0);
  result.alpha_relaxed = grid[best_relaxed].alpha.value_or(0.0);
  result.lambda_relaxed = grid[best_relaxed].lambda.value_or(0.0);
  return result;
}

SummaryRow summarize(const std::vector<ReplicateResult>& reps, const std::string& method,
                     bool relaxed) {
  SummaryRow row;
  row.method = method;
  row.relaxed = relaxed;
  const double n = static_cast<double>(reps.size());
  auto mean_se = [&](auto getter, double& mean, double& se) {
    arma::vec values(reps.size());
    for (std::size_t i = 0; i < reps.size(); ++i) values(i) = getter(reps[i]);
    mean = arma::mean(values);
    se = reps.size() > 1 ? arma::stddev(values) / std::sqrt(n) : 0.0;
  };
  if (relaxed) {
    mean_se([](const ReplicateResult& r) { return r.rel_ssr_relaxed; }, row.rel_ssr,
            row.rel_ssr_se);
    mean_se([](const ReplicateResult& r) { return r.fdr_relaxed; }, row.fdr, row.fdr_se);
    mean_se([](const ReplicateResult& r) { return r.tpr_relaxed; }, row.tpr, row.tpr_se);
    mean_se([](const ReplicateResult& r) { return static_cast<double>(r.n_inter_relaxed); },
            row.n_inter, row.n_inter_se);
  } else {
    mean_se([](const ReplicateResult& r) { return r.rel_ssr_raw; }, row.rel_ssr,
            row.rel_ssr_se);
    mean_se([](const ReplicateResult& r) { return r.fdr_raw; }, row.fdr, row.fdr_se);
    mean_se([](const ReplicateResult& r) { return r.tpr_raw; }, row.tpr, row.tpr_se);
    mean_se([](const ReplicateResult& r) { return static_cast<double>(r.n_inter_raw); },
            row.n_inter, row.n_inter_se);
  }
  return row;
}

}  // namespace

ScenarioReport run_scenario(const Scenario& scenario, const MethodConfig& config) {
  scenario.validate();
  ScenarioReport report;
  report.scenario = scenario;
  report.config = config;
  report.replicates.resize(static_cast<std::size_t>(config.replicates));

  const arma::mat B_true = gen_coefficients(scenario);
  parallel_for(report.replicates.size(), config.n_threads, [&](std::size_t r) {
    report.replicates[r] = run_replicate(scenario, config, B_true, static_cast<int>(r));
  });

  const std::string method = to_string(config.kind);
  report.summary.push_back(summarize(report.replicates, method, false));
  report.summary.push_back(summarize(report.replicates, method, true));
  return report;
}

}  // namespace pairglm
