#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pairglm/postfit.hpp"
#include "pairglm/rng.hpp"

namespace pairglm {

enum class CovarianceKind { Identity, Ar, Exchangeable };

CovarianceKind covariance_from_string(std::string_view name);
std::string to_string(CovarianceKind kind);

// Synthetic-data protocol: the first n_true_main main effects are active
// with values uniform on {-5..-1, 1..5}; n_true_inter interactions are
// drawn among pairs of active mains (strong heredity by construction) with
// values uniform on {-10, -8, ..., -2, 2, ..., 10}. Rows of X = Z are
// N_p(0, Sigma); noise is scaled to the target signal-to-noise ratio.
struct Scenario {
  int n_train = 300;
  int n_test = 300;
  int n_valid = 300;
  int p = 30;
  int n_true_main = 10;
  int n_true_inter = 15;
  double snr_target = 3.0;  // midpoint of the accepted 2.5 - 3.5 band
  CovarianceKind covariance = CovarianceKind::Identity;
  double cov_param = 0.0;  // AR decay or exchangeable correlation
  Family family = Family::Gaussian;
  std::uint64_t seed = 1;

  void validate() const;
};

arma::mat gen_coefficients(const Scenario& scenario);

// one split of one replicate; X = Z (symmetric), y left empty
Dataset gen_gaussian_data(const Scenario& scenario, std::string_view split, int replicate,
                          int n);

struct ResponseDraw {
  arma::vec y;
  double sigma = 0.0;
  bool sigma_floored = false;  // zero signal: sigma fixed at 1 and flagged
};

// y = W*B + eps with sigma^2 = var(signal) / snr_target
ResponseDraw gen_response(const DesignTensor& design, const arma::mat& B_true,
                          double snr_target, RngStream& stream);

arma::vec gen_logistic_response(const DesignTensor& design, const arma::mat& B_true,
                                RngStream& stream);

struct MethodConfig {
  PenaltyKind kind = PenaltyKind::GroupL2;
  int n_alpha = 10;
  int n_lambda = 50;
  double lambda_min_ratio = 1e-3;
  int replicates = 20;
  AdmmOptions solver;
  int n_threads = 0;
};

struct ReplicateResult {
  int replicate = 0;
  double sigma = 0.0;
  // validation SSR (deviance for binomial) relative to the oracle refit
  double rel_ssr_raw = 0.0, rel_ssr_relaxed = 0.0;
  double fdr_raw = 0.0, fdr_relaxed = 0.0;
  double tpr_raw = 0.0, tpr_relaxed = 0.0;
  int n_inter_raw = 0, n_inter_relaxed = 0;
  double oracle_ssr = 0.0, true_model_ssr = 0.0;
  double alpha_raw = 0.0, lambda_raw = 0.0;
  double alpha_relaxed = 0.0, lambda_relaxed = 0.0;
};

struct SummaryRow {
  std::string method;
  bool relaxed = false;
  double rel_ssr = 0.0, rel_ssr_se = 0.0;
  double fdr = 0.0, fdr_se = 0.0;
  double tpr = 0.0, tpr_se = 0.0;
  double n_inter = 0.0, n_inter_se = 0.0;
};

struct ScenarioReport {
  Scenario scenario;
  MethodConfig config;
  std::vector<ReplicateResult> replicates;
  std::vector<SummaryRow> summary;  // raw and relaxed rows
};

// Full experiment: per replicate, draw train/test/validation data, fit the
// (alpha, lambda) grid on train, pick the grid point with the smallest test
// SSR (raw and relaxed separately), and evaluate on validation relative to
// the oracle refit.
ScenarioReport run_scenario(const Scenario& scenario, const MethodConfig& config);

// lambda grids per alpha: n_lambda values log-spaced from lambda_max down
// to lambda_min_ratio * lambda_max
std::vector<PenaltySpec> build_grid(const DesignTensor& design, const arma::vec& y,
                                    PenaltyKind kind, int n_alpha, int n_lambda,
                                    double lambda_min_ratio);

}  // namespace pairglm
