#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pairglm/logistic.hpp"
#include "pairglm/solver.hpp"

namespace pairglm {

struct RefitResult {
  arma::mat B;  // off-support entries exactly zero
  bool underdetermined = false;  // more active columns than observations
  bool separation = false;       // logistic likelihood diverged; coefficients capped
};

// Unpenalized least squares (or logistic maximum likelihood) restricted to
// the support columns. Underdetermined systems return the minimum-norm
// solution, flagged.
RefitResult relax_refit(const DesignTensor& design, const arma::vec& y,
                        const arma::umat& support, Family family);

// relax_refit on the true support
RefitResult oracle_fit(const DesignTensor& design, const arma::vec& y,
                       const arma::umat& true_support, Family family);

// Gaussian refits along a path share the column gram W'W and the row gram
// W W', so each support costs one factorization of its active block (or of
// the observation-space system when the support is underdetermined).
class RefitEngine {
 public:
  RefitEngine(const DesignTensor& design, const arma::vec& y);
  RefitResult refit(const arma::umat& support) const;

 private:
  const DesignTensor& design_;
  arma::vec y_;
  arma::mat gram_;      // (p1+1)(p2+1) square
  arma::mat row_gram_;  // n square
  arma::vec wty_;
};

struct SelectionMetrics {
  double ssr = 0.0;  // binomial fits report deviance here
  double fdr = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
  int n_interactions = 0;
  std::vector<std::pair<double, double>> roc_points;  // filled when pooled over a path
};

struct InteractionCounts {
  int tp = 0, fp = 0, fn = 0, tn = 0;
};

// Interaction detection counts. Symmetric problems count unordered pairs
// {j,k} with nonzero combined coefficient; asymmetric problems count cells.
InteractionCounts count_interactions(const arma::umat& est_support,
                                     const arma::umat& true_support, bool symmetric);

arma::umat support_of_truth(const arma::mat& B_true);

// Per-grid-point evaluation metrics: SSR on the evaluation split, and when
// the truth is supplied, FDR/TPR/FPR of interaction detection.
std::vector<SelectionMetrics> score(const std::vector<FitResult>& path,
                                    const std::optional<arma::mat>& B_true,
                                    const DesignTensor& eval_design, const arma::vec& eval_y,
                                    bool symmetric, Family family = Family::Gaussian);

// (fpr, tpr) pooled over a path, sorted by fpr then tpr
std::vector<std::pair<double, double>> pooled_roc(const std::vector<SelectionMetrics>& metrics);

double ssr(const arma::vec& y, const arma::vec& fitted);

// -2 log-likelihood of a binomial fit with linear predictor eta
double binomial_deviance(const arma::vec& y, const arma::vec& eta);

}  // namespace pairglm
