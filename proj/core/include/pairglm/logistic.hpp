#pragma once

#include <string>
#include <string_view>

#include "pairglm/solver.hpp"

namespace pairglm {

enum class Family { Gaussian, Binomial };

Family family_from_string(std::string_view name);
std::string to_string(Family family);

struct GlmSpec {
  Family family = Family::Gaussian;
  PenaltySpec penalty;
};

// throws NonBinaryResponseError unless every entry is 0 or 1
void check_binary(const arma::vec& y);

// (1/n) sum_i [ log(1 + e^{eta_i}) - y_i eta_i ], eta = W*B, evaluated with
// the stable log1p-exp form
double logistic_loss(const arma::mat& B, const DesignTensor& design, const arma::vec& y);

arma::mat logistic_grad(const arma::mat& B, const DesignTensor& design, const arma::vec& y);

double logistic_objective_value(const arma::mat& B, const DesignTensor& design,
                                const arma::vec& y, const PenaltySpec& spec);

// Same ADMM loop as admm_fit, with the B step solved through majorization:
// the logistic Hessian is bounded by (1/4) W'W/n, so each inner step is a
// shifted least-squares solve on the cached factorization.
FitResult admm_fit_logistic(const DesignTensor& design, const arma::vec& y,
                            const PenaltySpec& spec, const AdmmOptions& opts = {},
                            const FactorCache* cache = nullptr, const AdmmState* warm = nullptr);

double logistic_cdf(double eta);

}  // namespace pairglm
