#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pairglm/solver.hpp"

namespace pairglm {

// Flattened positions (design column order) of the nonzero coefficients.
struct ActiveSet {
  std::vector<arma::uword> indices;  // sorted, unique

  static ActiveSet from_support(const DesignTensor& design, const arma::umat& support);
};

// One penalized group for the unbiased df estimator: the flattened
// coordinates it selects, its (already n-scaled) multiplier, and the l_q
// exponent of its Hessian.
struct DfGroup {
  std::vector<arma::uword> coords;
  double lambda = 0.0;
  int q = 2;
};

// Hessian of x -> ||x||_q at x != 0 for even q:
// (q-1)/||x||_q * [diag(xh^(q-2)) - xh^(q-1) (xh^(q-1))'], xh = x/||x||_q.
arma::mat hessian_lq(const arma::vec& x, int q);

struct DfEstimate {
  double df = 0.0;
  arma::uword active_size = 0;
  double condition = 0.0;  // condition estimate of the inner matrix
  double jitter = 0.0;     // ridge added if the factorization failed
};

// trace( X_A [X_A' X_A + sum_d lambda_d H_d]^{-1} X_A' ) over the active
// set; groups whose active part is empty contribute nothing, and the
// elementwise l1 term has no Hessian.
DfEstimate df_generic(const DesignTensor& design, const FitResult& fit,
                      const std::vector<DfGroup>& groups);

// l2 row/column penalties: q = 2 Hessians with multipliers n*lambda1 and
// n*lambda2 (the df form drops the 1/n loss scaling).
DfEstimate df_l2(const DesignTensor& design, const FitResult& fit, double lambda1,
                 double lambda2);

// linf penalties approximated by l_q with a large even q (default 500).
DfEstimate df_linf(const DesignTensor& design, const FitResult& fit, double lambda1,
                   double lambda2, int q = 500);

struct MonteCarloDf {
  double df = 0.0;
  double se = 0.0;
  int reps = 0;
};

// (1/sigma^2) sum_i Cov(y_i, yhat_i) estimated over independent Gaussian
// response draws on a fixed design. fitted_values maps a response draw to
// the procedure's fitted values. Requires reps >= 10.
MonteCarloDf monte_carlo_df(const DesignTensor& design, const arma::mat& B_true, double sigma,
                            const std::function<arma::vec(const arma::vec&)>& fitted_values,
                            int reps, std::uint64_t seed, int n_threads = 0);

}  // namespace pairglm
