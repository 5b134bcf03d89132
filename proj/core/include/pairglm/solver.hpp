#pragma once

#include <utility>
#include <vector>

#include "pairglm/design.hpp"
#include "pairglm/penalty.hpp"

namespace pairglm {

struct AdmmOptions {
  double rho0 = 1.0;
  // non-positive tolerances resolve to 1e-4 * sqrt((p1+1)(p2+1)) so that
  // stopping behaves the same across problem sizes
  double eps_pri = 0.0;
  double eps_dual = 0.0;
  int max_iter = 10000;
  bool rho_adapt = true;
  bool track_objective = false;  // record objective(B) every 10 iterations
  int logistic_inner_iters = 1;  // majorization steps per outer iteration
  double tol_support = 1e-8;     // applied to F when extracting the support

  AdmmOptions resolved(arma::uword p1, arma::uword p2) const;
  void validate() const;
};

// Consensus variables, duals, and residuals of one ADMM iterate. All
// matrices are (p1+1) x (p2+1). Reusable as a warm start.
struct AdmmState {
  arma::mat B, D, E, F, Gamma1, Gamma2, Gamma3;
  double rho = 1.0;
  int iter = 0;
  double r_primal = 0.0, s_dual = 0.0;

  static AdmmState zeros(arma::uword p1, arma::uword p2, double rho0);
};

struct FitResult {
  arma::mat B_hat;     // consensus estimate, entries outside the support zeroed
  arma::umat support;  // (p1+1) x (p2+1) of 0/1
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double r_final = 0.0, s_final = 0.0;
  double rho_final = 0.0;
  bool direct_lstsq = false;  // all-zero penalties: direct SVD least-squares path
  bool min_norm = false;      // minimum-norm solution of an underdetermined system
  std::vector<double> objective_trace;
  AdmmState state;
};

// Economy SVD of the flattened design, held for the whole regularization
// path. Shifted systems (W'W/n + c I) x = r are solved through the
// decomposition for any c > 0 without re-factorizing.
class FactorCache {
 public:
  explicit FactorCache(const DesignTensor& design);

  arma::vec shifted_solve(const arma::vec& rhs, double shift) const;
  // minimum-norm least squares solution of ||y - W b||
  arma::vec pinv_solve(const arma::vec& y) const;
  arma::uword rank() const;
  const arma::vec& singular_values() const { return s_; }

 private:
  arma::mat U_, V_;
  arma::vec s_, d_;  // d = s^2 / n
  arma::uword n_ = 0;
};

double penalty_value(const arma::mat& B, const PenaltySpec& spec);
double objective_value(const arma::mat& B, const DesignTensor& design, const arma::vec& y,
                       const PenaltySpec& spec);

namespace admm {

// exact minimizer of (1/2n)||y - W*B||^2 + (3 rho / 2)||M - B||_F^2 with
// M = [rho (D+E+F) - (G1+G2+G3)] / (3 rho), via the cached factorization
arma::mat update_B(const FactorCache& cache, const DesignTensor& design,
                   const arma::vec& wty_over_n, const AdmmState& st);

// rows of D and columns of E through their proximal operators; row 0 of D
// and column 0 of E pass through unshrunk
std::pair<arma::mat, arma::mat> update_DE(const AdmmState& st, const PenaltySpec& spec);

// row 0 and column 0 copied, interior soft-thresholded at lambda3 / rho
arma::mat update_F(const AdmmState& st, double lambda3);

void update_duals(AdmmState& st);

// doubles rho when r > 10 s, halves it when 10 r < s
double update_rho(double rho, double r_primal, double s_dual);

// primal ||(B|B|B) - (D|E|F)||_F and dual rho ||Theta - Theta_prev||_F
std::pair<double, double> residuals(const AdmmState& st, const arma::mat& D_prev,
                                    const arma::mat& E_prev, const arma::mat& F_prev);

}  // namespace admm

// support(j,k) = row j of D nonzero AND column k of E nonzero AND
// |F(j,k)| > tol; mains follow their own block. The composition makes
// strong heredity hold by construction.
arma::umat extract_support(const AdmmState& st, double tol_support);

FitResult admm_fit(const DesignTensor& design, const arma::vec& y, const PenaltySpec& spec,
                   const AdmmOptions& opts = {}, const FactorCache* cache = nullptr,
                   const AdmmState* warm = nullptr);

// Fits every spec in the grid. Specs sharing an alpha value form a path
// that is processed at decreasing lambda with warm starts; distinct paths
// may run concurrently. Results match the input order.
std::vector<FitResult> fit_path(const DesignTensor& design, const arma::vec& y,
                                const std::vector<PenaltySpec>& grid,
                                const AdmmOptions& opts = {}, int n_threads = 0);

// Smallest lambda for which the blockwise zero checks leave only the
// intercept, under lambda1 = lambda2 = (1-alpha) sqrt(p1) lambda and
// lambda3 = alpha lambda.
double lambda_max(const DesignTensor& design, const arma::vec& y, PenaltyKind row_kind,
                  PenaltyKind col_kind, double alpha);

// objective of the weak-heredity model (evaluation only; no solver)
double weak_objective(const WeakDesign& design, const arma::vec& y, const arma::mat& Bx,
                      const arma::mat& Bz, const PenaltySpec& spec);

}  // namespace pairglm
