#pragma once

#include <armadillo>
#include <optional>
#include <string>
#include <string_view>

namespace pairglm {

// Row/column penalties. HybridL1Linf is P(b) = max(|b_1|, ||b_{-1}||_1)
// where b_1 is the main-effect entry of the row or column.
enum class PenaltyKind { None, L1, GroupL2, Linf, HybridL1Linf };

PenaltyKind penalty_kind_from_string(std::string_view name);
std::string to_string(PenaltyKind kind);

// Tuning parameters for the three penalty terms. The (alpha, lambda)
// parametrization expands to lambda1 = lambda2 = (1-alpha) * lambda * sqrt(p)
// and lambda3 = alpha * lambda.
struct PenaltySpec {
  PenaltyKind row_kind = PenaltyKind::GroupL2;
  PenaltyKind col_kind = PenaltyKind::GroupL2;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  std::optional<double> alpha;   // set when built from (alpha, lambda)
  std::optional<double> lambda;

  static PenaltySpec from_alpha_lambda(PenaltyKind row_kind, PenaltyKind col_kind, double alpha,
                                       double lambda, arma::uword p);
  void validate() const;
};

double norm_value(PenaltyKind kind, const arma::vec& v);

// P*(v) = sup{ z'v : P(z) <= 1 }. GroupL2 is self-dual, Linf pairs with l1,
// L1 with linf, and the hybrid dual is |v_1| + ||v_{-1}||_inf. For None the
// dual is 0 at v = 0 and infinite otherwise.
double dual_norm(PenaltyKind kind, const arma::vec& v);

// true iff the prox at (y, lam) is exactly zero, i.e. P*(y) <= lam
bool zero_check(PenaltyKind kind, const arma::vec& y, double lam);

arma::vec prox(PenaltyKind kind, const arma::vec& y, double lam);

arma::vec prox_soft_threshold(const arma::vec& y, double lam);
double soft_threshold(double y, double lam);

arma::vec prox_group_l2(const arma::vec& y, double lam);

// Euclidean projection onto {u : ||u||_1 <= radius}, sort-and-threshold
arma::vec project_l1_ball(const arma::vec& y, double radius);

// Moreau decomposition: y minus the projection onto the l1 ball of radius lam
arma::vec prox_linf(const arma::vec& y, double lam);

arma::vec prox_hybrid(const arma::vec& y, double lam);

// The split point lambda_1_hat of the hybrid prox dual problem: the box
// bound on u_1 is lambda_1_hat, the bound on the rest is lam - lambda_1_hat.
// Requires y.n_elem >= 2 and the non-zero case P*(y) > lam.
double hybrid_threshold_split(const arma::vec& y, double lam);

}  // namespace pairglm
