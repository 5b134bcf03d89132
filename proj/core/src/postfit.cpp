#include "pairglm/postfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pairglm/errors.hpp"

namespace pairglm {

namespace {

constexpr double kSeparationCap = 30.0;  // |coef| beyond this flags separation

arma::uvec active_columns(const DesignTensor& design, const arma::umat& support) {
  std::vector<arma::uword> cols;
  for (arma::uword c = 0; c < design.n_cols(); ++c) {
    const auto [j, k] = design.cell_of(c);
    if (support(j, k)) cols.push_back(c);
  }
  return arma::uvec(cols);
}

arma::mat scatter(const DesignTensor& design, const arma::uvec& cols, const arma::vec& coefs) {
  arma::vec full(design.n_cols(), arma::fill::zeros);
  for (arma::uword i = 0; i < cols.n_elem; ++i) full(cols(i)) = coefs(i);
  return design.unflatten(full);
}

}  // namespace

RefitResult relax_refit(const DesignTensor& design, const arma::vec& y,
                        const arma::umat& support, Family family) {
  if (y.n_elem != design.n()) throw ShapeMismatchError("response length");
  if (support.n_rows != design.p1() + 1 || support.n_cols != design.p2() + 1) {
    throw ShapeMismatchError("support mask shape");
  }
  RefitResult out;
  arma::uvec cols = active_columns(design, support);
  if (cols.n_elem == 0) {
    // empty support: intercept-only
    cols = arma::uvec{0};
  }
  const arma::mat Xa = design.data().cols(cols);
  const arma::uword n = design.n();

  if (family == Family::Gaussian) {
    arma::vec coefs;
    if (cols.n_elem > n) {
      // minimum-norm solution of the underdetermined system, flagged
      out.underdetermined = true;
      arma::mat U, V;
      arma::vec s;
      if (!arma::svd_econ(U, s, V, Xa)) throw SingularSystemError("refit svd failed");
      const double tol = static_cast<double>(std::max(Xa.n_rows, Xa.n_cols)) * s.max() *
                         std::numeric_limits<double>::epsilon();
      arma::vec scaled = U.t() * y;
      for (arma::uword i = 0; i < s.n_elem; ++i) {
        scaled(i) = s(i) > tol ? scaled(i) / s(i) : 0.0;
      }
      coefs = V * scaled;
    } else {
      // normal equations; duplicated design columns (symmetric problems)
      // make the gram exactly singular, handled by an escalating ridge
      arma::mat gram = Xa.t() * Xa;
      const arma::vec rhs = Xa.t() * y;
      arma::mat chol_factor;
      double ridge = 1e-10 * arma::trace(gram) / static_cast<double>(gram.n_rows);
      while (!arma::chol(chol_factor, gram, "lower")) {
        gram.diag() += ridge;
        ridge *= 10.0;
      }
      coefs = arma::solve(arma::trimatu(chol_factor.t()),
                          arma::solve(arma::trimatl(chol_factor), rhs));
    }
    out.B = scatter(design, cols, coefs);
    return out;
  }

  // logistic maximum likelihood by damped Newton on the active columns
  check_binary(y);
  arma::vec coefs(cols.n_elem, arma::fill::zeros);
  double loss = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    const arma::vec eta = Xa * coefs;
    arma::vec probs(n), weights(n);
    for (arma::uword i = 0; i < n; ++i) {
      probs(i) = logistic_cdf(eta(i));
      weights(i) = std::max(probs(i) * (1.0 - probs(i)), 1e-10);
    }
    const arma::vec grad = Xa.t() * (probs - y);
    arma::mat hess = Xa.t() * (Xa.each_col() % weights);
    // ridge escalated until the factorization holds (duplicate columns make
    // the hessian exactly singular); kept quiet via cholesky
    arma::mat chol_factor;
    double ridge = 1e-10 * arma::trace(hess) / static_cast<double>(hess.n_rows);
    while (!arma::chol(chol_factor, hess, "lower")) {
      hess.diag() += ridge;
      ridge *= 10.0;
    }
    const arma::vec direction = arma::solve(
        arma::trimatu(chol_factor.t()), arma::solve(arma::trimatl(chol_factor), grad));
    // backtracking on the negative log-likelihood
    double step = 1.0;
    double new_loss = loss;
    arma::vec candidate = coefs;
    for (int half = 0; half < 30; ++half) {
      candidate = coefs - step * direction;
      const arma::vec eta_c = Xa * candidate;
      new_loss = binomial_deviance(y, eta_c) / 2.0;
      if (new_loss <= loss + 1e-12) break;
      step /= 2.0;
    }
    const double change = arma::abs(candidate - coefs).max();
    coefs = candidate;
    loss = new_loss;
    if (change < 1e-10) break;
  }
  // diverging coefficients or uniformly confident classification both mean
  // the likelihood has no interior maximum
  const arma::vec eta_final = Xa * coefs;
  if (arma::abs(coefs).max() > kSeparationCap ||
      (eta_final.n_elem && arma::abs(eta_final).min() > 15.0)) {
    out.separation = true;
    coefs = arma::clamp(coefs, -kSeparationCap, kSeparationCap);
  }
  if (cols.n_elem > n) out.underdetermined = true;
  out.B = scatter(design, cols, coefs);
  return out;
}

RefitResult oracle_fit(const DesignTensor& design, const arma::vec& y,
                       const arma::umat& true_support, Family family) {
  return relax_refit(design, y, true_support, family);
}

namespace {

arma::vec chol_jitter_solve(arma::mat K, const arma::vec& rhs) {
  arma::mat chol_factor;
  double ridge = 1e-10 * arma::trace(K) / static_cast<double>(K.n_rows);
  while (!arma::chol(chol_factor, K, "lower")) {
    K.diag() += ridge;
    ridge *= 10.0;
  }
  return arma::solve(arma::trimatu(chol_factor.t()),
                     arma::solve(arma::trimatl(chol_factor), rhs));
}

}  // namespace

RefitEngine::RefitEngine(const DesignTensor& design, const arma::vec& y)
    : design_(design), y_(y) {
  if (y.n_elem != design.n()) throw ShapeMismatchError("response length");
  gram_ = design.data().t() * design.data();
  row_gram_ = design.data() * design.data().t();
  wty_ = design.data().t() * y;
}

RefitResult RefitEngine::refit(const arma::umat& support) const {
  RefitResult out;
  arma::uvec cols = active_columns(design_, support);
  if (cols.n_elem == 0) cols = arma::uvec{0};
  const arma::uword n = design_.n();

  if (cols.n_elem <= n) {
    const arma::vec coefs = chol_jitter_solve(gram_.submat(cols, cols), wty_(cols));
    out.B = scatter(design_, cols, coefs);
    return out;
  }

  // underdetermined: minimum-norm through the observation-space system
  // X_A X_A' w = y, assembled from the cached row gram by removing the
  // complement columns (usually the smaller block)
  out.underdetermined = true;
  arma::mat K = row_gram_;
  std::vector<arma::uword> inactive;
  {
    std::vector<bool> active(design_.n_cols(), false);
    for (const arma::uword c : cols) active[c] = true;
    for (arma::uword c = 0; c < design_.n_cols(); ++c) {
      if (!active[c]) inactive.push_back(c);
    }
  }
  if (!inactive.empty()) {
    const arma::mat X_out = design_.data().cols(arma::uvec(inactive));
    K -= X_out * X_out.t();
  }
  const arma::vec w = chol_jitter_solve(std::move(K), y_);
  arma::vec coefs_full = design_.data().t() * w;
  arma::vec coefs(cols.n_elem);
  for (arma::uword i = 0; i < cols.n_elem; ++i) coefs(i) = coefs_full(cols(i));
  out.B = scatter(design_, cols, coefs);
  return out;
}

InteractionCounts count_interactions(const arma::umat& est_support,
                                     const arma::umat& true_support, bool symmetric) {
  if (est_support.n_rows != true_support.n_rows || est_support.n_cols != true_support.n_cols) {
    throw ShapeMismatchError("support masks");
  }
  const arma::uword p1 = est_support.n_rows - 1, p2 = est_support.n_cols - 1;
  InteractionCounts out;
  auto tally = [&](bool est, bool truth) {
    if (est && truth) ++out.tp;
    if (est && !truth) ++out.fp;
    if (!est && truth) ++out.fn;
    if (!est && !truth) ++out.tn;
  };
  if (symmetric && p1 == p2) {
    for (arma::uword j = 1; j <= p1; ++j) {
      for (arma::uword k = j; k <= p2; ++k) {
        const bool est = est_support(j, k) || est_support(k, j);
        const bool truth = true_support(j, k) || true_support(k, j);
        tally(est, truth);
      }
    }
  } else {
    for (arma::uword j = 1; j <= p1; ++j) {
      for (arma::uword k = 1; k <= p2; ++k) tally(est_support(j, k), true_support(j, k));
    }
  }
  return out;
}

arma::umat support_of_truth(const arma::mat& B_true) {
  arma::umat support(B_true.n_rows, B_true.n_cols, arma::fill::zeros);
  for (arma::uword j = 0; j < B_true.n_rows; ++j) {
    for (arma::uword k = 0; k < B_true.n_cols; ++k) support(j, k) = B_true(j, k) != 0.0;
  }
  support(0, 0) = 1;
  return support;
}

double ssr(const arma::vec& y, const arma::vec& fitted) {
  const arma::vec r = y - fitted;
  return arma::dot(r, r);
}

double binomial_deviance(const arma::vec& y, const arma::vec& eta) {
  double total = 0.0;
  for (arma::uword i = 0; i < y.n_elem; ++i) {
    double p = logistic_cdf(eta(i));
    p = std::clamp(p, 1e-12, 1.0 - 1e-12);
    total += y(i) == 1.0 ? -2.0 * std::log(p) : -2.0 * std::log(1.0 - p);
  }
  return total;
}

std::vector<SelectionMetrics> score(const std::vector<FitResult>& path,
                                    const std::optional<arma::mat>& B_true,
                                    const DesignTensor& eval_design, const arma::vec& eval_y,
                                    bool symmetric, Family family) {
  if (eval_y.n_elem != eval_design.n()) throw ShapeMismatchError("evaluation split");
  std::optional<arma::umat> truth;
  if (B_true) truth = support_of_truth(*B_true);

  std::vector<SelectionMetrics> metrics(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    const FitResult& fit = path[i];
    SelectionMetrics& m = metrics[i];
    const arma::vec eta = predict(eval_design, fit.B_hat);
    m.ssr = family == Family::Gaussian ? ssr(eval_y, eta) : binomial_deviance(eval_y, eta);

    const InteractionCounts counts = count_interactions(
        fit.support, truth ? *truth : arma::umat(fit.support.n_rows, fit.support.n_cols,
                                                 arma::fill::zeros),
        symmetric);
    m.n_interactions = counts.tp + counts.fp;
    if (truth) {
      m.fdr = counts.tp + counts.fp > 0
                  ? static_cast<double>(counts.fp) / static_cast<double>(counts.tp + counts.fp)
                  : 0.0;
      m.tpr = counts.tp + counts.fn > 0
                  ? static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn)
                  : 0.0;
      m.fpr = counts.fp + counts.tn > 0
                  ? static_cast<double>(counts.fp) / static_cast<double>(counts.fp + counts.tn)
                  : 0.0;
    }
  }
  return metrics;
}

std::vector<std::pair<double, double>> pooled_roc(const std::vector<SelectionMetrics>& metrics) {
  std::vector<std::pair<double, double>> points;
  points.reserve(metrics.size());
  for (const auto& m : metrics) points.emplace_back(m.fpr, m.tpr);
  std::sort(points.begin(), points.end());
  return points;
}

}  // namespace pairglm
