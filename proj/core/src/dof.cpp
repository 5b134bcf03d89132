#include "pairglm/dof.hpp"

#include <cmath>
#include <stdexcept>

#include "pairglm/errors.hpp"
#include "pairglm/parallel.hpp"
#include "pairglm/rng.hpp"

namespace pairglm {

ActiveSet ActiveSet::from_support(const DesignTensor& design, const arma::umat& support) {
  ActiveSet active;
  for (arma::uword col = 0; col < design.n_cols(); ++col) {
    const auto [j, k] = design.cell_of(col);
    if (support(j, k)) active.indices.push_back(col);
  }
  return active;  // columns scanned in order, so indices are sorted
}

arma::mat hessian_lq(const arma::vec& x, int q) {
  if (x.n_elem == 0 || arma::all(x == 0.0)) {
    throw Error("hessian_lq requires a nonzero vector");
  }
  if (q < 2 || q % 2 != 0) throw ConfigError("hessian_lq requires an even q >= 2");
  // ||x||_q computed against the max to keep the powers in range
  const double m = arma::abs(x).max();
  const arma::vec scaled = x / m;
  double accum = 0.0;
  for (arma::uword i = 0; i < x.n_elem; ++i) {
    accum += std::pow(std::abs(scaled(i)), static_cast<double>(q));
  }
  const double norm = m * std::pow(accum, 1.0 / static_cast<double>(q));

  const arma::vec xh = x / norm;  // entries in [-1, 1]
  arma::vec diag_part(x.n_elem), outer_part(x.n_elem);
  for (arma::uword i = 0; i < x.n_elem; ++i) {
    // q even: q-2 even so the diagonal power is sign-free, q-1 odd keeps sign
    diag_part(i) = std::pow(std::abs(xh(i)), static_cast<double>(q - 2));
    outer_part(i) = std::copysign(std::pow(std::abs(xh(i)), static_cast<double>(q - 1)), xh(i));
  }
  arma::mat H = -(outer_part * outer_part.t());
  H.diag() += diag_part;
  return (static_cast<double>(q - 1) / norm) * H;
}

DfEstimate df_generic(const DesignTensor& design, const FitResult& fit,
                      const std::vector<DfGroup>& groups) {
  const ActiveSet active = ActiveSet::from_support(design, fit.support);
  DfEstimate out;
  out.active_size = active.indices.size();
  if (active.indices.empty()) return out;

  arma::uvec cols(active.indices.size());
  for (arma::uword i = 0; i < cols.n_elem; ++i) cols(i) = active.indices[i];
  const arma::mat Xa = design.data().cols(cols);
  const arma::mat gram = Xa.t() * Xa;
  const arma::vec beta = design.flatten(fit.B_hat);

  // position of each flattened coordinate inside the active set
  std::vector<arma::sword> pos(design.n_cols(), -1);
  for (arma::uword i = 0; i < cols.n_elem; ++i) pos[cols(i)] = static_cast<arma::sword>(i);

  arma::mat inner = gram;
  for (const auto& group : groups) {
    if (group.lambda == 0.0) continue;
    std::vector<arma::uword> local;
    for (const arma::uword coord : group.coords) {
      if (pos[coord] >= 0) local.push_back(static_cast<arma::uword>(pos[coord]));
    }
    if (local.empty()) continue;  // fully inactive group: no curvature at play
    arma::uvec sub(local.size());
    arma::vec values(local.size());
    for (arma::uword i = 0; i < sub.n_elem; ++i) {
      sub(i) = local[i];
      values(i) = beta(cols(sub(i)));
    }
    inner.submat(sub, sub) += group.lambda * hessian_lq(values, group.q);
  }

  out.condition = arma::cond(inner);
  // symmetric factorization; an exactly singular matrix (possible when the
  // design carries duplicated columns) gets a ridge jitter starting at
  // 1e-10 * trace/dim, escalated until the factorization goes through
  arma::mat chol_factor;
  if (!arma::chol(chol_factor, inner, "lower")) {
    double jitter = 1e-10 * arma::trace(inner) / static_cast<double>(inner.n_rows);
    bool factored = false;
    for (int attempt = 0; attempt < 24 && !factored; ++attempt, jitter *= 10.0) {
      arma::mat jittered = inner;
      jittered.diag() += jitter;
      factored = arma::chol(chol_factor, jittered, "lower");
      if (factored) out.jitter = jitter;
    }
    if (!factored) {
      throw SingularSystemError("df inner matrix not invertible", out.condition);
    }
  }
  const arma::mat half = arma::solve(arma::trimatl(chol_factor), gram);
  out.df = arma::trace(arma::solve(arma::trimatu(chol_factor.t()), half));
  return out;
}

namespace {

std::vector<DfGroup> row_col_groups(const DesignTensor& design, double lambda1, double lambda2,
                                    int q) {
  // multipliers converted from the solver's (1/2n) loss convention
  const double n = static_cast<double>(design.n());
  std::vector<DfGroup> groups;
  groups.reserve(design.p1() + design.p2());
  for (arma::uword j = 1; j <= design.p1(); ++j) {
    DfGroup g;
    g.lambda = n * lambda1;
    g.q = q;
    for (arma::uword k = 0; k <= design.p2(); ++k) g.coords.push_back(design.col_index(j, k));
    groups.push_back(std::move(g));
  }
  for (arma::uword k = 1; k <= design.p2(); ++k) {
    DfGroup g;
    g.lambda = n * lambda2;
    g.q = q;
    for (arma::uword j = 0; j <= design.p1(); ++j) g.coords.push_back(design.col_index(j, k));
    groups.push_back(std::move(g));
  }
  return groups;
}

}  // namespace

DfEstimate df_l2(const DesignTensor& design, const FitResult& fit, double lambda1,
                 double lambda2) {
  return df_generic(design, fit, row_col_groups(design, lambda1, lambda2, 2));
}

DfEstimate df_linf(const DesignTensor& design, const FitResult& fit, double lambda1,
                   double lambda2, int q) {
  return df_generic(design, fit, row_col_groups(design, lambda1, lambda2, q));
}

MonteCarloDf monte_carlo_df(const DesignTensor& design, const arma::mat& B_true, double sigma,
                            const std::function<arma::vec(const arma::vec&)>& fitted_values,
                            int reps, std::uint64_t seed, int n_threads) {
  if (reps < 10) throw ConfigError("monte_carlo_df requires reps >= 10");
  if (!(sigma > 0.0)) throw ConfigError("monte_carlo_df requires sigma > 0");
  const arma::uword n = design.n();
  const arma::vec mu = predict(design, B_true);

  arma::mat Y(n, reps), Yhat(n, reps);
  parallel_for(static_cast<std::size_t>(reps), n_threads, [&](std::size_t r) {
    RngStream stream(seed, "mc-df", static_cast<std::uint64_t>(r));
    arma::vec y(n);
    for (arma::uword i = 0; i < n; ++i) y(i) = mu(i) + sigma * stream.normal();
    Y.col(r) = y;
    Yhat.col(r) = fitted_values(y);
  });

  auto df_over = [&](arma::uword first, arma::uword count) {
    const arma::mat Ys = Y.cols(first, first + count - 1);
    const arma::mat Hs = Yhat.cols(first, first + count - 1);
    const arma::vec ym = arma::mean(Ys, 1);
    const arma::vec hm = arma::mean(Hs, 1);
    double total = 0.0;
    for (arma::uword r = 0; r < count; ++r) {
      total += arma::dot(Ys.col(r) - ym, Hs.col(r) - hm);
    }
    return total / (sigma * sigma * static_cast<double>(count - 1));
  };

  MonteCarloDf out;
  out.reps = reps;
  out.df = df_over(0, static_cast<arma::uword>(reps));

  // spread across disjoint batches approximates the estimator's standard error
  const arma::uword n_groups = std::min<arma::uword>(10, static_cast<arma::uword>(reps / 5));
  if (n_groups >= 2) {
    const arma::uword size = static_cast<arma::uword>(reps) / n_groups;
    arma::vec parts(n_groups);
    for (arma::uword g = 0; g < n_groups; ++g) parts(g) = df_over(g * size, size);
    out.se = arma::stddev(parts) / std::sqrt(static_cast<double>(n_groups));
  }
  return out;
}

}  // namespace pairglm
