#include "pairglm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>

#include "pairglm/errors.hpp"
#include "pairglm/parallel.hpp"

namespace pairglm {

AdmmOptions AdmmOptions::resolved(arma::uword p1, arma::uword p2) const {
  AdmmOptions out = *this;
  const double scale = std::sqrt(static_cast<double>((p1 + 1) * (p2 + 1)));
  if (out.eps_pri <= 0.0) out.eps_pri = 1e-4 * scale;
  if (out.eps_dual <= 0.0) out.eps_dual = 1e-4 * scale;
  out.validate();
  return out;
}

void AdmmOptions::validate() const {
  if (!(rho0 > 0.0) || !(eps_pri > 0.0) || !(eps_dual > 0.0)) {
    throw ConfigError("admm options must be positive");
  }
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (logistic_inner_iters < 1) throw ConfigError("logistic_inner_iters must be >= 1");
}

AdmmState AdmmState::zeros(arma::uword p1, arma::uword p2, double rho0) {
  AdmmState st;
  st.B.zeros(p1 + 1, p2 + 1);
  st.D = st.E = st.F = st.B;
  st.Gamma1 = st.Gamma2 = st.Gamma3 = st.B;
  st.rho = rho0;
  return st;
}

FactorCache::FactorCache(const DesignTensor& design) : n_(design.n()) {
  if (!arma::svd_econ(U_, s_, V_, design.data())) {
    throw SingularSystemError("svd of the design failed");
  }
  d_ = arma::square(s_) / static_cast<double>(n_);

  // probe the reconstruction: relative error must stay at working precision
  arma::vec probe(design.n_cols(), arma::fill::zeros);
  for (arma::uword i = 0; i < probe.n_elem; ++i) {
    probe(i) = std::cos(1.0 + 0.7 * static_cast<double>(i));
  }
  const arma::vec direct = design.data() * probe;
  const arma::vec via_svd = U_ * (s_ % (V_.t() * probe));
  const double denom = std::max(arma::norm(direct, 2), 1e-30);
  if (arma::norm(direct - via_svd, 2) / denom > 1e-8) {
    throw SingularSystemError("svd reconstruction error above 1e-8");
  }
}

arma::uword FactorCache::rank() const {
  if (s_.n_elem == 0) return 0;
  const double tol = static_cast<double>(std::max(U_.n_rows, V_.n_rows)) * s_.max() *
                     std::numeric_limits<double>::epsilon();
  return arma::accu(s_ > tol);
}

arma::vec FactorCache::shifted_solve(const arma::vec& rhs, double shift) const {
  if (!(shift > 0.0)) throw SingularSystemError("shifted solve needs a positive shift");
  // (W'W/n + c I)^{-1} = I/c + V [diag(1/(d+c)) - I/c] V'
  const arma::vec vt_rhs = V_.t() * rhs;
  const arma::vec gain = 1.0 / (d_ + shift) - 1.0 / shift;
  return rhs / shift + V_ * (gain % vt_rhs);
}

arma::vec FactorCache::pinv_solve(const arma::vec& y) const {
  const double tol = static_cast<double>(std::max(U_.n_rows, V_.n_rows)) *
                     (s_.n_elem ? s_.max() : 0.0) * std::numeric_limits<double>::epsilon();
  arma::vec coefs(s_.n_elem, arma::fill::zeros);
  const arma::vec uty = U_.t() * y;
  for (arma::uword i = 0; i < s_.n_elem; ++i) {
    if (s_(i) > tol) coefs(i) = uty(i) / s_(i);
  }
  return V_ * coefs;
}

double penalty_value(const arma::mat& B, const PenaltySpec& spec) {
  const arma::uword p1 = B.n_rows - 1, p2 = B.n_cols - 1;
  double value = 0.0;
  if (spec.lambda1 > 0.0 && spec.row_kind != PenaltyKind::None) {
    for (arma::uword j = 1; j <= p1; ++j) {
      value += spec.lambda1 * norm_value(spec.row_kind, B.row(j).t());
    }
  }
  if (spec.lambda2 > 0.0 && spec.col_kind != PenaltyKind::None) {
    for (arma::uword k = 1; k <= p2; ++k) {
      value += spec.lambda2 * norm_value(spec.col_kind, B.col(k));
    }
  }
  if (spec.lambda3 > 0.0 && p1 >= 1 && p2 >= 1) {
    value += spec.lambda3 * arma::accu(arma::abs(B.submat(1, 1, p1, p2)));
  }
  return value;
}

double objective_value(const arma::mat& B, const DesignTensor& design, const arma::vec& y,
                       const PenaltySpec& spec) {
  if (y.n_elem != design.n()) throw ShapeMismatchError("response length");
  const arma::vec resid = y - predict(design, B);
  return 0.5 * arma::dot(resid, resid) / static_cast<double>(design.n()) +
         penalty_value(B, spec);
}

namespace admm {

arma::mat update_B(const FactorCache& cache, const DesignTensor& design,
                   const arma::vec& wty_over_n, const AdmmState& st) {
  const double c = 3.0 * st.rho;
  const arma::vec rhs = wty_over_n + design.flatten(st.rho * (st.D + st.E + st.F) -
                                                    (st.Gamma1 + st.Gamma2 + st.Gamma3));
  return design.unflatten(cache.shifted_solve(rhs, c));
}

std::pair<arma::mat, arma::mat> update_DE(const AdmmState& st, const PenaltySpec& spec) {
  const arma::uword p1 = st.B.n_rows - 1, p2 = st.B.n_cols - 1;
  arma::mat D = st.B + st.Gamma1 / st.rho;
  for (arma::uword j = 1; j <= p1; ++j) {
    D.row(j) = prox(spec.row_kind, D.row(j).t(), spec.lambda1 / st.rho).t();
  }
  arma::mat E = st.B + st.Gamma2 / st.rho;
  for (arma::uword k = 1; k <= p2; ++k) {
    E.col(k) = prox(spec.col_kind, E.col(k), spec.lambda2 / st.rho);
  }
  return {std::move(D), std::move(E)};
}

arma::mat update_F(const AdmmState& st, double lambda3) {
  const arma::uword p1 = st.B.n_rows - 1, p2 = st.B.n_cols - 1;
  arma::mat F = st.B + st.Gamma3 / st.rho;
  const double thresh = lambda3 / st.rho;
  for (arma::uword j = 1; j <= p1; ++j) {
    for (arma::uword k = 1; k <= p2; ++k) F(j, k) = soft_threshold(F(j, k), thresh);
  }
  return F;
}

void update_duals(AdmmState& st) {
  st.Gamma1 += st.rho * (st.B - st.D);
  st.Gamma2 += st.rho * (st.B - st.E);
  st.Gamma3 += st.rho * (st.B - st.F);
}

double update_rho(double rho, double r_primal, double s_dual) {
  if (r_primal > 10.0 * s_dual) {
    rho *= 2.0;
  } else if (10.0 * r_primal < s_dual) {
    rho /= 2.0;
  }
  // numerical guard only; unreachable in sane problems
  return std::clamp(rho, 1e-8, 1e8);
}

std::pair<double, double> residuals(const AdmmState& st, const arma::mat& D_prev,
                                    const arma::mat& E_prev, const arma::mat& F_prev) {
  auto sq = [](const arma::mat& M) { return arma::accu(arma::square(M)); };
  const double r = std::sqrt(sq(st.B - st.D) + sq(st.B - st.E) + sq(st.B - st.F));
  const double s =
      st.rho * std::sqrt(sq(st.D - D_prev) + sq(st.E - E_prev) + sq(st.F - F_prev));
  return {r, s};
}

}  // namespace admm

arma::umat extract_support(const AdmmState& st, double tol_support) {
  const arma::uword p1 = st.B.n_rows - 1, p2 = st.B.n_cols - 1;
  arma::umat support(p1 + 1, p2 + 1, arma::fill::zeros);
  support(0, 0) = 1;
  std::vector<bool> row_on(p1 + 1, false), col_on(p2 + 1, false);
  for (arma::uword j = 1; j <= p1; ++j) {
    row_on[j] = arma::any(st.D.row(j) != 0.0);
    support(j, 0) = row_on[j];
  }
  for (arma::uword k = 1; k <= p2; ++k) {
    col_on[k] = arma::any(st.E.col(k) != 0.0);
    support(0, k) = col_on[k];
  }
  for (arma::uword j = 1; j <= p1; ++j) {
    for (arma::uword k = 1; k <= p2; ++k) {
      support(j, k) = row_on[j] && col_on[k] && std::abs(st.F(j, k)) > tol_support;
    }
  }
  return support;
}

namespace {

FitResult direct_least_squares(const DesignTensor& design, const arma::vec& y,
                               const PenaltySpec& spec, const FactorCache& cache) {
  FitResult fit;
  fit.B_hat = design.unflatten(cache.pinv_solve(y));
  fit.support.ones(design.p1() + 1, design.p2() + 1);
  fit.objective = objective_value(fit.B_hat, design, y, spec);
  fit.converged = true;
  fit.direct_lstsq = true;
  fit.min_norm = design.n() < design.n_cols();
  fit.state = AdmmState::zeros(design.p1(), design.p2(), 1.0);
  fit.state.B = fit.state.D = fit.state.E = fit.state.F = fit.B_hat;
  fit.rho_final = fit.state.rho;
  return fit;
}

}  // namespace

FitResult admm_fit(const DesignTensor& design, const arma::vec& y, const PenaltySpec& spec,
                   const AdmmOptions& opts_in, const FactorCache* cache, const AdmmState* warm) {
  spec.validate();
  if (y.n_elem != design.n()) throw ShapeMismatchError("response length != design rows");
  const arma::uword p1 = design.p1(), p2 = design.p2();
  const AdmmOptions opts = opts_in.resolved(p1, p2);

  std::optional<FactorCache> local_cache;
  if (cache == nullptr) {
    local_cache.emplace(design);
    cache = &*local_cache;
  }

  if (spec.lambda1 == 0.0 && spec.lambda2 == 0.0 && spec.lambda3 == 0.0) {
    return direct_least_squares(design, y, spec, *cache);
  }

  AdmmState st;
  if (warm != nullptr && warm->B.n_rows == p1 + 1 && warm->B.n_cols == p2 + 1) {
    st = *warm;
  } else {
    st = AdmmState::zeros(p1, p2, opts.rho0);
  }

  const arma::vec wty_over_n = design.data().t() * y / static_cast<double>(design.n());

  FitResult fit;
  bool converged = false;
  int iterations = 0;
  arma::mat D_prev, E_prev, F_prev;
  for (int it = 1; it <= opts.max_iter; ++it) {
    if (opts.rho_adapt && st.iter > 0) {
      st.rho = admm::update_rho(st.rho, st.r_primal, st.s_dual);
    }
    D_prev = st.D;
    E_prev = st.E;
    F_prev = st.F;
    st.B = admm::update_B(*cache, design, wty_over_n, st);
    auto de = admm::update_DE(st, spec);
    st.D = std::move(de.first);
    st.E = std::move(de.second);
    st.F = admm::update_F(st, spec.lambda3);
    admm::update_duals(st);
    const auto [r, s] = admm::residuals(st, D_prev, E_prev, F_prev);
    st.r_primal = r;
    st.s_dual = s;
    ++st.iter;
    iterations = it;
    if (opts.track_objective && it % 10 == 0) {
      fit.objective_trace.push_back(objective_value(st.B, design, y, spec));
    }
    if (r <= opts.eps_pri && s <= opts.eps_dual) {
      converged = true;
      break;
    }
  }

  fit.support = extract_support(st, opts.tol_support);
  fit.B_hat = st.B % arma::conv_to<arma::mat>::from(fit.support);
  fit.objective = objective_value(fit.B_hat, design, y, spec);
  fit.iterations = iterations;
  fit.converged = converged;
  fit.r_final = st.r_primal;
  fit.s_final = st.s_dual;
  fit.rho_final = st.rho;
  fit.state = std::move(st);
  return fit;
}

std::vector<FitResult> fit_path(const DesignTensor& design, const arma::vec& y,
                                const std::vector<PenaltySpec>& grid, const AdmmOptions& opts,
                                int n_threads) {
  if (grid.empty()) throw ConfigError("empty tuning grid");
  const FactorCache cache(design);

  // group grid points sharing an alpha into one warm-started path; points
  // without an alpha run as a single sequential path in input order
  std::map<double, std::vector<std::size_t>> by_alpha;
  std::vector<std::size_t> loose;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i].alpha.has_value()) {
      by_alpha[*grid[i].alpha].push_back(i);
    } else {
      loose.push_back(i);
    }
  }
  std::vector<std::vector<std::size_t>> groups;
  for (auto& [alpha, idx] : by_alpha) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return grid[a].lambda.value_or(0.0) > grid[b].lambda.value_or(0.0);
    });
    groups.push_back(std::move(idx));
  }
  if (!loose.empty()) groups.push_back(std::move(loose));

  std::vector<FitResult> results(grid.size());
  parallel_for(groups.size(), n_threads, [&](std::size_t g) {
    const AdmmState* warm = nullptr;
    for (const std::size_t i : groups[g]) {
      try {
        results[i] = admm_fit(design, y, grid[i], opts, &cache, warm);
      } catch (const std::exception& e) {
        throw Error("grid point " + std::to_string(i) + ": " + e.what());
      }
      warm = &results[i].state;
    }
  });
  return results;
}

double lambda_max(const DesignTensor& design, const arma::vec& y, PenaltyKind row_kind,
                  PenaltyKind col_kind, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  const double unit = (1.0 - alpha) * std::sqrt(static_cast<double>(design.p1()));
  const arma::uword p1 = design.p1(), p2 = design.p2();
  const double n = static_cast<double>(design.n());
  // loss gradient at the intercept-only solution
  const arma::vec resid = y - arma::mean(y);
  const arma::vec g = design.data().t() * resid / n;
  const arma::mat G = design.unflatten(g);

  double need = 0.0;
  for (arma::uword j = 1; j <= p1; ++j) {
    need = std::max(need, dual_norm(row_kind, G.row(j).t()));
  }
  // row 0 main effects are reachable only through the column penalties,
  // via subgradients supported on the first coordinate
  double need_cols = 0.0;
  for (arma::uword k = 1; k <= p2; ++k) {
    arma::vec first(p1 + 1, arma::fill::zeros);
    first(0) = G(0, k);
    need_cols = std::max(need_cols, dual_norm(col_kind, first));
  }
  return std::max(need, need_cols) / unit;
}

double weak_objective(const WeakDesign& design, const arma::vec& y, const arma::mat& Bx,
                      const arma::mat& Bz, const PenaltySpec& spec) {
  if (y.n_elem != design.wx.n_rows) throw ShapeMismatchError("response length");
  const arma::vec resid = y - predict_weak(design, Bx, Bz);
  double value = 0.5 * arma::dot(resid, resid) / static_cast<double>(y.n_elem);
  for (arma::uword j = 0; j < design.p1; ++j) {
    value += spec.lambda1 * norm_value(spec.row_kind, Bx.row(j).t());
  }
  for (arma::uword k = 0; k < design.p2; ++k) {
    value += spec.lambda2 * norm_value(spec.col_kind, Bz.col(k));
  }
  if (spec.lambda3 > 0.0) {
    value += spec.lambda3 * (arma::accu(arma::abs(Bx.cols(1, design.p2))) +
                             arma::accu(arma::abs(Bz.rows(1, design.p1))));
  }
  return value;
}

}  // namespace pairglm
