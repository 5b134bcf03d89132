#include "pairglm/logistic.hpp"

#include <cmath>
#include <optional>

#include "pairglm/errors.hpp"

namespace pairglm {

Family family_from_string(std::string_view name) {
  if (name == "gaussian") return Family::Gaussian;
  if (name == "binomial") return Family::Binomial;
  throw ConfigError("unknown family '" + std::string(name) + "'");
}

std::string to_string(Family family) {
  return family == Family::Gaussian ? "gaussian" : "binomial";
}

void check_binary(const arma::vec& y) {
  for (arma::uword i = 0; i < y.n_elem; ++i) {
    if (y(i) != 0.0 && y(i) != 1.0) throw NonBinaryResponseError();
  }
}

double logistic_cdf(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

namespace {

// log(1 + e^eta) without overflow
double log1p_exp(double eta) {
  if (eta > 0.0) return eta + std::log1p(std::exp(-eta));
  return std::log1p(std::exp(eta));
}

double loss_from_eta(const arma::vec& eta, const arma::vec& y) {
  double total = 0.0;
  for (arma::uword i = 0; i < eta.n_elem; ++i) {
    total += log1p_exp(eta(i)) - y(i) * eta(i);
  }
  return total / static_cast<double>(eta.n_elem);
}

}  // namespace

double logistic_loss(const arma::mat& B, const DesignTensor& design, const arma::vec& y) {
  check_binary(y);
  return loss_from_eta(predict(design, B), y);
}

arma::mat logistic_grad(const arma::mat& B, const DesignTensor& design, const arma::vec& y) {
  const arma::vec eta = predict(design, B);
  arma::vec probs(eta.n_elem);
  for (arma::uword i = 0; i < eta.n_elem; ++i) probs(i) = logistic_cdf(eta(i));
  const arma::vec g = design.data().t() * (probs - y) / static_cast<double>(design.n());
  return design.unflatten(g);
}

double logistic_objective_value(const arma::mat& B, const DesignTensor& design,
                                const arma::vec& y, const PenaltySpec& spec) {
  return logistic_loss(B, design, y) + penalty_value(B, spec);
}

FitResult admm_fit_logistic(const DesignTensor& design, const arma::vec& y,
                            const PenaltySpec& spec, const AdmmOptions& opts_in,
                            const FactorCache* cache, const AdmmState* warm) {
  spec.validate();
  check_binary(y);
  if (y.n_elem != design.n()) throw ShapeMismatchError("response length != design rows");
  const arma::uword p1 = design.p1(), p2 = design.p2();
  const double n = static_cast<double>(design.n());
  const AdmmOptions opts = opts_in.resolved(p1, p2);

  std::optional<FactorCache> local_cache;
  if (cache == nullptr) {
    local_cache.emplace(design);
    cache = &*local_cache;
  }

  AdmmState st;
  if (warm != nullptr && warm->B.n_rows == p1 + 1 && warm->B.n_cols == p2 + 1) {
    st = *warm;
  } else {
    st = AdmmState::zeros(p1, p2, opts.rho0);
  }

  const arma::mat& W = design.data();

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

    // B step: minimize (1/n) l(W b) + (3 rho / 2)||m - b||^2 by repeatedly
    // minimizing the quadratic surrogate with Hessian (1/4n) W'W + 3 rho I,
    // which dominates the true curvature. The surrogate solve is exact:
    //   b+ = b - (W'W/(4n) + 3 rho I)^{-1} grad(b).
    const double c = 3.0 * st.rho;
    const arma::vec m3 = design.flatten(st.rho * (st.D + st.E + st.F) -
                                        (st.Gamma1 + st.Gamma2 + st.Gamma3));  // 3 rho m
    arma::vec b = design.flatten(st.B);
    for (int inner = 0; inner < opts.logistic_inner_iters; ++inner) {
      const arma::vec eta = W * b;
      arma::vec probs(eta.n_elem);
      for (arma::uword i = 0; i < eta.n_elem; ++i) probs(i) = logistic_cdf(eta(i));
      const arma::vec grad = W.t() * (probs - y) / n + c * b - m3;
      const arma::vec scaled = grad * 4.0;  // (W'W/(4n) + cI)^{-1} g = 4 (W'W/n + 4cI)^{-1} g
      const arma::vec step = cache->shifted_solve(scaled, 4.0 * c);
      b -= step;
      if (arma::norm(step, 2) <= 1e-10 * std::sqrt(static_cast<double>(b.n_elem))) break;
    }
    st.B = design.unflatten(b);

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
      fit.objective_trace.push_back(logistic_objective_value(st.B, design, y, spec));
    }
    if (r <= opts.eps_pri && s <= opts.eps_dual) {
      converged = true;
      break;
    }
  }

  fit.support = extract_support(st, opts.tol_support);
  fit.B_hat = st.B % arma::conv_to<arma::mat>::from(fit.support);
  fit.objective = logistic_objective_value(fit.B_hat, design, y, spec);
  fit.iterations = iterations;
  fit.converged = converged;
  fit.r_final = st.r_primal;
  fit.s_final = st.s_dual;
  fit.rho_final = st.rho;
  fit.state = std::move(st);
  return fit;
}

}  // namespace pairglm
