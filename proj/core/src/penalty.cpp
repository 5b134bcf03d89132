#include "pairglm/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pairglm/errors.hpp"

namespace pairglm {

PenaltyKind penalty_kind_from_string(std::string_view name) {
  if (name == "none") return PenaltyKind::None;
  if (name == "l1") return PenaltyKind::L1;
  if (name == "l2") return PenaltyKind::GroupL2;
  if (name == "linf") return PenaltyKind::Linf;
  if (name == "hybrid") return PenaltyKind::HybridL1Linf;
  throw ConfigError("unknown penalty kind '" + std::string(name) + "'");
}

std::string to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::None: return "none";
    case PenaltyKind::L1: return "l1";
    case PenaltyKind::GroupL2: return "l2";
    case PenaltyKind::Linf: return "linf";
    case PenaltyKind::HybridL1Linf: return "hybrid";
  }
  return "unknown";
}

PenaltySpec PenaltySpec::from_alpha_lambda(PenaltyKind row_kind, PenaltyKind col_kind,
                                           double alpha, double lambda, arma::uword p) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (lambda < 0.0) throw ConfigError("lambda must be non-negative");
  PenaltySpec spec;
  spec.row_kind = row_kind;
  spec.col_kind = col_kind;
  spec.lambda1 = (1.0 - alpha) * lambda * std::sqrt(static_cast<double>(p));
  spec.lambda2 = spec.lambda1;
  spec.lambda3 = alpha * lambda;
  spec.alpha = alpha;
  spec.lambda = lambda;
  return spec;
}

void PenaltySpec::validate() const {
  if (lambda1 < 0.0 || lambda2 < 0.0 || lambda3 < 0.0) {
    throw ConfigError("penalty parameters must be non-negative");
  }
}

double norm_value(PenaltyKind kind, const arma::vec& v) {
  if (v.n_elem == 0) throw EmptyVectorError();
  switch (kind) {
    case PenaltyKind::None:
      return 0.0;
    case PenaltyKind::L1:
      return arma::accu(arma::abs(v));
    case PenaltyKind::GroupL2:
      return arma::norm(v, 2);
    case PenaltyKind::Linf:
      return arma::abs(v).max();
    case PenaltyKind::HybridL1Linf: {
      const double rest = v.n_elem > 1 ? arma::accu(arma::abs(v.subvec(1, v.n_elem - 1))) : 0.0;
      return std::max(std::abs(v(0)), rest);
    }
  }
  return 0.0;
}

double dual_norm(PenaltyKind kind, const arma::vec& v) {
  if (v.n_elem == 0) throw EmptyVectorError();
  switch (kind) {
    case PenaltyKind::None:
      return arma::any(v != 0.0) ? std::numeric_limits<double>::infinity() : 0.0;
    case PenaltyKind::L1:
      return arma::abs(v).max();
    case PenaltyKind::GroupL2:
      return arma::norm(v, 2);
    case PenaltyKind::Linf:
      return arma::accu(arma::abs(v));
    case PenaltyKind::HybridL1Linf: {
      const double rest = v.n_elem > 1 ? arma::abs(v.subvec(1, v.n_elem - 1)).max() : 0.0;
      return std::abs(v(0)) + rest;
    }
  }
  return 0.0;
}

bool zero_check(PenaltyKind kind, const arma::vec& y, double lam) {
  return dual_norm(kind, y) <= lam;
}

double soft_threshold(double y, double lam) {
  const double mag = std::abs(y) - lam;
  return mag > 0.0 ? (y > 0.0 ? mag : -mag) : 0.0;
}

arma::vec prox_soft_threshold(const arma::vec& y, double lam) {
  arma::vec out(y.n_elem);
  for (arma::uword i = 0; i < y.n_elem; ++i) out(i) = soft_threshold(y(i), lam);
  return out;
}

arma::vec prox_group_l2(const arma::vec& y, double lam) {
  const double norm = arma::norm(y, 2);
  if (norm <= lam) return arma::vec(y.n_elem, arma::fill::zeros);
  return (1.0 - lam / norm) * y;
}

arma::vec project_l1_ball(const arma::vec& y, double radius) {
  if (radius < 0.0) throw ConfigError("l1-ball radius must be non-negative");
  const arma::vec mag = arma::abs(y);
  if (arma::accu(mag) <= radius) return y;
  if (radius == 0.0) return arma::vec(y.n_elem, arma::fill::zeros);
  const arma::vec sorted = arma::sort(mag, "descend");
  double cumsum = 0.0;
  double theta = 0.0;
  for (arma::uword j = 0; j < sorted.n_elem; ++j) {
    cumsum += sorted(j);
    const double candidate = (cumsum - radius) / static_cast<double>(j + 1);
    if (sorted(j) - candidate > 0.0) {
      theta = candidate;
    } else {
      break;
    }
  }
  arma::vec out(y.n_elem);
  for (arma::uword i = 0; i < y.n_elem; ++i) {
    const double m = mag(i) - theta;
    out(i) = m > 0.0 ? (y(i) > 0.0 ? m : -m) : 0.0;
  }
  return out;
}

arma::vec prox_linf(const arma::vec& y, double lam) {
  return y - project_l1_ball(y, lam);
}

double hybrid_threshold_split(const arma::vec& y, double lam) {
  const arma::uword p = y.n_elem;
  if (p < 2) throw EmptyVectorError();
  // z_i = lam - |y_{i+1}|, ascending; the unconstrained minimizer is the
  // smallest of the running averages (|y_1| + sum z_(1..m)) / (m + 1),
  // clamped into [0, lam]
  arma::vec z = lam - arma::abs(y.subvec(1, p - 1));
  z = arma::sort(z, "ascend");
  double best = std::abs(y(0));  // m = 0 term
  double running = std::abs(y(0));
  for (arma::uword m = 1; m < p; ++m) {
    running += z(m - 1);
    const double value = running / static_cast<double>(m + 1);
    if (value < best) best = value;
  }
  return std::clamp(best, 0.0, lam);
}

arma::vec prox_hybrid(const arma::vec& y, double lam) {
  const arma::uword p = y.n_elem;
  if (p == 0) throw EmptyVectorError();
  if (lam == 0.0) return y;
  // a single entry has an empty rest block, so the penalty is plain |b_1|
  if (p == 1) return prox_soft_threshold(y, lam);
  if (dual_norm(PenaltyKind::HybridL1Linf, y) <= lam) {
    return arma::vec(p, arma::fill::zeros);
  }
  const double lam1 = hybrid_threshold_split(y, lam);
  const double lam_rest = lam - lam1;
  arma::vec u(p);
  u(0) = std::abs(y(0)) <= lam1 ? y(0) : (y(0) > 0.0 ? lam1 : -lam1);
  for (arma::uword i = 1; i < p; ++i) {
    u(i) = std::abs(y(i)) <= lam_rest ? y(i) : (y(i) > 0.0 ? lam_rest : -lam_rest);
  }
  return y - u;
}

arma::vec prox(PenaltyKind kind, const arma::vec& y, double lam) {
  if (lam < 0.0) throw ConfigError("prox requires lam >= 0");
  switch (kind) {
    case PenaltyKind::None: return y;
    case PenaltyKind::L1: return prox_soft_threshold(y, lam);
    case PenaltyKind::GroupL2: return prox_group_l2(y, lam);
    case PenaltyKind::Linf: return prox_linf(y, lam);
    case PenaltyKind::HybridL1Linf: return prox_hybrid(y, lam);
  }
  return y;
}

}  // namespace pairglm
