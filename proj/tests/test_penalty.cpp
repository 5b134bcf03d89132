#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pairglm/errors.hpp"
#include "pairglm/penalty.hpp"

using namespace pairglm;

namespace {

const PenaltyKind kAllKinds[] = {PenaltyKind::L1, PenaltyKind::GroupL2, PenaltyKind::Linf,
                                 PenaltyKind::HybridL1Linf};

arma::vec random_y(RngStream& rng, arma::uword dim) {
  return oracles::random_vec(rng, dim, 2.0);
}

}  // namespace

TEST_CASE("norm_value: direct values") {
  CHECK(norm_value(PenaltyKind::GroupL2, arma::vec{3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(norm_value(PenaltyKind::HybridL1Linf, arma::vec{2.0, 0.5, 0.7}) == doctest::Approx(2.0));
  CHECK(norm_value(PenaltyKind::Linf, arma::vec{-1.0, 3.0, -7.0}) == doctest::Approx(7.0));
  CHECK(norm_value(PenaltyKind::L1, arma::vec{-1.0, 3.0, -7.0}) == doctest::Approx(11.0));
  CHECK(norm_value(PenaltyKind::None, arma::vec{9.0}) == 0.0);
  CHECK(norm_value(PenaltyKind::HybridL1Linf, arma::vec{-3.0}) == doctest::Approx(3.0));
}

TEST_CASE("norm_value: zero iff zero vector") {
  RngStream rng(1, "norm-zero");
  for (const auto kind : kAllKinds) {
    CHECK(norm_value(kind, arma::vec(4, arma::fill::zeros)) == 0.0);
    for (int t = 0; t < 20; ++t) {
      arma::vec v = random_y(rng, 1 + t % 6);
      if (arma::abs(v).max() > 0.0) CHECK(norm_value(kind, v) > 0.0);
    }
  }
  CHECK_THROWS_AS((void)norm_value(PenaltyKind::L1, arma::vec{}), EmptyVectorError);
}

TEST_CASE("dual_norm: stated pairs") {
  CHECK(dual_norm(PenaltyKind::HybridL1Linf, arma::vec{2.0, 0.5, 0.7}) == doctest::Approx(2.7));
  CHECK(dual_norm(PenaltyKind::GroupL2, arma::vec{3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(dual_norm(PenaltyKind::L1, arma::vec{1.0, -4.0, 2.0}) == doctest::Approx(4.0));
  CHECK(dual_norm(PenaltyKind::Linf, arma::vec{1.0, -4.0, 2.0}) == doctest::Approx(7.0));
}

TEST_CASE("dual_norm agrees with the projected-gradient sup oracle") {
  RngStream rng(2, "dual-sup");
  for (const auto kind : kAllKinds) {
    for (int t = 0; t < 12; ++t) {
      const arma::vec v = random_y(rng, 2 + t % 5);
      const double sup = oracles::sup_oracle(kind, v);
      const double dual = dual_norm(kind, v);
      CHECK(std::abs(sup - dual) <= 1e-3 * std::max(1.0, dual));
    }
  }
}

TEST_CASE("zero_check boundary cases") {
  CHECK(zero_check(PenaltyKind::HybridL1Linf, arma::vec{1.0, 1.0, 1.0}, 2.0));
  CHECK_FALSE(zero_check(PenaltyKind::GroupL2, arma::vec{3.0, 4.0}, 4.9));
  for (const auto kind : kAllKinds) {
    CHECK(zero_check(kind, arma::vec(3, arma::fill::zeros), 0.0));
    CHECK(zero_check(kind, arma::vec(3, arma::fill::zeros), 5.0));
  }
}

TEST_CASE("zero_check iff prox returns the exact zero vector") {
  RngStream rng(3, "zero-prox");
  for (const auto kind : kAllKinds) {
    for (int t = 0; t < 1000; ++t) {
      const arma::uword dim = 1 + static_cast<arma::uword>(rng.uniform_int(0, 7));
      if (kind == PenaltyKind::HybridL1Linf && dim < 2) continue;
      const arma::vec y = random_y(rng, dim);
      const double dual = dual_norm(kind, y);
      const double lam = dual * (0.5 + rng.uniform());
      const arma::vec beta = prox(kind, y, lam);
      const bool exactly_zero = arma::all(beta == 0.0);
      CHECK(zero_check(kind, y, lam) == exactly_zero);
    }
  }
}

TEST_CASE("prox_soft_threshold basics") {
  CHECK(prox_soft_threshold(arma::vec{3.0}, 1.0)(0) == doctest::Approx(2.0));
  CHECK(prox_soft_threshold(arma::vec{-0.5}, 1.0)(0) == 0.0);
  RngStream rng(4, "soft");
  for (int t = 0; t < 50; ++t) {
    const arma::vec y = random_y(rng, 5);
    const double lam = rng.uniform() * 2.0;
    const arma::vec beta = prox_soft_threshold(y, lam);
    const double ours = oracles::prox_objective(y, beta, lam, PenaltyKind::L1);
    CHECK(ours <= oracles::candidate_objective_min(y, lam, PenaltyKind::L1, 20000) + 1e-6);
  }
}

TEST_CASE("prox_group_l2 closed form") {
  const arma::vec at_boundary = prox_group_l2(arma::vec{3.0, 4.0}, 5.0);
  CHECK(arma::all(at_boundary == 0.0));
  const arma::vec shrunk = prox_group_l2(arma::vec{3.0, 4.0}, 2.5);
  CHECK(shrunk(0) == doctest::Approx(1.5));
  CHECK(shrunk(1) == doctest::Approx(2.0));
  RngStream rng(5, "group");
  for (int t = 0; t < 50; ++t) {
    const arma::vec y = random_y(rng, 6);
    const double lam = rng.uniform() * 3.0;
    const arma::vec beta = prox_group_l2(y, lam);
    const double ours = oracles::prox_objective(y, beta, lam, PenaltyKind::GroupL2);
    CHECK(ours <=
          oracles::candidate_objective_min(y, lam, PenaltyKind::GroupL2, 20000) + 1e-6);
  }
}

TEST_CASE("project_l1_ball: stated examples") {
  const arma::vec a = project_l1_ball(arma::vec{2.0, 1.0}, 0.5);
  CHECK(a(0) == doctest::Approx(0.5));
  CHECK(a(1) == doctest::Approx(0.0));

  const arma::vec inside = project_l1_ball(arma::vec{0.2, -0.1}, 1.0);
  CHECK(inside(0) == 0.2);
  CHECK(inside(1) == -0.1);

  const arma::vec tie = project_l1_ball(arma::vec{1.0, 1.0}, 1.0);
  CHECK(tie(0) == doctest::Approx(0.5));
  CHECK(tie(1) == doctest::Approx(0.5));
}

TEST_CASE("project_l1_ball agrees with bisection on random inputs") {
  RngStream rng(6, "l1proj");
  for (int t = 0; t < 200; ++t) {
    const arma::vec y = random_y(rng, 1 + t % 8);
    const double radius = rng.uniform() * 3.0;
    const arma::vec sorted = project_l1_ball(y, radius);
    const arma::vec bisect = oracles::project_l1_bisect(y, radius);
    CHECK(arma::abs(sorted - bisect).max() < 1e-8);
    CHECK(arma::accu(arma::abs(sorted)) <= radius * (1.0 + 1e-12) + 1e-12);
  }
}

TEST_CASE("prox_linf via Moreau decomposition") {
  const arma::vec a = prox_linf(arma::vec{2.0, 1.0}, 0.5);
  CHECK(a(0) == doctest::Approx(1.5));
  CHECK(a(1) == doctest::Approx(1.0));

  // inside the dual ball: exact zero
  const arma::vec zero = prox_linf(arma::vec{0.3, -0.4}, 1.0);
  CHECK(arma::all(zero == 0.0));

  // symmetric input shrinks equally
  const arma::vec equal = prox_linf(arma::vec{2.0, 2.0, 2.0}, 0.9);
  CHECK(equal(0) == doctest::Approx(equal(1)));
  CHECK(equal(1) == doctest::Approx(equal(2)));

  RngStream rng(7, "linf");
  for (int t = 0; t < 50; ++t) {
    const arma::vec y = random_y(rng, 5);
    const double lam = rng.uniform() * 2.0;
    const arma::vec beta = prox_linf(y, lam);
    const double ours = oracles::prox_objective(y, beta, lam, PenaltyKind::Linf);
    CHECK(ours <= oracles::candidate_objective_min(y, lam, PenaltyKind::Linf, 20000) + 1e-6);
  }
}

TEST_CASE("prox_hybrid: worked example") {
  const arma::vec y{3.0, 2.0, 1.0};
  CHECK(hybrid_threshold_split(y, 2.0) == doctest::Approx(4.0 / 3.0));
  const arma::vec beta = prox_hybrid(y, 2.0);
  CHECK(beta(0) == doctest::Approx(5.0 / 3.0));
  CHECK(beta(1) == doctest::Approx(4.0 / 3.0));
  CHECK(beta(2) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("prox_hybrid: zero at the dual boundary, identity at lam = 0") {
  const arma::vec zero = prox_hybrid(arma::vec{1.0, 0.5, 0.5}, 1.5);
  CHECK(arma::all(zero == 0.0));
  const arma::vec y{1.3, -0.2, 0.9};
  const arma::vec same = prox_hybrid(y, 0.0);
  CHECK(arma::abs(same - y).max() == 0.0);
}

TEST_CASE("prox_hybrid: single entry degenerates to soft-thresholding") {
  CHECK(prox_hybrid(arma::vec{3.0}, 1.0)(0) == doctest::Approx(2.0));
  CHECK(prox_hybrid(arma::vec{-0.5}, 1.0)(0) == 0.0);
}

TEST_CASE("prox_hybrid matches the dense split-grid oracle") {
  RngStream rng(8, "hybrid-grid");
  for (int t = 0; t < 40; ++t) {
    const arma::uword dim = 2 + t % 5;
    const arma::vec y = random_y(rng, dim);
    const double lam = rng.uniform() * dual_norm(PenaltyKind::HybridL1Linf, y);
    if (lam <= 0.0) continue;
    const arma::vec ours = prox_hybrid(y, lam);
    const arma::vec grid = oracles::hybrid_grid_oracle(y, lam, 20000);
    CHECK(arma::abs(ours - grid).max() < 1e-3);
    CHECK(oracles::prox_objective(y, ours, lam, PenaltyKind::HybridL1Linf) <=
          oracles::prox_objective(y, grid, lam, PenaltyKind::HybridL1Linf) + 1e-8);
  }
}

TEST_CASE("prox_hybrid tie structure when both blocks are shrunk") {
  RngStream rng(9, "hybrid-tie");
  int observed = 0;
  for (int t = 0; t < 400; ++t) {
    const arma::uword dim = 2 + t % 5;
    const arma::vec y = random_y(rng, dim);
    const double dual = dual_norm(PenaltyKind::HybridL1Linf, y);
    const double lam = rng.uniform() * dual;
    if (lam <= 0.0) continue;
    const double split = hybrid_threshold_split(y, lam);
    if (split <= 0.0 || split >= lam) continue;
    if (std::abs(y(0)) <= split) continue;  // head not shrunk
    const arma::vec beta = prox_hybrid(y, lam);
    double rest = 0.0;
    for (arma::uword i = 1; i < dim; ++i) rest += std::abs(beta(i));
    CHECK(std::abs(std::abs(beta(0)) - rest) < 1e-8);
    ++observed;
  }
  CHECK(observed > 50);  // the regime actually occurred
}

TEST_CASE("prox objective optimality against random perturbations") {
  RngStream rng(10, "prox-perturb");
  for (const auto kind : kAllKinds) {
    for (int t = 0; t < 25; ++t) {
      const arma::uword dim = kind == PenaltyKind::HybridL1Linf ? 2 + t % 4 : 1 + t % 5;
      const arma::vec y = random_y(rng, dim);
      const double lam = rng.uniform() * 2.0;
      const arma::vec beta = prox(kind, y, lam);
      const double ours = oracles::prox_objective(y, beta, lam, kind);
      const int n_perturb = t == 0 ? 10000 : 400;
      double best_other = std::numeric_limits<double>::infinity();
      for (int s = 0; s < n_perturb; ++s) {
        const arma::vec other = beta + oracles::random_vec(rng, dim, 0.3 * rng.uniform());
        best_other = std::min(best_other, oracles::prox_objective(y, other, lam, kind));
      }
      CHECK(ours <= best_other + 1e-8);
      CHECK(ours <= oracles::prox_objective(y, arma::vec(dim, arma::fill::zeros), lam, kind) + 1e-8);
      CHECK(ours <= oracles::prox_objective(y, y, lam, kind) + 1e-8);
    }
  }
}

TEST_CASE("prox is non-expansive") {
  RngStream rng(11, "nonexpansive");
  for (const auto kind : kAllKinds) {
    for (int t = 0; t < 200; ++t) {
      const arma::uword dim = 2 + t % 5;
      const arma::vec a = random_y(rng, dim);
      const arma::vec b = random_y(rng, dim);
      const double lam = rng.uniform() * 2.0;
      const double lhs = arma::norm(prox(kind, a, lam) - prox(kind, b, lam), 2);
      const double rhs = arma::norm(a - b, 2);
      CHECK(lhs <= rhs * (1.0 + 1e-12) + 1e-12);
    }
  }
}

TEST_CASE("penalized norm is non-increasing in lam") {
  RngStream rng(12, "monotone");
  for (const auto kind : kAllKinds) {
    for (int t = 0; t < 20; ++t) {
      const arma::vec y = random_y(rng, 2 + t % 4);
      double previous = std::numeric_limits<double>::infinity();
      for (int g = 0; g <= 20; ++g) {
        const double lam = 0.2 * g;
        const double value = norm_value(kind, prox(kind, y, lam));
        CHECK(value <= previous + 1e-12);
        previous = value;
      }
    }
  }
}

TEST_CASE("PenaltySpec reparametrization") {
  const PenaltySpec spec =
      PenaltySpec::from_alpha_lambda(PenaltyKind::GroupL2, PenaltyKind::GroupL2, 0.25, 2.0, 16);
  CHECK(spec.lambda1 == doctest::Approx(0.75 * 2.0 * 4.0));
  CHECK(spec.lambda2 == doctest::Approx(spec.lambda1));
  CHECK(spec.lambda3 == doctest::Approx(0.5));
  CHECK_THROWS_AS((void)PenaltySpec::from_alpha_lambda(PenaltyKind::GroupL2,
                                                       PenaltyKind::GroupL2, 1.5, 1.0, 4),
                  ConfigError);
}

TEST_CASE("penalty kind names round-trip") {
  for (const char* name : {"none", "l1", "l2", "linf", "hybrid"}) {
    CHECK(to_string(penalty_kind_from_string(name)) == name);
  }
  CHECK_THROWS_AS((void)penalty_kind_from_string("l3"), ConfigError);
}
