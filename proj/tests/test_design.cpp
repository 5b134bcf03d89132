#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "pairglm/design.hpp"
#include "pairglm/errors.hpp"

using namespace pairglm;

namespace {

Dataset random_dataset(std::uint64_t seed, arma::uword n, arma::uword p1, arma::uword p2) {
  RngStream rng(seed, "design-test");
  Dataset data;
  data.X = oracles::random_mat(rng, n, p1);
  data.Z = oracles::random_mat(rng, n, p2);
  data.y = oracles::random_vec(rng, n);
  return data;
}

}  // namespace

TEST_CASE("standardize: three-point column") {
  Dataset data;
  data.X = arma::vec{1.0, 2.0, 3.0};
  data.Z = data.X;
  data.y = arma::vec{0.0, 0.0, 0.0};
  auto [out, scaler] = standardize(data);
  CHECK(out.X(0, 0) == doctest::Approx(-1.0));
  CHECK(out.X(1, 0) == doctest::Approx(0.0));
  CHECK(out.X(2, 0) == doctest::Approx(1.0));
  CHECK(scaler.x_means(0) == doctest::Approx(2.0));
  CHECK(scaler.x_sds(0) == doctest::Approx(1.0));
}

TEST_CASE("standardize: idempotent on standardized input") {
  Dataset data = random_dataset(3, 40, 4, 3);
  auto [once, s1] = standardize(data);
  auto [twice, s2] = standardize(once);
  CHECK(arma::abs(once.X - twice.X).max() < 1e-12);
  CHECK(arma::abs(once.Z - twice.Z).max() < 1e-12);
}

TEST_CASE("standardize: constant column rejected") {
  Dataset data;
  data.X = arma::join_rows(arma::vec{5.0, 5.0, 5.0}, arma::vec{1.0, 2.0, 4.0});
  data.Z = arma::vec{1.0, 2.0, 3.0};
  data.y = arma::vec{0.0, 0.0, 0.0};
  CHECK_THROWS_AS((void)standardize(data), ConstantColumnError);
  try {
    (void)standardize(data);
  } catch (const ConstantColumnError& e) {
    CHECK(e.block == 'x');
    CHECK(e.column == 0);
  }
}

TEST_CASE("build_design: single observation") {
  Dataset data;
  data.X = arma::vec{2.0};
  data.Z = arma::vec{3.0};
  data.y = arma::vec{0.0};
  const DesignTensor design = build_design(data);
  REQUIRE(design.n_cols() == 4);
  CHECK(design.data()(0, design.col_index(0, 0)) == 1.0);
  CHECK(design.data()(0, design.col_index(1, 0)) == 2.0);
  CHECK(design.data()(0, design.col_index(0, 1)) == 3.0);
  CHECK(design.data()(0, design.col_index(1, 1)) == 6.0);
}

TEST_CASE("build_design: zero Z block zeroes its columns") {
  Dataset data;
  data.X = arma::join_rows(arma::vec{1.0, 3.0}, arma::vec{2.0, 4.0});
  data.Z = arma::vec{0.0, 0.0};
  data.y = arma::vec{0.0, 0.0};
  const DesignTensor design = build_design(data);
  CHECK(arma::abs(design.data().col(design.col_index(0, 1))).max() == 0.0);
  CHECK(arma::abs(design.data().col(design.col_index(1, 1))).max() == 0.0);
  CHECK(arma::abs(design.data().col(design.col_index(2, 1))).max() == 0.0);
}

TEST_CASE("build_design: every column matches the case definition") {
  Dataset data = random_dataset(11, 5, 3, 2);
  const DesignTensor design = build_design(data);
  for (arma::uword i = 0; i < 5; ++i) {
    for (arma::uword j = 0; j <= 3; ++j) {
      for (arma::uword k = 0; k <= 2; ++k) {
        double expected = 1.0;
        if (j > 0 && k > 0) {
          expected = data.X(i, j - 1) * data.Z(i, k - 1);
        } else if (j > 0) {
          expected = data.X(i, j - 1);
        } else if (k > 0) {
          expected = data.Z(i, k - 1);
        }
        CHECK(design.data()(i, design.col_index(j, k)) == doctest::Approx(expected));
      }
    }
  }
}

TEST_CASE("col_index and cell_of are inverse bijections") {
  Dataset data = random_dataset(17, 4, 5, 3);
  const DesignTensor design = build_design(data);
  std::vector<bool> seen(design.n_cols(), false);
  for (arma::uword j = 0; j <= 5; ++j) {
    for (arma::uword k = 0; k <= 3; ++k) {
      const arma::uword c = design.col_index(j, k);
      REQUIRE(c < design.n_cols());
      CHECK(!seen[c]);
      seen[c] = true;
      const auto [jj, kk] = design.cell_of(c);
      CHECK(jj == j);
      CHECK(kk == k);
    }
  }
}

TEST_CASE("predict: zero and intercept-only coefficients") {
  Dataset data = random_dataset(19, 6, 2, 2);
  const DesignTensor design = build_design(data);
  arma::mat B(3, 3, arma::fill::zeros);
  CHECK(arma::abs(predict(design, B)).max() == 0.0);
  B(0, 0) = 2.5;
  const arma::vec eta = predict(design, B);
  for (arma::uword i = 0; i < 6; ++i) CHECK(eta(i) == doctest::Approx(2.5));
}

TEST_CASE("predict matches the triple-sum evaluation") {
  RngStream rng(23, "predict");
  Dataset data = random_dataset(23, 4, 2, 2);
  const DesignTensor design = build_design(data);
  const arma::mat B = oracles::random_mat(rng, 3, 3);
  const arma::vec via_design = predict(design, B);
  const arma::vec direct = oracles::model_eval_termwise(data, B);
  CHECK(arma::abs(via_design - direct).max() < 1e-12);
}

TEST_CASE("round trip: model evaluation on random instances") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RngStream rng(seed, "roundtrip");
    const arma::uword n = 1 + seed, p1 = 2 + seed % 3, p2 = 1 + seed % 4;
    Dataset data = random_dataset(seed * 100, n, p1, p2);
    const arma::mat B = oracles::random_mat(rng, p1 + 1, p2 + 1);
    const DesignTensor design = build_design(data);
    CHECK(arma::abs(predict(design, B) - oracles::model_eval_termwise(data, B)).max() < 1e-10);
  }
}

TEST_CASE("standardized design has unit-variance main-effect columns") {
  Dataset data = random_dataset(29, 50, 4, 3);
  auto [std_data, scaler] = standardize(data);
  const DesignTensor design = build_design(std_data);
  for (arma::uword j = 1; j <= 4; ++j) {
    const arma::vec col = design.data().col(design.col_index(j, 0));
    CHECK(std::abs(arma::mean(col)) < 1e-12);
    CHECK(arma::var(col) == doctest::Approx(1.0));
  }
  for (arma::uword k = 1; k <= 3; ++k) {
    const arma::vec col = design.data().col(design.col_index(0, k));
    CHECK(std::abs(arma::mean(col)) < 1e-12);
    CHECK(arma::var(col) == doctest::Approx(1.0));
  }
}

TEST_CASE("to_original_scale reproduces predictions on raw covariates") {
  Dataset data = random_dataset(31, 20, 3, 2);
  data.X.col(0) *= 7.0;
  data.X.col(0) += 3.0;  // give the scales something to do
  auto [std_data, scaler] = standardize(data);
  RngStream rng(31, "backscale");
  const arma::mat B = oracles::random_mat(rng, 4, 3);
  const arma::vec on_std = predict(build_design(std_data), B);
  const arma::vec on_raw = predict(build_design(data), scaler.to_original_scale(B));
  CHECK(arma::abs(on_std - on_raw).max() < 1e-10);
}

TEST_CASE("combine_symmetric: symmetric input doubles off-diagonals") {
  RngStream rng(37, "combine");
  arma::mat B = oracles::random_mat(rng, 4, 4);
  B = 0.5 * (B + B.t());
  const auto [main, inter] = combine_symmetric(B);
  for (arma::uword j = 1; j <= 3; ++j) {
    CHECK(main(j - 1) == doctest::Approx(2.0 * B(0, j)));
    for (arma::uword k = 1; k <= 3; ++k) {
      const double expected = j == k ? B(j, j) : 2.0 * B(j, k);
      CHECK(inter(j - 1, k - 1) == doctest::Approx(expected));
    }
  }
}

TEST_CASE("combine_symmetric: output is exactly symmetric") {
  RngStream rng(41, "combine-sym");
  const arma::mat B = oracles::random_mat(rng, 5, 5);
  const auto [main, inter] = combine_symmetric(B);
  CHECK(arma::abs(inter - inter.t()).max() == 0.0);
  for (arma::uword j = 1; j <= 4; ++j) {
    CHECK(main(j - 1) == doctest::Approx(B(0, j) + B(j, 0)));
  }
}

TEST_CASE("combine_symmetric rejects rectangular input") {
  arma::mat B(3, 4, arma::fill::zeros);
  CHECK_THROWS_AS((void)combine_symmetric(B), NotSymmetricError);
}

TEST_CASE("build_weak_design: single observation") {
  Dataset data;
  data.X = arma::vec{2.0};
  data.Z = arma::vec{3.0};
  data.y = arma::vec{0.0};
  const WeakDesign weak = build_weak_design(data);
  REQUIRE(weak.wx.n_cols == 2);
  REQUIRE(weak.wz.n_cols == 2);
  CHECK(weak.wx(0, 0) == 2.0);
  CHECK(weak.wx(0, 1) == 6.0);
  CHECK(weak.wz(0, 0) == 3.0);
  CHECK(weak.wz(0, 1) == 6.0);
}

TEST_CASE("build_weak_design: zero Z column zeroes wx interactions") {
  Dataset data;
  data.X = arma::join_rows(arma::vec{1.0, 3.0}, arma::vec{2.0, 4.0});
  data.Z = arma::vec{0.0, 0.0};
  data.y = arma::vec{0.0, 0.0};
  const WeakDesign weak = build_weak_design(data);
  CHECK(arma::abs(weak.wx.col(1)).max() == 0.0);  // (j=1, k=1)
  CHECK(arma::abs(weak.wx.col(3)).max() == 0.0);  // (j=2, k=1)
}

TEST_CASE("build_weak_design matches the case definition entrywise") {
  Dataset data = random_dataset(43, 4, 2, 2);
  const WeakDesign weak = build_weak_design(data);
  for (arma::uword i = 0; i < 4; ++i) {
    for (arma::uword j = 1; j <= 2; ++j) {
      CHECK(weak.wx(i, (j - 1) * 3) == doctest::Approx(data.X(i, j - 1)));
      for (arma::uword k = 1; k <= 2; ++k) {
        CHECK(weak.wx(i, (j - 1) * 3 + k) ==
              doctest::Approx(data.X(i, j - 1) * data.Z(i, k - 1)));
      }
    }
    for (arma::uword k = 1; k <= 2; ++k) {
      CHECK(weak.wz(i, k - 1) == doctest::Approx(data.Z(i, k - 1)));
      for (arma::uword j = 1; j <= 2; ++j) {
        CHECK(weak.wz(i, j * 2 + (k - 1)) ==
              doctest::Approx(data.X(i, j - 1) * data.Z(i, k - 1)));
      }
    }
  }
}

TEST_CASE("center subtracts means only") {
  Dataset data = random_dataset(47, 30, 3, 2);
  data.y += 5.0;
  auto [centered, scaler] = center(data);
  CHECK(std::abs(arma::mean(centered.y)) < 1e-12);
  for (arma::uword j = 0; j < 3; ++j) {
    CHECK(std::abs(arma::mean(centered.X.col(j))) < 1e-12);
    CHECK(scaler.x_sds(j) == 1.0);
  }
  CHECK(scaler.y_mean == doctest::Approx(arma::mean(data.y)));
}
