#pragma once

#include <armadillo>
#include <utility>

namespace pairglm {

// Covariate blocks and response. Fits with a single covariate matrix set
// symmetric = true and X == Z; the interaction model then reports combined
// coefficients via combine_symmetric().
struct Dataset {
  arma::mat X;  // n x p1
  arma::mat Z;  // n x p2
  arma::vec y;  // n
  bool symmetric = false;

  arma::uword n() const { return X.n_rows; }
  arma::uword p1() const { return X.n_cols; }
  arma::uword p2() const { return Z.n_cols; }

  // finiteness, dimension agreement, and X == Z when symmetric
  void validate() const;
};

// Column locations and scales of the fitted covariates. Sufficient to apply
// a fitted model to new data and to report coefficients on the original
// covariate scale.
struct Standardizer {
  arma::vec x_means, x_sds, z_means, z_sds;
  double y_mean = 0.0;

  Dataset apply(const Dataset& data) const;

  // coefficients fitted on the standardized scale -> original scale
  arma::mat to_original_scale(const arma::mat& B) const;
};

// Flattened n x (p1+1)(p2+1) interaction design. Column order is fixed:
// intercept (0,0) first, then X main effects (j,0) for j = 1..p1, then Z
// main effects (0,k) for k = 1..p2, then interactions (j,k) row-major
// (j outer, k inner). col_index() is the bijection.
class DesignTensor {
 public:
  DesignTensor() = default;
  DesignTensor(arma::mat data, arma::uword p1, arma::uword p2);

  const arma::mat& data() const { return data_; }
  arma::uword n() const { return data_.n_rows; }
  arma::uword p1() const { return p1_; }
  arma::uword p2() const { return p2_; }
  arma::uword n_cols() const { return (p1_ + 1) * (p2_ + 1); }

  arma::uword col_index(arma::uword j, arma::uword k) const;
  std::pair<arma::uword, arma::uword> cell_of(arma::uword col) const;

  // vec(B) in the design's column order, and back
  arma::vec flatten(const arma::mat& B) const;
  arma::mat unflatten(const arma::vec& b) const;

 private:
  arma::mat data_;
  arma::uword p1_ = 0, p2_ = 0;
};

// Arrays for the weak-heredity data model: wx holds X mains and their
// interactions, wz holds Z mains and theirs. Column (j,k) of wx lives at
// (j-1)(p2+1)+k, column (j,k) of wz at j*p2+(k-1).
struct WeakDesign {
  arma::mat wx;  // n x p1(p2+1)
  arma::mat wz;  // n x (p1+1)p2
  arma::uword p1 = 0, p2 = 0;
};

// Columns rescaled to mean zero, unit variance (divisor n-1). Throws
// ConstantColumnError for zero-variance columns.
std::pair<Dataset, Standardizer> standardize(const Dataset& data);

// Mean-centering only (covariates and response); used with the
// weak-heredity arrays.
std::pair<Dataset, Standardizer> center(const Dataset& data);

DesignTensor build_design(const Dataset& data);

// W*B, the model's linear predictor
arma::vec predict(const DesignTensor& design, const arma::mat& B);

// Symmetric case: main effect j is B(0,j)+B(j,0), interaction (j,k) is
// B(j,k)+B(k,j) for j != k and B(j,j) on the diagonal.
std::pair<arma::vec, arma::mat> combine_symmetric(const arma::mat& B);

WeakDesign build_weak_design(const Dataset& data);

arma::vec predict_weak(const WeakDesign& design, const arma::mat& Bx, const arma::mat& Bz);

}  // namespace pairglm
