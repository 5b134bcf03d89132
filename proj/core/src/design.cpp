#include "pairglm/design.hpp"

#include "pairglm/errors.hpp"

namespace pairglm {

void Dataset::validate() const {
  if (X.n_rows == 0 || X.n_cols == 0 || Z.n_cols == 0) {
    throw ShapeMismatchError("dataset needs n >= 1, p1 >= 1, p2 >= 1");
  }
  if (Z.n_rows != X.n_rows) throw ShapeMismatchError("X and Z row counts differ");
  if (y.n_elem != 0 && y.n_elem != X.n_rows) throw ShapeMismatchError("y length != n");
  if (!X.is_finite() || !Z.is_finite() || !y.is_finite()) {
    throw ShapeMismatchError("dataset contains non-finite entries");
  }
  if (symmetric) {
    if (X.n_cols != Z.n_cols) throw NotSymmetricError();
    if (arma::abs(X - Z).max() != 0.0) throw NotSymmetricError();
  }
}

Dataset Standardizer::apply(const Dataset& data) const {
  Dataset out = data;
  for (arma::uword j = 0; j < out.X.n_cols; ++j) {
    out.X.col(j) = (data.X.col(j) - x_means(j)) / x_sds(j);
  }
  for (arma::uword k = 0; k < out.Z.n_cols; ++k) {
    out.Z.col(k) = (data.Z.col(k) - z_means(k)) / z_sds(k);
  }
  return out;
}

arma::mat Standardizer::to_original_scale(const arma::mat& B) const {
  const arma::uword p1 = B.n_rows - 1;
  const arma::uword p2 = B.n_cols - 1;
  arma::mat out(B.n_rows, B.n_cols, arma::fill::zeros);

  // model on standardized covariates: eta = sum B(j,k) xt_j zt_k with
  // xt_j = (x_j - mx_j)/sx_j; expand and collect by original terms
  for (arma::uword j = 1; j <= p1; ++j) {
    for (arma::uword k = 1; k <= p2; ++k) {
      out(j, k) = B(j, k) / (x_sds(j - 1) * z_sds(k - 1));
    }
  }
  for (arma::uword j = 1; j <= p1; ++j) {
    double v = B(j, 0) / x_sds(j - 1);
    for (arma::uword k = 1; k <= p2; ++k) v -= out(j, k) * z_means(k - 1);
    out(j, 0) = v;
  }
  for (arma::uword k = 1; k <= p2; ++k) {
    double v = B(0, k) / z_sds(k - 1);
    for (arma::uword j = 1; j <= p1; ++j) v -= out(j, k) * x_means(j - 1);
    out(0, k) = v;
  }
  double c = B(0, 0);
  for (arma::uword j = 1; j <= p1; ++j) c -= B(j, 0) * x_means(j - 1) / x_sds(j - 1);
  for (arma::uword k = 1; k <= p2; ++k) c -= B(0, k) * z_means(k - 1) / z_sds(k - 1);
  for (arma::uword j = 1; j <= p1; ++j) {
    for (arma::uword k = 1; k <= p2; ++k) {
      c += out(j, k) * x_means(j - 1) * z_means(k - 1);
    }
  }
  out(0, 0) = c;
  return out;
}

namespace {

// sample sd with divisor n-1; zero flags a constant column
arma::vec column_sds(const arma::mat& M) {
  return arma::stddev(M, 0, 0).t();
}

}  // namespace

std::pair<Dataset, Standardizer> standardize(const Dataset& data) {
  data.validate();
  Standardizer s;
  s.x_means = arma::mean(data.X, 0).t();
  s.z_means = arma::mean(data.Z, 0).t();
  s.x_sds = column_sds(data.X);
  s.z_sds = column_sds(data.Z);
  s.y_mean = 0.0;
  for (arma::uword j = 0; j < s.x_sds.n_elem; ++j) {
    if (!(s.x_sds(j) > 0.0)) throw ConstantColumnError('x', j);
  }
  for (arma::uword k = 0; k < s.z_sds.n_elem; ++k) {
    if (!(s.z_sds(k) > 0.0)) throw ConstantColumnError('z', k);
  }
  return {s.apply(data), s};
}

std::pair<Dataset, Standardizer> center(const Dataset& data) {
  data.validate();
  Standardizer s;
  s.x_means = arma::mean(data.X, 0).t();
  s.z_means = arma::mean(data.Z, 0).t();
  s.x_sds = arma::vec(data.X.n_cols, arma::fill::ones);
  s.z_sds = arma::vec(data.Z.n_cols, arma::fill::ones);
  s.y_mean = data.y.n_elem ? arma::mean(data.y) : 0.0;
  Dataset out = s.apply(data);
  if (out.y.n_elem) out.y -= s.y_mean;
  return {out, s};
}

DesignTensor::DesignTensor(arma::mat data, arma::uword p1, arma::uword p2)
    : data_(std::move(data)), p1_(p1), p2_(p2) {
  if (data_.n_cols != (p1_ + 1) * (p2_ + 1)) {
    throw ShapeMismatchError("design data has wrong column count");
  }
}

arma::uword DesignTensor::col_index(arma::uword j, arma::uword k) const {
  if (j > p1_ || k > p2_) throw ShapeMismatchError("cell index out of range");
  if (j == 0 && k == 0) return 0;
  if (k == 0) return j;                 // X mains
  if (j == 0) return p1_ + k;           // Z mains
  return p1_ + p2_ + (j - 1) * p2_ + k; // interactions, row-major
}

std::pair<arma::uword, arma::uword> DesignTensor::cell_of(arma::uword col) const {
  if (col == 0) return {0, 0};
  if (col <= p1_) return {col, 0};
  if (col <= p1_ + p2_) return {0, col - p1_};
  const arma::uword t = col - p1_ - p2_ - 1;
  return {t / p2_ + 1, t % p2_ + 1};
}

arma::vec DesignTensor::flatten(const arma::mat& B) const {
  if (B.n_rows != p1_ + 1 || B.n_cols != p2_ + 1) {
    throw ShapeMismatchError("coefficient matrix does not match design");
  }
  arma::vec b(n_cols());
  for (arma::uword j = 0; j <= p1_; ++j) {
    for (arma::uword k = 0; k <= p2_; ++k) b(col_index(j, k)) = B(j, k);
  }
  return b;
}

arma::mat DesignTensor::unflatten(const arma::vec& b) const {
  if (b.n_elem != n_cols()) throw ShapeMismatchError("flattened vector length");
  arma::mat B(p1_ + 1, p2_ + 1);
  for (arma::uword j = 0; j <= p1_; ++j) {
    for (arma::uword k = 0; k <= p2_; ++k) B(j, k) = b(col_index(j, k));
  }
  return B;
}

DesignTensor build_design(const Dataset& data) {
  data.validate();
  const arma::uword n = data.n(), p1 = data.p1(), p2 = data.p2();
  arma::mat W(n, (p1 + 1) * (p2 + 1));
  W.col(0).ones();
  for (arma::uword j = 1; j <= p1; ++j) W.col(j) = data.X.col(j - 1);
  for (arma::uword k = 1; k <= p2; ++k) W.col(p1 + k) = data.Z.col(k - 1);
  arma::uword c = p1 + p2 + 1;
  for (arma::uword j = 1; j <= p1; ++j) {
    for (arma::uword k = 1; k <= p2; ++k) {
      W.col(c++) = data.X.col(j - 1) % data.Z.col(k - 1);
    }
  }
  return DesignTensor(std::move(W), p1, p2);
}

arma::vec predict(const DesignTensor& design, const arma::mat& B) {
  return design.data() * design.flatten(B);
}

std::pair<arma::vec, arma::mat> combine_symmetric(const arma::mat& B) {
  if (B.n_rows != B.n_cols) throw NotSymmetricError();
  const arma::uword p = B.n_rows - 1;
  arma::vec main(p);
  arma::mat inter(p, p);
  for (arma::uword j = 1; j <= p; ++j) {
    main(j - 1) = B(0, j) + B(j, 0);
    for (arma::uword k = 1; k <= p; ++k) {
      inter(j - 1, k - 1) = (j == k) ? B(j, j) : B(j, k) + B(k, j);
    }
  }
  return {main, inter};
}

WeakDesign build_weak_design(const Dataset& data) {
  data.validate();
  const arma::uword n = data.n(), p1 = data.p1(), p2 = data.p2();
  WeakDesign out;
  out.p1 = p1;
  out.p2 = p2;
  out.wx.set_size(n, p1 * (p2 + 1));
  out.wz.set_size(n, (p1 + 1) * p2);
  for (arma::uword j = 1; j <= p1; ++j) {
    out.wx.col((j - 1) * (p2 + 1)) = data.X.col(j - 1);
    for (arma::uword k = 1; k <= p2; ++k) {
      out.wx.col((j - 1) * (p2 + 1) + k) = data.X.col(j - 1) % data.Z.col(k - 1);
    }
  }
  for (arma::uword k = 1; k <= p2; ++k) {
    out.wz.col(k - 1) = data.Z.col(k - 1);
    for (arma::uword j = 1; j <= p1; ++j) {
      out.wz.col(j * p2 + (k - 1)) = data.X.col(j - 1) % data.Z.col(k - 1);
    }
  }
  return out;
}

arma::vec predict_weak(const WeakDesign& design, const arma::mat& Bx, const arma::mat& Bz) {
  if (Bx.n_rows != design.p1 || Bx.n_cols != design.p2 + 1 || Bz.n_rows != design.p1 + 1 ||
      Bz.n_cols != design.p2) {
    throw ShapeMismatchError("weak-heredity coefficient shapes");
  }
  arma::vec bx(design.wx.n_cols), bz(design.wz.n_cols);
  for (arma::uword j = 1; j <= design.p1; ++j) {
    for (arma::uword k = 0; k <= design.p2; ++k) bx((j - 1) * (design.p2 + 1) + k) = Bx(j - 1, k);
  }
  for (arma::uword j = 0; j <= design.p1; ++j) {
    for (arma::uword k = 1; k <= design.p2; ++k) bz(j * design.p2 + (k - 1)) = Bz(j, k - 1);
  }
  return design.wx * bx + design.wz * bz;
}

}  // namespace pairglm
