#include "desparse/baselines.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace desparse {

RidgeKernel ridge_kernel(const DesignMatrix& X, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("ridge lambda must be positive");
  const Matrix& A = X.data();
  Matrix gram = A * A.transpose();
  gram.diagonal().array() += lambda;
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("X X^T + lambda I is not positive definite");
  // K^T = (X X^T + lambda I)^{-1} X
  RidgeKernel out;
  out.K = llt.solve(A).transpose();
  out.lambda = lambda;
  return out;
}

double default_baseline_lambda(const DesignMatrix& X, double snr) {
  if (!(snr > 0.0)) throw InvalidArgument("snr must be positive");
  return X.data().squaredNorm() / static_cast<double>(X.n()) / (snr * snr);
}

namespace {

Matrix normalize_rows(Matrix estimate, const Vector& scale) {
  for (Index j = 0; j < estimate.rows(); ++j) estimate.row(j) /= scale(j);
  return estimate;
}

void check(const DesignMatrix& X, const MultiResponse& Y, double sigma2) {
  if (X.n() != Y.n()) throw InvalidArgument("design and response row counts differ");
  if (!(sigma2 > 0.0)) throw InvalidArgument("sigma2 must be positive");
}

}  // namespace

Matrix dspm(const DesignMatrix& X, const MultiResponse& Y, double lambda, double sigma2) {
  check(X, Y, sigma2);
  const RidgeKernel kernel = ridge_kernel(X, lambda);
  const Vector scale = (sigma2 * kernel.K.rowwise().squaredNorm()).cwiseSqrt();
  return normalize_rows(kernel.K * Y.data(), scale);
}

Matrix sloreta(const DesignMatrix& X, const MultiResponse& Y, double lambda, double sigma2) {
  check(X, Y, sigma2);
  const RidgeKernel kernel = ridge_kernel(X, lambda);
  const Matrix& K = kernel.K;
  const Matrix& A = X.data();
  // [K (sigma2 I + X X^T) K^T]_jj = sigma2 ||K_j||^2 + K_j (X X^T) K_j^T
  const Matrix KG = K * (A * A.transpose());
  const Vector source_term = (KG.array() * K.array()).rowwise().sum();
  const Vector scale = (sigma2 * K.rowwise().squaredNorm() + source_term).cwiseSqrt();
  return normalize_rows(K * Y.data(), scale);
}

}  // namespace desparse
