#include "desparse/core.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace desparse {

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw InvalidArgument(std::string(what) + " contains non-finite entries");
}

}  // namespace

DesignMatrix::DesignMatrix(Matrix data, Vector means, Vector scales, bool standardized)
    : data_(std::move(data)),
      means_(std::move(means)),
      scales_(std::move(scales)),
      standardized_(standardized) {}

DesignMatrix DesignMatrix::standardize(const Matrix& raw) {
  if (raw.rows() < 2) throw InvalidArgument("standardize needs at least two rows");
  if (raw.cols() < 1) throw InvalidArgument("standardize needs at least one column");
  require_finite(raw, "design");
  const double n = static_cast<double>(raw.rows());
  Matrix data = raw;
  Vector means(raw.cols());
  Vector scales(raw.cols());
  for (Index j = 0; j < raw.cols(); ++j) {
    means(j) = raw.col(j).mean();
    data.col(j).array() -= means(j);
    const double sd = std::sqrt(data.col(j).squaredNorm() / n);
    const double magnitude = std::max(1.0, raw.col(j).cwiseAbs().maxCoeff());
    if (!(sd > 1e-12 * magnitude)) throw ConstantColumn(j);
    scales(j) = sd;
    data.col(j) /= sd;
  }
  return DesignMatrix(std::move(data), std::move(means), std::move(scales), true);
}

DesignMatrix DesignMatrix::wrap(Matrix data) {
  if (data.rows() < 1 || data.cols() < 1) throw InvalidArgument("empty design matrix");
  require_finite(data, "design");
  const Index p = data.cols();
  return DesignMatrix(std::move(data), Vector::Zero(p), Vector::Ones(p), false);
}

std::optional<DesignMatrix> DesignMatrix::if_standardized(Matrix data, double tol) {
  if (data.rows() < 2 || data.cols() < 1) return std::nullopt;
  require_finite(data, "design");
  const double n = static_cast<double>(data.rows());
  for (Index j = 0; j < data.cols(); ++j) {
    const double mean = data.col(j).mean();
    const double var = (data.col(j).array() - mean).square().sum() / n;
    if (std::abs(mean) > tol || std::abs(var - 1.0) > tol) return std::nullopt;
  }
  const Index p = data.cols();
  return DesignMatrix(std::move(data), Vector::Zero(p), Vector::Ones(p), true);
}

Matrix DesignMatrix::covariance() const {
  Matrix sigma = Matrix::Zero(p(), p());
  sigma.selfadjointView<Eigen::Lower>().rankUpdate(data_.transpose(), 1.0 / static_cast<double>(n()));
  return sigma.selfadjointView<Eigen::Lower>();
}

DesignMatrix DesignMatrix::select_rows(std::span<const Index> rows) const {
  Matrix sub(static_cast<Index>(rows.size()), p());
  for (std::size_t i = 0; i < rows.size(); ++i) sub.row(static_cast<Index>(i)) = data_.row(rows[i]);
  return wrap(std::move(sub));
}

MultiResponse::MultiResponse(Matrix data) : data_(std::move(data)) {
  if (data_.rows() < 1 || data_.cols() < 1) throw InvalidArgument("empty response matrix");
  require_finite(data_, "response");
}

MultiResponse MultiResponse::select_rows(std::span<const Index> rows) const {
  Matrix sub(static_cast<Index>(rows.size()), T());
  for (std::size_t i = 0; i < rows.size(); ++i) sub.row(static_cast<Index>(i)) = data_.row(rows[i]);
  return MultiResponse(std::move(sub));
}

MultiResponse MultiResponse::task(Index t) const { return MultiResponse(data_.col(t)); }

std::vector<Index> CoefMatrix::support() const {
  std::vector<Index> rows;
  for (Index j = 0; j < data_.rows(); ++j) {
    if ((data_.row(j).array() != 0.0).any()) rows.push_back(j);
  }
  return rows;
}

Index CoefMatrix::support_size() const { return static_cast<Index>(support().size()); }

ToeplitzAR1::ToeplitzAR1(double sigma2, double rho, Index T) : sigma2_(sigma2), rho_(rho), T_(T) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw InvalidArgument("sigma2 must be positive");
  if (!(rho >= 0.0 && rho < 1.0)) throw InvalidArgument("rho must lie in [0, 1)");
  if (T < 1) throw InvalidArgument("T must be at least 1");
}

double ToeplitzAR1::sigma() const { return std::sqrt(sigma2_); }

Matrix ToeplitzAR1::correlation() const {
  Matrix R(T_, T_);
  for (Index t = 0; t < T_; ++t) {
    for (Index u = 0; u < T_; ++u) R(t, u) = std::pow(rho_, static_cast<double>(std::abs(t - u)));
  }
  return R;
}

Matrix ToeplitzAR1::matrix() const { return sigma2_ * correlation(); }

namespace {

Eigen::LLT<Matrix> factor(const ToeplitzAR1& M) {
  Eigen::LLT<Matrix> llt(M.matrix());
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("Toeplitz covariance is not positive definite");
  return llt;
}

}  // namespace

double toeplitz_quadform(const ToeplitzAR1& M, const Eigen::Ref<const Vector>& a) {
  if (a.size() != M.T()) throw InvalidArgument("quadratic form vector length differs from T");
  if (!a.allFinite()) throw InvalidArgument("quadratic form vector is not finite");
  const auto llt = factor(M);
  // a^T M^{-1} a = ||L^{-1} a||^2
  const Vector w = llt.matrixL().solve(a);
  return w.squaredNorm();
}

Vector toeplitz_quadforms(const ToeplitzAR1& M, const Matrix& rows) {
  if (rows.cols() != M.T()) throw InvalidArgument("row length differs from T");
  const auto llt = factor(M);
  const Matrix w = llt.matrixL().solve(rows.transpose());
  return w.colwise().squaredNorm().transpose();
}

}  // namespace desparse
