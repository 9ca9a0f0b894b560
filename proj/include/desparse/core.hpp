#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "desparse/errors.hpp"

namespace desparse {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// n x p design matrix. Built either by `standardize` (centered, unit
/// empirical variance columns) or by `wrap` (data taken as-is, e.g. a row
/// subsample of a standardized design).
class DesignMatrix {
 public:
  static DesignMatrix standardize(const Matrix& raw);
  static DesignMatrix wrap(Matrix data);
  /// Standardized design if every column already has mean 0 and unit
  /// empirical variance within `tol`, kept bit-for-bit; nullopt otherwise.
  static std::optional<DesignMatrix> if_standardized(Matrix data, double tol = 1e-10);

  const Matrix& data() const noexcept { return data_; }
  Index n() const noexcept { return data_.rows(); }
  Index p() const noexcept { return data_.cols(); }
  bool standardized() const noexcept { return standardized_; }

  /// Column means removed during standardization (zeros for wrapped data).
  const Vector& means() const noexcept { return means_; }
  /// Column scale factors divided out during standardization (ones for wrapped data).
  const Vector& scales() const noexcept { return scales_; }

  /// Empirical covariance X^T X / n.
  Matrix covariance() const;

  /// Rows selected by `rows`, wrapped without re-standardization.
  DesignMatrix select_rows(std::span<const Index> rows) const;

 private:
  DesignMatrix(Matrix data, Vector means, Vector scales, bool standardized);

  Matrix data_;
  Vector means_;
  Vector scales_;
  bool standardized_ = false;
};

/// n x T observations.
class MultiResponse {
 public:
  explicit MultiResponse(Matrix data);

  const Matrix& data() const noexcept { return data_; }
  Index n() const noexcept { return data_.rows(); }
  Index T() const noexcept { return data_.cols(); }

  MultiResponse select_rows(std::span<const Index> rows) const;
  /// Single task t as a T = 1 response.
  MultiResponse task(Index t) const;

 private:
  Matrix data_;
};

/// p x T coefficient matrix. The row support is recomputed on every call.
class CoefMatrix {
 public:
  CoefMatrix() = default;
  explicit CoefMatrix(Matrix data) : data_(std::move(data)) {}
  static CoefMatrix zeros(Index p, Index T) { return CoefMatrix(Matrix::Zero(p, T)); }

  const Matrix& data() const noexcept { return data_; }
  Matrix& data() noexcept { return data_; }
  Index p() const noexcept { return data_.rows(); }
  Index T() const noexcept { return data_.cols(); }

  std::vector<Index> support() const;
  Index support_size() const;

 private:
  Matrix data_;
};

/// AR(1) temporal covariance M_{t,u} = sigma2 * rho^|t-u|.
class ToeplitzAR1 {
 public:
  ToeplitzAR1() = default;
  ToeplitzAR1(double sigma2, double rho, Index T);

  double sigma2() const noexcept { return sigma2_; }
  double sigma() const;
  double rho() const noexcept { return rho_; }
  Index T() const noexcept { return T_; }

  Matrix matrix() const;
  /// R = M / sigma2.
  Matrix correlation() const;

 private:
  double sigma2_ = 1.0;
  double rho_ = 0.0;
  Index T_ = 1;
};

/// a^T M^{-1} a through a Cholesky factorization of M.
double toeplitz_quadform(const ToeplitzAR1& M, const Eigen::Ref<const Vector>& a);

/// Row-wise a_j^T M^{-1} a_j for every row of `rows` (p x T), sharing one factorization.
Vector toeplitz_quadforms(const ToeplitzAR1& M, const Matrix& rows);

}  // namespace desparse
