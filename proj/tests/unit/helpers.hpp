#pragma once

#include <random>

#include <Eigen/Dense>

#include "desparse/core.hpp"
#include "desparse/rng.hpp"

namespace testing_helpers {

inline desparse::Matrix gaussian(desparse::Index rows, desparse::Index cols, std::uint64_t seed) {
  desparse::Rng rng(seed);
  std::normal_distribution<double> normal;
  desparse::Matrix m(rows, cols);
  for (desparse::Index j = 0; j < cols; ++j)
    for (desparse::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

/// Standardized design with exactly orthogonal columns (X^T X / n = I).
inline desparse::DesignMatrix orthonormal_design(desparse::Index n, desparse::Index p, std::uint64_t seed) {
  desparse::Matrix A = gaussian(n, p + 1, seed);
  A.col(0).setOnes();
  const desparse::Matrix Q = Eigen::HouseholderQR<desparse::Matrix>(A).householderQ() *
                             desparse::Matrix::Identity(n, p + 1);
  // Columns orthogonal to the constant are already centred.
  return desparse::DesignMatrix::standardize(Q.rightCols(p) * std::sqrt(static_cast<double>(n)));
}

}  // namespace testing_helpers
