#pragma once

#include "desparse/core.hpp"

namespace desparse {

/// K = X^T (X X^T + lambda I)^{-1}.
struct RidgeKernel {
  Matrix K;  // p x n
  double lambda = 0.0;
};

RidgeKernel ridge_kernel(const DesignMatrix& X, double lambda);

/// trace(X X^T) / n / snr^2.
double default_baseline_lambda(const DesignMatrix& X, double snr = 3.0);

/// Ridge estimate K Y with rows divided by sqrt(sigma2 [K K^T]_jj).
Matrix dspm(const DesignMatrix& X, const MultiResponse& Y, double lambda, double sigma2);

/// Ridge estimate K Y with rows divided by sqrt([K (sigma2 I + X X^T) K^T]_jj).
Matrix sloreta(const DesignMatrix& X, const MultiResponse& Y, double lambda, double sigma2);

}  // namespace desparse
