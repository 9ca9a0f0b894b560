#pragma once

#include <cstdint>
#include <vector>

#include "desparse/core.hpp"

namespace desparse {

struct LassoConfig {
  double lambda = 0.0;
  int max_iter = 10000;
  /// Stopping threshold on the duality gap, relative to the objective at B = 0.
  double tol = 1e-6;
};

struct CVConfig {
  int n_lambdas = 15;
  double lambda_min_ratio = 0.01;
  int n_folds = 5;
  std::uint64_t seed = 0;
};

enum class SolveStatus { converged, max_iter_exceeded };

/// Solver output. `max_iter_exceeded` is a warning: `coef` still holds the
/// last iterate and `gap` the duality gap it achieved.
struct SolveResult {
  CoefMatrix coef;
  double objective = 0.0;
  double gap = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::converged;

  bool converged() const noexcept { return status == SolveStatus::converged; }
};

/// max_j ||X_j^T Y||_2 / n: the smallest lambda with an all-zero solution.
double lambda_max_mtl(const DesignMatrix& X, const MultiResponse& Y);

/// (1/2n)||Y - XB||^2 + lambda ||B||_{2,1}.
double mtl_objective(const DesignMatrix& X, const MultiResponse& Y, const Matrix& B, double lambda);

/// Primal minus dual objective at B, using the rescaled residual as dual point.
double mtl_duality_gap(const DesignMatrix& X, const MultiResponse& Y, const Matrix& B, double lambda);

/// Lasso, (1/2n)||y - X beta||^2 + lambda ||beta||_1, by coordinate descent.
SolveResult solve_lasso(const DesignMatrix& X, const Vector& y, const LassoConfig& cfg);

/// Multi-task Lasso by block coordinate descent over rows with group soft-thresholding.
/// `warm_start`, when given, must be p x T.
SolveResult solve_mtlasso(const DesignMatrix& X, const MultiResponse& Y, const LassoConfig& cfg,
                          const Matrix* warm_start = nullptr);

/// Lasso of column j on all other columns at penalty alpha. The returned
/// coefficient vector has length p with entry j fixed to zero.
SolveResult solve_nodewise(const DesignMatrix& X, Index j, double alpha, const LassoConfig& cfg);

/// Decreasing log-uniform grid from lambda_max down to lambda_max * lambda_min_ratio.
std::vector<double> lambda_grid(double lambda_max, int n_lambdas, double lambda_min_ratio);

struct CVPoint {
  double lambda;
  double mean_error;
};

struct CVResult {
  double lambda_best = 0.0;
  std::vector<CVPoint> path;
};

/// K-fold cross-validation of the multi-task Lasso over the log grid.
/// Ties in held-out error resolve to the larger lambda.
CVResult cross_validate(const DesignMatrix& X, const MultiResponse& Y, const CVConfig& cv,
                        const LassoConfig& solver = {});

}  // namespace desparse
