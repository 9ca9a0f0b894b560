#pragma once

#include <optional>
#include <string>
#include <vector>

#include "desparse/core.hpp"
#include "desparse/solvers.hpp"

namespace desparse {

struct NodewiseConfig {
  /// alpha_j = c * ||X^{(-j)T} X_j||_inf / n.
  double c = 0.005;
  LassoConfig solver{};
  /// Report degenerate features instead of throwing DegenerateScore.
  bool exclude_degenerate = false;
  int threads = 1;
};

/// Nodewise residual score vectors z_j and the quantities derived from them.
struct ScoreVectors {
  Matrix z;           // n x p
  Vector omega_diag;  // n ||z_j||^2 / (z_j^T X_j)^2
  Vector zx_dot;      // z_j^T X_j
  Vector alpha;       // nodewise penalties
  std::vector<bool> degenerate;
  Index unconverged = 0;  // nodewise regressions that hit max_iter
  int max_iterations = 0;

  Index p() const noexcept { return z.cols(); }
  Index n() const noexcept { return z.rows(); }
  Index degenerate_count() const;
};

ScoreVectors nodewise_scores(const DesignMatrix& X, const NodewiseConfig& cfg);

/// Off-diagonal entry n z_j^T z_k / (|z_j^T X_j| |z_k^T X_k|), computed on demand.
double omega_entry(const ScoreVectors& S, Index j, Index k);

/// Debiased rows z_j^T (Y - X B) / z_j^T X_j + B_j, in O(npT).
Matrix debias(const DesignMatrix& X, const MultiResponse& Y, const CoefMatrix& B_mtl,
              const ScoreVectors& S);

struct NoiseEstimate {
  ToeplitzAR1 model;
  /// Median lag-1 correlation before clipping to [0, 1 - 1e-6).
  double rho_raw = 0.0;
  bool rho_clipped = false;
};

/// Median-based sigma^2 and lag-1 rho from the n x T residual matrix.
NoiseEstimate estimate_noise(const Matrix& residuals, Index s_hat);

struct TestStatistics {
  Vector stat;
  Vector pval;
};

/// f_j = n ||B_j||^2_{M^{-1}} / (T Omega_jj), referred to Fisher(T, n - s_hat).
/// Degenerate features get stat 0 and p-value 1.
TestStatistics test_statistics(const Matrix& beta_debiased, const ScoreVectors& S,
                               const ToeplitzAR1& M_hat, Index s_hat);

struct DMtlConfig {
  CVConfig cv{};
  LassoConfig solver{};
  NodewiseConfig nodewise{.exclude_degenerate = true};
  /// Skip cross-validation and use this penalty.
  std::optional<double> lambda;
  int threads = 1;
};

struct SolverDiagnostics {
  int mtl_iterations = 0;
  double mtl_gap = 0.0;
  bool mtl_converged = true;
  Index nodewise_unconverged = 0;
  int nodewise_max_iterations = 0;
  std::vector<CVPoint> cv_path;
  std::vector<std::string> warnings;
};

struct InferenceResult {
  Matrix beta_debiased;
  Vector stat;
  Vector pval;
  Vector pval_corrected;
  ToeplitzAR1 noise;
  Index s_hat = 0;
  double lambda = 0.0;
  /// Number of hypotheses used in the Bonferroni factor.
  Index n_tests = 0;
  std::vector<bool> excluded;
  /// Filled by the clustered variants (all members for ensembles).
  std::vector<double> cluster_diameters;
  std::vector<Index> labels;
  SolverDiagnostics diagnostics;

  Index p() const noexcept { return pval.size(); }
};

/// min(1, m * p) elementwise.
Vector bonferroni(const Vector& pval, Index m);

/// Desparsified multi-task Lasso: CV MTLasso, residual noise model, nodewise
/// scores, debiasing, Fisher tests and Bonferroni correction.
InferenceResult d_mtlasso(const DesignMatrix& X, const MultiResponse& Y, const DMtlConfig& cfg);

/// Same pipeline with precomputed score vectors (they depend on X only).
InferenceResult d_mtlasso(const DesignMatrix& X, const MultiResponse& Y, const ScoreVectors& S,
                          const DMtlConfig& cfg);

}  // namespace desparse
