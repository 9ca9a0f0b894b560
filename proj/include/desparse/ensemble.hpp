#pragma once

#include <cstdint>
#include <vector>

#include "desparse/cluster.hpp"

namespace desparse {

struct EnsembleConfig {
  int B = 100;
  double subsample_fraction = 0.10;
  double gamma_min = 0.25;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Adaptive quantile aggregation of a B x p matrix of corrected p-values:
/// min(1, (1 - log gamma_min) * inf_{gamma in (gamma_min, 1)} Q_gamma(p / gamma)),
/// with Q_gamma the ceil(gamma B)-th order statistic.
Vector aggregate_pvalues(const Matrix& P, double gamma_min);

/// Rows drawn (without replacement) for ensemble member b, sorted ascending.
std::vector<Index> member_rows(Index n, const EnsembleConfig& cfg, int b);

/// Ward clustering of member b, fitted on its row subsample only.
Clustering member_clustering(const DesignMatrix& X, const Geometry& G, Index C,
                             const EnsembleConfig& cfg, int b);

/// Ensemble of clustered desparsified multi-task Lasso. Feature-level result:
/// pval_corrected aggregates the members' corrected p-values and controls the
/// error rate; pval aggregates their uncorrected p-values and is only used for
/// ranking. beta_debiased and
/// stat are member averages; cluster_diameters concatenates all members.
InferenceResult ecd_mtlasso(const DesignMatrix& X, const MultiResponse& Y, const Geometry& G,
                            Index C, const EnsembleConfig& ecfg, const DMtlConfig& cfg);

}  // namespace desparse
