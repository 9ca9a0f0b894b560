#pragma once

#include <vector>

#include "desparse/core.hpp"
#include "desparse/desparsify.hpp"
#include "desparse/geometry.hpp"

namespace desparse {

/// Partition of [p] into C spatially connected groups.
struct Clustering {
  std::vector<Index> labels;  // feature -> cluster in [0, C)
  Index C = 0;
  std::vector<Index> sizes;
  std::vector<double> diameters;  // geodesic, mm

  Index p() const noexcept { return static_cast<Index>(labels.size()); }
  std::vector<std::vector<Index>> members() const;
  double mean_diameter() const;
  double max_diameter() const;
};

/// Agglomerative Ward clustering of the columns of X_sub, merging only
/// clusters adjacent in G, until exactly C clusters remain. Clusters are
/// relabelled by their smallest member so labels are deterministic.
Clustering ward_cluster(const Matrix& X_sub, const Geometry& G, Index C);

/// Cluster-averaging operator A (p x C), A_{j,r} = 1/|G_r| for j in G_r.
struct CompressionMap {
  std::vector<Index> labels;
  std::vector<Index> sizes;

  Index p() const noexcept { return static_cast<Index>(labels.size()); }
  Index C() const noexcept { return static_cast<Index>(sizes.size()); }
  Matrix dense() const;
};

struct Compression {
  Matrix Z_raw;     // X A, before re-standardization
  DesignMatrix Z;   // standardized X A
  CompressionMap A;
};

Compression compress(const DesignMatrix& X, const Clustering& cl);

/// p_j = q_{label(j)}.
Vector expand_pvalues(const Vector& q, const Clustering& cl);

/// Rows of a C x T matrix copied to the p features of each cluster.
Matrix expand_rows(const Matrix& cluster_rows, const Clustering& cl);

/// Clustered desparsified multi-task Lasso with a precomputed clustering.
/// Cluster p-values are Bonferroni-corrected by C and expanded to features.
InferenceResult cd_mtlasso(const DesignMatrix& X, const MultiResponse& Y, const Clustering& cl,
                           const DMtlConfig& cfg);

/// Clusters all rows of X with Ward under G, then runs the clustered pipeline.
InferenceResult cd_mtlasso(const DesignMatrix& X, const MultiResponse& Y, const Geometry& G,
                           Index C, const DMtlConfig& cfg);

}  // namespace desparse
