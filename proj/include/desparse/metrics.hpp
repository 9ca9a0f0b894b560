#pragma once

#include <span>
#include <vector>

#include "desparse/core.hpp"
#include "desparse/geometry.hpp"

namespace desparse {

struct SupportSpec {
  std::vector<Index> true_support;
  double delta = 0.0;  // mm
};

/// Geodesic distance from argmax |map| (lowest index on ties) to the source.
double ple(const Vector& map, Index true_source, const Geometry& G);
/// Multi-source form: distance from the peak to the nearest support feature.
double ple(const Vector& map, std::span<const Index> support, const Geometry& G);

/// sqrt(sum_j |m_j|^2 d(j, S)^2 / sum_j |m_j|^2); 0 for an all-zero map.
double spatial_dispersion(const Vector& map, std::span<const Index> support, const Geometry& G);

/// Indicator of N^delta: features outside the support at distance >= delta from it.
std::vector<bool> far_set(std::span<const Index> support, double delta, const Geometry& G);

/// Fraction of runs with min_{j in N^delta} p_j <= alpha.
double delta_fwer(const std::vector<Vector>& pval_runs, const SupportSpec& spec,
                  const Geometry& G, double alpha);
/// Per-run supports.
double delta_fwer(const std::vector<Vector>& pval_runs,
                  const std::vector<std::vector<Index>>& supports, double delta,
                  const Geometry& G, double alpha);

enum class RecallMode {
  /// A support feature is recalled if a discovery lies within delta of it.
  within_delta,
  /// A support feature is recalled only if it is itself selected.
  exact,
};

struct PRPoint {
  double threshold;
  double precision;
  double recall;
};

/// Curve over thresholds {-inf} U {unique p-values <= max_threshold}; selection is p <= t.
/// Empty selections have precision 1.
std::vector<PRPoint> delta_precision_recall(const Vector& pvals, const SupportSpec& spec,
                                            const Geometry& G,
                                            RecallMode mode = RecallMode::within_delta,
                                            double max_threshold = 1.0);

/// Pooled curve over several runs: counts are summed before forming ratios.
std::vector<PRPoint> pooled_delta_precision_recall(
    const std::vector<Vector>& pval_runs, const std::vector<std::vector<Index>>& supports,
    double delta, const Geometry& G, RecallMode mode = RecallMode::within_delta,
    double max_threshold = 1.0);

/// max precision over curve points with recall >= r; 0 when r is never reached.
double interpolated_precision(const std::vector<PRPoint>& curve, double recall);

}  // namespace desparse
