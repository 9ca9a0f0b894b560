#include "desparse/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "desparse/parallel.hpp"
#include "desparse/rng.hpp"

namespace desparse {

Vector aggregate_pvalues(const Matrix& P, double gamma_min) {
  if (!(gamma_min > 0.0 && gamma_min < 1.0)) throw InvalidArgument("gamma_min must lie in (0, 1)");
  if (P.rows() < 1) throw InvalidArgument("aggregation needs at least one p-value map");
  if ((P.array() < 0.0).any() || (P.array() > 1.0).any() || P.hasNaN()) {
    throw InvalidArgument("p-values must lie in [0, 1]");
  }
  const Index B = P.rows();
  const double factor = 1.0 - std::log(gamma_min);
  Vector out(P.cols());
  std::vector<double> sorted(static_cast<std::size_t>(B));
  for (Index j = 0; j < P.cols(); ++j) {
    for (Index b = 0; b < B; ++b) sorted[b] = P(b, j);
    std::sort(sorted.begin(), sorted.end());
    // On ((k-1)/B, k/B] the quantile is the k-th order statistic, so the
    // infimum of p_(k) / gamma is reached at the right end gamma = k/B.
    double best = std::numeric_limits<double>::infinity();
    for (Index k = 1; k <= B; ++k) {
      const double gamma = static_cast<double>(k) / static_cast<double>(B);
      if (gamma <= gamma_min) continue;
      best = std::min(best, sorted[k - 1] / gamma);
    }
    out(j) = std::min(1.0, factor * best);
  }
  return out;
}

std::vector<Index> member_rows(Index n, const EnsembleConfig& cfg, int b) {
  if (!(cfg.subsample_fraction > 0.0 && cfg.subsample_fraction <= 1.0)) {
    throw InvalidArgument("subsample_fraction must lie in (0, 1]");
  }
  const auto m = std::clamp<Index>(
      static_cast<Index>(std::ceil(cfg.subsample_fraction * static_cast<double>(n) - 1e-9)), 1, n);
  std::vector<Index> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), Index{0});
  Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(b)));
  for (Index i = 0; i < m; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(rows[i], rows[pick(rng)]);
  }
  rows.resize(static_cast<std::size_t>(m));
  std::sort(rows.begin(), rows.end());
  return rows;
}

Clustering member_clustering(const DesignMatrix& X, const Geometry& G, Index C, const EnsembleConfig& cfg,
                             int b) {
  const auto rows = member_rows(X.n(), cfg, b);
  return ward_cluster(X.select_rows(rows).data(), G, C);
}

InferenceResult ecd_mtlasso(const DesignMatrix& X, const MultiResponse& Y, const Geometry& G, Index C,
                            const EnsembleConfig& ecfg, const DMtlConfig& cfg) {
  if (ecfg.B < 1) throw InvalidArgument("ensemble size B must be at least 1");
  if (!(ecfg.gamma_min > 0.0 && ecfg.gamma_min < 1.0)) throw InvalidArgument("gamma_min must lie in (0, 1)");
  const Index p = X.p();
  std::vector<InferenceResult> members(static_cast<std::size_t>(ecfg.B));
  DMtlConfig member_cfg = cfg;
  member_cfg.threads = 1;
  parallel_for(ecfg.B, ecfg.threads, [&](Index b) {
    try {
      const Clustering cl = member_clustering(X, G, C, ecfg, static_cast<int>(b));
      members[b] = cd_mtlasso(X, Y, cl, member_cfg);
    } catch (const std::exception& e) {
      throw EnsembleMemberFailed(static_cast<int>(b), e.what());
    }
  });

  Matrix P(ecfg.B, p);
  Matrix P_raw(ecfg.B, p);
  InferenceResult out;
  out.beta_debiased = Matrix::Zero(p, Y.T());
  out.stat = Vector::Zero(p);
  out.excluded.assign(static_cast<std::size_t>(p), false);
  for (int b = 0; b < ecfg.B; ++b) {
    const auto& m = members[b];
    P.row(b) = m.pval_corrected.transpose();
    P_raw.row(b) = m.pval.transpose();
    out.beta_debiased += m.beta_debiased / ecfg.B;
    out.stat += m.stat / ecfg.B;
    out.cluster_diameters.insert(out.cluster_diameters.end(), m.cluster_diameters.begin(),
                                 m.cluster_diameters.end());
    for (const auto& w : m.diagnostics.warnings) {
      auto& warnings = out.diagnostics.warnings;
      if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
    }
    out.diagnostics.nodewise_unconverged += m.diagnostics.nodewise_unconverged;
    out.diagnostics.nodewise_max_iterations =
        std::max(out.diagnostics.nodewise_max_iterations, m.diagnostics.nodewise_max_iterations);
    out.diagnostics.mtl_iterations = std::max(out.diagnostics.mtl_iterations, m.diagnostics.mtl_iterations);
    out.diagnostics.mtl_gap = std::max(out.diagnostics.mtl_gap, m.diagnostics.mtl_gap);
    out.diagnostics.mtl_converged = out.diagnostics.mtl_converged && m.diagnostics.mtl_converged;
  }
  // Aggregating the uncorrected member p-values gives a tie-free ranking;
  // only the corrected aggregate carries the error guarantee.
  out.pval = aggregate_pvalues(P_raw, ecfg.gamma_min);
  out.pval_corrected = aggregate_pvalues(P, ecfg.gamma_min);
  // Noise model and penalty of the first member, for reporting.
  out.noise = members.front().noise;
  out.s_hat = members.front().s_hat;
  out.lambda = members.front().lambda;
  out.n_tests = C;
  out.labels = members.front().labels;
  return out;
}

}  // namespace desparse
