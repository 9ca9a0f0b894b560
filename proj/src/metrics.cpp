#include "desparse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace desparse {

namespace {

Index peak_index(const Vector& map) {
  if (map.size() == 0) throw InvalidArgument("empty map");
  if (!map.allFinite()) throw InvalidArgument("map contains non-finite values");
  Index best = 0;
  for (Index j = 1; j < map.size(); ++j) {
    if (std::abs(map(j)) > std::abs(map(best))) best = j;
  }
  return best;
}

std::vector<char> support_mask(std::span<const Index> support, Index p) {
  std::vector<char> mask(static_cast<std::size_t>(p), 0);
  for (Index k : support) {
    if (k < 0 || k >= p) throw InvalidArgument("support index out of range");
    mask[k] = 1;
  }
  return mask;
}

void check_support(std::span<const Index> support) {
  if (support.empty()) throw InvalidArgument("true support is empty");
}

}  // namespace

double ple(const Vector& map, Index true_source, const Geometry& G) {
  if (map.size() != G.p()) throw InvalidArgument("map length differs from p");
  return geodesic_distance(G, peak_index(map), true_source);
}

double ple(const Vector& map, std::span<const Index> support, const Geometry& G) {
  if (map.size() != G.p()) throw InvalidArgument("map length differs from p");
  check_support(support);
  return G.distances_from_set(support)[peak_index(map)];
}

double spatial_dispersion(const Vector& map, std::span<const Index> support, const Geometry& G) {
  if (map.size() != G.p()) throw InvalidArgument("map length differs from p");
  check_support(support);
  const auto d = G.distances_from_set(support);
  double num = 0.0;
  double den = 0.0;
  for (Index j = 0; j < map.size(); ++j) {
    const double w = map(j) * map(j);
    num += w * d[j] * d[j];
    den += w;
  }
  return den == 0.0 ? 0.0 : std::sqrt(num / den);
}

std::vector<bool> far_set(std::span<const Index> support, double delta, const Geometry& G) {
  if (!(delta >= 0.0)) throw InvalidArgument("delta must be non-negative");
  check_support(support);
  const auto d = G.distances_from_set(support);
  const auto in_support = support_mask(support, G.p());
  std::vector<bool> far(static_cast<std::size_t>(G.p()));
  for (Index j = 0; j < G.p(); ++j) far[j] = !in_support[j] && d[j] >= delta;
  return far;
}

double delta_fwer(const std::vector<Vector>& pval_runs, const SupportSpec& spec, const Geometry& G,
                  double alpha) {
  const std::vector<std::vector<Index>> supports(pval_runs.size(), spec.true_support);
  return delta_fwer(pval_runs, supports, spec.delta, G, alpha);
}

double delta_fwer(const std::vector<Vector>& pval_runs, const std::vector<std::vector<Index>>& supports,
                  double delta, const Geometry& G, double alpha) {
  if (pval_runs.empty()) throw InvalidArgument("no runs supplied");
  if (supports.size() != pval_runs.size()) throw InvalidArgument("one support per run is required");
  Index violations = 0;
  for (std::size_t r = 0; r < pval_runs.size(); ++r) {
    const Vector& p = pval_runs[r];
    if (p.size() != G.p()) throw InvalidArgument("p-value vector length differs from p");
    const auto far = far_set(supports[r], delta, G);
    bool violated = false;
    for (Index j = 0; j < p.size() && !violated; ++j) violated = far[j] && p(j) <= alpha;
    if (violated) ++violations;
  }
  return static_cast<double>(violations) / static_cast<double>(pval_runs.size());
}

std::vector<PRPoint> delta_precision_recall(const Vector& pvals, const SupportSpec& spec, const Geometry& G,
                                            RecallMode mode, double max_threshold) {
  return pooled_delta_precision_recall({pvals}, {spec.true_support}, spec.delta, G, mode, max_threshold);
}

std::vector<PRPoint> pooled_delta_precision_recall(const std::vector<Vector>& pval_runs,
                                                   const std::vector<std::vector<Index>>& supports,
                                                   double delta, const Geometry& G, RecallMode mode,
                                                   double max_threshold) {
  if (supports.size() != pval_runs.size()) throw InvalidArgument("one support per run is required");
  if (!(delta >= 0.0)) throw InvalidArgument("delta must be non-negative");
  // (p-value, is a true discovery) per selectable feature, and the threshold
  // at which each support feature first becomes recalled.
  std::vector<std::pair<double, bool>> selections;
  std::vector<double> recall_at;
  for (std::size_t r = 0; r < pval_runs.size(); ++r) {
    const Vector& p = pval_runs[r];
    if (p.size() != G.p()) throw InvalidArgument("p-value vector length differs from p");
    const auto& support = supports[r];
    const auto far = far_set(support, delta, G);
    for (Index j = 0; j < p.size(); ++j) selections.emplace_back(p(j), !far[j]);
    for (Index k : support) {
      double first = p(k);
      if (mode == RecallMode::within_delta) {
        const auto d = G.distances_from(k);
        for (Index j = 0; j < p.size(); ++j) {
          if (d[j] < delta) first = std::min(first, p(j));
        }
      }
      recall_at.push_back(first);
    }
  }
  std::sort(selections.begin(), selections.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::sort(recall_at.begin(), recall_at.end());

  std::vector<PRPoint> curve;
  curve.push_back({-std::numeric_limits<double>::infinity(), 1.0, 0.0});
  const double total_support = static_cast<double>(recall_at.size());
  std::size_t selected = 0;
  std::size_t true_selected = 0;
  std::size_t recalled = 0;
  while (selected < selections.size()) {
    const double t = selections[selected].first;
    if (t > max_threshold) break;
    while (selected < selections.size() && selections[selected].first == t) {
      if (selections[selected].second) ++true_selected;
      ++selected;
    }
    while (recalled < recall_at.size() && recall_at[recalled] <= t) ++recalled;
    const double precision = static_cast<double>(true_selected) / static_cast<double>(selected);
    const double recall = total_support == 0.0 ? 0.0 : static_cast<double>(recalled) / total_support;
    curve.push_back({t, precision, recall});
  }
  return curve;
}

double interpolated_precision(const std::vector<PRPoint>& curve, double recall) {
  double best = 0.0;
  for (const auto& point : curve) {
    if (point.recall >= recall - 1e-12) best = std::max(best, point.precision);
  }
  return best;
}

}  // namespace desparse
