#pragma once

#include <span>
#include <vector>

#include "desparse/core.hpp"

namespace desparse {

struct Edge {
  Index a;
  Index b;
  double length;
};

/// Feature positions (mm) plus an undirected, connected adjacency graph.
/// Distances are graph geodesics (shortest paths), not Euclidean distances.
class Geometry {
 public:
  struct Neighbor {
    Index node;
    double length;
  };

  /// Throws Disconnected when the graph is not connected and
  /// InvalidArgument for non-positive edge lengths or out-of-range nodes.
  Geometry(Matrix positions, const std::vector<Edge>& edges);

  Index p() const noexcept { return positions_.rows(); }
  Index dim() const noexcept { return positions_.cols(); }
  const Matrix& positions() const noexcept { return positions_; }
  std::span<const Neighbor> neighbors(Index j) const { return adjacency_[j]; }
  Index edge_count() const noexcept { return edge_count_; }

  /// Single-source shortest paths from j.
  std::vector<double> distances_from(Index j) const;
  /// d(j, S) = min_{k in S} d(j, k) for all j (multi-source Dijkstra).
  std::vector<double> distances_from_set(std::span<const Index> sources) const;
  /// Dense p x p geodesic distance matrix.
  Matrix all_pairs() const;
  /// Largest pairwise distance among `members` (0 for fewer than two).
  double subset_diameter(std::span<const Index> members) const;
  double diameter() const;

 private:
  Matrix positions_;
  std::vector<std::vector<Neighbor>> adjacency_;
  Index edge_count_ = 0;
};

/// Shortest-path length between j and k.
double geodesic_distance(const Geometry& G, Index j, Index k);

}  // namespace desparse
