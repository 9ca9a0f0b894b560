#include "desparse/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

namespace desparse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using QueueItem = std::pair<double, Index>;
using MinQueue = std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>>;

}  // namespace

Geometry::Geometry(Matrix positions, const std::vector<Edge>& edges)
    : positions_(std::move(positions)), adjacency_(static_cast<std::size_t>(positions_.rows())) {
  const Index p = positions_.rows();
  if (p < 1) throw InvalidArgument("geometry needs at least one feature");
  for (const auto& e : edges) {
    if (e.a < 0 || e.b < 0 || e.a >= p || e.b >= p) throw InvalidArgument("edge endpoint out of range");
    if (e.a == e.b) throw InvalidArgument("self loops are not allowed");
    if (!(e.length > 0.0) || !std::isfinite(e.length)) throw InvalidArgument("edge lengths must be positive");
    adjacency_[e.a].push_back({e.b, e.length});
    adjacency_[e.b].push_back({e.a, e.length});
  }
  edge_count_ = static_cast<Index>(edges.size());
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end(), [](const Neighbor& x, const Neighbor& y) { return x.node < y.node; });
  }
  const auto d = distances_from(0);
  for (Index j = 0; j < p; ++j) {
    if (!std::isfinite(d[j])) throw Disconnected("feature " + std::to_string(j) + " is not reachable from feature 0");
  }
}

std::vector<double> Geometry::distances_from(Index j) const {
  const Index source[] = {j};
  return distances_from_set(source);
}

std::vector<double> Geometry::distances_from_set(std::span<const Index> sources) const {
  std::vector<double> dist(static_cast<std::size_t>(p()), kInf);
  MinQueue queue;
  for (Index s : sources) {
    if (s < 0 || s >= p()) throw InvalidArgument("source index out of range");
    dist[s] = 0.0;
    queue.emplace(0.0, s);
  }
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (const auto& nb : adjacency_[u]) {
      const double candidate = d + nb.length;
      if (candidate < dist[nb.node]) {
        dist[nb.node] = candidate;
        queue.emplace(candidate, nb.node);
      }
    }
  }
  return dist;
}

Matrix Geometry::all_pairs() const {
  Matrix D(p(), p());
  for (Index j = 0; j < p(); ++j) {
    const auto d = distances_from(j);
    for (Index k = 0; k < p(); ++k) D(j, k) = d[k];
  }
  return D;
}

double Geometry::subset_diameter(std::span<const Index> members) const {
  if (members.size() < 2) return 0.0;
  std::vector<char> is_member(static_cast<std::size_t>(p()), 0);
  for (Index m : members) is_member[m] = 1;
  double diameter = 0.0;
  std::vector<double> dist(static_cast<std::size_t>(p()));
  for (Index source : members) {
    // Dijkstra stopped once every member is settled.
    std::fill(dist.begin(), dist.end(), kInf);
    dist[source] = 0.0;
    MinQueue queue;
    queue.emplace(0.0, source);
    std::size_t settled = 0;
    while (!queue.empty() && settled < members.size()) {
      const auto [d, u] = queue.top();
      queue.pop();
      if (d > dist[u]) continue;
      if (is_member[u]) {
        ++settled;
        diameter = std::max(diameter, d);
      }
      for (const auto& nb : adjacency_[u]) {
        const double candidate = d + nb.length;
        if (candidate < dist[nb.node]) {
          dist[nb.node] = candidate;
          queue.emplace(candidate, nb.node);
        }
      }
    }
  }
  return diameter;
}

double Geometry::diameter() const {
  double best = 0.0;
  for (Index j = 0; j < p(); ++j) {
    const auto d = distances_from(j);
    best = std::max(best, *std::max_element(d.begin(), d.end()));
  }
  return best;
}

double geodesic_distance(const Geometry& G, Index j, Index k) {
  if (j < 0 || k < 0 || j >= G.p() || k >= G.p()) throw InvalidArgument("feature index out of range");
  if (j == k) return 0.0;
  const double d = G.distances_from(j)[k];
  if (!std::isfinite(d)) throw Disconnected("no path between features");
  return d;
}

}  // namespace desparse
