#include "desparse/cluster.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>
#include <tuple>

namespace desparse {

std::vector<std::vector<Index>> Clustering::members() const {
  std::vector<std::vector<Index>> groups(static_cast<std::size_t>(C));
  for (Index j = 0; j < p(); ++j) groups[labels[j]].push_back(j);
  return groups;
}

double Clustering::mean_diameter() const {
  if (diameters.empty()) return 0.0;
  return std::accumulate(diameters.begin(), diameters.end(), 0.0) / static_cast<double>(diameters.size());
}

double Clustering::max_diameter() const {
  if (diameters.empty()) return 0.0;
  return *std::max_element(diameters.begin(), diameters.end());
}

Clustering ward_cluster(const Matrix& X_sub, const Geometry& G, Index C) {
  const Index p = G.p();
  if (X_sub.cols() != p) throw InvalidArgument("clustering data and geometry disagree on p");
  if (C < 1 || C > p) throw InvalidClusterCount(C, p);

  const Index slots = 2 * p - 1;
  Matrix centroid(X_sub.rows(), slots);
  centroid.leftCols(p) = X_sub;
  std::vector<double> size(static_cast<std::size_t>(slots), 0.0);
  std::vector<char> alive(static_cast<std::size_t>(slots), 0);
  std::vector<std::set<Index>> adjacent(static_cast<std::size_t>(slots));
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(slots));
  for (Index j = 0; j < p; ++j) {
    size[j] = 1.0;
    alive[j] = 1;
    members[j] = {j};
    for (const auto& nb : G.neighbors(j)) adjacent[j].insert(nb.node);
  }

  // Ward variance increase n_a n_b / (n_a + n_b) ||c_a - c_b||^2, the closed
  // form of the Lance-Williams recurrence; evaluated from centroids because a
  // newly adjacent pair has no stored distance to recur from.
  auto cost = [&](Index a, Index b) {
    return size[a] * size[b] / (size[a] + size[b]) * (centroid.col(a) - centroid.col(b)).squaredNorm();
  };
  using Candidate = std::tuple<double, Index, Index>;
  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> heap;
  for (Index a = 0; a < p; ++a) {
    for (Index b : adjacent[a]) {
      if (a < b) heap.emplace(cost(a, b), a, b);
    }
  }

  Index next = p;
  for (Index merges = 0; merges < p - C; ++merges) {
    Index a = -1;
    Index b = -1;
    while (!heap.empty()) {
      const auto [c, lo, hi] = heap.top();
      heap.pop();
      if (alive[lo] && alive[hi]) {
        a = lo;
        b = hi;
        break;
      }
    }
    if (a < 0) throw Disconnected("connectivity exhausted before reaching the requested cluster count");
    const Index k = next++;
    size[k] = size[a] + size[b];
    centroid.col(k) = (size[a] * centroid.col(a) + size[b] * centroid.col(b)) / size[k];
    alive[a] = alive[b] = 0;
    alive[k] = 1;
    members[k] = std::move(members[a]);
    members[k].insert(members[k].end(), members[b].begin(), members[b].end());
    members[b].clear();
    std::set<Index> merged;
    for (Index u : adjacent[a]) if (u != b) merged.insert(u);
    for (Index u : adjacent[b]) if (u != a) merged.insert(u);
    adjacent[a].clear();
    adjacent[b].clear();
    for (Index u : merged) {
      adjacent[u].erase(a);
      adjacent[u].erase(b);
      adjacent[u].insert(k);
      heap.emplace(cost(u, k), std::min(u, k), std::max(u, k));
    }
    adjacent[k] = std::move(merged);
  }

  std::vector<std::vector<Index>> groups;
  for (Index s = 0; s < next; ++s) {
    if (!alive[s]) continue;
    std::sort(members[s].begin(), members[s].end());
    groups.push_back(std::move(members[s]));
  }
  std::sort(groups.begin(), groups.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });

  Clustering out;
  out.C = C;
  out.labels.assign(static_cast<std::size_t>(p), 0);
  for (std::size_t r = 0; r < groups.size(); ++r) {
    for (Index j : groups[r]) out.labels[j] = static_cast<Index>(r);
    out.sizes.push_back(static_cast<Index>(groups[r].size()));
    out.diameters.push_back(G.subset_diameter(groups[r]));
  }
  return out;
}

Matrix CompressionMap::dense() const {
  Matrix A = Matrix::Zero(p(), C());
  for (Index j = 0; j < p(); ++j) A(j, labels[j]) = 1.0 / static_cast<double>(sizes[labels[j]]);
  return A;
}

Compression compress(const DesignMatrix& X, const Clustering& cl) {
  if (cl.p() != X.p()) throw InvalidArgument("clustering and design disagree on p");
  Matrix Z_raw = Matrix::Zero(X.n(), cl.C);
  for (Index j = 0; j < X.p(); ++j) Z_raw.col(cl.labels[j]) += X.data().col(j);
  for (Index r = 0; r < cl.C; ++r) Z_raw.col(r) /= static_cast<double>(cl.sizes[r]);
  DesignMatrix Z = DesignMatrix::standardize(Z_raw);
  return Compression{std::move(Z_raw), std::move(Z), CompressionMap{cl.labels, cl.sizes}};
}

Vector expand_pvalues(const Vector& q, const Clustering& cl) {
  if (q.size() != cl.C) throw InvalidArgument("cluster p-value count differs from C");
  Vector out(cl.p());
  for (Index j = 0; j < cl.p(); ++j) out(j) = q(cl.labels[j]);
  return out;
}

Matrix expand_rows(const Matrix& cluster_rows, const Clustering& cl) {
  if (cluster_rows.rows() != cl.C) throw InvalidArgument("cluster row count differs from C");
  Matrix out(cl.p(), cluster_rows.cols());
  for (Index j = 0; j < cl.p(); ++j) out.row(j) = cluster_rows.row(cl.labels[j]);
  return out;
}

InferenceResult cd_mtlasso(const DesignMatrix& X, const MultiResponse& Y, const Clustering& cl,
                           const DMtlConfig& cfg) {
  const Compression comp = compress(X, cl);
  InferenceResult clusters = d_mtlasso(comp.Z, Y, cfg);

  InferenceResult out;
  out.beta_debiased = expand_rows(clusters.beta_debiased, cl);
  out.stat = expand_pvalues(clusters.stat, cl);
  out.pval = expand_pvalues(clusters.pval, cl);
  out.pval_corrected = expand_pvalues(clusters.pval_corrected, cl);
  out.noise = clusters.noise;
  out.s_hat = clusters.s_hat;
  out.lambda = clusters.lambda;
  out.n_tests = clusters.n_tests;
  out.excluded.resize(static_cast<std::size_t>(cl.p()));
  for (Index j = 0; j < cl.p(); ++j) out.excluded[j] = clusters.excluded[cl.labels[j]];
  out.cluster_diameters = cl.diameters;
  out.labels = cl.labels;
  out.diagnostics = std::move(clusters.diagnostics);
  return out;
}

InferenceResult cd_mtlasso(const DesignMatrix& X, const MultiResponse& Y, const Geometry& G, Index C,
                           const DMtlConfig& cfg) {
  return cd_mtlasso(X, Y, ward_cluster(X.data(), G, C), cfg);
}

}  // namespace desparse
