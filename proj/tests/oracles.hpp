#pragma once
// Independent reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "desparse/core.hpp"
#include "desparse/geometry.hpp"

namespace oracle {

using desparse::Index;
using desparse::Matrix;
using desparse::Vector;

inline double mtl_objective(const Matrix& X, const Matrix& Y, const Matrix& B, double lambda) {
  const double n = static_cast<double>(X.rows());
  return (Y - X * B).squaredNorm() / (2.0 * n) + lambda * B.rowwise().norm().sum();
}

inline Matrix group_soft_threshold(const Matrix& V, double level) {
  Matrix out = Matrix::Zero(V.rows(), V.cols());
  for (Index j = 0; j < V.rows(); ++j) {
    const double norm = V.row(j).norm();
    if (norm > level) out.row(j) = V.row(j) * (1.0 - level / norm);
  }
  return out;
}

/// Accelerated proximal gradient (FISTA with gradient restart) for the
/// multi-task Lasso. Columns in `frozen` are held at zero.
inline Matrix fista_mtl(const Matrix& X, const Matrix& Y, double lambda, int iterations,
                        Index frozen = -1) {
  const double n = static_cast<double>(X.rows());
  Eigen::JacobiSVD<Matrix> svd(X);
  const double L = svd.singularValues()(0) * svd.singularValues()(0) / n;
  const double step = 1.0 / L;
  Matrix B = Matrix::Zero(X.cols(), Y.cols());
  Matrix V = B;
  double t = 1.0;
  for (int it = 0; it < iterations; ++it) {
    const Matrix grad = X.transpose() * (X * V - Y) / n;
    Matrix next = group_soft_threshold(V - step * grad, step * lambda);
    if (frozen >= 0) next.row(frozen).setZero();
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    // Restart momentum when it points uphill.
    if (((V - next).cwiseProduct(next - B)).sum() > 0.0) {
      V = next;
      t = 1.0;
    } else {
      V = next + ((t - 1.0) / t_next) * (next - B);
      t = t_next;
    }
    B = std::move(next);
  }
  return B;
}

/// Row j of the debiased estimator from its defining double sum.
inline Matrix debias_naive(const Matrix& X, const Matrix& Y, const Matrix& B, const Matrix& Z) {
  const Index p = X.cols();
  Matrix out(p, Y.cols());
  for (Index j = 0; j < p; ++j) {
    const double zx = Z.col(j).dot(X.col(j));
    Eigen::RowVectorXd row = Z.col(j).transpose() * Y / zx;
    for (Index k = 0; k < p; ++k) {
      if (k == j) continue;
      double zxk = 0.0;
      for (Index i = 0; i < X.rows(); ++i) zxk += Z(i, j) * X(i, k);
      row -= (zxk / zx) * B.row(k);
    }
    out.row(j) = row;
  }
  return out;
}

/// Aggregated p-values by scanning gamma over every jump point of the
/// empirical quantile, the midpoints between them and points next to gamma_min.
inline Vector aggregate_bruteforce(const Matrix& P, double gamma_min) {
  const Index B = P.rows();
  // Candidate gammas paired with the order statistic index ceil(gamma B),
  // known exactly for each candidate rather than recomputed in floating point.
  std::vector<std::pair<double, Index>> gammas;
  Index first = 1;
  while (static_cast<double>(first) / static_cast<double>(B) <= gamma_min) ++first;
  for (Index k = first; k <= B; ++k) {
    gammas.emplace_back(static_cast<double>(k) / static_cast<double>(B), k);
    const double mid = (static_cast<double>(k) - 0.5) / static_cast<double>(B);
    if (mid > gamma_min) gammas.emplace_back(mid, k);
    const double lo = std::max(gamma_min, static_cast<double>(k - 1) / static_cast<double>(B));
    gammas.emplace_back(std::nextafter(lo, 1.0), k);
  }
  Vector out(P.cols());
  for (Index j = 0; j < P.cols(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [g, k] : gammas) {
      std::vector<double> scaled;
      for (Index b = 0; b < B; ++b) scaled.push_back(P(b, j) / g);
      std::sort(scaled.begin(), scaled.end());
      best = std::min(best, scaled[static_cast<std::size_t>(k - 1)]);
    }
    out(j) = std::min(1.0, (1.0 - std::log(gamma_min)) * best);
  }
  return out;
}

/// Hop counts from j by breadth-first search (unit-weight graphs).
inline std::vector<int> bfs_hops(const desparse::Geometry& G, Index j) {
  std::vector<int> hops(static_cast<std::size_t>(G.p()), -1);
  std::deque<Index> queue{j};
  hops[j] = 0;
  while (!queue.empty()) {
    const Index u = queue.front();
    queue.pop_front();
    for (const auto& nb : G.neighbors(u)) {
      if (hops[nb.node] < 0) {
        hops[nb.node] = hops[u] + 1;
        queue.push_back(nb.node);
      }
    }
  }
  return hops;
}

/// sLORETA map with the kernel and normalizer formed by dense inverses.
inline Matrix sloreta_dense(const Matrix& X, const Matrix& Y, double lambda, double sigma2) {
  const Index n = X.rows();
  const Matrix inv = (X * X.transpose() + lambda * Matrix::Identity(n, n)).inverse();
  const Matrix K = X.transpose() * inv;
  const Matrix N = K * (sigma2 * Matrix::Identity(n, n) + X * X.transpose()) * K.transpose();
  Matrix out = K * Y;
  for (Index j = 0; j < out.rows(); ++j) out.row(j) /= std::sqrt(N(j, j));
  return out;
}

}  // namespace oracle
