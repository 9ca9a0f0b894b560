#include "desparse/sim.hpp"

#include <cmath>
#include <numeric>

#include "desparse/rng.hpp"

namespace desparse {

Geometry make_geometry(const SimConfig& cfg) {
  if (!(cfg.spacing_mm > 0.0)) throw InvalidArgument("spacing must be positive");
  std::vector<Edge> edges;
  if (cfg.geometry == GeometryKind::chain) {
    if (cfg.chain_length < 1) throw InvalidArgument("chain length must be positive");
    Matrix pos = Matrix::Zero(cfg.chain_length, 2);
    for (Index i = 0; i < cfg.chain_length; ++i) {
      pos(i, 0) = static_cast<double>(i) * cfg.spacing_mm;
      if (i + 1 < cfg.chain_length) edges.push_back({i, i + 1, cfg.spacing_mm});
    }
    return Geometry(std::move(pos), edges);
  }
  if (cfg.rows < 1 || cfg.cols < 1) throw InvalidArgument("grid dimensions must be positive");
  Matrix pos(cfg.rows * cfg.cols, 2);
  for (Index r = 0; r < cfg.rows; ++r) {
    for (Index c = 0; c < cfg.cols; ++c) {
      const Index id = r * cfg.cols + c;
      pos(id, 0) = static_cast<double>(c) * cfg.spacing_mm;
      pos(id, 1) = static_cast<double>(r) * cfg.spacing_mm;
      if (c + 1 < cfg.cols) edges.push_back({id, id + 1, cfg.spacing_mm});
      if (r + 1 < cfg.rows) edges.push_back({id, id + cfg.cols, cfg.spacing_mm});
    }
  }
  return Geometry(std::move(pos), edges);
}

DesignMatrix make_gain(const Geometry& G, Index n, const SimConfig& cfg, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("at least two sensors are required");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index p = G.p();
  Matrix raw(n, p);
  if (cfg.gain == GainModel::iid) {
    for (Index j = 0; j < p; ++j) {
      for (Index i = 0; i < n; ++i) raw(i, j) = normal(rng);
    }
    return DesignMatrix::standardize(raw);
  }
  if (!(cfg.kernel_width_mm > 0.0)) throw InvalidArgument("kernel width must be positive");
  const Matrix& pos = G.positions();
  const Eigen::RowVectorXd lo = pos.colwise().minCoeff();
  const Eigen::RowVectorXd hi = pos.colwise().maxCoeff();
  Matrix sensors(n, pos.cols());
  for (Index i = 0; i < n; ++i) {
    for (Index d = 0; d < pos.cols(); ++d) {
      std::uniform_real_distribution<double> uniform(lo(d), hi(d));
      sensors(i, d) = lo(d) == hi(d) ? lo(d) : uniform(rng);
    }
  }
  const double two_w2 = 2.0 * cfg.kernel_width_mm * cfg.kernel_width_mm;
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n; ++i) raw(i, j) = std::exp(-(sensors.row(i) - pos.row(j)).squaredNorm() / two_w2);
  }
  for (Index j = 0; j < p; ++j) {
    const double mean = raw.col(j).mean();
    const double spread = std::sqrt((raw.col(j).array() - mean).square().mean());
    for (Index i = 0; i < n; ++i) raw(i, j) += cfg.jitter * spread * normal(rng);
  }
  return DesignMatrix::standardize(raw);
}

std::vector<Index> region_centers(const Geometry& G, const SimConfig& cfg, std::uint64_t seed) {
  if (cfg.n_active_regions < 1) throw InvalidArgument("at least one active region is required");
  if (!(cfg.region_radius_mm >= 0.0)) throw InvalidArgument("region radius must be non-negative");
  std::vector<Index> order(static_cast<std::size_t>(G.p()));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const double separation = 4.0 * cfg.region_radius_mm;
  std::vector<Index> centers;
  std::vector<std::vector<double>> center_dist;
  for (Index candidate : order) {
    if (static_cast<Index>(centers.size()) == cfg.n_active_regions) break;
    bool ok = true;
    for (const auto& d : center_dist) ok = ok && d[candidate] >= separation;
    if (!ok) continue;
    centers.push_back(candidate);
    center_dist.push_back(G.distances_from(candidate));
  }
  if (static_cast<Index>(centers.size()) < cfg.n_active_regions) {
    throw InvalidArgument("cannot place the requested regions with the required separation");
  }
  return centers;
}

CoefMatrix make_sources(const Geometry& G, const SimConfig& cfg, std::uint64_t seed) {
  if (cfg.T < 1) throw InvalidArgument("T must be at least 1");
  const auto centers = region_centers(G, cfg, seed);
  CoefMatrix B = CoefMatrix::zeros(G.p(), cfg.T);
  for (Index c : centers) {
    const auto d = G.distances_from(c);
    for (Index j = 0; j < G.p(); ++j) {
      if (j == c || d[j] < cfg.region_radius_mm) B.data().row(j).setConstant(cfg.amplitude);
    }
  }
  return B;
}

Matrix make_noise(Index n, Index T, double sigma, double rho, std::uint64_t seed) {
  if (n < 1 || T < 1) throw InvalidArgument("noise dimensions must be positive");
  if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be non-negative");
  if (!(rho >= 0.0 && rho < 1.0)) throw InvalidArgument("rho must lie in [0, 1)");
  const double innovation = std::sqrt(1.0 - rho * rho) * sigma;
  Matrix E(n, T);
  for (Index i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    std::normal_distribution<double> normal(0.0, 1.0);
    E(i, 0) = sigma * normal(rng);
    for (Index t = 1; t < T; ++t) E(i, t) = rho * E(i, t - 1) + innovation * normal(rng);
  }
  return E;
}

Matrix make_noise(Index n, const ToeplitzAR1& noise, std::uint64_t seed) {
  return make_noise(n, noise.T(), noise.sigma(), noise.rho(), seed);
}

Simulation simulate(const SimConfig& cfg) {
  Geometry G = make_geometry(cfg);
  DesignMatrix X = make_gain(G, cfg.n_sensors, cfg, derive_seed(cfg.seed, 1));
  CoefMatrix B = make_sources(G, cfg, derive_seed(cfg.seed, 2));
  Matrix E = make_noise(cfg.n_sensors, cfg.T, cfg.sigma, cfg.rho, derive_seed(cfg.seed, 3));
  MultiResponse Y(X.data() * B.data() + E);
  return Simulation{std::move(G), std::move(X), std::move(B), std::move(E), std::move(Y)};
}

}  // namespace desparse
