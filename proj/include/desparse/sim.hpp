#pragma once

#include <cstdint>

#include "desparse/core.hpp"
#include "desparse/geometry.hpp"

namespace desparse {

enum class GeometryKind { grid, chain };
enum class GainModel { gaussian_kernel, iid };

struct SimConfig {
  GeometryKind geometry = GeometryKind::grid;
  Index rows = 20;
  Index cols = 20;
  Index chain_length = 20;
  double spacing_mm = 5.0;

  Index n_sensors = 100;
  GainModel gain = GainModel::gaussian_kernel;
  double kernel_width_mm = 20.0;
  /// Jitter standard deviation relative to each kernel column's spread.
  double jitter = 0.05;

  Index n_active_regions = 3;
  double region_radius_mm = 10.0;
  double amplitude = 1.0;

  double rho = 0.3;
  double sigma = 1.0;
  Index T = 6;
  std::uint64_t seed = 0;
};

/// 4-neighbour grid (row-major node order, position (col, row) * spacing) or chain.
Geometry make_geometry(const SimConfig& cfg);

/// Synthetic standardized gain matrix. Gaussian-kernel model: sensors uniform
/// over the bounding box of G, X_ij = exp(-|s_i - x_j|^2 / (2 w^2)) plus jitter.
DesignMatrix make_gain(const Geometry& G, Index n, const SimConfig& cfg, std::uint64_t seed);

/// Region centres drawn without replacement with pairwise geodesic separation
/// >= 4 * radius. Throws InvalidArgument when they cannot be placed.
std::vector<Index> region_centers(const Geometry& G, const SimConfig& cfg, std::uint64_t seed);

/// Sources around region_centers(G, cfg, seed). A feature is active when it is a centre or lies strictly
/// closer than the radius to one. Active rows equal `amplitude` in every column.
CoefMatrix make_sources(const Geometry& G, const SimConfig& cfg, std::uint64_t seed);

/// Stationary AR(1) rows: E_{i,0} ~ N(0, sigma^2), E_{i,t+1} = rho E_{i,t} + sqrt(1 - rho^2) sigma xi.
/// Row i uses its own stream derive_seed(seed, i).
Matrix make_noise(Index n, Index T, double sigma, double rho, std::uint64_t seed);
Matrix make_noise(Index n, const ToeplitzAR1& noise, std::uint64_t seed);

struct Simulation {
  Geometry G;
  DesignMatrix X;
  CoefMatrix B_true;
  Matrix E;
  MultiResponse Y;
};

/// Y = X B + E, every component drawn from its own stream of cfg.seed.
Simulation simulate(const SimConfig& cfg);

}  // namespace desparse
