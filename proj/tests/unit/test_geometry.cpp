#include <doctest.h>

#include <random>

#include "desparse/geometry.hpp"
#include "desparse/rng.hpp"
#include "desparse/sim.hpp"
#include "oracles.hpp"

using namespace desparse;

namespace {
Geometry chain(Index p, double spacing) {
  Matrix pos = Matrix::Zero(p, 1);
  std::vector<Edge> edges;
  for (Index j = 0; j < p; ++j) pos(j, 0) = spacing * static_cast<double>(j);
  for (Index j = 0; j + 1 < p; ++j) edges.push_back({j, j + 1, spacing});
  return Geometry(pos, edges);
}
}  // namespace

TEST_CASE("geodesic distance examples") {
  const Geometry g = chain(3, 1.0);
  CHECK(geodesic_distance(g, 1, 1) == 0.0);
  CHECK(geodesic_distance(g, 0, 2) == 2.0);
  SimConfig cfg;
  cfg.spacing_mm = 1.0;
  const Geometry grid = make_geometry(cfg);
  CHECK(geodesic_distance(grid, 0, 399) == 38.0);
  // BFS oracle on the unit grid.
  const auto hops = oracle::bfs_hops(grid, 0);
  CHECK(hops[399] == 38);
  const auto dist = grid.distances_from(0);
  for (Index j = 0; j < grid.p(); ++j) CHECK(dist[j] == static_cast<double>(hops[j]));
}

TEST_CASE("distances are symmetric and satisfy the triangle inequality") {
  SimConfig cfg;
  cfg.rows = 7;
  cfg.cols = 9;
  const Geometry g = make_geometry(cfg);
  const Matrix D = g.all_pairs();
  CHECK((D - D.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(D.diagonal().isZero());
  Rng rng(3);
  std::uniform_int_distribution<Index> pick(0, g.p() - 1);
  for (int t = 0; t < 500; ++t) {
    const Index a = pick(rng), b = pick(rng), c = pick(rng);
    CHECK(D(a, c) <= D(a, b) + D(b, c) + 1e-12);
  }
}

TEST_CASE("set distances and subset diameters") {
  const Geometry g = chain(10, 2.0);
  const std::vector<Index> set{2, 7};
  const auto d = g.distances_from_set(set);
  CHECK(d[0] == 4.0);
  CHECK(d[4] == 4.0);
  CHECK(d[5] == 4.0);
  CHECK(d[9] == 4.0);
  CHECK(g.subset_diameter(set) == 10.0);
  CHECK(g.subset_diameter(std::vector<Index>{3}) == 0.0);
  CHECK(g.diameter() == 18.0);
}

TEST_CASE("geometry validation") {
  Matrix pos = Matrix::Zero(3, 1);
  CHECK_THROWS_AS(Geometry(pos, {{0, 1, 1.0}}), Disconnected);
  CHECK_THROWS_AS(Geometry(pos, {{0, 1, 0.0}, {1, 2, 1.0}}), InvalidArgument);
  CHECK_THROWS_AS(Geometry(pos, {{0, 3, 1.0}, {1, 2, 1.0}}), InvalidArgument);
}
