#include <doctest.h>

#include "desparse/sim.hpp"
#include "oracles.hpp"

using namespace desparse;

TEST_CASE("geometry construction") {
  SimConfig c;
  c.geometry = GeometryKind::chain;
  c.chain_length = 3;
  c.spacing_mm = 1.0;
  CHECK(geodesic_distance(make_geometry(c), 0, 2) == 2.0);
  SimConfig g;
  g.rows = 2;
  g.cols = 2;
  g.spacing_mm = 1.0;
  const Geometry small = make_geometry(g);
  CHECK(small.p() == 4);
  CHECK(small.edge_count() == 4);
  SimConfig big;
  const Geometry grid = make_geometry(big);
  CHECK(grid.diameter() == 190.0);
  CHECK(oracle::bfs_hops(grid, 0)[399] * 5 == 190);
}

TEST_CASE("iid gain is well conditioned") {
  SimConfig c;
  c.geometry = GeometryKind::chain;
  c.chain_length = 20;
  c.gain = GainModel::iid;
  const Geometry G = make_geometry(c);
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Matrix S = make_gain(G, 100, c, seed).covariance();
    S.diagonal().setZero();
    if (S.cwiseAbs().maxCoeff() < 0.5) ++ok;
  }
  CHECK(ok >= 99);
}

TEST_CASE("wide gaussian kernel gives highly correlated neighbours") {
  SimConfig c;
  c.kernel_width_mm = 500.0;
  const Geometry G = make_geometry(c);
  const Matrix S = make_gain(G, 80, c, 1).covariance();
  for (Index j = 0; j < G.p(); ++j)
    for (const auto& nb : G.neighbors(j)) CHECK(S(j, nb.node) > 0.95);
  CHECK(make_gain(G, 80, c, 1).data() == make_gain(G, 80, c, 1).data());
  CHECK(make_gain(G, 80, c, 1).standardized());
}

TEST_CASE("source regions") {
  SimConfig c;
  const Geometry G = make_geometry(c);
  c.region_radius_mm = 0.0;
  CHECK(make_sources(G, c, 3).support() == [&] {
    auto centres = region_centers(G, c, 3);
    std::sort(centres.begin(), centres.end());
    return centres;
  }());
  SimConfig all;
  all.n_active_regions = 1;
  all.region_radius_mm = 200.0;
  CHECK(make_sources(G, all, 1).support_size() == 400);
  SimConfig big = all;
  big.n_active_regions = 2;
  CHECK_THROWS_AS(make_sources(G, big, 1), InvalidArgument);
}

TEST_CASE("regions are hop balls around separated centres") {
  SimConfig c;
  const Geometry G = make_geometry(c);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto centres = region_centers(G, c, seed);
    REQUIRE(centres.size() == 3);
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = a + 1; b < 3; ++b) CHECK(geodesic_distance(G, centres[a], centres[b]) >= 40.0);
    // Radius 10 on a 5 mm grid: centre plus hop-1 neighbours.
    std::vector<Index> expected;
    for (Index centre : centres) {
      const auto hops = oracle::bfs_hops(G, centre);
      Index count = 0;
      for (Index j = 0; j < G.p(); ++j) {
        if (hops[j] <= 1) {
          expected.push_back(j);
          ++count;
        }
      }
      const Index row = centre / 20, col = centre % 20;
      const bool interior = row > 0 && row < 19 && col > 0 && col < 19;
      if (interior) CHECK(count == 5);
    }
    std::sort(expected.begin(), expected.end());
    const CoefMatrix B = make_sources(G, c, seed);
    CHECK(B.support() == expected);
    CHECK((B.data().array() == 0.0 || B.data().array() == c.amplitude).all());
    const auto d = G.distances_from_set(centres);
    for (Index j : B.support()) CHECK(d[j] < c.region_radius_mm + 1e-12);
  }
}

TEST_CASE("AR(1) noise") {
  CHECK(make_noise(10, 4, 0.0, 0.3, 1).isZero());
  const Matrix white = make_noise(4000, 2, 1.0, 0.0, 2);
  const double corr = white.col(0).dot(white.col(1)) / 4000.0;
  CHECK(std::abs(corr) < 0.06);
  const Matrix E = make_noise(2000, 10, 1.0, 0.3, 3);
  double lag = 0.0;
  for (Index t = 0; t + 1 < 10; ++t) lag += E.col(t).dot(E.col(t + 1));
  lag /= 2000.0 * 9.0;
  CHECK(lag >= 0.27);
  CHECK(lag <= 0.33);
  // Sample covariance over 10^4 rows against M.
  const ToeplitzAR1 M(2.0, 0.3, 5);
  const Matrix big = make_noise(10000, M, 4);
  const Matrix cov = big.transpose() * big / 10000.0;
  const Matrix target = M.matrix();
  // Relative on the diagonal; off-diagonal entries shrink like rho^k, so
  // they are compared on the variance scale.
  for (Index t = 0; t < 5; ++t) {
    CHECK(std::abs(cov(t, t) / target(t, t) - 1.0) <= 0.05);
    for (Index u = 0; u < 5; ++u) CHECK(std::abs(cov(t, u) - target(t, u)) <= 0.05 * target(0, 0));
  }
}

TEST_CASE("simulation composition and determinism") {
  SimConfig c;
  c.rows = 8;
  c.cols = 8;
  c.n_sensors = 40;
  c.seed = 5;
  const auto a = simulate(c);
  CHECK((a.Y.data() - a.X.data() * a.B_true.data() - a.E).cwiseAbs().maxCoeff() <= 1e-12);
  const auto b = simulate(c);
  CHECK(a.Y.data() == b.Y.data());
  c.amplitude = 2.0;
  const auto d = simulate(c);
  CHECK((d.X.data() * d.B_true.data()).norm() == doctest::Approx(2.0 * (a.X.data() * a.B_true.data()).norm()));
}
