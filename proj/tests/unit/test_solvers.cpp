#include <doctest.h>

#include "desparse/solvers.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace desparse;
using testing_helpers::gaussian;

namespace {
DesignMatrix random_design(Index n, Index p, std::uint64_t seed) {
  return DesignMatrix::standardize(gaussian(n, p, seed));
}

double kkt_violation(const Matrix& X, const Matrix& Y, const Matrix& B, double lambda) {
  const double n = static_cast<double>(X.rows());
  const Matrix corr = X.transpose() * (Y - X * B) / n;
  double worst = 0.0;
  for (Index j = 0; j < X.cols(); ++j) worst = std::max(worst, corr.row(j).norm() - lambda);
  return worst;
}
}  // namespace

TEST_CASE("lambda_max examples") {
  const auto X = DesignMatrix::wrap(Matrix::Ones(1, 1));
  CHECK(lambda_max_mtl(X, MultiResponse(Matrix::Constant(1, 1, 3.0))) == 3.0);
  const auto Xr = random_design(10, 4, 1);
  CHECK(lambda_max_mtl(Xr, MultiResponse(Matrix::Zero(10, 2))) == 0.0);
}

TEST_CASE("lambda_max is the zero-solution threshold") {
  const auto X = random_design(10, 4, 2);
  const MultiResponse Y(gaussian(10, 2, 3));
  const double lmax = lambda_max_mtl(X, Y);
  LassoConfig cfg;
  cfg.lambda = lmax;
  CHECK(solve_mtlasso(X, Y, cfg).coef.support_size() == 0);
  cfg.lambda = 0.99 * lmax;
  CHECK(solve_mtlasso(X, Y, cfg).coef.support_size() > 0);
  // KKT at B = 0 holds exactly at lambda_max.
  CHECK(kkt_violation(X.data(), Y.data(), Matrix::Zero(4, 2), lmax) <= 1e-15);
}

TEST_CASE("scalar closed forms") {
  const auto X = DesignMatrix::wrap(Matrix::Ones(1, 1));
  LassoConfig cfg;
  cfg.lambda = 0.5;
  CHECK(solve_lasso(X, Vector::Constant(1, 2.0), cfg).coef.data()(0, 0) == doctest::Approx(1.5));
  Matrix y(1, 2);
  y << 3, 4;
  cfg.lambda = 2.0;
  const Matrix B = solve_mtlasso(X, MultiResponse(y), cfg).coef.data();
  CHECK(B(0, 0) == doctest::Approx(1.8));
  CHECK(B(0, 1) == doctest::Approx(2.4));
}

TEST_CASE("lasso matches the proximal-gradient oracle") {
  const auto X = random_design(30, 10, 4);
  const Vector y = gaussian(30, 1, 5);
  LassoConfig cfg;
  cfg.lambda = 0.1;
  cfg.tol = 1e-12;
  const auto r = solve_lasso(X, y, cfg);
  const Matrix ref = oracle::fista_mtl(X.data(), y, cfg.lambda, 20000);
  CHECK((r.coef.data() - ref).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(r.converged());
  CHECK(kkt_violation(X.data(), y, r.coef.data(), cfg.lambda) <= cfg.lambda * 1e-6);
}

TEST_CASE("multi-task Lasso matches the oracle objective and block KKT conditions") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto X = random_design(40, 60, 100 + seed);
    const MultiResponse Y(gaussian(40, 5, 200 + seed));
    LassoConfig cfg;
    cfg.lambda = 0.2 * lambda_max_mtl(X, Y);
    cfg.tol = 1e-10;
    const auto r = solve_mtlasso(X, Y, cfg);
    CHECK(r.converged());
    const double p0 = Y.data().squaredNorm() / 80.0;
    CHECK(mtl_duality_gap(X, Y, r.coef.data(), cfg.lambda) <= 1e-10 * p0 * (1 + 1e-6));
    const Matrix ref = oracle::fista_mtl(X.data(), Y.data(), cfg.lambda, 30000);
    const double f_ref = oracle::mtl_objective(X.data(), Y.data(), ref, cfg.lambda);
    CHECK(r.objective <= f_ref * (1 + 1e-8));
    CHECK(std::abs(r.objective - f_ref) <= 1e-8 * f_ref);
    CHECK(kkt_violation(X.data(), Y.data(), r.coef.data(), cfg.lambda) <= cfg.lambda * 1e-4);
    // Active rows: residual correlation aligned with the coefficient row.
    const Matrix corr = X.data().transpose() * (Y.data() - X.data() * r.coef.data()) / 40.0;
    for (Index j : r.coef.support()) {
      const Eigen::RowVectorXd dir = r.coef.data().row(j).normalized();
      CHECK((corr.row(j) - cfg.lambda * dir).norm() <= 1e-3 * cfg.lambda);
    }
  }
}

TEST_CASE("orthonormal design gives the group soft-threshold") {
  const auto X = testing_helpers::orthonormal_design(50, 8, 6);
  CHECK((X.covariance() - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-12);
  const MultiResponse Y(gaussian(50, 3, 7));
  LassoConfig cfg;
  cfg.lambda = 0.15;
  cfg.tol = 1e-14;
  const Matrix expected = oracle::group_soft_threshold(X.data().transpose() * Y.data() / 50.0, cfg.lambda);
  const Matrix B = solve_mtlasso(X, Y, cfg).coef.data();
  CHECK((B - expected).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("warm starts reach the same solutions as cold starts") {
  const auto X = random_design(30, 40, 8);
  const MultiResponse Y(gaussian(30, 3, 9));
  const auto grid = lambda_grid(lambda_max_mtl(X, Y), 8, 0.05);
  Matrix warm = Matrix::Zero(40, 3);
  for (double lambda : grid) {
    LassoConfig cfg;
    cfg.lambda = lambda;
    cfg.tol = 1e-10;
    const auto w = solve_mtlasso(X, Y, cfg, &warm);
    const auto c = solve_mtlasso(X, Y, cfg);
    warm = w.coef.data();
    CHECK(std::abs(w.objective - c.objective) <= 1e-8 * c.objective);
  }
}

TEST_CASE("unpenalized solve interpolates when p >= n and recovers OLS when p < n") {
  const auto X = random_design(30, 5, 10);
  const Vector y = gaussian(30, 1, 11);
  LassoConfig cfg;
  cfg.lambda = 0.0;
  cfg.tol = 1e-14;
  const Vector beta = solve_lasso(X, y, cfg).coef.data().col(0);
  const Vector ols = X.data().colPivHouseholderQr().solve(y);
  CHECK((beta - ols).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("nodewise solve keeps its own column at zero") {
  const auto X = random_design(25, 12, 12);
  LassoConfig cfg;
  cfg.tol = 1e-12;
  const auto r = solve_nodewise(X, 3, 0.05, cfg);
  CHECK(r.coef.data()(3, 0) == 0.0);
  const Matrix ref = oracle::fista_mtl(X.data(), X.data().col(3), 0.05, 20000, 3);
  CHECK((r.coef.data() - ref).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("max_iter exhaustion is reported with the last iterate") {
  const auto X = random_design(30, 50, 13);
  const MultiResponse Y(gaussian(30, 2, 14));
  LassoConfig cfg;
  cfg.lambda = 0.01;
  cfg.max_iter = 2;
  cfg.tol = 1e-14;
  const auto r = solve_mtlasso(X, Y, cfg);
  CHECK_FALSE(r.converged());
  CHECK(r.gap > 0.0);
  CHECK(r.iterations <= 2);
  CHECK(r.coef.p() == 50);
}

TEST_CASE("solver argument validation") {
  const auto X = random_design(10, 3, 15);
  const MultiResponse Y(gaussian(10, 1, 16));
  LassoConfig cfg;
  cfg.tol = 0.0;
  CHECK_THROWS_AS(solve_mtlasso(X, Y, cfg), InvalidArgument);
  cfg = {};
  cfg.lambda = -1.0;
  CHECK_THROWS_AS(solve_mtlasso(X, Y, cfg), InvalidArgument);
  cfg = {};
  cfg.max_iter = 0;
  CHECK_THROWS_AS(solve_mtlasso(X, Y, cfg), InvalidArgument);
  CHECK_THROWS_AS(solve_mtlasso(X, MultiResponse(gaussian(9, 1, 1)), LassoConfig{}), InvalidArgument);
}

TEST_CASE("lambda grid spans the requested range log-uniformly") {
  const auto g = lambda_grid(2.0, 5, 0.01);
  CHECK(g.front() == 2.0);
  CHECK(g.back() == doctest::Approx(0.02));
  for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k - 1] / g[k] == doctest::Approx(std::pow(100.0, 0.25)));
}

TEST_CASE("cross-validation picks small lambda for signal and large for noise") {
  const auto X = random_design(60, 30, 17);
  Matrix B = Matrix::Zero(30, 3);
  B.row(2).setConstant(2.0);
  B.row(11).setConstant(-1.5);
  B.row(20).setConstant(1.0);
  const CVConfig cv{.seed = 4};
  const auto signal = cross_validate(X, MultiResponse(X.data() * B), cv);
  const double lmax_s = lambda_max_mtl(X, MultiResponse(X.data() * B));
  CHECK(signal.path.size() == 15);
  CHECK(signal.lambda_best <= signal.path[7].lambda);
  CHECK(signal.lambda_best < lmax_s);

  const MultiResponse noise(gaussian(60, 3, 18));
  const auto null_fit = cross_validate(X, noise, cv);
  CHECK(null_fit.lambda_best >= null_fit.path[7].lambda);

  const auto again = cross_validate(X, MultiResponse(X.data() * B), cv);
  CHECK(again.lambda_best == signal.lambda_best);
}
