#include "desparse/solvers.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>

#include "desparse/rng.hpp"

namespace desparse {

namespace {

constexpr Index kNoExclusion = -1;

// Block coordinate descent for (1/2n)||Y - XB||^2 + lambda ||B||_{2,1} with an
// optional column held at zero. Full sweeps alternate with sweeps restricted to
// the active rows; the duality gap is checked after every full sweep.
class BlockCoordinateDescent {
 public:
  BlockCoordinateDescent(const Matrix& X, const Matrix& Y, Index excluded, double lambda)
      : X_(X), Y_(Y), excluded_(excluded), lambda_(lambda), n_(static_cast<double>(X.rows())) {
    col_sq_.resize(X.cols());
    for (Index j = 0; j < X.cols(); ++j) col_sq_(j) = X.col(j).squaredNorm() / n_;
    y_half_sq_ = Y.squaredNorm() / (2.0 * n_);
  }

  SolveResult solve(Matrix B, const LassoConfig& cfg) {
    if (cfg.max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
    if (!(cfg.tol > 0.0)) throw InvalidArgument("tol must be positive");
    if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) throw InvalidArgument("lambda must be finite and >= 0");
    if (excluded_ != kNoExclusion) B.row(excluded_).setZero();
    B_ = std::move(B);
    R_ = Y_ - X_ * B_;

    SolveResult out;
    if (y_half_sq_ == 0.0) {
      B_.setZero();
      out.coef = CoefMatrix(B_);
      return out;
    }
    const double threshold = cfg.tol * y_half_sq_;
    std::vector<Index> all(static_cast<std::size_t>(X_.cols()));
    std::iota(all.begin(), all.end(), Index{0});
    if (excluded_ != kNoExclusion) all.erase(all.begin() + excluded_);

    // Working sets: the current nonzero rows plus the strongest KKT
    // violators, at least as many as there are nonzero rows. A plain full
    // sweep is the fallback whenever the set would not change.
    int iters = 0;
    double gap = convergence_measure();
    bool converged = gap <= threshold;
    double stop = 0.5 * threshold;
    std::vector<Index> working;
    while (!converged && iters < cfg.max_iter) {
      std::vector<Index> next;
      std::vector<std::pair<double, Index>> violators;
      for (Index j : all) {
        if (B_.row(j).squaredNorm() > 0.0) {
          next.push_back(j);
        } else if (score_(j) > lambda_) {
          violators.emplace_back(score_(j), j);
        }
      }
      std::sort(violators.begin(), violators.end(),
                [](const auto& u, const auto& v) { return u.first > v.first || (u.first == v.first && u.second < v.second); });
      const std::size_t extra = std::min(violators.size(), std::max<std::size_t>(10, next.size()));
      for (std::size_t k = 0; k < extra; ++k) next.push_back(violators[k].second);
      std::sort(next.begin(), next.end());

      if (next.empty() || next == working) {
        sweep(all);
        ++iters;
        stop *= 0.1;
      } else {
        working = std::move(next);
        iters += solve_active(working, cfg.max_iter - iters, stop);
      }
      gap = convergence_measure();
      converged = gap <= threshold;
    }
    if (!converged) gap = convergence_measure();

    out.objective = primal();
    out.coef = CoefMatrix(std::move(B_));
    out.gap = gap;
    out.iterations = iters;
    out.status = (converged || gap <= threshold) ? SolveStatus::converged : SolveStatus::max_iter_exceeded;
    return out;
  }

 private:
  double primal() const { return R_.squaredNorm() / (2.0 * n_) + lambda_ * B_.rowwise().norm().sum(); }

  // Duality gap for lambda > 0; KKT residual max_j ||X_j^T R|| / n scaled to the
  // objective for the unpenalized case, where the dual point is undefined.
  // Also refreshes score_ = ||X_j^T R|| / n.
  double convergence_measure() {
    const Matrix corr = X_.transpose() * R_;
    score_ = corr.rowwise().norm() / n_;
    if (excluded_ != kNoExclusion) score_(excluded_) = 0.0;
    const double dual_norm = score_.maxCoeff() * n_;
    if (lambda_ == 0.0) return dual_norm / n_ * std::sqrt(2.0 * y_half_sq_);
    const double scale = std::max(n_ * lambda_, dual_norm);
    const double dual =
        y_half_sq_ - 0.5 * n_ * lambda_ * lambda_ * (R_ / scale - Y_ / (n_ * lambda_)).squaredNorm();
    return std::max(0.0, primal() - dual);
  }

  double sweep(const std::vector<Index>& coords) {
#ifndef NDEBUG
    const double before = primal();
#endif
    const Index T = B_.cols();
    double change = 0.0;
    for (Index j : coords) {
      const double lj = col_sq_(j);
      if (lj == 0.0) continue;
      old_ = B_.row(j);
      grad_.noalias() = X_.col(j).transpose() * R_;
      grad_ = grad_ / n_ + lj * old_;
      const double norm = grad_.norm();
      if (norm > lambda_) {
        updated_ = grad_ * ((1.0 - lambda_ / norm) / lj);
      } else {
        updated_.setZero(T);
      }
      delta_ = updated_ - old_;
      const double delta_sq = delta_.squaredNorm();
      if (delta_sq == 0.0) continue;
      R_.noalias() -= X_.col(j) * delta_;
      B_.row(j) = updated_;
      change += 0.5 * lj * delta_sq;
    }
#ifndef NDEBUG
    const double after = primal();
    assert(after <= before + 1e-10 * std::max(1.0, std::abs(before)));
#endif
    return change;
  }

  // Solves the problem restricted to the active rows until its duality gap is
  // below `stop`, working on G = X_A^T X_A / n with H = X_A^T R / n kept
  // current. Every kDepth sweeps an Anderson extrapolation of the recent
  // iterates is tried and kept only when it lowers the objective. Returns the
  // number of sweeps.
  int solve_active(const std::vector<Index>& active, int budget, double stop) {
    constexpr Index kDepth = 5;
    const Index m = static_cast<Index>(active.size());
    const Index T = B_.cols();
    Matrix XA(X_.rows(), m);
    Matrix BA(m, T);
    for (Index a = 0; a < m; ++a) {
      XA.col(a) = X_.col(active[a]);
      BA.row(a) = B_.row(active[a]);
    }
    const Matrix G = XA.transpose() * XA / n_;
    const Matrix C = XA.transpose() * Y_ / n_;
    Matrix H = C - G * BA;
    // Objective up to the constant ||Y||^2 / 2n.
    auto reduced_objective = [&](const Matrix& B) {
      return -(B.cwiseProduct(C)).sum() + 0.5 * (B.cwiseProduct(G * B)).sum() + lambda_ * B.rowwise().norm().sum();
    };

    const double y_sq = 2.0 * n_ * y_half_sq_;
    auto restricted_gap = [&]() {
      const double bc = (BA.cwiseProduct(C)).sum();
      const double r_sq = std::max(0.0, y_sq - 2.0 * n_ * bc + n_ * (BA.cwiseProduct(G * BA)).sum());
      const double primal = r_sq / (2.0 * n_) + lambda_ * BA.rowwise().norm().sum();
      if (lambda_ == 0.0) return (m > 0 ? H.rowwise().norm().maxCoeff() : 0.0) * std::sqrt(y_sq / n_);
      const double scale = std::max(n_ * lambda_, n_ * (m > 0 ? H.rowwise().norm().maxCoeff() : 0.0));
      const double ry = y_sq - n_ * bc;
      const double nl = n_ * lambda_;
      const double dist = r_sq / (scale * scale) - 2.0 * ry / (scale * nl) + y_sq / (nl * nl);
      return primal - (y_half_sq_ - 0.5 * n_ * lambda_ * lambda_ * std::max(0.0, dist));
    };

    std::vector<Matrix> history;
    int sweeps = 0;
    while (sweeps < budget) {
#ifndef NDEBUG
      const double before = reduced_objective(BA);
#endif
      double change = 0.0;
      for (Index a = 0; a < m; ++a) {
        const double lj = G(a, a);
        if (lj == 0.0) continue;
        old_ = BA.row(a);
        grad_ = H.row(a) + lj * old_;
        const double norm = grad_.norm();
        if (norm > lambda_) {
          updated_ = grad_ * ((1.0 - lambda_ / norm) / lj);
        } else {
          updated_.setZero(T);
        }
        delta_ = updated_ - old_;
        const double delta_sq = delta_.squaredNorm();
        if (delta_sq == 0.0) continue;
        H.noalias() -= G.col(a) * delta_;
        BA.row(a) = updated_;
        change += 0.5 * lj * delta_sq;
      }
      ++sweeps;
#ifndef NDEBUG
      const double after = reduced_objective(BA);
      assert(after <= before + 1e-10 * std::max(1.0, std::abs(before)));
#endif
      if (change == 0.0 || restricted_gap() <= stop) break;

      history.push_back(BA);
      if (static_cast<Index>(history.size()) <= kDepth) continue;
      Matrix U(m * T, kDepth);
      for (Index k = 0; k < kDepth; ++k) U.col(k) = (history[k + 1] - history[k]).reshaped();
      const Vector z = (U.transpose() * U).ldlt().solve(Vector::Ones(kDepth));
      const double total = z.sum();
      if (z.allFinite() && total != 0.0) {
        Matrix candidate = Matrix::Zero(m, T);
        for (Index k = 0; k < kDepth; ++k) candidate += (z(k) / total) * history[k + 1];
        if (reduced_objective(candidate) < reduced_objective(BA)) {
          BA = std::move(candidate);
          H = C - G * BA;
        }
      }
      history.clear();
    }

    R_ = Y_;
    for (Index a = 0; a < m; ++a) {
      B_.row(active[a]) = BA.row(a);
      R_.noalias() -= XA.col(a) * BA.row(a);
    }
    return sweeps;
  }

  const Matrix& X_;
  const Matrix& Y_;
  Index excluded_;
  double lambda_;
  double n_;
  double y_half_sq_ = 0.0;
  Vector col_sq_;
  Vector score_;
  Matrix B_;
  Matrix R_;
  Eigen::RowVectorXd old_, grad_, updated_, delta_;
};

void check_shapes(const DesignMatrix& X, const MultiResponse& Y) {
  if (X.n() != Y.n()) throw InvalidArgument("design and response row counts differ");
}

}  // namespace

double lambda_max_mtl(const DesignMatrix& X, const MultiResponse& Y) {
  check_shapes(X, Y);
  const Matrix corr = X.data().transpose() * Y.data();
  return corr.rowwise().norm().maxCoeff() / static_cast<double>(X.n());
}

double mtl_objective(const DesignMatrix& X, const MultiResponse& Y, const Matrix& B, double lambda) {
  check_shapes(X, Y);
  const double n = static_cast<double>(X.n());
  return (Y.data() - X.data() * B).squaredNorm() / (2.0 * n) + lambda * B.rowwise().norm().sum();
}

double mtl_duality_gap(const DesignMatrix& X, const MultiResponse& Y, const Matrix& B, double lambda) {
  check_shapes(X, Y);
  if (!(lambda > 0.0)) throw InvalidArgument("duality gap needs lambda > 0");
  const double n = static_cast<double>(X.n());
  const Matrix R = Y.data() - X.data() * B;
  const double dual_norm = (X.data().transpose() * R).rowwise().norm().maxCoeff();
  const double scale = std::max(n * lambda, dual_norm);
  const double primal = R.squaredNorm() / (2.0 * n) + lambda * B.rowwise().norm().sum();
  const double dual = Y.data().squaredNorm() / (2.0 * n) -
                      0.5 * n * lambda * lambda * (R / scale - Y.data() / (n * lambda)).squaredNorm();
  return primal - dual;
}

SolveResult solve_mtlasso(const DesignMatrix& X, const MultiResponse& Y, const LassoConfig& cfg,
                          const Matrix* warm_start) {
  check_shapes(X, Y);
  Matrix B0 = Matrix::Zero(X.p(), Y.T());
  if (warm_start != nullptr) {
    if (warm_start->rows() != X.p() || warm_start->cols() != Y.T()) throw InvalidArgument("warm start has wrong shape");
    B0 = *warm_start;
  }
  BlockCoordinateDescent solver(X.data(), Y.data(), kNoExclusion, cfg.lambda);
  return solver.solve(std::move(B0), cfg);
}

SolveResult solve_lasso(const DesignMatrix& X, const Vector& y, const LassoConfig& cfg) {
  if (y.size() != X.n()) throw InvalidArgument("response length differs from design rows");
  const Matrix Y = y;
  BlockCoordinateDescent solver(X.data(), Y, kNoExclusion, cfg.lambda);
  return solver.solve(Matrix::Zero(X.p(), 1), cfg);
}

SolveResult solve_nodewise(const DesignMatrix& X, Index j, double alpha, const LassoConfig& cfg) {
  if (j < 0 || j >= X.p()) throw InvalidArgument("nodewise column out of range");
  const Matrix y = X.data().col(j);
  BlockCoordinateDescent solver(X.data(), y, j, alpha);
  return solver.solve(Matrix::Zero(X.p(), 1), cfg);
}

std::vector<double> lambda_grid(double lambda_max, int n_lambdas, double lambda_min_ratio) {
  if (n_lambdas < 1) throw InvalidArgument("n_lambdas must be at least 1");
  if (!(lambda_min_ratio > 0.0 && lambda_min_ratio <= 1.0)) throw InvalidArgument("lambda_min_ratio must be in (0, 1]");
  std::vector<double> grid(static_cast<std::size_t>(n_lambdas));
  for (int k = 0; k < n_lambdas; ++k) {
    const double frac = n_lambdas == 1 ? 0.0 : static_cast<double>(k) / (n_lambdas - 1);
    grid[k] = lambda_max * std::pow(lambda_min_ratio, frac);
  }
  return grid;
}

CVResult cross_validate(const DesignMatrix& X, const MultiResponse& Y, const CVConfig& cv,
                        const LassoConfig& solver) {
  check_shapes(X, Y);
  if (cv.n_folds < 2) throw InvalidArgument("n_folds must be at least 2");
  const Index n = X.n();
  if (n < cv.n_folds) throw InvalidArgument("fewer rows than folds");

  CVResult result;
  const double lmax = lambda_max_mtl(X, Y);
  if (lmax == 0.0) return result;
  const auto grid = lambda_grid(lmax, cv.n_lambdas, cv.lambda_min_ratio);

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(cv.seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) fold[order[i]] = static_cast<int>(i % cv.n_folds);

  std::vector<double> error(grid.size(), 0.0);
  for (int k = 0; k < cv.n_folds; ++k) {
    std::vector<Index> train, test;
    for (Index i = 0; i < n; ++i) (fold[i] == k ? test : train).push_back(i);
    const DesignMatrix X_train = X.select_rows(train);
    const MultiResponse Y_train = Y.select_rows(train);
    const DesignMatrix X_test = X.select_rows(test);
    const MultiResponse Y_test = Y.select_rows(test);
    Matrix B = Matrix::Zero(X.p(), Y.T());
    for (std::size_t l = 0; l < grid.size(); ++l) {
      LassoConfig cfg = solver;
      cfg.lambda = grid[l];
      B = solve_mtlasso(X_train, Y_train, cfg, &B).coef.data();
      const double mse = (Y_test.data() - X_test.data() * B).squaredNorm() /
                         static_cast<double>(Y_test.data().size());
      error[l] += mse / cv.n_folds;
    }
  }
  std::size_t best = 0;
  for (std::size_t l = 0; l < grid.size(); ++l) {
    result.path.push_back({grid[l], error[l]});
    if (error[l] < error[best]) best = l;
  }
  result.lambda_best = grid[best];
  return result;
}

}  // namespace desparse
