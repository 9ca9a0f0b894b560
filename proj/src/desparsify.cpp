#include "desparse/desparsify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "desparse/parallel.hpp"
#include "desparse/special.hpp"

namespace desparse {

namespace {

double median(std::vector<double> values) {
  const std::size_t m = values.size();
  std::sort(values.begin(), values.end());
  if (m % 2 == 1) return values[m / 2];
  return 0.5 * (values[m / 2 - 1] + values[m / 2]);
}

double pearson(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  const Vector ca = a.array() - a.mean();
  const Vector cb = b.array() - b.mean();
  const double denom = std::sqrt(ca.squaredNorm() * cb.squaredNorm());
  if (denom == 0.0) return 0.0;
  return ca.dot(cb) / denom;
}

}  // namespace

Index ScoreVectors::degenerate_count() const {
  return static_cast<Index>(std::count(degenerate.begin(), degenerate.end(), true));
}

ScoreVectors nodewise_scores(const DesignMatrix& X, const NodewiseConfig& cfg) {
  if (!(cfg.c > 0.0 && cfg.c <= 1.0)) throw InvalidArgument("nodewise c must lie in (0, 1]");
  const Index n = X.n();
  const Index p = X.p();
  const double nd = static_cast<double>(n);
  const Matrix sigma = X.covariance();

  ScoreVectors S;
  S.z.resize(n, p);
  S.omega_diag = Vector::Zero(p);
  S.zx_dot = Vector::Zero(p);
  S.alpha = Vector::Zero(p);
  S.degenerate.assign(static_cast<std::size_t>(p), false);
  std::vector<int> iterations(static_cast<std::size_t>(p), 0);
  std::vector<char> unconverged(static_cast<std::size_t>(p), 0);
  std::vector<char> degenerate(static_cast<std::size_t>(p), 0);

  parallel_for(p, cfg.threads, [&](Index j) {
    double alpha_max = 0.0;
    bool duplicated = false;
    for (Index k = 0; k < p; ++k) {
      if (k == j) continue;
      alpha_max = std::max(alpha_max, std::abs(sigma(k, j)));
      // Exact collinearity with another column leaves nothing to test.
      if (std::abs(sigma(k, j)) >= (1.0 - 1e-10) * std::sqrt(sigma(j, j) * sigma(k, k))) duplicated = true;
    }
    const double alpha = cfg.c * alpha_max;
    S.alpha(j) = alpha;
    if (p == 1 || alpha_max == 0.0) {
      S.z.col(j) = X.data().col(j);
    } else {
      const SolveResult fit = solve_nodewise(X, j, alpha, cfg.solver);
      S.z.col(j) = X.data().col(j) - X.data() * fit.coef.data().col(0);
      iterations[j] = fit.iterations;
      unconverged[j] = fit.converged() ? 0 : 1;
    }
    const double zx = S.z.col(j).dot(X.data().col(j));
    S.zx_dot(j) = zx;
    if (duplicated || std::abs(zx) < 1e-12 * nd) {
      if (!cfg.exclude_degenerate) throw DegenerateScore(j);
      degenerate[j] = 1;
      return;
    }
    S.omega_diag(j) = nd * S.z.col(j).squaredNorm() / (zx * zx);
  });
  for (Index j = 0; j < p; ++j) S.degenerate[j] = degenerate[j] != 0;
  S.max_iterations = *std::max_element(iterations.begin(), iterations.end());
  S.unconverged = std::count(unconverged.begin(), unconverged.end(), 1);
  return S;
}

double omega_entry(const ScoreVectors& S, Index j, Index k) {
  const double nd = static_cast<double>(S.n());
  return nd * S.z.col(j).dot(S.z.col(k)) / (std::abs(S.zx_dot(j)) * std::abs(S.zx_dot(k)));
}

Matrix debias(const DesignMatrix& X, const MultiResponse& Y, const CoefMatrix& B_mtl, const ScoreVectors& S) {
  if (X.n() != Y.n() || S.n() != X.n()) throw InvalidArgument("row counts differ");
  if (B_mtl.p() != X.p() || S.p() != X.p() || B_mtl.T() != Y.T()) throw InvalidArgument("coefficient shape mismatch");
  const Matrix residual = Y.data() - X.data() * B_mtl.data();
  Matrix out = S.z.transpose() * residual;
  for (Index j = 0; j < X.p(); ++j) {
    if (S.degenerate[j]) {
      out.row(j).setZero();
      continue;
    }
    out.row(j) = out.row(j) / S.zx_dot(j) + B_mtl.data().row(j);
  }
  return out;
}

NoiseEstimate estimate_noise(const Matrix& residuals, Index s_hat) {
  const Index n = residuals.rows();
  const Index T = residuals.cols();
  if (n < 1 || T < 1) throw InvalidArgument("empty residual matrix");
  if (s_hat < 0) throw InvalidArgument("negative support size");
  if (s_hat >= n) throw SupportTooLarge(s_hat, n);
  if ((residuals.array() == 0.0).all()) throw ZeroResidual();

  const double dof = static_cast<double>(n - s_hat);
  std::vector<double> variances(static_cast<std::size_t>(T));
  for (Index t = 0; t < T; ++t) variances[t] = residuals.col(t).squaredNorm() / dof;
  const double sigma2 = median(variances);
  if (!(sigma2 > 0.0)) throw ZeroResidual();

  NoiseEstimate est;
  double rho = 0.0;
  if (T >= 2) {
    std::vector<double> lags(static_cast<std::size_t>(T - 1));
    for (Index t = 0; t + 1 < T; ++t) lags[t] = pearson(residuals.col(t), residuals.col(t + 1));
    est.rho_raw = median(lags);
    const double upper = 1.0 - 1e-6;
    rho = std::clamp(est.rho_raw, 0.0, upper);
    if (rho >= upper) rho = std::nextafter(upper, 0.0);
    est.rho_clipped = rho != est.rho_raw;
  }
  est.model = ToeplitzAR1(sigma2, rho, T);
  return est;
}

TestStatistics test_statistics(const Matrix& beta_debiased, const ScoreVectors& S, const ToeplitzAR1& M_hat,
                               Index s_hat) {
  const Index p = beta_debiased.rows();
  const Index T = beta_debiased.cols();
  const Index n = S.n();
  if (S.p() != p) throw InvalidArgument("score vectors and coefficients disagree on p");
  if (n - s_hat < 1) throw SupportTooLarge(s_hat, n);
  const Vector quad = toeplitz_quadforms(M_hat, beta_debiased);
  TestStatistics out;
  out.stat = Vector::Zero(p);
  out.pval = Vector::Ones(p);
  const double Td = static_cast<double>(T);
  const double dof = static_cast<double>(n - s_hat);
  for (Index j = 0; j < p; ++j) {
    if (S.degenerate[j]) continue;
    out.stat(j) = static_cast<double>(n) * quad(j) / (Td * S.omega_diag(j));
    out.pval(j) = stats::fisher_sf(out.stat(j), Td, dof);
  }
  return out;
}

Vector bonferroni(const Vector& pval, Index m) {
  return (pval.array() * static_cast<double>(m)).min(1.0).matrix();
}

InferenceResult d_mtlasso(const DesignMatrix& X, const MultiResponse& Y, const DMtlConfig& cfg) {
  NodewiseConfig nodewise = cfg.nodewise;
  nodewise.threads = cfg.threads;
  const ScoreVectors S = nodewise_scores(X, nodewise);
  return d_mtlasso(X, Y, S, cfg);
}

InferenceResult d_mtlasso(const DesignMatrix& X, const MultiResponse& Y, const ScoreVectors& S,
                          const DMtlConfig& cfg) {
  if (!X.standardized()) throw InvalidArgument("d_mtlasso expects a standardized design");
  if (X.n() != Y.n()) throw InvalidArgument("design and response row counts differ");
  InferenceResult out;
  auto& diag = out.diagnostics;

  if (cfg.lambda) {
    out.lambda = *cfg.lambda;
  } else {
    const CVResult cv = cross_validate(X, Y, cfg.cv, cfg.solver);
    out.lambda = cv.lambda_best;
    diag.cv_path = cv.path;
  }
  LassoConfig solver = cfg.solver;
  solver.lambda = out.lambda;
  const SolveResult mtl = solve_mtlasso(X, Y, solver);
  diag.mtl_iterations = mtl.iterations;
  diag.mtl_gap = mtl.gap;
  diag.mtl_converged = mtl.converged();
  if (!mtl.converged()) diag.warnings.push_back("multi-task Lasso reached max_iter");

  const Matrix residuals = Y.data() - X.data() * mtl.coef.data();
  out.s_hat = mtl.coef.support_size();
  const NoiseEstimate noise = estimate_noise(residuals, out.s_hat);
  out.noise = noise.model;
  if (noise.rho_clipped) diag.warnings.push_back("lag-1 residual correlation clipped to [0, 1)");

  diag.nodewise_unconverged = S.unconverged;
  diag.nodewise_max_iterations = S.max_iterations;
  if (S.unconverged > 0) diag.warnings.push_back("nodewise Lasso reached max_iter");

  out.beta_debiased = debias(X, Y, mtl.coef, S);
  TestStatistics tests = test_statistics(out.beta_debiased, S, out.noise, out.s_hat);
  out.stat = std::move(tests.stat);
  out.pval = std::move(tests.pval);
  out.n_tests = X.p();
  out.pval_corrected = bonferroni(out.pval, out.n_tests);
  out.excluded = S.degenerate;
  return out;
}

}  // namespace desparse
