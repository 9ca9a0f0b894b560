#pragma once

// Survival functions for the reference distributions of the test statistics.

namespace desparse::stats {

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// Regularized upper incomplete gamma Q(a, x).
double incomplete_gamma_q(double a, double x);

/// P(F > x) for F ~ Fisher(d1, d2).
double fisher_sf(double x, double d1, double d2);

/// P(Q > x) for Q ~ chi^2_k.
double chi2_sf(double x, double k);

}  // namespace desparse::stats
