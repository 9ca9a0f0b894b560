#include "desparse/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "desparse/errors.hpp"

namespace desparse::stats {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 100000;

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw Error("incomplete beta continued fraction did not converge");
}

// Stirling remainder lgamma(z) - [(z - 1/2) log z - z + log(2 pi) / 2], z >= 30.
double stirling_tail(double z) {
  const double r = 1.0 / (z * z);
  return (1.0 / 12.0 - r * (1.0 / 360.0 - r * (1.0 / 1260.0 - r / 1680.0))) / z;
}

// log B(a, b). For a large argument lgamma(big) - lgamma(small + big) is
// formed from the Stirling expansion directly, avoiding the cancellation of
// two huge lgamma values.
double log_beta(double a, double b) {
  const double small = std::min(a, b);
  const double big = std::max(a, b);
  if (big < 30.0) return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double diff = -(big - 0.5) * std::log1p(small / big) - small * std::log(small + big) + small +
                      stirling_tail(big) - stirling_tail(small + big);
  return std::lgamma(small) + diff;
}

// I_x(a, b) with y = 1 - x supplied separately so callers can avoid cancellation.
double incomplete_beta_xy(double a, double b, double x, double y) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_x = x < 0.5 ? std::log(x) : std::log1p(-y);
  const double log_y = y < 0.5 ? std::log(y) : std::log1p(-x);
  const double log_front = a * log_x + b * log_y - log_beta(a, b);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

// Complement 1 - I_x(a, b) = I_y(b, a), evaluated without forming 1 - I.
double incomplete_beta_complement_xy(double a, double b, double x, double y) {
  return incomplete_beta_xy(b, a, y, x);
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x < 0.0 || x > 1.0 || std::isnan(x)) throw InvalidArgument("incomplete beta needs x in [0, 1]");
  return incomplete_beta_xy(a, b, x, 1.0 - x);
}

double incomplete_gamma_q(double a, double x) {
  if (!(a > 0.0)) throw InvalidArgument("incomplete gamma needs a > 0");
  if (x < 0.0 || std::isnan(x)) throw InvalidArgument("incomplete gamma needs x >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double log_front = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) {
    // Series for P(a, x).
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n <= kMaxIter; ++n) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * kEps) return 1.0 - sum * std::exp(log_front);
    }
    throw Error("incomplete gamma series did not converge");
  }
  // Continued fraction for Q(a, x).
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return std::exp(log_front) * h;
  }
  throw Error("incomplete gamma continued fraction did not converge");
}

double fisher_sf(double x, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw InvalidArgument("Fisher degrees of freedom must be positive");
  if (std::isnan(x)) throw InvalidArgument("Fisher survival function at NaN");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  // P(F > x) = I_{d2 / (d2 + d1 x)}(d2 / 2, d1 / 2)
  const double denom = d2 + d1 * x;
  const double w = d2 / denom;
  const double one_minus_w = d1 * x / denom;
  return incomplete_beta_complement_xy(d1 / 2.0, d2 / 2.0, one_minus_w, w);
}

double chi2_sf(double x, double k) {
  if (!(k > 0.0)) throw InvalidArgument("chi-square degrees of freedom must be positive");
  if (std::isnan(x)) throw InvalidArgument("chi-square survival function at NaN");
  if (x <= 0.0) return 1.0;
  return incomplete_gamma_q(k / 2.0, x / 2.0);
}

}  // namespace desparse::stats
