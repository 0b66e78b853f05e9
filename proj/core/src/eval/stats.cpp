#include "gridcast/eval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gridcast/error.hpp"

namespace gridcast {

double sample_mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

double sample_variance(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / double(v.size() - 1);
}

namespace {

// Continued fraction for I_x(a, b) (modified Lentz), valid for x < (a+1)/(a+b+2).
double beta_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < eps) return h;
  }
  fail(ErrorCode::NonConvergence, "incomplete beta continued fraction did not converge");
}

// Remainder of Stirling's series: lgamma(x) - ((x - 0.5) ln x - x + 0.5 ln 2pi), x >= 15.
double stirling_remainder(double x) {
  const double inv = 1.0 / x, inv2 = inv * inv;
  return inv * (1.0 / 12 - inv2 * (1.0 / 360 - inv2 * (1.0 / 1260 - inv2 * (1.0 / 1680 - inv2 * (1.0 / 1188)))));
}

// ln B(a, b). Splitting off the larger argument keeps the large lgamma
// terms from cancelling in floating point.
double log_beta(double a, double b) {
  const double small = std::min(a, b), large = std::max(a, b);
  if (large < 15.0) return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  // lgamma(large) - lgamma(large + small) via Stirling's series.
  const double ratio = -(large - 0.5) * std::log1p(small / large) - small * std::log(large + small) + small +
                       stirling_remainder(large) - stirling_remainder(large + small);
  return std::lgamma(small) + ratio;
}

}  // namespace

namespace {

// I_x(a, b) with ln x and ln(1 - x) supplied by the caller, who can often
// form them without the rounding of x itself.
double incomplete_beta_logs(double a, double b, double x, double log_x, double log_1mx) {
  const double front = std::exp(a * log_x + b * log_1mx - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
  return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) fail(ErrorCode::InvalidArgument, "incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) fail(ErrorCode::InvalidArgument, "incomplete beta needs x in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  return incomplete_beta_logs(a, b, x, std::log(x), std::log1p(-x));
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) fail(ErrorCode::InvalidArgument, "degrees of freedom must be > 0");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  if (t == 0.0) return 0.5;
  const double t2 = t * t;
  // x = df / (df + t^2); its logarithms are formed directly.
  const double tail = 0.5 * incomplete_beta_logs(df / 2.0, 0.5, df / (df + t2), -std::log1p(t2 / df),
                                                 std::log(t2) - std::log(df + t2));
  return t > 0 ? 1.0 - tail : tail;
}

SignificanceResult welch_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) fail(ErrorCode::InvalidArgument, "welch_ttest needs at least 2 values per group");
  for (auto v : {a, b}) {
    if (!std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); })) {
      fail(ErrorCode::InvalidArgument, "welch_ttest inputs must be finite");
    }
  }
  const double na = double(a.size()), nb = double(b.size());
  const double ma = sample_mean(a), mb = sample_mean(b);
  const double va = sample_variance(a), vb = sample_variance(b);
  if (va == 0.0 && vb == 0.0) fail(ErrorCode::DegenerateVariance, "both groups have zero variance");
  const double sa = va / na, sb = vb / nb;
  SignificanceResult r;
  r.mean_a = ma;
  r.mean_b = mb;
  r.t = (ma - mb) / std::sqrt(sa + sb);
  r.df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  r.p = std::clamp(2.0 * student_t_cdf(-std::abs(r.t), r.df), 0.0, 1.0);
  const double pooled = std::sqrt(((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0));
  r.cohens_d = (mb - ma) / pooled;
  return r;
}

}  // namespace gridcast
