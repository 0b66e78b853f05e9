#pragma once

#include <span>

namespace gridcast {

struct SignificanceResult {
  double t = 0.0;        // (mean_a - mean_b) / sqrt(var_a/n_a + var_b/n_b)
  double df = 0.0;       // Welch-Satterthwaite
  double p = 1.0;        // two-sided
  double cohens_d = 0.0; // (mean_b - mean_a) / pooled sd; positive when a is lower
  double mean_a = 0.0;
  double mean_b = 0.0;
};

// Welch's unequal-variance t-test with pooled-SD Cohen's d. Both inputs need
// at least 2 finite values; DegenerateVariance if both variances are 0.
SignificanceResult welch_ttest(std::span<const double> a, std::span<const double> b);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);
// P(T <= t) for Student's t with df degrees of freedom (df may be fractional).
double student_t_cdf(double t, double df);

double sample_mean(std::span<const double> v);
// n - 1 denominator; 0 for fewer than 2 values.
double sample_variance(std::span<const double> v);

}  // namespace gridcast
