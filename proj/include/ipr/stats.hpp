#pragma once

#include <optional>
#include <span>
#include <vector>

namespace ipr::stats {

/// Throws Error(TooFewSamples) for an empty sample.
double mean(std::span<const double> sample);

/// Sample standard deviation (n - 1 denominator). Needs n >= 2.
double stddev(std::span<const double> sample);

struct TTestResult {
  double t = 0.0;
  int df = 0;
  double p = 1.0;  // two-sided
};

/// Student's two-sample t-test with pooled variance, df = na + nb - 2.
/// Throws Error(TooFewSamples) if either sample has fewer than 2 values and
/// Error(ZeroVariance) when the pooled variance is zero.
TTestResult pooled_t_test(std::span<const double> a, std::span<const double> b);

/// Two-sided tail probability P(|T| >= |t|) for Student's t with df degrees
/// of freedom.
double student_t_two_sided_p(double t, double df);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Spearman's rho as the Pearson correlation of average ranks. Empty when
/// either side has no rank variation or sizes differ / n < 2.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

/// Nearest-rank percentile: the ceil(p/100 * n)-th smallest value (p in
/// (0, 100]; p = 0 gives the minimum). Throws Error(TooFewSamples) when empty.
double percentile_nearest_rank(std::span<const double> values, double p);

}  // namespace ipr::stats
