#pragma once

#include <cstddef>
#include <vector>

namespace msearch {

/// Sample moments with jackknife standard errors. Skewness and kurtosis are
/// the standardized third and fourth central moments (kurtosis 3 for a
/// normal law), computed with divisor n. They are 0 when the sample has no
/// spread.
struct SampleMoments {
  std::size_t count = 0;
  double mean = 0;
  /// Unbiased (divisor n - 1).
  double variance = 0;
  double skewness = 0;
  double kurtosis = 0;
  double se_mean = 0;
  double se_variance = 0;
  double se_skewness = 0;
  double se_kurtosis = 0;
};

/// Requires at least two values.
SampleMoments sample_moments(const std::vector<double>& values);

struct Histogram {
  /// bins + 1 edges; the last bin is closed on the right.
  std::vector<double> edges;
  std::vector<long> counts;
};

/// Equal-width bins between the sample minimum and maximum. A sample with no
/// spread gets a single bin [v, v].
Histogram make_histogram(const std::vector<double>& values, int bins);

struct ChiSquareResult {
  double statistic = 0;
  int degrees_of_freedom = 0;
  double p_value = 1;
};

/// Pearson goodness of fit of observed counts against cell probabilities
/// (which must sum to 1). Cells with zero probability must have zero counts.
ChiSquareResult chi_square_gof(const std::vector<long>& observed,
                               const std::vector<double>& probabilities);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace msearch
