#include "msearch/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "msearch/errors.hpp"

namespace msearch {

namespace {

struct Central {
  double mean;
  double m2;  // divisor n
  double m3;
  double m4;
};

// Central moments of a sample given power sums of d = x - shift.
Central from_sums(double n, long double s1, long double s2, long double s3, long double s4) {
  const long double mu = s1 / n;
  const long double e2 = s2 / n;
  const long double e3 = s3 / n;
  const long double e4 = s4 / n;
  const long double m2 = e2 - mu * mu;
  const long double m3 = e3 - 3 * mu * e2 + 2 * mu * mu * mu;
  const long double m4 = e4 - 4 * mu * e3 + 6 * mu * mu * e2 - 3 * mu * mu * mu * mu;
  return {static_cast<double>(mu), static_cast<double>(std::max(m2, 0.0L)), static_cast<double>(m3),
          static_cast<double>(m4)};
}

double skew_of(const Central& c) { return c.m2 > 0 ? c.m3 / std::pow(c.m2, 1.5) : 0.0; }
double kurt_of(const Central& c) { return c.m2 > 0 ? c.m4 / (c.m2 * c.m2) : 0.0; }

double jackknife_se(const std::vector<double>& theta) {
  const double n = static_cast<double>(theta.size());
  long double mean = 0;
  for (double t : theta) mean += t;
  mean /= n;
  long double ss = 0;
  for (double t : theta) ss += (t - mean) * (t - mean);
  return std::sqrt(static_cast<double>((n - 1) / n * ss));
}

}  // namespace

SampleMoments sample_moments(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) throw InvalidArgument("sample_moments needs at least two values");
  long double sum = 0;
  for (double v : values) sum += v;
  const double shift = static_cast<double>(sum / static_cast<long double>(n));
  long double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  for (double v : values) {
    const long double d = v - shift;
    s1 += d;
    s2 += d * d;
    s3 += d * d * d;
    s4 += d * d * d * d;
  }
  const double nd = static_cast<double>(n);
  const Central full = from_sums(nd, s1, s2, s3, s4);
  SampleMoments out;
  out.count = n;
  out.mean = shift + full.mean;
  out.variance = full.m2 * nd / (nd - 1);
  out.skewness = skew_of(full);
  out.kurtosis = kurt_of(full);

  std::vector<double> var_i(n), skew_i(n), kurt_i(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long double d = values[i] - shift;
    const Central c = from_sums(nd - 1, s1 - d, s2 - d * d, s3 - d * d * d, s4 - d * d * d * d);
    var_i[i] = c.m2 * (nd - 1) / (nd - 2 > 0 ? nd - 2 : 1);
    skew_i[i] = skew_of(c);
    kurt_i[i] = kurt_of(c);
  }
  out.se_mean = std::sqrt(out.variance / nd);
  out.se_variance = jackknife_se(var_i);
  out.se_skewness = jackknife_se(skew_i);
  out.se_kurtosis = jackknife_se(kurt_i);
  return out;
}

Histogram make_histogram(const std::vector<double>& values, int bins) {
  if (bins < 1) throw InvalidArgument("histogram needs at least one bin");
  Histogram h;
  if (values.empty()) return h;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) {
    h.edges = {lo, hi};
    h.counts = {static_cast<long>(values.size())};
    return h;
  }
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) h.edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / bins;
  h.edges.back() = hi;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    auto idx = static_cast<long>((v - lo) / (hi - lo) * bins);
    idx = std::clamp(idx, 0L, static_cast<long>(bins) - 1);
    ++h.counts[static_cast<std::size_t>(idx)];
  }
  return h;
}

ChiSquareResult chi_square_gof(const std::vector<long>& observed, const std::vector<double>& probabilities) {
  if (observed.size() != probabilities.size() || observed.empty()) {
    throw InvalidArgument("chi_square_gof: size mismatch");
  }
  long total = 0;
  for (long c : observed) total += c;
  ChiSquareResult r;
  int cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = probabilities[i] * static_cast<double>(total);
    if (probabilities[i] <= 0) {
      if (observed[i] != 0) {
        r.statistic = INFINITY;
        r.p_value = 0;
        r.degrees_of_freedom = static_cast<int>(observed.size()) - 1;
        return r;
      }
      continue;
    }
    const double d = static_cast<double>(observed[i]) - e;
    r.statistic += d * d / e;
    ++cells;
  }
  r.degrees_of_freedom = cells - 1;
  if (r.degrees_of_freedom < 1) return r;
  const boost::math::chi_squared_distribution<double> dist(r.degrees_of_freedom);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("log_log_slope needs two or more points");
  const double k = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace msearch
