#include "msearch/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <string>

#include "msearch/errors.hpp"

namespace msearch {

namespace {

constexpr long double kQuarterPi = 0.785398163397448309615660845819875721L;
constexpr int kMeshLevels = 64;

long double ipow(long double x, int k) {
  long double r = 1.0L;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// Integral over theta in [0, pi/4] of 2 sin^{2p-2} cos^{2q-2} B^{k3}; the
// other half of J_{p,q,k3} is this function with p and q exchanged.
long double half_integral(int p, int q, int k3, long double tolerance,
                          long double& error) {
  auto f = [p, q, k3](long double t) -> long double {
    const long double s = std::sin(t);
    const long double c = std::cos(t);
    const long double x = s * s;
    // x ln x + (1 - x) ln(1 - x), with ln(1-x) = 2 ln cos(theta).
    const long double b = x * 2.0L * std::log(s) + c * c * std::log1p(-x);
    long double v = 2.0L;
    if (p >= 1) {
      v *= ipow(s, 2 * p - 2);
    } else {
      v /= s * s;
    }
    if (q >= 1) {
      v *= ipow(c, 2 * q - 2);
    } else {
      v /= c * c;
    }
    return v * ipow(b, k3);
  };
  using GK = boost::math::quadrature::gauss_kronrod<long double, 21>;
  long double total = 0.0L;
  error = 0.0L;
  long double hi = kQuarterPi;
  for (int level = 0; level <= kMeshLevels; ++level) {
    const long double lo = level == kMeshLevels ? 0.0L : hi / 2.0L;
    // Integrate over u in [0, 1] so the error estimate scales with the cell.
    const long double width = hi - lo;
    auto g = [&f, lo, width](long double u) { return width * f(lo + width * u); };
    long double err = 0.0L;
    total += GK::integrate(g, 0.0L, 1.0L, 25, tolerance, &err);
    error += err;
    hi = lo;
  }
  return total;
}

}  // namespace

QuadratureResult J_integral(int k1, int k2, int k3, double tolerance) {
  if (k1 < 0 || k2 < 0 || k3 < 0) {
    throw InvalidArgument("J_integral: indices must be nonnegative");
  }
  if (k3 == 0 && (k1 == 0 || k2 == 0)) {
    throw InvalidArgument("J_integral(" + std::to_string(k1) + "," +
                          std::to_string(k2) + "," + std::to_string(k3) +
                          "): endpoint exponent -3/2 is not integrable "
                          "without the bracket factor");
  }
  long double e1 = 0.0L;
  long double e2 = 0.0L;
  const long double lo = half_integral(k1, k2, k3, tolerance, e1);
  const long double hi = half_integral(k2, k1, k3, tolerance, e2);
  const long double value = lo + hi;
  const long double err = e1 + e2;
  if (!std::isfinite(static_cast<double>(value)) ||
      err > 1e-9L * std::max(1.0L, std::fabs(value))) {
    throw NumericalError("J_integral did not converge");
  }
  return {BigFloat(value), BigFloat(err)};
}

}  // namespace msearch
