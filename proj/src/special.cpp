#include "msearch/special.hpp"

#include <cmath>
#include <mutex>

#include "msearch/errors.hpp"

namespace msearch {

namespace {

// Gamma(k + 1/2) / sqrt(pi) for integer k (positive or negative).
Rational half_integer_gamma_ratio(long k) {
  Rational r(1);
  if (k >= 0) {
    for (long i = 0; i < k; ++i) r *= Rational(2 * i + 1, 2);
  } else {
    for (long i = 0; i < -k; ++i) r /= Rational(-(2 * i + 1), 2);
  }
  return r;
}

}  // namespace

BigFloat gamma(const Rational& x) {
  if (x.get_den() == 1) {
    if (x <= 0) throw InvalidArgument("gamma: pole at " + to_string(x));
    BigInt f;
    mpz_fac_ui(f.get_mpz_t(), x.get_num().get_ui() - 1);
    return BigFloat(f);
  }
  if (x.get_den() == 2) {
    // x = k + 1/2 with k = (num - 1) / 2.
    BigInt k = (x.get_num() - 1) / 2;
    return BigFloat(half_integer_gamma_ratio(k.get_si())) * sqrt(const_pi());
  }
  return gamma_raw(BigFloat(x));
}

BigFloat gamma(const BigFloat& x) {
  BigFloat twice = x * 2L;
  BigFloat rounded_twice(twice.to_integer());
  if (twice == rounded_twice && abs(twice) < BigFloat(1e15)) {
    return gamma(Rational(twice.to_integer(), 2));
  }
  return gamma_raw(x);
}

std::vector<Rational> bernoulli_numbers(int n) {
  // sum_{k=0}^{j} binom(j+1, k) B_k = 0 for j >= 1.
  std::vector<Rational> b(static_cast<std::size_t>(n) + 1);
  b[0] = 1;
  for (int j = 1; j <= n; ++j) {
    Rational acc(0);
    BigInt c(1);  // binom(j+1, k)
    for (int k = 0; k < j; ++k) {
      acc += Rational(c) * b[static_cast<std::size_t>(k)];
      c = c * (j + 1 - k) / (k + 1);
    }
    b[static_cast<std::size_t>(j)] = -acc / Rational(j + 1);
    b[static_cast<std::size_t>(j)].canonicalize();
  }
  return b;
}

namespace {

const std::vector<Rational>& cached_bernoulli() {
  static std::once_flag once;
  static std::vector<Rational> b;
  std::call_once(once, [] { b = bernoulli_numbers(160); });
  return b;
}

}  // namespace

BigFloat log_power_tail(const BigFloat& s, int r, long a) {
  if (r != 0 && r != 1) throw InvalidArgument("log_power_tail: r must be 0 or 1");
  if (!(s > BigFloat(1))) throw DivergentSeriesError("log_power_tail: needs s > 1");
  if (a < 1) throw InvalidArgument("log_power_tail: needs a >= 1");
  const long bits = std::max(s.precision(), working_precision());
  PrecisionGuard guard(bits);
  // Sum directly up to A, then Euler-Maclaurin from A with K Bernoulli terms.
  // The remainder after K terms behaves like (2K)!/(2 pi A)^{2K}.
  const long digits = decimal_digits_for_bits(bits) + 5;
  const long K = std::min<long>(75, digits / 2 + 4);
  const long A = std::max<long>(a, static_cast<long>(digits) + 10);
  BigFloat sum = BigFloat::zero(bits);
  for (long n = a; n < A; ++n) {
    BigFloat nn(n);
    BigFloat term = pow(nn, -s);
    if (r == 1) term *= log(nn);
    sum += term;
  }
  const BigFloat x(A);
  const BigFloat lx = log(x);
  const BigFloat one(1);
  const BigFloat sm1 = s - one;
  const BigFloat x_pow = pow(x, -s);
  // Integral from A to infinity and the half endpoint term.
  if (r == 0) {
    sum += x * x_pow / sm1;
    sum += x_pow / 2L;
  } else {
    sum += x * x_pow * (lx / sm1 + one / (sm1 * sm1));
    sum += x_pow * lx / 2L;
  }
  // f^{(j)}(x) = (-1)^j (s)_j x^{-s-j} for r = 0; for r = 1,
  // f^{(j)}(x) = (-1)^j x^{-s-j} [(s)_j ln x - (s)_j sum_{i<j} 1/(s+i)].
  const auto& bern = cached_bernoulli();
  BigFloat rising = one;       // (s)_j
  BigFloat harmonic = BigFloat::zero(bits);  // sum_{i<j} 1/(s+i)
  BigFloat xp = x_pow;        // x^{-s-j}
  BigFloat factorial = one;   // (2k)!
  long j = 0;
  for (long k = 1; k <= K; ++k) {
    const long target = 2 * k - 1;
    while (j < target) {
      harmonic += one / (s + BigFloat(j));
      rising *= s + BigFloat(j);
      xp /= x;
      ++j;
    }
    factorial *= (2 * k - 1) * 2 * k;
    // (-1)^j with j odd.
    BigFloat deriv = -xp * (r == 0 ? rising : rising * (lx - harmonic));
    sum -= BigFloat(bern[static_cast<std::size_t>(2 * k)]) / factorial * deriv;
  }
  return sum;
}

BigFloat hurwitz_zeta(const BigFloat& s, long a) { return log_power_tail(s, 0, a); }

BigFloat log_binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) throw InvalidArgument("log_binomial: need 0 <= k <= n");
  BigFloat acc = BigFloat::zero(working_precision());
  for (long i = 0; i < k; ++i) acc += log(BigFloat(n - i));
  for (long i = 2; i <= k; ++i) acc -= log(BigFloat(i));
  return acc;
}

}  // namespace msearch
