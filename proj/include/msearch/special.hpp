#pragma once

#include <vector>

#include "msearch/bigfloat.hpp"

namespace msearch {

/// Gamma function. Integer and half-integer arguments are evaluated exactly
/// as rationals times sqrt(pi); other arguments use MPFR. Throws
/// InvalidArgument at the poles 0, -1, -2, ...
BigFloat gamma(const BigFloat& x);
BigFloat gamma(const Rational& x);

/// Bernoulli numbers B_0..B_n (B_1 = -1/2).
std::vector<Rational> bernoulli_numbers(int n);

/// Tail sum H(s, r, a) = sum_{n >= a} (ln n)^r n^{-s} for r in {0, 1},
/// s > 1, a >= 1, by Euler-Maclaurin summation at the working precision.
BigFloat log_power_tail(const BigFloat& s, int r, long a);

/// Hurwitz zeta zeta(s, a) = sum_{n >= 0} (n + a)^{-s} for integer a >= 1.
BigFloat hurwitz_zeta(const BigFloat& s, long a);

/// ln binom(n, k) as a sum of logarithms over the falling factorial.
BigFloat log_binomial(long n, long k);

}  // namespace msearch
