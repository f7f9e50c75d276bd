#pragma once

#include <mpfr.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>

#include <gmpxx.h>

namespace msearch {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Arbitrary-precision binary floating point number backed by MPFR.
///
/// Every value carries its own precision. Results of binary operations take
/// the larger precision of the two operands; values converted from integers,
/// doubles or rationals use the calling thread's working precision (see
/// PrecisionGuard). Rounding is always to nearest.
class BigFloat {
 public:
  BigFloat();
  BigFloat(int v);  // NOLINT(google-explicit-constructor)
  BigFloat(long v);  // NOLINT(google-explicit-constructor)
  BigFloat(double v);  // NOLINT(google-explicit-constructor)
  explicit BigFloat(long double v);
  explicit BigFloat(const BigInt& v);
  explicit BigFloat(const Rational& v);
  /// Parses a decimal string ("0.25", "-1e-30"). Throws std::invalid_argument.
  explicit BigFloat(const std::string& decimal);

  BigFloat(const BigFloat& other);
  BigFloat(BigFloat&& other) noexcept;
  BigFloat& operator=(const BigFloat& other);
  BigFloat& operator=(BigFloat&& other) noexcept;
  ~BigFloat();

  /// Zero with the given precision in bits.
  static BigFloat zero(long bits);
  /// Copy of v rounded to `bits`.
  static BigFloat rounded(const BigFloat& v, long bits);

  long precision() const { return mpfr_get_prec(value_); }

  mpfr_ptr raw() { return value_; }
  mpfr_srcptr raw() const { return value_; }

  double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
  long double to_long_double() const { return mpfr_get_ld(value_, MPFR_RNDN); }
  /// Nearest integer (ties away from zero).
  BigInt to_integer() const;

  bool is_zero() const { return mpfr_zero_p(value_) != 0; }
  bool is_finite() const { return mpfr_number_p(value_) != 0; }
  int sign() const { return mpfr_sgn(value_); }

  BigFloat& operator+=(const BigFloat& rhs);
  BigFloat& operator-=(const BigFloat& rhs);
  BigFloat& operator*=(const BigFloat& rhs);
  BigFloat& operator/=(const BigFloat& rhs);
  BigFloat& operator*=(long rhs);
  BigFloat& operator/=(long rhs);

  /// this += a * b, with a single rounding.
  void add_product(const BigFloat& a, const BigFloat& b);

  BigFloat operator-() const;

  friend BigFloat operator+(BigFloat lhs, const BigFloat& rhs) { return lhs += rhs; }
  friend BigFloat operator-(BigFloat lhs, const BigFloat& rhs) { return lhs -= rhs; }
  friend BigFloat operator*(BigFloat lhs, const BigFloat& rhs) { return lhs *= rhs; }
  friend BigFloat operator/(BigFloat lhs, const BigFloat& rhs) { return lhs /= rhs; }
  friend BigFloat operator*(BigFloat lhs, long rhs) { return lhs *= rhs; }
  friend BigFloat operator*(long lhs, BigFloat rhs) { return rhs *= lhs; }
  friend BigFloat operator/(BigFloat lhs, long rhs) { return lhs /= rhs; }

  friend bool operator==(const BigFloat& a, const BigFloat& b) {
    return mpfr_equal_p(a.value_, b.value_) != 0;
  }
  friend std::partial_ordering operator<=>(const BigFloat& a,
                                           const BigFloat& b);

 private:
  mpfr_t value_;
};

/// Thread-local working precision used when numbers are created without an
/// explicit precision. Restores the previous value on destruction.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(long bits);
  ~PrecisionGuard();
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  long saved_;
};

long working_precision();

inline constexpr long kDefaultPrecisionBits = 192;

BigFloat abs(const BigFloat& x);
BigFloat sqrt(const BigFloat& x);
/// Real k-th root.
BigFloat root(const BigFloat& x, unsigned long k);
BigFloat log(const BigFloat& x);
BigFloat log1p(const BigFloat& x);
BigFloat exp(const BigFloat& x);
BigFloat pow(const BigFloat& x, const BigFloat& y);
BigFloat pow(const BigFloat& x, long k);
BigFloat gamma_raw(const BigFloat& x);
BigFloat lgamma_raw(const BigFloat& x);
BigFloat riemann_zeta(const BigFloat& s);
BigFloat ldexp(const BigFloat& x, long e);
BigFloat max(const BigFloat& a, const BigFloat& b);
BigFloat min(const BigFloat& a, const BigFloat& b);

/// Constants at the current working precision.
BigFloat const_pi();
BigFloat const_euler();
BigFloat const_log2();

/// Decimal rendering with `digits` significant digits, locale independent,
/// trailing zeros trimmed. Fixed notation for moderate exponents, otherwise
/// "d.ddde+XX".
std::string to_decimal(const BigFloat& x, int digits);
/// Significant decimal digits that a `bits`-bit mantissa carries reliably.
int decimal_digits_for_bits(long bits);

std::ostream& operator<<(std::ostream& os, const BigFloat& x);

std::string to_string(const BigInt& v);
/// "p/q", or "p" when the denominator is one.
std::string to_string(const Rational& v);
/// Exact value of a finite binary float.
Rational to_rational(const BigFloat& x);
/// Parses "3", "-2/7" or a finite decimal such as "0.25" or "1e-3" exactly.
Rational parse_rational(const std::string& text);

}  // namespace msearch
