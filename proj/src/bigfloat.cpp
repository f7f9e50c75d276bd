#include "msearch/bigfloat.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace msearch {

namespace {

thread_local long tls_precision = kDefaultPrecisionBits;

long max_prec(mpfr_srcptr a, mpfr_srcptr b) {
  return std::max(mpfr_get_prec(a), mpfr_get_prec(b));
}

// Raise the precision of `x` to at least `bits`, keeping its value.
void widen(mpfr_ptr x, long bits) {
  if (mpfr_get_prec(x) < bits) mpfr_prec_round(x, bits, MPFR_RNDN);
}

}  // namespace

long working_precision() { return tls_precision; }

PrecisionGuard::PrecisionGuard(long bits) : saved_(tls_precision) {
  if (bits < MPFR_PREC_MIN || bits > 1 << 24) {
    throw std::invalid_argument("precision out of range: " +
                                std::to_string(bits));
  }
  tls_precision = bits;
}

PrecisionGuard::~PrecisionGuard() { tls_precision = saved_; }

BigFloat::BigFloat() {
  mpfr_init2(value_, tls_precision);
  mpfr_set_zero(value_, 1);
}

BigFloat::BigFloat(int v) : BigFloat(static_cast<long>(v)) {}

BigFloat::BigFloat(long v) {
  mpfr_init2(value_, tls_precision);
  mpfr_set_si(value_, v, MPFR_RNDN);
}

BigFloat::BigFloat(double v) {
  mpfr_init2(value_, tls_precision);
  mpfr_set_d(value_, v, MPFR_RNDN);
}

BigFloat::BigFloat(long double v) {
  mpfr_init2(value_, tls_precision);
  mpfr_set_ld(value_, v, MPFR_RNDN);
}

BigFloat::BigFloat(const BigInt& v) {
  mpfr_init2(value_, tls_precision);
  mpfr_set_z(value_, v.get_mpz_t(), MPFR_RNDN);
}

BigFloat::BigFloat(const Rational& v) {
  mpfr_init2(value_, tls_precision);
  mpfr_set_q(value_, v.get_mpq_t(), MPFR_RNDN);
}

BigFloat::BigFloat(const std::string& decimal) {
  mpfr_init2(value_, tls_precision);
  char* end = nullptr;
  mpfr_strtofr(value_, decimal.c_str(), &end, 10, MPFR_RNDN);
  if (end == decimal.c_str() || *end != '\0') {
    mpfr_clear(value_);
    throw std::invalid_argument("not a decimal number: '" + decimal + "'");
  }
}

BigFloat::BigFloat(const BigFloat& other) {
  mpfr_init2(value_, other.precision());
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept {
  // MPFR has no move; swap with a minimal-precision placeholder.
  mpfr_init2(value_, MPFR_PREC_MIN);
  mpfr_swap(value_, other.value_);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
  if (this != &other) {
    mpfr_set_prec(value_, other.precision());
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
  if (this != &other) mpfr_swap(value_, other.value_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(value_); }

BigFloat BigFloat::zero(long bits) {
  BigFloat z;
  mpfr_set_prec(z.value_, bits);
  mpfr_set_zero(z.value_, 1);
  return z;
}

BigFloat BigFloat::rounded(const BigFloat& v, long bits) {
  BigFloat r(v);
  mpfr_prec_round(r.value_, bits, MPFR_RNDN);
  return r;
}

BigInt BigFloat::to_integer() const {
  BigInt out;
  mpfr_get_z(out.get_mpz_t(), value_, MPFR_RNDNA);
  return out;
}

BigFloat& BigFloat::operator+=(const BigFloat& rhs) {
  widen(value_, rhs.precision());
  mpfr_add(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator-=(const BigFloat& rhs) {
  widen(value_, rhs.precision());
  mpfr_sub(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator*=(const BigFloat& rhs) {
  widen(value_, rhs.precision());
  mpfr_mul(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator/=(const BigFloat& rhs) {
  widen(value_, rhs.precision());
  mpfr_div(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator*=(long rhs) {
  mpfr_mul_si(value_, value_, rhs, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator/=(long rhs) {
  mpfr_div_si(value_, value_, rhs, MPFR_RNDN);
  return *this;
}

void BigFloat::add_product(const BigFloat& a, const BigFloat& b) {
  mpfr_fma(value_, a.value_, b.value_, value_, MPFR_RNDN);
}

BigFloat BigFloat::operator-() const {
  BigFloat r(*this);
  mpfr_neg(r.value_, r.value_, MPFR_RNDN);
  return r;
}

std::partial_ordering operator<=>(const BigFloat& a, const BigFloat& b) {
  if (mpfr_unordered_p(a.value_, b.value_)) {
    return std::partial_ordering::unordered;
  }
  const int c = mpfr_cmp(a.value_, b.value_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

namespace {

template <class Fn>
BigFloat unary(const BigFloat& x, Fn fn) {
  BigFloat r = BigFloat::zero(x.precision());
  fn(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

}  // namespace

BigFloat abs(const BigFloat& x) { return unary(x, mpfr_abs); }
BigFloat sqrt(const BigFloat& x) { return unary(x, mpfr_sqrt); }
BigFloat root(const BigFloat& x, unsigned long k) {
  BigFloat r = BigFloat::zero(x.precision());
  mpfr_rootn_ui(r.raw(), x.raw(), k, MPFR_RNDN);
  return r;
}
BigFloat log(const BigFloat& x) { return unary(x, mpfr_log); }
BigFloat log1p(const BigFloat& x) { return unary(x, mpfr_log1p); }
BigFloat exp(const BigFloat& x) { return unary(x, mpfr_exp); }
BigFloat gamma_raw(const BigFloat& x) { return unary(x, mpfr_gamma); }
BigFloat riemann_zeta(const BigFloat& s) { return unary(s, mpfr_zeta); }

BigFloat lgamma_raw(const BigFloat& x) {
  BigFloat r = BigFloat::zero(x.precision());
  int sign = 0;
  mpfr_lgamma(r.raw(), &sign, x.raw(), MPFR_RNDN);
  return r;
}

BigFloat pow(const BigFloat& x, const BigFloat& y) {
  BigFloat r = BigFloat::zero(max_prec(x.raw(), y.raw()));
  mpfr_pow(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
  return r;
}

BigFloat pow(const BigFloat& x, long k) {
  BigFloat r = BigFloat::zero(x.precision());
  mpfr_pow_si(r.raw(), x.raw(), k, MPFR_RNDN);
  return r;
}

BigFloat ldexp(const BigFloat& x, long e) {
  BigFloat r(x);
  mpfr_mul_2si(r.raw(), r.raw(), e, MPFR_RNDN);
  return r;
}

BigFloat max(const BigFloat& a, const BigFloat& b) { return a < b ? b : a; }
BigFloat min(const BigFloat& a, const BigFloat& b) { return b < a ? b : a; }

BigFloat const_pi() {
  BigFloat r;
  mpfr_const_pi(r.raw(), MPFR_RNDN);
  return r;
}

BigFloat const_euler() {
  BigFloat r;
  mpfr_const_euler(r.raw(), MPFR_RNDN);
  return r;
}

BigFloat const_log2() {
  BigFloat r;
  mpfr_const_log2(r.raw(), MPFR_RNDN);
  return r;
}

int decimal_digits_for_bits(long bits) {
  return std::max(1, static_cast<int>(std::floor(
                         static_cast<double>(bits) * 0.30102999566398120)));
}

std::string to_decimal(const BigFloat& x, int digits) {
  if (mpfr_nan_p(x.raw())) return "nan";
  if (mpfr_inf_p(x.raw())) return x.sign() > 0 ? "inf" : "-inf";
  if (x.is_zero()) return "0";
  digits = std::max(digits, 1);
  mpfr_exp_t exponent = 0;
  char* raw = mpfr_get_str(nullptr, &exponent, 10, static_cast<size_t>(digits),
                           x.raw(), MPFR_RNDN);
  std::string mant(raw);
  mpfr_free_str(raw);
  bool negative = false;
  if (!mant.empty() && mant.front() == '-') {
    negative = true;
    mant.erase(0, 1);
  }
  while (mant.size() > 1 && mant.back() == '0') mant.pop_back();
  // value = 0.mant * 10^exponent
  std::string out;
  const long e = static_cast<long>(exponent);
  const long n = static_cast<long>(mant.size());
  if (e > -6 && e <= 30) {
    if (e <= 0) {
      out = "0." + std::string(static_cast<size_t>(-e), '0') + mant;
    } else if (e >= n) {
      out = mant + std::string(static_cast<size_t>(e - n), '0');
    } else {
      out = mant.substr(0, static_cast<size_t>(e)) + "." +
            mant.substr(static_cast<size_t>(e));
    }
  } else {
    out = mant.substr(0, 1);
    if (n > 1) out += "." + mant.substr(1);
    const long sci = e - 1;
    out += (sci < 0 ? "e-" : "e+");
    out += std::to_string(sci < 0 ? -sci : sci);
  }
  return negative ? "-" + out : out;
}

std::ostream& operator<<(std::ostream& os, const BigFloat& x) {
  return os << to_decimal(x, decimal_digits_for_bits(x.precision()));
}

std::string to_string(const BigInt& v) { return v.get_str(10); }

std::string to_string(const Rational& v) {
  Rational c(v);
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str(10);
  return c.get_num().get_str(10) + "/" + c.get_den().get_str(10);
}

Rational to_rational(const BigFloat& x) {
  if (!x.is_finite()) throw std::invalid_argument("to_rational: not finite");
  Rational q;
  mpfr_get_q(q.get_mpq_t(), x.raw());
  return q;
}

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty number");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    Rational r;
    try {
      r = Rational(BigInt(text.substr(0, slash), 10), BigInt(text.substr(slash + 1), 10));
    } catch (const std::exception&) {
      throw std::invalid_argument("not a rational: '" + text + "'");
    }
    if (r.get_den() == 0) throw std::invalid_argument("zero denominator");
    r.canonicalize();
    return r;
  }
  // Decimal: [sign] digits [. digits] [e [sign] digits]
  std::string s = text;
  long exp10 = 0;
  const auto epos = s.find_first_of("eE");
  if (epos != std::string::npos) {
    try {
      size_t used = 0;
      exp10 = std::stol(s.substr(epos + 1), &used);
      if (used != s.size() - epos - 1) throw std::invalid_argument("exp");
    } catch (const std::exception&) {
      throw std::invalid_argument("not a decimal: '" + text + "'");
    }
    s = s.substr(0, epos);
  }
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s.erase(0, 1);
  }
  std::string digits;
  bool seen_point = false;
  bool seen_digit = false;
  for (char c : s) {
    if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      digits += c;
      seen_digit = true;
      if (seen_point) --exp10;
    } else {
      throw std::invalid_argument("not a decimal: '" + text + "'");
    }
  }
  if (!seen_digit) throw std::invalid_argument("not a decimal: '" + text + "'");
  BigInt num(digits, 10);
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  Rational r = exp10 >= 0 ? Rational(num * scale) : Rational(num, scale);
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

}  // namespace msearch
