#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "msearch/bigfloat.hpp"
#include "msearch/errors.hpp"

namespace msearch {

enum class ArithmeticMode { kExactInteger, kExactRational, kBigFloat };

std::string to_string(ArithmeticMode mode);

template <class T>
struct ModeOf;
template <>
struct ModeOf<BigInt> {
  static constexpr ArithmeticMode value = ArithmeticMode::kExactInteger;
};
template <>
struct ModeOf<Rational> {
  static constexpr ArithmeticMode value = ArithmeticMode::kExactRational;
};
template <>
struct ModeOf<BigFloat> {
  static constexpr ArithmeticMode value = ArithmeticMode::kBigFloat;
};

/// Truncated power series with coefficients of degree 0..size()-1. The
/// length is fixed at construction.
template <class T>
class Series {
 public:
  Series() = default;
  explicit Series(std::size_t length) : coeffs_(length, T(0)) {}
  explicit Series(std::vector<T> coeffs) : coeffs_(std::move(coeffs)) {}

  static constexpr ArithmeticMode mode() { return ModeOf<T>::value; }

  std::size_t size() const { return coeffs_.size(); }
  T& operator[](std::size_t i) { return coeffs_[i]; }
  const T& operator[](std::size_t i) const { return coeffs_[i]; }
  const std::vector<T>& coeffs() const { return coeffs_; }

 private:
  std::vector<T> coeffs_;
};

using AnySeries =
    std::variant<Series<BigInt>, Series<Rational>, Series<BigFloat>>;

namespace detail {

inline void fma_into(BigInt& acc, const BigInt& a, const BigInt& b) {
  mpz_addmul(acc.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
}
inline void fma_into(Rational& acc, const Rational& a, const Rational& b) {
  acc += a * b;
}
inline void fma_into(BigFloat& acc, const BigFloat& a, const BigFloat& b) {
  acc.add_product(a, b);
}

}  // namespace detail

/// n-th coefficient of a*b: sum over i+j=n of a[i]*b[j]. Entries past the end
/// of either operand count as zero.
template <class T>
T cauchy_coefficient(const std::vector<T>& a, const std::vector<T>& b,
                     std::size_t n) {
  T acc(0);
  if (a.empty() || b.empty()) return acc;
  const std::size_t lo = n >= b.size() ? n - (b.size() - 1) : 0;
  const std::size_t hi = std::min(n, a.size() - 1);
  for (std::size_t i = lo; i <= hi; ++i) detail::fma_into(acc, a[i], b[n - i]);
  return acc;
}

/// Product of two series truncated to degree N (schoolbook).
template <class T>
Series<T> convolve(const Series<T>& a, const Series<T>& b, std::size_t N) {
  Series<T> c(N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    c[n] = cauchy_coefficient(a.coeffs(), b.coeffs(), n);
  }
  return c;
}

/// Mode-checked product of type-erased series. Throws ModeError when the
/// operands use different arithmetic modes.
AnySeries convolve(const AnySeries& a, const AnySeries& b, std::size_t N);

}  // namespace msearch
