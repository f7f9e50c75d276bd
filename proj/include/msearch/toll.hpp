#pragma once

#include <string>
#include <vector>

#include "msearch/bigfloat.hpp"

namespace msearch {

enum class TollKind { kPower, kShape, kSpace, kLeaves, kCustom };

/// Rule for custom tolls past the end of their value table.
enum class TailRule { kRepeatLast, kZero };

/// Toll sequence b_n (n >= m-1) and initial values x_0..x_{m-2} of an
/// additive functional on m-ary search trees.
struct TollSpec {
  int m = 2;
  TollKind kind = TollKind::kSpace;
  /// Exponent of the power toll n^alpha.
  Rational alpha = 0;
  /// Custom tolls: values[i] = b_{m-1+i}.
  std::vector<Rational> values;
  TailRule tail = TailRule::kRepeatLast;
  /// x_0..x_{m-2}.
  std::vector<Rational> initial;

  /// Whether every b_n is rational (so exact modes can represent the toll).
  bool is_rational() const;
  /// b_n for n >= m-1. Throws ModeError when b_n is irrational.
  Rational b_exact(long n) const;
  /// b_n at the working precision.
  BigFloat b_float(long n) const;
  double b_double(long n) const;
  /// Whether b_n = 0 for all large n.
  bool has_finite_support() const;

  std::string name() const;
};

TollSpec power_toll(int m, const Rational& alpha);
TollSpec shape_toll(int m);
TollSpec space_toll(int m);
TollSpec leaves_toll(int m);
TollSpec custom_toll(int m, std::vector<Rational> values, TailRule tail,
                     std::vector<Rational> initial);

/// Parses "power:ALPHA", "shape", "space", "leaves" or
/// "custom:b_{m-1},b_m,...[;tail=last|zero][;init=x_0,...,x_{m-2}]".
TollSpec parse_toll(const std::string& text, int m);

/// Same toll with initial values x_j - c (j + 1); the functional becomes
/// X_n - c (n + 1).
TollSpec centered_spec(const TollSpec& toll, const Rational& c);
/// Centering by a binary floating-point value, taken exactly.
TollSpec centered_spec(const TollSpec& toll, const BigFloat& c);

}  // namespace msearch
