#include "msearch/bigfloat.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace msearch {
namespace {

TEST(BigFloat, ArithmeticAtWorkingPrecision) {
  PrecisionGuard guard(128);
  BigFloat third = BigFloat(1) / BigFloat(3);
  EXPECT_EQ(third.precision(), 128);
  EXPECT_NEAR((third * 3L).to_double(), 1.0, 1e-30);
  BigFloat acc(0.5);
  acc.add_product(BigFloat(2), BigFloat(0.25));
  EXPECT_EQ(acc.to_double(), 1.0);
}

TEST(BigFloat, PrecisionGuardRestores) {
  const long before = working_precision();
  {
    PrecisionGuard guard(300);
    EXPECT_EQ(working_precision(), 300);
  }
  EXPECT_EQ(working_precision(), before);
  EXPECT_THROW(PrecisionGuard(0), std::invalid_argument);
}

TEST(BigFloat, MixedPrecisionTakesMax) {
  BigFloat a = BigFloat::rounded(BigFloat(1), 64);
  BigFloat b = BigFloat::rounded(BigFloat(1), 256);
  EXPECT_EQ((a + b).precision(), 256);
}

TEST(BigFloat, DecimalRendering) {
  EXPECT_EQ(to_decimal(BigFloat(0.25), 30), "0.25");
  EXPECT_EQ(to_decimal(BigFloat(-2), 30), "-2");
  EXPECT_EQ(to_decimal(BigFloat(1500), 30), "1500");
  EXPECT_EQ(to_decimal(BigFloat(1e-10), 5), "1e-10");
  EXPECT_EQ(to_decimal(BigFloat(0), 5), "0");
  PrecisionGuard guard(200);
  EXPECT_EQ(to_decimal(const_pi(), 20), "3.1415926535897932385");
}

TEST(BigFloat, ParseRational) {
  EXPECT_EQ(parse_rational("0.25"), Rational(1, 4));
  EXPECT_EQ(parse_rational("-2/6"), Rational(-1, 3));
  EXPECT_EQ(parse_rational("3"), Rational(3));
  EXPECT_EQ(parse_rational("1e-3"), Rational(1, 1000));
  EXPECT_EQ(parse_rational("2.5e2"), Rational(250));
  EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_EQ(to_string(Rational(3, 6)), "1/2");
}

TEST(BigFloat, SpecialFunctions) {
  PrecisionGuard guard(128);
  EXPECT_NEAR(gamma_raw(BigFloat(0.5)).to_double(), std::sqrt(M_PI), 1e-15);
  EXPECT_NEAR(riemann_zeta(BigFloat(2)).to_double(), M_PI * M_PI / 6, 1e-15);
  EXPECT_NEAR(log1p(BigFloat(1e-20)).to_double(), 1e-20, 1e-35);
}

}  // namespace
}  // namespace msearch
