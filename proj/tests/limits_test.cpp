#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "msearch/errors.hpp"
#include "msearch/limits.hpp"
#include "msearch/moments.hpp"
#include "msearch/special.hpp"
#include "msearch/toll.hpp"

using namespace msearch;

namespace {

// Midpoint rule on [0, 1/2] and [1/2, 1], each graded toward its outer
// endpoint by x = t^4 / 2 (distance from the endpoint), 5e6 cells per half.
double J_oracle(int k1, int k2, int k3) {
  auto f = [&](long double x, long double y) {  // y = 1 - x, both given exactly
    const long double bracket = x * std::log(x) + y * std::log(y);
    long double v = std::sqrt(x * y) / (x * x * y * y);
    for (int i = 0; i < k1; ++i) v *= x;
    for (int i = 0; i < k2; ++i) v *= y;
    for (int i = 0; i < k3; ++i) v *= bracket;
    return v;
  };
  const long cells = 5'000'000;
  long double total = 0;
  for (int side = 0; side < 2; ++side) {
    long double sum = 0;
    for (long i = 0; i < cells; ++i) {
      const long double t = (i + 0.5L) / cells;
      const long double d = 0.5L * t * t * t * t;  // distance from the endpoint
      const long double w = 2.0L * t * t * t / cells;
      sum += side == 0 ? f(d, 1 - d) * w : f(1 - d, d) * w;
    }
    total += sum;
  }
  return static_cast<double>(total);
}

double to_d(const BigFloat& x) { return x.to_double(); }

}  // namespace

TEST(JIntegral, BetaValues) {
  EXPECT_NEAR(to_d(J_integral(1, 1, 0).value), M_PI, 1e-13);
  EXPECT_NEAR(to_d(J_integral(2, 2, 0).value), M_PI / 8, 1e-13);
  EXPECT_NEAR(to_d(J_integral(3, 1, 0).value), 3 * M_PI / 8, 1e-13);
}

TEST(JIntegral, GradedMeshOracle) {
  for (auto [k1, k2, k3] : {std::array<int, 3>{1, 0, 1}, {0, 0, 2}}) {
    const double oracle = J_oracle(k1, k2, k3);
    EXPECT_NEAR(to_d(J_integral(k1, k2, k3).value), oracle, 1e-6) << k1 << k2 << k3;
  }
}

TEST(JIntegral, Symmetry) {
  for (auto [k1, k2, k3] : {std::array<int, 3>{2, 0, 1}, {3, 1, 2}, {4, 0, 5}, {2, 5, 0}}) {
    const double a = to_d(J_integral(k1, k2, k3).value);
    const double b = to_d(J_integral(k2, k1, k3).value);
    EXPECT_NEAR(a, b, 1e-14 * std::max(1.0, std::fabs(a)));
  }
}

TEST(JIntegral, RejectsNonIntegrable) {
  EXPECT_THROW(J_integral(0, 2, 0), InvalidArgument);
  EXPECT_THROW(J_integral(3, 0, 0), InvalidArgument);
}

TEST(YAlpha, AlphaOneValues) {
  const auto seq = moments_Y_alpha(1, 6);
  PrecisionGuard guard(192);
  EXPECT_EQ(seq.moments[0], BigFloat(1));
  EXPECT_LT(abs(seq.moments[1] - sqrt(const_pi() / BigFloat(2))), BigFloat(1e-50));
  EXPECT_LT(abs(seq.moments[2] - BigFloat(Rational(5, 3))), BigFloat(1e-50));
}

TEST(YAlpha, Positivity) {
  for (const Rational& a : {Rational(3, 4), Rational(1), Rational(2)}) {
    const auto seq = moments_Y_alpha(a, 10);
    for (int s = 1; s <= 10; ++s) EXPECT_GT(seq.moments[static_cast<std::size_t>(s)], BigFloat(0));
  }
}

TEST(YAlpha, RejectsHalf) {
  EXPECT_THROW(moments_Y_alpha(Rational(1, 2), 4), InvalidArgument);
  EXPECT_THROW(moments_Y_alpha(Rational(-1), 4), InvalidArgument);
}

TEST(YAlpha, DCoefficientsMapToM) {
  for (int m : {2, 3, 5}) {
    const SingularData sd = expansion_coefficients(m, 192);
    for (const Rational& a : {Rational(3, 4), Rational(1), Rational(5, 2)}) {
      const auto D = D_coefficients(a, 8, sd);
      const auto M = moments_Y_alpha(a, 8);
      PrecisionGuard guard(208);
      const Rational ap = a + Rational(1, 2);
      for (int s = 1; s <= 8; ++s) {
        const BigFloat mapped = pow(sd.sigma_m, static_cast<long>(s)) * D[static_cast<std::size_t>(s)] *
                                BigFloat(2) * sqrt(const_pi()) /
                                (-sd.a1 * gamma(Rational(s * ap - Rational(1, 2))));
        const BigFloat& ms = M.moments[static_cast<std::size_t>(s)];
        EXPECT_LT(abs(mapped - ms), ldexp(abs(ms), -170)) << m << " " << s;
      }
    }
  }
}

TEST(YHalf, LowMoments) {
  const auto seq = moments_Y_half(6);
  EXPECT_EQ(seq.moments[0], BigFloat(1));
  EXPECT_TRUE(seq.moments[1].is_zero());
  const double m2 = J_oracle(0, 0, 2) / (4 * M_PI * M_PI);
  EXPECT_GT(seq.moments[2], BigFloat(0));
  EXPECT_NEAR(to_d(seq.moments[2]), m2, 1e-9);
  EXPECT_FALSE(seq.j_integrals.empty());
  EXPECT_LT(seq.quadrature_error, BigFloat(1e-12));
  for (const auto& [k, r] : seq.j_integrals) EXPECT_LE(k[0], k[1]);
}

TEST(ShapeNormal, ClosedFormMatchesRecurrence) {
  for (int m : {2, 3, 4}) {
    const auto c = shape_C_coefficients(m, 8);
    for (int s = 1; s <= 8; ++s) {
      const BigFloat& cf = c.closed_form[static_cast<std::size_t>(s)];
      EXPECT_LT(abs(c.recurrence[static_cast<std::size_t>(s)] - cf), ldexp(abs(cf), -170));
    }
  }
}

TEST(NormalLimits, GaussianRatios) {
  for (LimitKind kind : {LimitKind::kShapeNormal, LimitKind::kSpaceNormal, LimitKind::kLeavesNormal}) {
    for (int m : {3, 4}) {
      const auto seq = normal_limit_moments(kind, m, 8);
      PrecisionGuard guard(192);
      EXPECT_LT(seq.max_disagreement, BigFloat(1e-40));
      EXPECT_GT(seq.sigma2, BigFloat(0));
      EXPECT_LT(abs(seq.moments[2] - seq.sigma2), ldexp(seq.sigma2, -160));
      const BigFloat k = seq.moments[4] / (seq.moments[2] * seq.moments[2]);
      EXPECT_LT(abs(k - BigFloat(3)), BigFloat(1e-40));
      for (int s = 1; s <= 7; s += 2) EXPECT_LT(abs(seq.moments[static_cast<std::size_t>(s)]), BigFloat(1e-40));
    }
  }
}

TEST(NormalLimits, SpaceB1AndB3) {
  const auto seq = normal_limit_moments(LimitKind::kSpaceNormal, 3, 6);
  const SingularData sd = expansion_coefficients(3, 192);
  PrecisionGuard guard(192);
  EXPECT_LT(abs(seq.recurrence[1] + sd.a0 / BigFloat(2)), BigFloat(1e-50));
  EXPECT_LT(abs(seq.recurrence[3]), BigFloat(1e-45));
  EXPECT_LT(abs(seq.recurrence[5]), BigFloat(1e-45));
}

TEST(NormalLimits, LeavesB1Zero) {
  const auto B = leaves_B_coefficients(3, 5, 192, LeavesSign::kGaussian);
  EXPECT_TRUE(B[1].is_zero());
}

TEST(NormalLimits, LeavesSignAgainstExactMoments) {
  // Standardized fourth central moment of the leaves count, m = 2, n = 1500.
  const std::size_t n = 1500;
  const auto mt = compute_moments(leaves_toll(2), 4, n, MomentMode::Float(192));
  PrecisionGuard guard(192);
  const BigFloat v = central_moment(mt, 2, n);
  const double kurt = to_d(central_moment(mt, 4, n) / (v * v));
  const SingularData sd = expansion_coefficients(2, 192);
  for (LeavesSign sign : {LeavesSign::kGaussian, LeavesSign::kPrinted}) {
    const auto B = leaves_B_coefficients(2, 4, 192, sign);
    auto lim = [&](int s) {
      return BigFloat(2) * sqrt(const_pi()) * B[static_cast<std::size_t>(s)] /
             (-sd.a1 * gamma(Rational(s - 1, 2)));
    };
    const double predicted = to_d(lim(4) / (lim(2) * lim(2)));
    if (sign == LeavesSign::kGaussian) {
      EXPECT_NEAR(predicted, 3.0, 1e-12);
      EXPECT_NEAR(kurt, predicted, 0.02);
    } else {
      EXPECT_NEAR(predicted, -3.0, 1e-12);
      EXPECT_GT(std::fabs(kurt - predicted), 5.0);
    }
  }
  EXPECT_THROW(normal_limit_moments(LimitKind::kLeavesNormal, 2, 4, 192, LeavesSign::kPrinted),
               NumericalError);
}

TEST(LimitLaw, Parse) {
  EXPECT_EQ(LimitLaw::parse("yalpha:3/2", 2).key(), "yalpha-a3_2");
  EXPECT_EQ(LimitLaw::parse("yhalf", 5).key(), "yhalf");
  EXPECT_EQ(LimitLaw::parse("space", 3).key(), "space-m3");
  EXPECT_THROW(LimitLaw::parse("yalpha:1/2", 2), InvalidArgument);
  EXPECT_THROW(LimitLaw::parse("normal", 2), InvalidArgument);
}

TEST(LimitCache, RoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "msearch-limits-test";
  std::filesystem::remove_all(dir);
  const LimitLaw law = LimitLaw::parse("leaves", 3);
  const auto first = cached_limit_moments(law, 6, 128, dir.string());
  EXPECT_TRUE(std::filesystem::exists(limits_cache_path(dir.string(), law, 6, 128)));
  const auto second = cached_limit_moments(law, 6, 128, dir.string());
  EXPECT_EQ(limit_moments_json(first), limit_moments_json(second));
  std::filesystem::remove_all(dir);
}
