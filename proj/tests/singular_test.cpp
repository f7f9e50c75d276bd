#include "msearch/singular.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "msearch/errors.hpp"

namespace msearch {
namespace {

double d(const BigFloat& x) { return x.to_double(); }

TEST(Singular, BinaryClosedForms) {
  const SingularData sd = expansion_coefficients(2, 128);
  EXPECT_NEAR(d(sd.rho), 0.25, 1e-30);
  EXPECT_NEAR(d(sd.a0), 2.0, 1e-30);
  EXPECT_NEAR(d(sd.a1), -2.0, 1e-30);
  EXPECT_NEAR(d(sd.a2), 2.0, 1e-30);
  EXPECT_NEAR(d(sd.alpha_star), 1.0, 1e-30);
  EXPECT_NEAR(d(sd.sigma_m), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(d(sd.c0), 0.0, 0.0);
  EXPECT_LE(sd.bracket_lo, sd.rho);
  EXPECT_GE(sd.bracket_hi, sd.rho);
}

TEST(Singular, TernaryRootFromQuadratic) {
  // z^2 + z = 2 / (3 sqrt 3)
  PrecisionGuard guard(256);
  const BigFloat rho = dominant_singularity(3, 200);
  const BigFloat c = BigFloat(2) / (sqrt(BigFloat(3)) * 3L);
  const BigFloat ref = (sqrt(BigFloat(1) + c * 4L) - BigFloat(1)) / 2L;
  EXPECT_LT(abs(rho - ref).to_double(), 1e-58);
  EXPECT_NEAR(rho.to_double(), 0.29680, 1e-5);
}

TEST(Singular, InvariantsAcrossM) {
  for (int m = 2; m <= 10; ++m) {
    const SingularData sd = expansion_coefficients(m, 128);
    PrecisionGuard guard(sd.rho.precision());
    EXPECT_GT(sd.rho, BigFloat(0));
    EXPECT_LT(sd.rho, BigFloat(1));
    EXPECT_LT(abs(sd.residual), ldexp(BigFloat(1), -120));
    EXPECT_LT(abs(sd.sigma_m - sd.sigma_m_alt).to_double(), 1e-35) << m;
    EXPECT_LT(abs(sd.w_rho - sd.a0).to_double(), 1e-35) << m;
    EXPECT_LT(sd.a1, BigFloat(0));
    const BigFloat lhs = sd.a0 * (sd.a0 - sd.a2) / (sd.a1 * sd.a1);
    EXPECT_NEAR(lhs.to_double(), (m - 2) / 6.0, 1e-30);
  }
}

TEST(Singular, TauAsymptoticsBinary) {
  const SingularData sd = expansion_coefficients(2, 128);
  const auto table = tree_counts_float(2, 2048, sd.rho.precision());
  const TauAsymptotics fit = fit_tau_asymptotics(sd, table, 2048);
  // Catalan: tau_n 4^{-n} n^{3/2} = (1 - 9/(8n) + 145/(128 n^2) - ...) / sqrt(pi).
  const double sp = std::sqrt(M_PI);
  EXPECT_NEAR(d(fit.K0), 1 / sp, 1e-30);
  EXPECT_NEAR(d(fit.K1), -9.0 / 8.0 / sp, 1e-8);
  EXPECT_NEAR(d(fit.K2), 145.0 / 128.0 / sp, 1e-4);
  EXPECT_NEAR(d(fit.a3), -2.0, 1e-7);
}

TEST(Singular, LeadingTermAtLargeN) {
  for (int m : {2, 3}) {
    const SingularData sd = expansion_coefficients(m, 64);
    const auto table = tree_counts_float(m, 2000, 96);
    PrecisionGuard guard(96);
    const BigFloat lead = -sd.a1 / (sqrt(const_pi()) * 2L);
    double prev = 1.0;
    for (std::size_t n : {250u, 500u, 1000u, 2000u}) {
      const BigFloat nn(static_cast<long>(n));
      const BigFloat v = table.counts[n] * pow(sd.rho, static_cast<long>(n)) * nn * sqrt(nn);
      const double rel = std::fabs(d(v / lead) - 1.0);
      EXPECT_LT(rel, prev);
      prev = rel;
    }
    EXPECT_LT(prev, 2e-3);
  }
}

TEST(Singular, SpaceSeriesMatchesClosedForm) {
  for (int m : {2, 3, 4}) {
    const SingularData sd = expansion_coefficients(m, 128);
    auto table = tree_counts_float(m, 512, sd.rho.precision());
    const SeriesConstant c =
        toll_series_constant(space_toll(m), table, sd, BigFloat(1e-9), 512, 8192);
    PrecisionGuard guard(sd.rho.precision());
    // sum_{n>=m-1} rho^n tau_n = a0 - sum_{j<=m-2} rho^j; plus x-terms.
    const BigFloat closed = sd.a0 - BigFloat(1);
    const BigFloat err = abs(c.value - closed);
    EXPECT_LT(err, c.tail_error_bound) << m;
    EXPECT_LT(err.to_double(), 1e-9) << m;
  }
}

TEST(Singular, LeavesSeriesIsFinite) {
  const SingularData sd = expansion_coefficients(2, 128);
  auto table = tree_counts_float(2, 256, sd.rho.precision());
  const SeriesConstant c = toll_series_constant(leaves_toll(2), table, sd, BigFloat(1e-30));
  EXPECT_NEAR(d(c.value), 0.25, 1e-30);
  const SingularData sd3 = expansion_coefficients(3, 128);
  auto table3 = tree_counts_float(3, 256, sd3.rho.precision());
  const SeriesConstant c3 = toll_series_constant(leaves_toll(3), table3, sd3, BigFloat(1e-30));
  PrecisionGuard guard(sd3.rho.precision());
  // (m-1) / m^{m/(m-1)}
  EXPECT_NEAR(d(c3.value), 2.0 / std::pow(3.0, 1.5), 1e-15);
}

TEST(Singular, TailBoundIsSound) {
  for (int m : {2, 3, 4}) {
    const SingularData sd = expansion_coefficients(m, 128);
    for (const TollSpec& toll :
         {power_toll(m, Rational(1, 4)), power_toll(m, Rational(1, 2)), shape_toll(m),
          space_toll(m), leaves_toll(m)}) {
      auto table = tree_counts_float(m, 2048, sd.rho.precision());
      const SeriesConstant c = toll_series_constant(toll, table, sd, BigFloat(1.0), 1024, 1024);
      const BigFloat doubled = toll_series_estimate(toll, table, sd, 2048);
      PrecisionGuard guard(sd.rho.precision());
      EXPECT_LE(abs(doubled - c.value), c.tail_error_bound)
          << "m=" << m << " toll=" << toll.name();
    }
  }
}

TEST(Singular, QuarterPowerAgainstLongerCutoff) {
  const SingularData sd = expansion_coefficients(3, 128);
  auto table = tree_counts_float(3, 4096, sd.rho.precision());
  const TollSpec toll = power_toll(3, Rational(1, 4));
  const SeriesConstant c = toll_series_constant(toll, table, sd, BigFloat(1.0), 1024, 1024);
  const BigFloat far = toll_series_estimate(toll, table, sd, 4096);
  PrecisionGuard guard(sd.rho.precision());
  EXPECT_LE(abs(far - c.value), c.tail_error_bound * 2L);
}

TEST(Singular, DivergentPowerRejected) {
  const SingularData sd = expansion_coefficients(2, 64);
  auto table = tree_counts_float(2, 256, 96);
  EXPECT_THROW(toll_series_constant(power_toll(2, 1), table, sd, BigFloat(1e-6)),
               DivergentSeriesError);
}

TEST(Singular, TheoremConstantsBinary) {
  const TheoremConstants leaves = theorem_constants(leaves_toll(2), 128);
  EXPECT_NEAR(d(*leaves.d1), 0.25, 1e-30);
  EXPECT_NEAR(d(*leaves.sigma2), 1.0 / 16.0, 1e-30);
  EXPECT_NEAR(d(*leaves.sigma2_printed), 5.0 / 16.0, 1e-30);
  // Generic slope from the series constant agrees with rho/alpha*.
  PrecisionGuard guard(leaves.sd.rho.precision());
  const BigFloat slope = leaves.sd.a0 * 2L /
                         (leaves.sd.a1 * leaves.sd.a1) * *leaves.C;
  EXPECT_NEAR(d(slope), 0.25, 1e-30);

  const TheoremConstants space = theorem_constants(space_toll(2), 128);
  EXPECT_NEAR(d(*space.d1), 1.0, 1e-30);
  EXPECT_NEAR(d(*space.sigma2), 0.0, 1e-30);

  const TheoremConstants shape = theorem_constants(shape_toll(2), 128);
  EXPECT_NEAR(d(*shape.sigma2), 8 * (1 - std::log(2.0)), 1e-14);
  EXPECT_NEAR(d(*shape.sigma2), 2.45482, 1e-5);
}

TEST(Singular, SpaceSlopeMatchesGenericFormula) {
  for (int m : {3, 4, 5}) {
    const TheoremConstants tc = theorem_constants(space_toll(m), 128);
    PrecisionGuard guard(tc.sd.rho.precision());
    const BigFloat generic = tc.sd.a0 * 2L /
                             (BigFloat(static_cast<long>(m - 1)) * tc.sd.a1 * tc.sd.a1) * *tc.C;
    EXPECT_LT(abs(generic - *tc.d1).to_double(), 1e-8) << m;
    EXPECT_GT(*tc.B2, BigFloat(0));
  }
}

TEST(Singular, SpaceVarianceConstantPositive) {
  for (int m = 3; m <= 10; ++m) {
    const TheoremConstants tc = theorem_constants(space_toll(m), 96, {1e-3, 256, 256});
    EXPECT_GT(*tc.B2, BigFloat(0)) << m;
  }
}

TEST(Singular, TernaryReferenceValues) {
  EXPECT_NEAR(d(*theorem_constants(leaves_toll(3), 96).d1), 0.24152683647858, 1e-13);
  EXPECT_NEAR(d(*theorem_constants(space_toll(3), 96).d1), 0.59312371793539, 1e-13);
  EXPECT_NEAR(d(*theorem_constants(space_toll(3), 96).sigma2), 0.023776, 1e-6);
}

TEST(Singular, HalfPowerConstants) {
  const TheoremConstants tc = theorem_constants(power_toll(2, Rational(1, 2)), 128);
  ASSERT_TRUE(tc.d0 && tc.eta_half && tc.mean_lead);
  // n ln n coefficient for m=2 is 1/sqrt(pi).
  EXPECT_NEAR(d(*tc.mean_lead), 1 / std::sqrt(M_PI), 1e-15);
  EXPECT_LT(d(tc.tail_error_bound), 1e-9);
}

}  // namespace
}  // namespace msearch
