#include "msearch/enumeration.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "msearch/errors.hpp"

namespace msearch {
namespace {

std::vector<BigInt> ints(std::initializer_list<long> v) {
  std::vector<BigInt> out;
  for (long x : v) out.emplace_back(x);
  return out;
}

TEST(TreeCounts, SmallTables) {
  EXPECT_EQ(tree_counts(2, 4).counts, ints({1, 1, 2, 5, 14}));
  EXPECT_EQ(tree_counts(3, 4).counts, ints({1, 1, 1, 3, 6}));
  EXPECT_EQ(tree_counts(5, 3).counts, ints({1, 1, 1, 1}));
}

TEST(TreeCounts, MatchesCatalanForBinary) {
  const auto t = tree_counts(2, 30);
  for (unsigned long n = 0; n <= 30; ++n) {
    BigInt c;
    mpz_bin_uiui(c.get_mpz_t(), 2 * n, n);
    EXPECT_EQ(t.counts[n] * (n + 1), c) << n;
  }
}

TEST(TreeCounts, MatchesBruteForce) {
  for (int m : {2, 3, 4}) {
    const auto t = tree_counts(m, 8);
    for (int n = 0; n <= 8; ++n) {
      EXPECT_EQ(t.counts[static_cast<std::size_t>(n)], brute_force_count(m, n))
          << "m=" << m << " n=" << n;
    }
  }
}

TEST(TreeCounts, BruteForceExamples) {
  EXPECT_EQ(brute_force_count(2, 3), 5);
  EXPECT_EQ(brute_force_count(3, 2), 1);
  EXPECT_EQ(brute_force_count(3, 4), 6);
  EXPECT_THROW(brute_force_count(2, 10), InvalidArgument);
}

TEST(TreeCounts, PowerTableConsistency) {
  for (int m : {2, 3, 4, 5}) {
    const auto t = tree_counts(m, 40);
    for (std::size_t n = 0; n <= 40; ++n) {
      // Independent recomputation of [z^n] tau^k by repeated products.
      Series<BigInt> p(std::vector<BigInt>(41, BigInt(0)));
      p[0] = 1;
      for (int k = 1; k <= m; ++k) {
        p = convolve(p, t.series(), 40);
        EXPECT_EQ(t.power(k)[n], p[n]);
      }
      if (n + 1 >= static_cast<std::size_t>(m)) {
        EXPECT_EQ(t.counts[n], t.power(m)[n - static_cast<std::size_t>(m - 1)]);
      }
      if (n > 0) EXPECT_GE(t.counts[n], t.counts[n - 1]);
      EXPECT_GT(t.counts[n], 0);
    }
  }
}

TEST(TreeCounts, SplitLawNormalizes) {
  // Sum over compositions of n-(m-1) into m parts, by explicit enumeration.
  const int m = 3;
  const auto t = tree_counts(m, 12);
  for (std::size_t n = 2; n <= 12; ++n) {
    const std::size_t r = n - 2;
    BigInt total = 0;
    for (std::size_t a = 0; a <= r; ++a) {
      for (std::size_t b = 0; a + b <= r; ++b) {
        total += t.counts[a] * t.counts[b] * t.counts[r - a - b];
      }
    }
    EXPECT_EQ(total, t.counts[n]);
  }
}

TEST(TreeCounts, ExtendMatchesFresh) {
  auto t = tree_counts(3, 10);
  extend(t, 25);
  const auto fresh = tree_counts(3, 25);
  EXPECT_EQ(t.counts, fresh.counts);
  EXPECT_EQ(t.conv, fresh.conv);
}

TEST(TreeCounts, FloatTableTracksExact) {
  const auto exact = tree_counts(3, 200);
  const auto approx = tree_counts_float(3, 200, 128);
  PrecisionGuard guard(128);
  for (std::size_t n = 0; n <= 200; n += 17) {
    BigFloat rel = abs(approx.counts[n] / BigFloat(exact.counts[n]) - BigFloat(1));
    EXPECT_LT(rel.to_double(), 1e-30) << n;
  }
}

TEST(TreeCounts, RejectsBadArguments) {
  EXPECT_THROW(tree_counts(1, 5), InvalidArgument);
  const auto saved = table_memory_budget();
  set_table_memory_budget(1 << 20);
  EXPECT_THROW(tree_counts(2, 100000), ResourceError);
  set_table_memory_budget(saved);
}

TEST(Series, Convolve) {
  Series<BigInt> a(ints({1, 1}));
  EXPECT_EQ(convolve(a, a, 2).coeffs(), ints({1, 2, 1}));
  Series<BigInt> one(ints({1, 0, 0}));
  Series<BigInt> s(ints({3, 4, 5, 6}));
  EXPECT_EQ(convolve(one, s, 2).coeffs(), ints({3, 4, 5}));
  const auto tau = tree_counts(2, 3).series();
  EXPECT_EQ(convolve(tau, tau, 3).coeffs(), ints({1, 2, 5, 14}));
}

TEST(Series, ModeMismatch) {
  AnySeries a = Series<BigInt>(ints({1, 1}));
  AnySeries b = Series<Rational>(std::vector<Rational>{Rational(1), Rational(1, 2)});
  EXPECT_THROW(convolve(a, b, 2), ModeError);
  AnySeries c = convolve(a, a, 2);
  EXPECT_EQ(std::get<Series<BigInt>>(c).coeffs(), ints({1, 2, 1}));
}

TEST(TreeCounts, CacheRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "msearch_enum_test";
  std::filesystem::remove_all(dir);
  const auto t = cached_tree_counts(3, 30, dir);
  EXPECT_TRUE(std::filesystem::exists(tau_cache_path(dir, 3, 30)));
  const auto smaller = cached_tree_counts(3, 12, dir);
  EXPECT_EQ(smaller.N, 12u);
  EXPECT_EQ(smaller.counts, tree_counts(3, 12).counts);
  EXPECT_EQ(smaller.conv, tree_counts(3, 12).conv);
  EXPECT_EQ(load_counts(tau_cache_path(dir, 3, 30)).counts, t.counts);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace msearch
