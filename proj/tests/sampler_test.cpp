#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <map>
#include <memory>

#include "msearch/errors.hpp"
#include "msearch/moments.hpp"
#include "msearch/sampler.hpp"
#include "msearch/stats.hpp"

using namespace msearch;

namespace {

std::shared_ptr<const TreeCountTable> table(int m, std::size_t N) {
  return std::make_shared<const TreeCountTable>(tree_counts(m, N));
}

// Chi-square of observed cell counts against exact probabilities, pooling
// cells whose expected count is below 5 into one.
double pooled_p_value(const std::map<std::size_t, long>& observed,
                      const std::map<std::size_t, double>& probs, long total) {
  std::vector<long> obs;
  std::vector<double> p;
  long pool_obs = 0;
  double pool_p = 0;
  for (const auto& [k, pk] : probs) {
    const auto it = observed.find(k);
    const long o = it == observed.end() ? 0 : it->second;
    if (pk * static_cast<double>(total) < 5) {
      pool_obs += o;
      pool_p += pk;
    } else {
      obs.push_back(o);
      p.push_back(pk);
    }
  }
  if (pool_p > 0) {
    obs.push_back(pool_obs);
    p.push_back(pool_p);
  }
  for (const auto& [k, o] : observed) {
    if (!probs.count(k)) ADD_FAILURE() << "impossible outcome " << k;
  }
  return chi_square_gof(obs, p).p_value;
}

}  // namespace

TEST(Philox, KnownAnswer) {
  const auto out = Philox4x32::apply({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
  const auto ones = Philox4x32::apply({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                      {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(ones[0], 0x408f276du);
  EXPECT_EQ(ones[1], 0x41c83b0eu);
  EXPECT_EQ(ones[2], 0xa20bc7c6u);
  EXPECT_EQ(ones[3], 0x6d5451fdu);
}

TEST(Philox, StreamsAreDistinctAndReproducible) {
  Philox4x32 a(7, 0), b(7, 1), c(7, 0);
  const auto x = a.next_u64();
  EXPECT_NE(x, b.next_u64());
  EXPECT_EQ(x, c.next_u64());
}

TEST(Philox, BelowIsUniform) {
  Philox4x32 rng(3, 0);
  std::vector<long> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[rng.below(7)];
  EXPECT_GT(chi_square_gof(counts, std::vector<double>(7, 1.0 / 7)).p_value, 0.001);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.next_double();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Split, ExactProbabilitiesBinary) {
  SplitSampler s(table(2, 6), SplitModel::kUniform);
  EXPECT_EQ(s.split_probability(3, {2, 0}), Rational(2, 5));
  EXPECT_EQ(s.split_probability(3, {0, 2}), Rational(2, 5));
  EXPECT_EQ(s.split_probability(3, {1, 1}), Rational(1, 5));
}

TEST(Split, TernaryRootOfTwoKeys) {
  SplitSampler s(table(3, 4), SplitModel::kUniform);
  Philox4x32 rng(1, 0);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(split_sample(s, 2, rng), (std::vector<std::size_t>{0, 0, 0}));
  }
}

TEST(Split, ChiSquareSmall) {
  for (auto [m, n] : {std::pair{2, 3}, {2, 6}, {3, 7}, {4, 9}}) {
    SplitSampler s(table(m, static_cast<std::size_t>(n)), SplitModel::kUniform);
    Philox4x32 rng(11, static_cast<std::uint64_t>(m * 100 + n));
    std::map<std::vector<std::size_t>, long> seen;
    const long draws = 100000;
    for (long i = 0; i < draws; ++i) ++seen[split_sample(s, static_cast<std::size_t>(n), rng)];
    // Every composition with its exact probability.
    std::vector<long> obs;
    std::vector<double> p;
    std::vector<std::size_t> parts(static_cast<std::size_t>(m), 0);
    const std::size_t R = static_cast<std::size_t>(n - m + 1);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t left) {
      if (i + 1 == parts.size()) {
        parts[i] = left;
        obs.push_back(seen[parts]);
        p.push_back(s.split_probability(static_cast<std::size_t>(n), parts).get_d());
        return;
      }
      for (std::size_t v = 0; v <= left; ++v) {
        parts[i] = v;
        rec(i + 1, left - v);
      }
    };
    rec(0, R);
    EXPECT_GT(chi_square_gof(obs, p).p_value, 0.001) << "m=" << m << " n=" << n;
  }
}

TEST(Split, LargeMarginals) {
  // Totals beyond 64 bits take the lazy-real path.
  for (auto [m, n] : {std::pair{2, 300}, {3, 200}}) {
    auto t = table(m, static_cast<std::size_t>(n));
    SplitSampler s(t, SplitModel::kUniform);
    Philox4x32 rng(5, 0);
    std::map<std::size_t, long> first, last;
    const long draws = 100000;
    for (long i = 0; i < draws; ++i) {
      const auto parts = split_sample(s, static_cast<std::size_t>(n), rng);
      ++first[parts.front()];
      ++last[parts.back()];
    }
    const std::size_t R = static_cast<std::size_t>(n - m + 1);
    std::map<std::size_t, double> probs;
    for (std::size_t j = 0; j <= R; ++j) {
      Rational q(mpz_class(t->counts[j] * t->conv[static_cast<std::size_t>(m - 1)][R - j]),
                 t->counts[static_cast<std::size_t>(n)]);
      q.canonicalize();
      probs[j] = q.get_d();
    }
    EXPECT_GT(pooled_p_value(first, probs, draws), 0.001) << m;
    EXPECT_GT(pooled_p_value(last, probs, draws), 0.001) << m;
  }
}

TEST(Split, RandomPermutationCompositions) {
  SplitSampler s(3, SplitModel::kRandomPermutation);
  Philox4x32 rng(2, 0);
  std::map<std::vector<std::size_t>, long> seen;
  for (int i = 0; i < 60000; ++i) ++seen[split_sample(s, 5, rng)];
  EXPECT_EQ(seen.size(), 10u);  // compositions of 3 into 3 parts
  std::vector<long> obs;
  for (const auto& [k, c] : seen) obs.push_back(c);
  EXPECT_GT(chi_square_gof(obs, std::vector<double>(10, 0.1)).p_value, 0.001);
  EXPECT_EQ(s.split_probability(5, {1, 1, 1}), Rational(1, 10));
}

TEST(Split, TableTooShort) {
  SplitSampler s(table(2, 5), SplitModel::kUniform);
  Philox4x32 rng(1, 0);
  EXPECT_THROW(split_sample(s, 6, rng), InvalidArgument);
  EXPECT_THROW(SplitSampler(2, SplitModel::kUniform), InvalidArgument);
}

TEST(Trees, UniformOverShapes) {
  for (int m : {2, 3}) {
    for (int n = 1; n <= 6; ++n) {
      SplitSampler s(table(m, static_cast<std::size_t>(n)), SplitModel::kUniform);
      const auto shapes = brute_force_shapes(m, n);
      std::map<std::string, long> seen;
      const long draws = 100000;
      for (long r = 0; r < draws; ++r) {
        Philox4x32 rng(99, static_cast<std::uint64_t>(r));
        const SampledTree t = sample_tree(s, static_cast<std::size_t>(n), rng);
        ASSERT_TRUE(t.consistent());
        ++seen[t.canonical()];
      }
      std::vector<long> obs;
      for (const auto& [shape, c] : shapes) obs.push_back(seen[shape]);
      EXPECT_EQ(seen.size(), shapes.size()) << "m=" << m << " n=" << n;
      const std::vector<double> p(shapes.size(), 1.0 / static_cast<double>(shapes.size()));
      if (shapes.size() > 1) {
        EXPECT_GT(chi_square_gof(obs, p).p_value, 0.001) << "m=" << m << " n=" << n;
      }
    }
  }
}

TEST(Trees, SmallAndSerialized) {
  SplitSampler s(table(3, 10), SplitModel::kUniform);
  Philox4x32 rng(1, 0);
  const SampledTree leaf = sample_tree(s, 1, rng);
  EXPECT_EQ(leaf.size.size(), 1u);
  EXPECT_EQ(leaf.canonical(), "1");
  EXPECT_EQ(leaf.to_json(), "{\"size\":1,\"children\":[]}");
  const SampledTree t = sample_tree(s, 2, rng);
  EXPECT_EQ(t.canonical(), "(0,0,0)");
  EXPECT_EQ(t.to_json(),
            "{\"size\":2,\"children\":[{\"size\":0,\"children\":[]},{\"size\":0,\"children\":[]},"
            "{\"size\":0,\"children\":[]}]}");
  const SampledTree big = sample_tree(s, 10, rng);
  EXPECT_TRUE(big.consistent());
}

TEST(Functional, SpaceBinaryIsN) {
  SplitSampler s(table(2, 300), SplitModel::kUniform);
  for (std::uint64_t r = 0; r < 50; ++r) {
    Philox4x32 rng(4, r);
    EXPECT_EQ(sample_functional(s, 300, space_toll(2), rng), 300.0);
  }
}

TEST(Functional, DegenerateTollIsConstant) {
  // m = 3, x = (1, 2), b_n = 2 (X_1 - 2 x_0) = 0: X_n = n X_1 - (n-1) x_0 = n + 1.
  const TollSpec t = custom_toll(3, {Rational(0)}, TailRule::kRepeatLast, {Rational(1), Rational(2)});
  SplitSampler s(table(3, 80), SplitModel::kUniform);
  for (std::uint64_t r = 0; r < 50; ++r) {
    Philox4x32 rng(8, r);
    EXPECT_EQ(sample_functional(s, 80, t, rng), 81.0);
  }
}

TEST(Functional, LeavesMeanSmall) {
  SplitSampler s(table(2, 3), SplitModel::kUniform);
  MonteCarloOptions o;
  o.reps = 100000;
  o.seed = 17;
  std::vector<double> values;
  const auto sum = monte_carlo(s, 3, leaves_toll(2), o, &values);
  for (double v : values) EXPECT_TRUE(v == 1.0 || v == 2.0);
  EXPECT_NEAR(sum.moments.mean, 1.2, 4 * sum.moments.se_mean);
}

TEST(MonteCarlo, AgreesWithExactMoments) {
  const std::size_t n = 100;
  SplitSampler s(table(2, n), SplitModel::kUniform);
  MonteCarloOptions o;
  o.reps = 20000;
  o.seed = 5;
  const auto sum = monte_carlo(s, n, leaves_toll(2), o);
  const auto mt = compute_moments(leaves_toll(2), 2, n, MomentMode::Exact());
  EXPECT_NEAR(sum.moments.mean, mt.moment_exact(1, n).get_d(), 4 * sum.moments.se_mean);
  EXPECT_NEAR(sum.moments.variance, central_moment_exact(mt, 2, n).get_d(), 4 * sum.moments.se_variance);
  long total = 0;
  for (long c : sum.histogram.counts) total += c;
  EXPECT_EQ(total, 20000);
}

TEST(MonteCarlo, DeterministicAcrossThreads) {
  SplitSampler s(table(3, 200), SplitModel::kUniform);
  MonteCarloOptions o;
  o.reps = 3000;
  o.seed = 42;
  const auto one = monte_carlo(s, 200, power_toll(3, 1), o);
  o.threads = 3;
  const auto three = monte_carlo(s, 200, power_toll(3, 1), o);
  EXPECT_EQ(simulation_json(one, false), simulation_json(three, false));
  o.seed = 43;
  EXPECT_NE(simulation_json(monte_carlo(s, 200, power_toll(3, 1), o), false), simulation_json(one, false));
}

TEST(Stats, SampleMoments) {
  const std::vector<double> v{1, 2, 3, 4, 10};
  const auto s = sample_moments(v);
  EXPECT_DOUBLE_EQ(s.mean, 4.0);
  EXPECT_DOUBLE_EQ(s.variance, 12.5);
  // Central moments with divisor 5: m2 = 10, m3 = 30.6... computed directly.
  double m2 = 0, m3 = 0, m4 = 0;
  for (double x : v) {
    m2 += (x - 4) * (x - 4) / 5;
    m3 += std::pow(x - 4, 3) / 5;
    m4 += std::pow(x - 4, 4) / 5;
  }
  EXPECT_NEAR(s.skewness, m3 / std::pow(m2, 1.5), 1e-12);
  EXPECT_NEAR(s.kurtosis, m4 / (m2 * m2), 1e-12);
  EXPECT_GT(s.se_skewness, 0);
  // The jackknife SE of the mean equals s / sqrt(n); compare via a constant shift.
  EXPECT_NEAR(s.se_mean, std::sqrt(12.5 / 5), 1e-12);
  EXPECT_THROW(sample_moments({1.0}), InvalidArgument);
}

TEST(Stats, HistogramAndChiSquare) {
  const auto h = make_histogram({0, 0.5, 1, 1, 2}, 4);
  EXPECT_EQ(h.edges.size(), 5u);
  EXPECT_EQ(h.counts, (std::vector<long>{1, 1, 2, 1}));
  const auto flat = make_histogram({3, 3, 3}, 10);
  EXPECT_EQ(flat.counts, (std::vector<long>{3}));
  const auto r = chi_square_gof({25, 25, 50}, {0.25, 0.25, 0.5});
  EXPECT_DOUBLE_EQ(r.statistic, 0.0);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
  EXPECT_EQ(r.degrees_of_freedom, 2);
  EXPECT_NEAR(log_log_slope({1, 2, 4}, {3, 12, 48}), 2.0, 1e-12);
}
