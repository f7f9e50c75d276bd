#include "msearch/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "msearch/errors.hpp"

namespace msearch {

std::string to_string(SplitModel model) {
  return model == SplitModel::kUniform ? "uniform" : "rp";
}

SplitModel parse_split_model(const std::string& text) {
  if (text == "uniform") return SplitModel::kUniform;
  if (text == "rp" || text == "random_permutation") return SplitModel::kRandomPermutation;
  throw InvalidArgument("unknown model '" + text + "' (expected uniform or rp)");
}

SplitSampler::SplitSampler(std::shared_ptr<const TreeCountTable> table, SplitModel model)
    : m_(table ? table->m : 0), model_(model), table_(std::move(table)) {
  if (!table_) throw InvalidArgument("SplitSampler needs a tree count table");
  if (model_ != SplitModel::kUniform) return;
  const auto K = static_cast<std::size_t>(m_);
  mant_.assign(K + 1, {});
  expo_.assign(K + 1, {});
  small_.assign(K + 1, {});
  for (std::size_t k = 1; k <= K; ++k) {
    const auto& row = table_->conv[k];
    mant_[k].resize(row.size());
    expo_[k].resize(row.size());
    small_[k].assign(row.size(), 0);
    for (std::size_t r = 0; r < row.size(); ++r) {
      long e = 0;
      mant_[k][r] = mpz_get_d_2exp(&e, row[r].get_mpz_t());
      expo_[k][r] = e;
      if (mpz_sizeinbase(row[r].get_mpz_t(), 2) <= 64) {
        std::uint64_t v = 0;
        mpz_export(&v, nullptr, -1, sizeof v, 0, 0, row[r].get_mpz_t());
        small_[k][r] = v;
      }
    }
  }
}

SplitSampler::SplitSampler(int m, SplitModel model) : m_(m), model_(model) {
  if (m < 2) throw InvalidArgument("m must be at least 2");
  if (model != SplitModel::kRandomPermutation) {
    throw InvalidArgument("the uniform model needs a tree count table");
  }
}

std::size_t SplitSampler::max_n() const {
  if (model_ == SplitModel::kUniform) return table_->N;
  return table_ ? table_->N : static_cast<std::size_t>(1) << 40;
}

namespace {

// j visited at step t of the walk 0, R, 1, R-1, 2, ...
inline std::size_t alternating(std::size_t t, std::size_t R) {
  return (t & 1) == 0 ? t / 2 : R - t / 2;
}

// Uniform real V in [0, 1) whose binary digits are drawn 64 at a time.
class LazyUniform {
 public:
  explicit LazyUniform(Philox4x32& rng) : rng_(rng) { words_.push_back(rng_.next_u64()); }

  std::uint64_t first_word() const { return words_.front(); }

  // V < S / W, decided exactly.
  bool less_than(const BigInt& S, const BigInt& W) {
    for (std::size_t k = 1;; ++k) {
      while (words_.size() < k) words_.push_back(rng_.next_u64());
      BigInt v;
      mpz_import(v.get_mpz_t(), k, 1, sizeof(std::uint64_t), 0, 0, words_.data());
      BigInt scaled;
      mpz_mul_2exp(scaled.get_mpz_t(), S.get_mpz_t(), 64 * k);
      // V in [v, v + 1) / 2^{64k}.
      const BigInt lo = v * W;
      if (lo >= scaled) return false;
      if (lo + W <= scaled) return true;
    }
  }

 private:
  Philox4x32& rng_;
  std::vector<std::uint64_t> words_;
};

}  // namespace

std::size_t SplitSampler::draw_first_part(int k, std::size_t R, Philox4x32& rng) const {
  const auto ku = static_cast<std::size_t>(k);
  if (R == 0) return 0;
  const std::uint64_t total64 = small_[ku][R];
  if (total64 != 0) {
    std::uint64_t u = rng.below(total64);
    for (std::size_t t = 0; t <= R; ++t) {
      const std::size_t j = alternating(t, R);
      const std::uint64_t w = small_[1][j] * small_[ku - 1][R - j];
      if (u < w) return j;
      u -= w;
    }
    throw NumericalError("split weights do not sum to the tree count");
  }
  LazyUniform V(rng);
  const double u = static_cast<double>(V.first_word() >> 11) * 0x1.0p-53;
  const double u_hi = u + 0x1.0p-53;
  const double mt = mant_[ku][R];
  const long et = expo_[ku][R];
  double cum = 0;
  for (std::size_t t = 0; t < R; ++t) {
    const std::size_t j = alternating(t, R);
    cum += std::ldexp(mant_[1][j] * mant_[ku - 1][R - j] / mt, expo_[1][j] + expo_[ku - 1][R - j] - et);
    const double delta = static_cast<double>(t + 16) * 0x1.0p-50;
    if (u_hi <= cum - delta) return j;
    if (u >= cum + delta) continue;
    // Too close to call in double precision.
    fallbacks_.fetch_add(1, std::memory_order_relaxed);
    BigInt S = 0;
    for (std::size_t i = 0; i <= t; ++i) {
      const std::size_t ji = alternating(i, R);
      mpz_addmul(S.get_mpz_t(), table_->conv[1][ji].get_mpz_t(), table_->conv[ku - 1][R - ji].get_mpz_t());
    }
    if (V.less_than(S, table_->conv[ku][R])) return j;
  }
  return alternating(R, R);
}

void SplitSampler::split(std::size_t n, Philox4x32& rng, std::vector<std::size_t>& parts) const {
  const auto mu = static_cast<std::size_t>(m_);
  if (n + 1 < mu) throw InvalidArgument("split needs n >= m-1");
  if (n > max_n()) {
    throw InvalidArgument("tree count table covers " + std::to_string(max_n()) + " keys, split at n=" +
                          std::to_string(n));
  }
  parts.assign(mu, 0);
  std::size_t R = n - (mu - 1);
  if (model_ == SplitModel::kUniform) {
    for (int k = m_; k >= 2; --k) {
      const std::size_t j = draw_first_part(k, R, rng);
      parts[mu - static_cast<std::size_t>(k)] = j;
      R -= j;
    }
    parts[mu - 1] = R;
    return;
  }
  // Floyd's algorithm: m - 1 distinct pivot ranks out of n.
  std::vector<std::size_t> pivots;
  pivots.reserve(mu - 1);
  for (std::size_t j = n - (mu - 1); j < n; ++j) {
    const std::size_t t = rng.below(j + 1);
    if (std::find(pivots.begin(), pivots.end(), t) == pivots.end()) {
      pivots.push_back(t);
    } else {
      pivots.push_back(j);
    }
  }
  std::sort(pivots.begin(), pivots.end());
  std::size_t prev = 0;
  for (std::size_t i = 0; i + 1 < mu; ++i) {
    parts[i] = pivots[i] - prev;
    prev = pivots[i] + 1;
  }
  parts[mu - 1] = n - prev;
}

Rational SplitSampler::split_probability(std::size_t n, const std::vector<std::size_t>& parts) const {
  const auto mu = static_cast<std::size_t>(m_);
  if (parts.size() != mu || n + 1 < mu) throw InvalidArgument("split_probability: bad composition");
  std::size_t sum = 0;
  for (auto p : parts) sum += p;
  if (sum != n - (mu - 1)) return Rational(0);
  if (model_ == SplitModel::kUniform) {
    if (n > table_->N) throw InvalidArgument("split_probability: table too short");
    BigInt num = 1;
    for (auto p : parts) num *= table_->counts[p];
    Rational q(num, table_->counts[n]);
    q.canonicalize();
    return q;
  }
  BigInt c;
  mpz_bin_uiui(c.get_mpz_t(), n, mu - 1);
  return Rational(BigInt(1), c);
}

std::vector<std::size_t> split_sample(const SplitSampler& s, std::size_t n, Philox4x32& rng) {
  std::vector<std::size_t> parts;
  s.split(n, rng, parts);
  return parts;
}

std::vector<double> node_values(const TollSpec& toll, std::size_t N) {
  std::vector<double> v(N + 1, 0.0);
  for (std::size_t n = 0; n <= N; ++n) {
    if (n + 2 <= static_cast<std::size_t>(toll.m)) {
      v[n] = toll.initial.at(n).get_d();
    } else {
      v[n] = toll.b_double(static_cast<long>(n));
    }
  }
  return v;
}

double sample_functional(const SplitSampler& s, std::size_t n, const std::vector<double>& values,
                         Philox4x32& rng) {
  if (values.size() <= n) throw InvalidArgument("node value table shorter than n");
  const auto mu = static_cast<std::size_t>(s.m());
  double total = 0;
  std::vector<std::size_t> stack{n};
  std::vector<std::size_t> parts;
  while (!stack.empty()) {
    const std::size_t k = stack.back();
    stack.pop_back();
    total += values[k];
    if (k + 1 < mu) continue;
    s.split(k, rng, parts);
    for (auto p : parts) {
      if (p + 1 < mu) {
        total += values[p];
      } else {
        stack.push_back(p);
      }
    }
  }
  return total;
}

double sample_functional(const SplitSampler& s, std::size_t n, const TollSpec& toll, Philox4x32& rng) {
  if (toll.m != s.m()) throw InvalidArgument("toll and sampler use different m");
  return sample_functional(s, n, node_values(toll, n), rng);
}

SampledTree sample_tree(const SplitSampler& s, std::size_t n, Philox4x32& rng) {
  const auto mu = static_cast<std::size_t>(s.m());
  SampledTree tree;
  tree.m = s.m();
  tree.size.push_back(n);
  tree.child.push_back(-1);
  std::vector<std::size_t> stack{0};
  std::vector<std::size_t> parts;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const std::size_t k = tree.size[i];
    if (k + 1 < mu) continue;
    s.split(k, rng, parts);
    const auto first = static_cast<long>(tree.size.size());
    tree.child[i] = first;
    for (auto p : parts) {
      tree.size.push_back(p);
      tree.child.push_back(-1);
    }
    for (std::size_t c = mu; c-- > 0;) stack.push_back(static_cast<std::size_t>(first) + c);
  }
  return tree;
}

std::string SampledTree::canonical() const {
  const auto mu = static_cast<std::size_t>(m);
  std::string out;
  // (node, next child index); child index mu means "close".
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto& [i, c] = stack.back();
    if (child[i] < 0) {
      out += std::to_string(size[i]);
      stack.pop_back();
      continue;
    }
    if (c == 0) out += '(';
    if (c == mu) {
      out += ')';
      stack.pop_back();
      continue;
    }
    if (c > 0) out += ',';
    const std::size_t next = static_cast<std::size_t>(child[i]) + c;
    ++c;
    stack.emplace_back(next, 0);
  }
  return out;
}

std::string SampledTree::to_json() const {
  const auto mu = static_cast<std::size_t>(m);
  std::string out;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto& [i, c] = stack.back();
    if (c == 0) out += "{\"size\":" + std::to_string(size[i]) + ",\"children\":[";
    if (child[i] < 0 || c == mu) {
      out += "]}";
      stack.pop_back();
      continue;
    }
    if (c > 0) out += ',';
    const std::size_t next = static_cast<std::size_t>(child[i]) + c;
    ++c;
    stack.emplace_back(next, 0);
  }
  return out;
}

bool SampledTree::consistent() const {
  const auto mu = static_cast<std::size_t>(m);
  if (size.size() != child.size() || size.empty()) return false;
  for (std::size_t i = 0; i < size.size(); ++i) {
    const bool full = size[i] + 1 >= mu;
    if (full != (child[i] >= 0)) return false;
    if (!full) continue;
    std::size_t sum = 0;
    for (std::size_t c = 0; c < mu; ++c) {
      const auto idx = static_cast<std::size_t>(child[i]) + c;
      if (idx >= size.size()) return false;
      sum += size[idx];
    }
    if (sum + (mu - 1) != size[i]) return false;
  }
  return true;
}

SimulationSummary monte_carlo(const SplitSampler& s, std::size_t n, const TollSpec& toll,
                              const MonteCarloOptions& options, std::vector<double>* values_out) {
  if (options.reps < 2) throw InvalidArgument("monte_carlo needs reps >= 2");
  if (options.threads < 1) throw InvalidArgument("threads must be at least 1");
  if (toll.m != s.m()) throw InvalidArgument("toll and sampler use different m");
  if (n > s.max_n()) throw InvalidArgument("n exceeds the sampler's table");
  const auto start = std::chrono::steady_clock::now();
  const std::vector<double> nv = node_values(toll, n);
  std::vector<double> values(options.reps);
  const auto T = static_cast<std::size_t>(options.threads);
  auto work = [&](std::size_t t) {
    for (std::size_t r = t; r < options.reps; r += T) {
      Philox4x32 rng(options.seed, r);
      values[r] = sample_functional(s, n, nv, rng);
    }
  };
  if (T == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (std::size_t t = 0; t < T; ++t) {
      pool.emplace_back([&, t] {
        try {
          work(t);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }
  SimulationSummary out;
  out.n = n;
  out.reps = options.reps;
  out.seed = options.seed;
  out.m = s.m();
  out.toll = toll.name();
  out.model = s.model();
  out.moments = sample_moments(values);
  out.histogram = make_histogram(values, options.histogram_bins);
  out.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (values_out) *values_out = std::move(values);
  return out;
}

std::string simulation_json(const SimulationSummary& s, bool include_timing) {
  auto dec = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  nlohmann::ordered_json j;
  j["m"] = s.m;
  j["n"] = s.n;
  j["toll"] = s.toll;
  j["model"] = to_string(s.model);
  j["reps"] = s.reps;
  j["seed"] = s.seed;
  j["mean"] = dec(s.moments.mean);
  j["variance"] = dec(s.moments.variance);
  j["skewness"] = dec(s.moments.skewness);
  j["kurtosis"] = dec(s.moments.kurtosis);
  j["se_mean"] = dec(s.moments.se_mean);
  j["se_variance"] = dec(s.moments.se_variance);
  j["se_skewness"] = dec(s.moments.se_skewness);
  j["se_kurtosis"] = dec(s.moments.se_kurtosis);
  auto edges = nlohmann::ordered_json::array();
  for (double e : s.histogram.edges) edges.push_back(dec(e));
  j["histogram"] = {{"edges", edges}, {"counts", s.histogram.counts}};
  if (include_timing) j["elapsed_seconds"] = dec(s.elapsed_seconds);
  return j.dump(2) + "\n";
}

std::string histogram_csv(const Histogram& h) {
  std::string out = "lo,hi,count\n";
  char buf[128];
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%ld\n", h.edges[i], h.edges[i + 1], h.counts[i]);
    out += buf;
  }
  return out;
}

}  // namespace msearch
