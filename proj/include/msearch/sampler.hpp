#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "msearch/enumeration.hpp"
#include "msearch/rng.hpp"
#include "msearch/stats.hpp"
#include "msearch/toll.hpp"

namespace msearch {

enum class SplitModel { kUniform, kRandomPermutation };

std::string to_string(SplitModel model);
/// "uniform" or "rp".
SplitModel parse_split_model(const std::string& text);

/// Draws subtree sizes (J_1, ..., J_m) below a node holding n keys.
///
/// Uniform model: Pr[J = j] = tau_{j_1} ... tau_{j_m} / tau_n, drawn part by
/// part from the exact marginals tau_j [z^{R-j}] tau^{k-1} / [z^R] tau^k. Each
/// marginal is sampled by inversion of one uniform real whose bits are
/// generated lazily: double-precision cumulative weights decide the outcome
/// unless the draw falls within their error bound, in which case exact
/// integer comparisons settle it. Word-sized totals use integer inversion.
///
/// Random-permutation model: the m - 1 pivot ranks are a uniform subset of
/// the n ranks, so the split is uniform over compositions of n - (m - 1).
class SplitSampler {
 public:
  SplitSampler(std::shared_ptr<const TreeCountTable> table, SplitModel model);
  /// Random-permutation model without a count table (any n).
  SplitSampler(int m, SplitModel model);

  int m() const { return m_; }
  SplitModel model() const { return model_; }
  /// Largest n the sampler supports.
  std::size_t max_n() const;
  const TreeCountTable* table() const { return table_.get(); }

  /// Fills parts[0..m-1]; n >= m - 1.
  void split(std::size_t n, Philox4x32& rng, std::vector<std::size_t>& parts) const;

  /// Exact probability of a split under the model.
  Rational split_probability(std::size_t n, const std::vector<std::size_t>& parts) const;

  /// Number of draws that needed the exact fallback (diagnostics).
  std::uint64_t exact_fallbacks() const { return fallbacks_.load(std::memory_order_relaxed); }

 private:
  std::size_t draw_first_part(int k, std::size_t R, Philox4x32& rng) const;

  int m_;
  SplitModel model_;
  std::shared_ptr<const TreeCountTable> table_;
  // conv[k][R] as d * 2^e with d in [0.5, 1).
  std::vector<std::vector<double>> mant_;
  std::vector<std::vector<long>> expo_;
  // conv[k][R] when it fits in 64 bits, else 0.
  std::vector<std::vector<std::uint64_t>> small_;
  mutable std::atomic<std::uint64_t> fallbacks_{0};
};

/// One split of a node with n keys.
std::vector<std::size_t> split_sample(const SplitSampler& s, std::size_t n, Philox4x32& rng);

/// b_n (n >= m-1) and x_n (n <= m-2) as doubles for n <= N.
std::vector<double> node_values(const TollSpec& toll, std::size_t N);

/// One draw of X_n: the sum of the node values over a random tree, evaluated
/// with an explicit stack.
double sample_functional(const SplitSampler& s, std::size_t n, const std::vector<double>& values,
                         Philox4x32& rng);
double sample_functional(const SplitSampler& s, std::size_t n, const TollSpec& toll, Philox4x32& rng);

/// A sampled tree as flat arrays, root at index 0. Node i holds size[i] keys;
/// a full node (size >= m-1) has its m children stored contiguously at
/// child[i] .. child[i] + m - 1, other nodes have child[i] = -1.
struct SampledTree {
  int m = 2;
  std::vector<std::size_t> size;
  std::vector<long> child;

  /// Canonical string, same format as brute_force_shapes.
  std::string canonical() const;
  /// Nested JSON {"size": n, "children": [...]}.
  std::string to_json() const;
  /// Sizes of the children of each full node sum to its size minus m - 1.
  bool consistent() const;
};

SampledTree sample_tree(const SplitSampler& s, std::size_t n, Philox4x32& rng);

struct SimulationSummary {
  std::size_t n = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  int m = 2;
  std::string toll;
  SplitModel model = SplitModel::kUniform;
  SampleMoments moments;
  Histogram histogram;
  double elapsed_seconds = 0;
};

struct MonteCarloOptions {
  std::size_t reps = 1000;
  std::uint64_t seed = 1;
  int threads = 1;
  int histogram_bins = 50;
};

/// Replication r draws from the Philox stream (seed, r), so the result does
/// not depend on the thread count. When `values` is given it receives every
/// draw, indexed by replication.
SimulationSummary monte_carlo(const SplitSampler& s, std::size_t n, const TollSpec& toll,
                              const MonteCarloOptions& options,
                              std::vector<double>* values = nullptr);

/// JSON document; elapsed time only when include_timing is set.
std::string simulation_json(const SimulationSummary& summary, bool include_timing);

/// "lo,hi,count" lines with a header.
std::string histogram_csv(const Histogram& h);

}  // namespace msearch
