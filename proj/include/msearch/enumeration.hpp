#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "msearch/bigfloat.hpp"
#include "msearch/series.hpp"

namespace msearch {

/// Tree counts tau_0..tau_N for m-ary search trees together with the
/// coefficients of tau(z)^k, k = 1..m, up to degree N.
template <class T>
struct TreeCounts {
  int m = 2;
  std::size_t N = 0;
  std::vector<T> counts;
  /// conv[k][n] = [z^n] tau(z)^k for k = 1..m; conv[0] is unused and empty.
  std::vector<std::vector<T>> conv;

  const std::vector<T>& power(int k) const { return conv.at(static_cast<std::size_t>(k)); }
  Series<T> series() const { return Series<T>(counts); }
};

using TreeCountTable = TreeCounts<BigInt>;
using FloatTreeCountTable = TreeCounts<BigFloat>;

/// Memory budget in bytes for tree count tables. Defaults to 4 GiB.
std::size_t table_memory_budget();
void set_table_memory_budget(std::size_t bytes);

/// Exact tree counts for branching factor m up to N keys. Throws
/// InvalidArgument for m < 2 and ResourceError when the estimated table size
/// exceeds the memory budget.
TreeCountTable tree_counts(int m, std::size_t N);

/// Tree counts in big-float arithmetic at the given precision.
FloatTreeCountTable tree_counts_float(int m, std::size_t N, long bits);

/// Grows `table` in place to cover N keys.
void extend(TreeCountTable& table, std::size_t N);
void extend(FloatTreeCountTable& table, std::size_t N);

/// Converts an exact table to big floats (rounded to `bits`).
FloatTreeCountTable to_float(const TreeCountTable& table, long bits);

/// Canonical string of an m-ary search tree shape: a node holding n <= m-2
/// keys is "n"; a full node is "(" child "," ... ")" over its m subtrees,
/// with the empty subtree written "0".
std::map<std::string, long> brute_force_shapes(int m, int n);

/// Number of distinct m-ary search trees produced by inserting every
/// permutation of n keys. Requires n <= 9.
BigInt brute_force_count(int m, int n);

/// Cache file path "<dir>/tau-m<M>-n<N>.json".
std::filesystem::path tau_cache_path(const std::filesystem::path& dir, int m,
                                     std::size_t N);

/// Writes {"m","N","counts"} atomically.
void save_counts(const TreeCountTable& table, const std::filesystem::path& file);

/// Reads a cache file; rebuilds the power table. Throws Error on malformed
/// input or when the file disagrees with the recurrence.
TreeCountTable load_counts(const std::filesystem::path& file);

/// Loads tau-m<M>-n<N'>.json for the smallest cached N' >= N if present,
/// otherwise computes and stores the table. The result covers exactly N.
TreeCountTable cached_tree_counts(int m, std::size_t N,
                                  const std::filesystem::path& dir);

}  // namespace msearch
