#include "msearch/enumeration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

#include "msearch/errors.hpp"
#include "msearch/io.hpp"

namespace msearch {

namespace {

std::size_t g_budget = std::size_t{4} << 30;

void check_params(int m) {
  if (m < 2) throw InvalidArgument("m must be at least 2, got " + std::to_string(m));
}

// Rough upper bound on the bytes held by an exact table: m+1 rows whose n-th
// entry has about n*log2(1/rho) <= n*(2 + log2 m) bits.
double estimated_exact_bytes(int m, std::size_t N) {
  const double n = static_cast<double>(N);
  const double bits_per_step = 2.0 + std::log2(static_cast<double>(m));
  return (m + 1) * (n * n / 2.0 * bits_per_step / 8.0 + 32.0 * n);
}

double estimated_float_bytes(int m, std::size_t N, long bits) {
  return (m + 1) * static_cast<double>(N + 1) *
         (static_cast<double>(bits) / 8.0 + 32.0);
}

template <class T>
void grow(TreeCounts<T>& t, std::size_t N) {
  const auto m = static_cast<std::size_t>(t.m);
  const std::size_t start = t.counts.size();
  if (t.conv.size() != m + 1) t.conv.assign(m + 1, {});
  t.counts.reserve(N + 1);
  for (std::size_t k = 1; k <= m; ++k) t.conv[k].reserve(N + 1);
  for (std::size_t n = start; n <= N; ++n) {
    // tau_n reads conv[m] at n-(m-1) < n, which is already final.
    T tau = n + 2 <= m ? T(1) : t.conv[m][n - (m - 1)];
    t.counts.push_back(tau);
    t.conv[1].push_back(tau);
    for (std::size_t k = 2; k <= m; ++k) {
      t.conv[k].push_back(cauchy_coefficient(t.conv[k - 1], t.counts, n));
    }
  }
  t.N = N;
}

}  // namespace

std::size_t table_memory_budget() { return g_budget; }
void set_table_memory_budget(std::size_t bytes) { g_budget = bytes; }

TreeCountTable tree_counts(int m, std::size_t N) {
  check_params(m);
  TreeCountTable t;
  t.m = m;
  extend(t, N);
  return t;
}

FloatTreeCountTable tree_counts_float(int m, std::size_t N, long bits) {
  check_params(m);
  if (estimated_float_bytes(m, N, bits) > static_cast<double>(g_budget)) {
    throw ResourceError("tree count table for N=" + std::to_string(N) +
                        " exceeds the memory budget");
  }
  PrecisionGuard guard(bits);
  FloatTreeCountTable t;
  t.m = m;
  grow(t, N);
  return t;
}

void extend(TreeCountTable& table, std::size_t N) {
  check_params(table.m);
  if (!table.counts.empty() && N <= table.N) return;
  if (estimated_exact_bytes(table.m, N) > static_cast<double>(g_budget)) {
    throw ResourceError("tree count table for N=" + std::to_string(N) +
                        " exceeds the memory budget");
  }
  grow(table, N);
}

void extend(FloatTreeCountTable& table, std::size_t N) {
  check_params(table.m);
  if (!table.counts.empty() && N <= table.N) return;
  const long bits = table.counts.empty() ? working_precision()
                                         : table.counts.front().precision();
  if (estimated_float_bytes(table.m, N, bits) > static_cast<double>(g_budget)) {
    throw ResourceError("tree count table for N=" + std::to_string(N) +
                        " exceeds the memory budget");
  }
  PrecisionGuard guard(bits);
  grow(table, N);
}

FloatTreeCountTable to_float(const TreeCountTable& table, long bits) {
  PrecisionGuard guard(bits);
  FloatTreeCountTable out;
  out.m = table.m;
  out.N = table.N;
  out.counts.reserve(table.counts.size());
  for (const auto& v : table.counts) out.counts.emplace_back(v);
  out.conv.resize(table.conv.size());
  for (std::size_t k = 0; k < table.conv.size(); ++k) {
    out.conv[k].reserve(table.conv[k].size());
    for (const auto& v : table.conv[k]) out.conv[k].emplace_back(v);
  }
  return out;
}

namespace {

// Shape of the tree obtained by inserting `keys` in order.
std::string insert_shape(int m, const std::vector<int>& keys) {
  const auto n = static_cast<int>(keys.size());
  if (n <= m - 2) return std::to_string(n);
  std::vector<int> pivots(keys.begin(), keys.begin() + (m - 1));
  std::sort(pivots.begin(), pivots.end());
  std::vector<std::vector<int>> parts(static_cast<std::size_t>(m));
  for (int i = m - 1; i < n; ++i) {
    const int key = keys[static_cast<std::size_t>(i)];
    const auto slot = std::upper_bound(pivots.begin(), pivots.end(), key) - pivots.begin();
    parts[static_cast<std::size_t>(slot)].push_back(key);
  }
  std::string out = "(";
  for (int c = 0; c < m; ++c) {
    if (c > 0) out += ',';
    out += insert_shape(m, parts[static_cast<std::size_t>(c)]);
  }
  out += ')';
  return out;
}

}  // namespace

std::map<std::string, long> brute_force_shapes(int m, int n) {
  check_params(m);
  if (n < 0 || n > 9) {
    throw InvalidArgument("brute force enumeration needs 0 <= n <= 9, got " +
                          std::to_string(n));
  }
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::map<std::string, long> shapes;
  do {
    ++shapes[insert_shape(m, perm)];
  } while (std::next_permutation(perm.begin(), perm.end()));
  return shapes;
}

BigInt brute_force_count(int m, int n) {
  return BigInt(static_cast<unsigned long>(brute_force_shapes(m, n).size()));
}

std::filesystem::path tau_cache_path(const std::filesystem::path& dir, int m,
                                     std::size_t N) {
  return dir / ("tau-m" + std::to_string(m) + "-n" + std::to_string(N) + ".json");
}

void save_counts(const TreeCountTable& table, const std::filesystem::path& file) {
  nlohmann::ordered_json j;
  j["m"] = table.m;
  j["N"] = table.N;
  auto& counts = j["counts"] = nlohmann::ordered_json::array();
  for (const auto& c : table.counts) counts.push_back(to_string(c));
  write_file_atomic(file, j.dump() + "\n");
}

TreeCountTable load_counts(const std::filesystem::path& file) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(file));
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed cache file " + file.string() + ": " + e.what());
  }
  TreeCountTable t;
  try {
    t.m = j.at("m").get<int>();
    t.N = j.at("N").get<std::size_t>();
    for (const auto& c : j.at("counts")) t.counts.emplace_back(c.get<std::string>());
  } catch (const std::exception& e) {
    throw Error("malformed cache file " + file.string() + ": " + e.what());
  }
  if (t.m < 2 || t.counts.size() != t.N + 1) {
    throw Error("inconsistent cache file " + file.string());
  }
  // Rebuild the power table and verify every stored count.
  const auto stored = std::move(t.counts);
  t.counts.clear();
  t.conv.clear();
  grow(t, t.N);
  if (t.counts != stored) {
    throw Error("cache file " + file.string() + " disagrees with the recurrence");
  }
  return t;
}

namespace {

void truncate(TreeCountTable& t, std::size_t N) {
  t.N = N;
  t.counts.resize(N + 1);
  for (auto& row : t.conv) {
    if (!row.empty()) row.resize(N + 1);
  }
}

}  // namespace

TreeCountTable cached_tree_counts(int m, std::size_t N,
                                  const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  check_params(m);
  std::error_code ec;
  if (fs::is_directory(dir, ec)) {
    const std::string prefix = "tau-m" + std::to_string(m) + "-n";
    std::size_t best = 0;
    bool found = false;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind(prefix, 0) != 0 || entry.path().extension() != ".json") continue;
      const std::string digits =
          name.substr(prefix.size(), name.size() - prefix.size() - 5);
      if (digits.empty() ||
          !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        continue;
      }
      const std::size_t cached = std::stoull(digits);
      if (cached >= N && (!found || cached < best)) {
        best = cached;
        found = true;
      }
    }
    if (found) {
      TreeCountTable t = load_counts(tau_cache_path(dir, m, best));
      truncate(t, N);
      return t;
    }
  }
  TreeCountTable t = tree_counts(m, N);
  save_counts(t, tau_cache_path(dir, m, N));
  return t;
}

}  // namespace msearch
