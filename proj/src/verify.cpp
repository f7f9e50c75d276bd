#include "msearch/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "msearch/enumeration.hpp"
#include "msearch/errors.hpp"
#include "msearch/limits.hpp"
#include "msearch/moments.hpp"
#include "msearch/quadrature.hpp"
#include "msearch/sampler.hpp"
#include "msearch/singular.hpp"
#include "msearch/stats.hpp"

namespace msearch {

namespace {

constexpr long kBits = 192;

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded() : std::runtime_error("budget exceeded") {}
};

// Per-check parameters of the fast and full suites. Asymptotic checks use
// trend comparisons where the corrections decay slowly (O(n^{-1/2}) for the
// CLT checks, O(1/ln n) for the shape variance).
struct Manifest {
  // tau-asymptotics: relative error of tau_n rho^n n^{3/2} (O(1/n) correction).
  std::size_t tau_lo, tau_hi;
  // leaves-mean-flat: centered mean converges geometrically fast in n.
  std::size_t leaves_lo, leaves_hi;
  // space-variance-slope: Var/n has an O(n^{-1/2}) correction.
  std::size_t space_lo, space_hi;
  // clt-*: standardized moments, O(n^{-1/2}) corrections.
  std::vector<std::size_t> clt_n;
  // shape-variance-trend: O(1/ln n) corrections, trend only.
  std::vector<std::size_t> shape_n;
  // sampler-exactness: sample counts for the chi-square tests.
  long trees, splits;
  // mc-vs-exact.
  std::size_t mc_n, mc_reps;
  // invariance-alpha1.
  std::size_t inv_lo, inv_hi;
  // table1-contrast.
  std::vector<std::size_t> slope_n;
  std::size_t slope_reps;
};

const Manifest& manifest(Suite suite) {
  static const Manifest fast{.tau_lo = 200, .tau_hi = 2000, .leaves_lo = 500, .leaves_hi = 1000,
                             .space_lo = 250, .space_hi = 1000, .clt_n = {250, 500, 1000},
                             .shape_n = {250, 500, 1000}, .trees = 20000, .splits = 20000,
                             .mc_n = 200, .mc_reps = 10000, .inv_lo = 250, .inv_hi = 1000,
                             .slope_n = {250, 500, 1000, 2000}, .slope_reps = 500};
  static const Manifest full{.tau_lo = 1000, .tau_hi = 10000, .leaves_lo = 1000, .leaves_hi = 2000,
                             .space_lo = 500, .space_hi = 2000, .clt_n = {1000, 2000, 4000},
                             .shape_n = {500, 1000, 2000, 4000}, .trees = 100000, .splits = 100000,
                             .mc_n = 200, .mc_reps = 100000, .inv_lo = 500, .inv_hi = 2000,
                             .slope_n = {250, 500, 1000, 2000}, .slope_reps = 2000};
  return suite == Suite::kFast ? fast : full;
}

std::string dec(const BigFloat& x, int digits = 17) { return to_decimal(x, digits); }

std::string dec(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Context {
 public:
  Context(const VerifyConfig& config, CheckReport& report)
      : config_(config),
        report_(report),
        start_(std::chrono::steady_clock::now()) {}

  const VerifyConfig& config() const { return config_; }
  const Manifest& params() const { return manifest(config_.suite); }

  void input(const std::string& key, const std::string& value) { report_.inputs.emplace_back(key, value); }

  void checkpoint() const {
    if (config_.budget_seconds <= 0) return;
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (elapsed > config_.budget_seconds) throw BudgetExceeded();
  }

  void item(CheckItem it) { report_.items.push_back(std::move(it)); }

  void abs(const std::string& name, const BigFloat& observed, const BigFloat& expected, double tol) {
    PrecisionGuard guard(kBits);
    const bool ok = msearch::abs(observed - expected) <= BigFloat(tol);
    item({name, "abs", dec(observed), dec(expected), dec(tol), ok});
  }

  void rel(const std::string& name, const BigFloat& observed, const BigFloat& expected, double tol) {
    PrecisionGuard guard(kBits);
    const bool ok = msearch::abs(observed - expected) <= BigFloat(tol) * msearch::abs(expected);
    item({name, "rel", dec(observed), dec(expected), dec(tol), ok});
  }

  void bound(const std::string& name, double observed, double limit) {
    item({name, "bound", dec(observed), "", dec(limit), observed <= limit});
  }

  void exact(const std::string& name, const std::string& observed, const std::string& expected) {
    item({name, "exact", observed, expected, "", observed == expected});
  }

  void trend(const std::string& name, const std::string& observed, bool ok) {
    item({name, "trend", observed, "", "", ok});
  }

  void info(const std::string& name, const std::string& observed, const std::string& expected = "") {
    item({name, "info", observed, expected, "", true});
  }

  std::shared_ptr<const TreeCountTable> counts(int m, std::size_t N) const {
    if (config_.cache_dir.empty()) return std::make_shared<const TreeCountTable>(tree_counts(m, N));
    return std::make_shared<const TreeCountTable>(cached_tree_counts(m, N, config_.cache_dir));
  }

 private:
  const VerifyConfig& config_;
  CheckReport& report_;
  std::chrono::steady_clock::time_point start_;
};

std::string join(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

// ---- Full enumeration oracle over canonical shape strings.

template <class V>
struct ShapeValue {
  int m;
  std::function<V(long)> b;
  std::function<V(long)> x;

  // Returns the subtree size; adds the functional value to `value`.
  long parse(const std::string& s, std::size_t& pos, V& value) const {
    if (s[pos] == '(') {
      ++pos;
      long size = m - 1;
      V sub = V(0);
      for (int c = 0; c < m; ++c) {
        size += parse(s, pos, sub);
        ++pos;  // ',' or ')'
      }
      value += b(size) + sub;
      return size;
    }
    long k = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') k = 10 * k + (s[pos++] - '0');
    value += x(k);
    return k;
  }

  V of(const std::string& s) const {
    std::size_t pos = 0;
    V v = V(0);
    parse(s, pos, v);
    return v;
  }
};

// ---- Checks.

void check_enum_oracle(Context& ctx) {
  ctx.input("m", "2,3,4");
  ctx.input("n_max", "8");
  for (int m : {2, 3, 4}) {
    const TreeCountTable t = tree_counts(m, 8);
    std::string mismatch = "none";
    for (int n = 0; n <= 8; ++n) {
      if (t.counts[static_cast<std::size_t>(n)] != brute_force_count(m, n)) {
        mismatch = "n=" + std::to_string(n);
        break;
      }
      ctx.checkpoint();
    }
    ctx.exact("m=" + std::to_string(m) + " first mismatch", mismatch, "none");
  }
}

void check_constants_m2(Context& ctx) {
  ctx.input("m", "2");
  ctx.input("precision_bits", std::to_string(kBits));
  const SingularData sd = expansion_coefficients(2, kBits);
  PrecisionGuard guard(kBits);
  ctx.abs("rho", sd.rho, BigFloat(0.25), 1e-12);
  ctx.abs("a0", sd.a0, BigFloat(2), 1e-12);
  ctx.abs("a1", sd.a1, BigFloat(-2), 1e-12);
  ctx.abs("a2", sd.a2, BigFloat(2), 1e-12);
  ctx.abs("alpha_star", sd.alpha_star, BigFloat(1), 1e-12);
  ctx.abs("sigma_2", sd.sigma_m, sqrt(BigFloat(0.5)), 1e-12);
}

void check_tau_asymptotics(Context& ctx) {
  const auto& p = ctx.params();
  ctx.input("m", "2,3");
  ctx.input("n", std::to_string(p.tau_lo) + "," + std::to_string(p.tau_hi));
  for (int m : {2, 3}) {
    const SingularData sd = expansion_coefficients(m, kBits);
    const FloatTreeCountTable t = tree_counts_float(m, p.tau_hi, kBits);
    ctx.checkpoint();
    PrecisionGuard guard(kBits);
    const BigFloat K0 = -sd.a1 / (BigFloat(2) * sqrt(const_pi()));
    auto err = [&](std::size_t n) {
      const BigFloat nn(static_cast<double>(n));
      const BigFloat v = t.counts[n] * pow(sd.rho, static_cast<long>(n)) * nn * sqrt(nn);
      return std::pair{v, msearch::abs(v / K0 - BigFloat(1))};
    };
    const auto [v_hi, e_hi] = err(p.tau_hi);
    const auto [v_lo, e_lo] = err(p.tau_lo);
    const std::string ms = "m=" + std::to_string(m);
    ctx.rel(ms + " tau_n rho^n n^{3/2} at n=" + std::to_string(p.tau_hi), v_hi, K0, 0.01);
    ctx.trend(ms + " relative error decreases", dec(e_lo, 6) + " -> " + dec(e_hi, 6), e_hi < e_lo);
  }
}

void check_moment_oracle(Context& ctx) {
  const int n_max = 9;
  const int s_max = 3;
  ctx.input("m", "2,3");
  ctx.input("n_max", std::to_string(n_max));
  ctx.input("s_max", std::to_string(s_max));
  ctx.input("tolls", "power:1,shape,space,leaves");
  for (int m : {2, 3}) {
    std::vector<std::map<std::string, long>> shapes;
    for (int n = 0; n <= n_max; ++n) shapes.push_back(brute_force_shapes(m, n));
    ctx.checkpoint();
    for (const TollSpec& toll : {power_toll(m, 1), shape_toll(m), space_toll(m), leaves_toll(m)}) {
      const std::string label = "m=" + std::to_string(m) + " " + toll.name();
      auto x_exact = [&toll](long k) { return toll.initial.at(static_cast<std::size_t>(k)); };
      if (toll.is_rational()) {
        const auto mt = compute_moments(toll, s_max, n_max, MomentMode::Exact());
        const ShapeValue<Rational> sv{m, [&toll](long n) { return toll.b_exact(n); }, x_exact};
        std::string mismatch = "none";
        for (int n = 0; n <= n_max && mismatch == "none"; ++n) {
          std::vector<Rational> sums(s_max + 1, Rational(0));
          for (const auto& [shape, c] : shapes[static_cast<std::size_t>(n)]) {
            const Rational v = sv.of(shape);
            Rational pw = 1;
            for (int s = 1; s <= s_max; ++s) {
              pw *= v;
              sums[static_cast<std::size_t>(s)] += pw;
            }
          }
          for (int s = 1; s <= s_max; ++s) {
            Rational want = sums[static_cast<std::size_t>(s)] /
                            Rational(static_cast<long>(shapes[static_cast<std::size_t>(n)].size()));
            want.canonicalize();
            if (mt.moment_exact(s, static_cast<std::size_t>(n)) != want) {
              mismatch = "n=" + std::to_string(n) + " s=" + std::to_string(s);
              break;
            }
          }
        }
        ctx.exact(label + " first mismatch (exact)", mismatch, "none");
      } else {
        PrecisionGuard guard(kBits);
        const auto mt = compute_moments(toll, s_max, n_max, MomentMode::Float(kBits));
        const ShapeValue<BigFloat> sv{m, [&toll](long n) { return toll.b_float(n); },
                                      [&toll](long k) { return BigFloat(toll.initial.at(static_cast<std::size_t>(k))); }};
        BigFloat worst(0);
        for (int n = 0; n <= n_max; ++n) {
          std::vector<BigFloat> sums(s_max + 1, BigFloat(0));
          for (const auto& [shape, c] : shapes[static_cast<std::size_t>(n)]) {
            const BigFloat v = sv.of(shape);
            BigFloat pw(1);
            for (int s = 1; s <= s_max; ++s) {
              pw *= v;
              sums[static_cast<std::size_t>(s)] += pw;
            }
          }
          for (int s = 1; s <= s_max; ++s) {
            const BigFloat want = sums[static_cast<std::size_t>(s)] /
                                  static_cast<long>(shapes[static_cast<std::size_t>(n)].size());
            const BigFloat got = mt.moment(s, static_cast<std::size_t>(n));
            const BigFloat scale = max(msearch::abs(want), BigFloat(1e-300));
            worst = max(worst, msearch::abs(got - want) / scale);
          }
        }
        ctx.bound(label + " max relative error (float)", worst.to_double(), 1e-20);
      }
      ctx.checkpoint();
    }
  }
}

void check_space_degenerate(Context& ctx) {
  const std::size_t N = 100;
  ctx.input("m", "2");
  ctx.input("n_max", std::to_string(N));
  const TollSpec toll = space_toll(2);
  const auto mt = compute_moments(toll, 2, N, MomentMode::Exact());
  std::string nonzero = "none";
  std::string off_mean = "none";
  for (std::size_t n = 0; n <= N; ++n) {
    if (central_moment_exact(mt, 2, n) != 0 && nonzero == "none") nonzero = "n=" + std::to_string(n);
    if (mt.moment_exact(1, n) != Rational(static_cast<long>(n)) && off_mean == "none") {
      off_mean = "n=" + std::to_string(n);
    }
  }
  ctx.exact("first n with Var X_n != 0", nonzero, "none");
  ctx.exact("first n with E X_n != n", off_mean, "none");
  const DegeneracyResult d = degeneracy_check(toll, N);
  ctx.exact("degeneracy_check", d.degenerate ? "true" : "false", "true");
  std::string witness = "X_n = n";
  for (std::size_t n = 0; n <= N; ++n) {
    if (d.predicted(n) != Rational(static_cast<long>(n))) {
      witness = "differs at n=" + std::to_string(n);
      break;
    }
  }
  ctx.exact("witness", witness, "X_n = n");
}

void check_leaves_mean_flat(Context& ctx) {
  const auto& p = ctx.params();
  ctx.input("m", "2,3");
  ctx.input("n", std::to_string(p.leaves_lo) + "," + std::to_string(p.leaves_hi));
  for (int m : {2, 3}) {
    const SingularData sd = expansion_coefficients(m, kBits);
    const auto mt = compute_moments(leaves_toll(m), 1, p.leaves_hi, MomentMode::Float(kBits));
    PrecisionGuard guard(kBits);
    const BigFloat d1 = sd.rho / sd.alpha_star;
    auto tilde = [&](std::size_t n) { return mt.moment(1, n) - d1 * static_cast<long>(n + 1); };
    const BigFloat t_lo = tilde(p.leaves_lo);
    const BigFloat t_hi = tilde(p.leaves_hi);
    ctx.info("m=" + std::to_string(m) + " centered mean at n=" + std::to_string(p.leaves_hi), dec(t_hi));
    ctx.abs("m=" + std::to_string(m) + " centered mean change", t_hi, t_lo, 1e-2);
    ctx.checkpoint();
  }
}

void check_space_variance_slope(Context& ctx) {
  const auto& p = ctx.params();
  const int m = 3;
  ctx.input("m", std::to_string(m));
  ctx.input("n", std::to_string(p.space_lo) + "," + std::to_string(p.space_hi));
  const TollSpec toll = space_toll(m);
  const TheoremConstants tc = theorem_constants(toll, kBits);
  ctx.checkpoint();
  const auto mt = compute_moments(toll, 2, p.space_hi, MomentMode::Float(kBits));
  PrecisionGuard guard(kBits);
  const BigFloat target = *tc.sigma2;
  auto ratio = [&](std::size_t n) { return central_moment(mt, 2, n) / static_cast<long>(n); };
  const BigFloat r_hi = ratio(p.space_hi);
  const BigFloat r_lo = ratio(p.space_lo);
  ctx.rel("Var X_n / n at n=" + std::to_string(p.space_hi), r_hi, target, 0.02);
  const BigFloat e_hi = msearch::abs(r_hi / target - BigFloat(1));
  const BigFloat e_lo = msearch::abs(r_lo / target - BigFloat(1));
  ctx.trend("relative error decreases", dec(e_lo, 6) + " -> " + dec(e_hi, 6), e_hi < e_lo);
}

void check_clt(Context& ctx, const TollSpec& toll) {
  const auto& p = ctx.params();
  ctx.input("m", std::to_string(toll.m));
  ctx.input("toll", toll.name());
  ctx.input("n", join(p.clt_n));
  const auto mt = compute_moments(toll, 4, p.clt_n.back(), MomentMode::Float(kBits));
  ctx.checkpoint();
  std::vector<double> skew;
  double kurt = 0;
  for (std::size_t n : p.clt_n) {
    const CentralStats cs = central_stats(mt, n);
    skew.push_back(std::fabs(cs.skewness->to_double()));
    kurt = 3 + cs.excess_kurtosis->to_double();
    ctx.info("n=" + std::to_string(n) + " |skewness|, kurtosis", dec(skew.back()) + ", " + dec(kurt));
  }
  ctx.bound("|skewness| at n=" + std::to_string(p.clt_n.back()), skew.back(), 0.15);
  bool decreasing = true;
  std::string seq;
  for (std::size_t i = 0; i < skew.size(); ++i) {
    seq += (i ? " -> " : "") + dec(skew[i]);
    if (i && !(skew[i] < skew[i - 1])) decreasing = false;
  }
  ctx.trend("|skewness| decreases", seq, decreasing);
  ctx.abs("kurtosis at n=" + std::to_string(p.clt_n.back()), BigFloat(kurt), BigFloat(3), 0.15);
}

void check_shape_variance_trend(Context& ctx) {
  const auto& p = ctx.params();
  ctx.input("m", "2");
  ctx.input("n", join(p.shape_n));
  const SingularData sd = expansion_coefficients(2, kBits);
  const auto mt = compute_moments(shape_toll(2), 2, p.shape_n.back(), MomentMode::Float(kBits));
  ctx.checkpoint();
  PrecisionGuard guard(kBits);
  const BigFloat q = sd.a0 / sd.a1;
  const BigFloat target = BigFloat(8) * q * q * (BigFloat(1) - const_log2());
  ctx.info("8 (a0/a1)^2 (1 - ln 2)", dec(target));
  std::vector<BigFloat> r;
  std::string seq;
  for (std::size_t n : p.shape_n) {
    const BigFloat nn(static_cast<double>(n));
    r.push_back(central_moment(mt, 2, n) / (nn * log(nn)));
    seq += (seq.empty() ? "" : " -> ") + dec(r.back(), 8);
  }
  bool toward = true;
  for (std::size_t i = 1; i < r.size(); ++i) {
    const BigFloat step = r[i] - r[i - 1];
    const BigFloat gap = target - r[i - 1];
    // Each step goes in the direction of the target and shrinks the distance.
    if (step.sign() != gap.sign() || !(msearch::abs(target - r[i]) < msearch::abs(gap))) toward = false;
  }
  ctx.trend("Var X_n / (n ln n) moves toward the limit", seq, toward);
}

void check_sampler_exactness(Context& ctx) {
  const auto& p = ctx.params();
  const std::uint64_t seed = ctx.config().seed;
  ctx.input("trees", std::to_string(p.trees));
  ctx.input("splits", std::to_string(p.splits));
  ctx.input("seed", std::to_string(seed));
  {
    const int m = 2;
    const int n = 6;
    SplitSampler s(ctx.counts(m, n), SplitModel::kUniform);
    const auto shapes = brute_force_shapes(m, n);
    std::map<std::string, long> seen;
    for (long r = 0; r < p.trees; ++r) {
      Philox4x32 rng(seed, static_cast<std::uint64_t>(r));
      ++seen[sample_tree(s, n, rng).canonical()];
    }
    std::vector<long> obs;
    long stray = 0;
    for (const auto& [shape, c] : shapes) obs.push_back(seen.count(shape) ? seen[shape] : 0);
    for (const auto& [shape, c] : seen) stray += shapes.count(shape) ? 0 : c;
    const auto res = chi_square_gof(obs, std::vector<double>(obs.size(), 1.0 / static_cast<double>(obs.size())));
    ctx.exact("distinct shapes (m=2, n=6)", std::to_string(shapes.size()), "132");
    ctx.exact("samples outside the shape set", std::to_string(stray), "0");
    ctx.item({"tree uniformity chi-square p-value (m=2, n=6)", "bound", dec(res.p_value), "", ">= 0.001",
              res.p_value >= 0.001});
  }
  ctx.checkpoint();
  for (auto [m, n] : {std::pair<int, std::size_t>{2, 6}, {3, 200}}) {
    auto table = ctx.counts(m, n);
    SplitSampler s(table, SplitModel::kUniform);
    Philox4x32 rng(seed, 1u << 20);
    const std::size_t R = n - static_cast<std::size_t>(m) + 1;
    std::vector<long> obs(R + 1, 0);
    for (long i = 0; i < p.splits; ++i) ++obs[split_sample(s, n, rng).front()];
    // Exact marginal tau_j [z^{R-j}] tau^{m-1} / tau_n, cells with fewer than
    // five expected draws pooled.
    std::vector<long> o;
    std::vector<double> pr;
    long pool_o = 0;
    double pool_p = 0;
    for (std::size_t j = 0; j <= R; ++j) {
      Rational q(BigInt(table->counts[j] * table->conv[static_cast<std::size_t>(m - 1)][R - j]), table->counts[n]);
      q.canonicalize();
      const double pj = q.get_d();
      if (pj * static_cast<double>(p.splits) < 5) {
        pool_o += obs[j];
        pool_p += pj;
      } else {
        o.push_back(obs[j]);
        pr.push_back(pj);
      }
    }
    if (pool_p > 0) {
      o.push_back(pool_o);
      pr.push_back(pool_p);
    }
    const auto res = chi_square_gof(o, pr);
    ctx.item({"split marginal chi-square p-value (m=" + std::to_string(m) + ", n=" + std::to_string(n) + ")",
              "bound", dec(res.p_value), "", ">= 0.001", res.p_value >= 0.001});
    ctx.checkpoint();
  }
}

void check_mc_vs_exact(Context& ctx) {
  const auto& p = ctx.params();
  ctx.input("m", "2,3");
  ctx.input("n", std::to_string(p.mc_n));
  ctx.input("reps", std::to_string(p.mc_reps));
  ctx.input("seed", std::to_string(ctx.config().seed));
  for (int m : {2, 3}) {
    SplitSampler s(ctx.counts(m, p.mc_n), SplitModel::kUniform);
    for (const TollSpec& toll : {leaves_toll(m), shape_toll(m)}) {
      MonteCarloOptions o;
      o.reps = p.mc_reps;
      o.seed = ctx.config().seed;
      o.threads = 1;
      const SimulationSummary sum = monte_carlo(s, p.mc_n, toll, o);
      const auto mt = compute_moments(toll, 2, p.mc_n, MomentMode::Float(kBits));
      const double mean = mt.moment(1, p.mc_n).to_double();
      const double var = central_moment(mt, 2, p.mc_n).to_double();
      const std::string label = "m=" + std::to_string(m) + " " + toll.name();
      ctx.abs(label + " mean (4 SE)", BigFloat(sum.moments.mean), BigFloat(mean), 4 * sum.moments.se_mean);
      ctx.abs(label + " variance (4 SE)", BigFloat(sum.moments.variance), BigFloat(var),
              4 * sum.moments.se_variance);
      ctx.checkpoint();
    }
  }
}

void check_limit_quantities(Context& ctx) {
  ctx.input("precision_bits", std::to_string(kBits));
  PrecisionGuard guard(kBits);
  const BigFloat pi = const_pi();
  ctx.abs("J_{1,1,0}", J_integral(1, 1, 0).value, pi, 1e-8);
  ctx.abs("J_{2,2,0}", J_integral(2, 2, 0).value, pi / 8L, 1e-8);
  const auto ya = moments_Y_alpha(1, 2, kBits);
  ctx.abs("M_1 (alpha=1)", ya.moments[1], sqrt(pi / 2L), 1e-10);
  ctx.abs("M_2 (alpha=1)", ya.moments[2], BigFloat(Rational(5, 3)), 1e-10);
  const ShapeCoefficients sc = shape_C_coefficients(2, 8, kBits);
  BigFloat worst(0);
  for (int s = 1; s <= 8; ++s) {
    const BigFloat& a = sc.recurrence.at(static_cast<std::size_t>(s));
    const BigFloat& b = sc.closed_form.at(static_cast<std::size_t>(s));
    worst = max(worst, msearch::abs(a - b) / max(msearch::abs(b), BigFloat(1)));
  }
  ctx.bound("shape C_{2s,0} recurrence vs closed form, s <= 8 (relative)", worst.to_double(), 1e-10);
}

void check_invariance_alpha1(Context& ctx) {
  const auto& p = ctx.params();
  ctx.input("m", "2,3");
  ctx.input("n", std::to_string(p.inv_lo) + "," + std::to_string(p.inv_hi));
  std::map<int, std::map<std::size_t, std::pair<double, double>>> stdm;
  for (int m : {2, 3}) {
    const auto mt = compute_moments(power_toll(m, 1), 4, p.inv_hi, MomentMode::Float(kBits));
    for (std::size_t n : {p.inv_lo, p.inv_hi}) {
      const CentralStats cs = central_stats(mt, n);
      stdm[m][n] = {cs.skewness->to_double(), 3 + cs.excess_kurtosis->to_double()};
      ctx.info("m=" + std::to_string(m) + " n=" + std::to_string(n) + " standardized 3rd, 4th",
               dec(stdm[m][n].first) + ", " + dec(stdm[m][n].second));
    }
    ctx.checkpoint();
  }
  {
    // Standardized moments of Y_1 from M_1..M_4.
    const auto seq = moments_Y_alpha(1, 4, kBits);
    PrecisionGuard guard(kBits);
    const BigFloat& M1 = seq.moments[1];
    const BigFloat& M2 = seq.moments[2];
    const BigFloat& M3 = seq.moments[3];
    const BigFloat& M4 = seq.moments[4];
    const BigFloat v = M2 - M1 * M1;
    const BigFloat c3 = M3 - 3L * M1 * M2 + 2L * M1 * M1 * M1;
    const BigFloat c4 = M4 - 4L * M1 * M3 + 6L * M1 * M1 * M2 - 3L * M1 * M1 * M1 * M1;
    ctx.info("limit standardized 3rd, 4th", dec(c3 / (v * sqrt(v)), 12) + ", " + dec(c4 / (v * v), 12));
  }
  auto gap = [&](std::size_t n) {
    return std::max(std::fabs(stdm[2][n].first - stdm[3][n].first),
                    std::fabs(stdm[2][n].second - stdm[3][n].second));
  };
  const double g_lo = gap(p.inv_lo);
  const double g_hi = gap(p.inv_hi);
  ctx.trend("m=2 / m=3 discrepancy shrinks", dec(g_lo) + " -> " + dec(g_hi), g_hi < g_lo);
}

void check_table1_contrast(Context& ctx) {
  const auto& p = ctx.params();
  const int m = 2;
  ctx.input("m", std::to_string(m));
  ctx.input("toll", "power:1");
  ctx.input("n", join(p.slope_n));
  ctx.input("reps", std::to_string(p.slope_reps));
  ctx.input("seed", std::to_string(ctx.config().seed));
  const TollSpec toll = power_toll(m, 1);
  auto table = ctx.counts(m, p.slope_n.back());
  for (SplitModel model : {SplitModel::kUniform, SplitModel::kRandomPermutation}) {
    const SplitSampler s = model == SplitModel::kUniform ? SplitSampler(table, model) : SplitSampler(m, model);
    std::vector<double> x, y;
    for (std::size_t n : p.slope_n) {
      MonteCarloOptions o;
      o.reps = p.slope_reps;
      o.seed = ctx.config().seed;
      x.push_back(static_cast<double>(n));
      y.push_back(monte_carlo(s, n, toll, o).moments.mean);
      ctx.checkpoint();
    }
    const double slope = log_log_slope(x, y);
    const double want = model == SplitModel::kUniform ? 1.5 : 1.0;
    ctx.abs(to_string(model) + " model log-log slope of the mean", BigFloat(slope), BigFloat(want), 0.1);
  }
}

void check_degeneracy_dichotomy(Context& ctx) {
  const std::size_t N = 40;
  ctx.input("m", "2,3");
  ctx.input("b0,b1,tail", "-2..2");
  ctx.input("n_max", std::to_string(N));
  for (int m : {2, 3}) {
    int mismatches = 0;
    int checker_mismatches = 0;
    int degenerate = 0;
    for (long b0 = -2; b0 <= 2; ++b0) {
      for (long b1 = -2; b1 <= 2; ++b1) {
        for (long c = -2; c <= 2; ++c) {
          // b_0 = x_0, b_1 = x_1 (m = 3) or the first toll value (m = 2); the
          // remaining tolls equal c.
          const TollSpec t = m == 3 ? custom_toll(3, {Rational(c)}, TailRule::kRepeatLast,
                                                  {Rational(b0), Rational(b1)})
                                    : custom_toll(2, {Rational(b1), Rational(c)}, TailRule::kRepeatLast,
                                                  {Rational(b0)});
          // Condition (b): b_n = (m-1)(X_1 - 2 x_0) for n >= m-1, X_1 = x_1 (m = 3)
          // or 2 x_0 + b_1 (m = 2).
          const bool condition = m == 3 ? c == 2 * (b1 - 2 * b0) : c == b1;
          const auto mt = compute_moments(t, 2, N, MomentMode::Exact());
          bool zero = true;
          for (std::size_t n = 0; n <= N && zero; ++n) zero = central_moment_exact(mt, 2, n) == 0;
          if (zero != condition) ++mismatches;
          if (degeneracy_check(t, N).degenerate != condition) ++checker_mismatches;
          if (condition) ++degenerate;
        }
      }
      ctx.checkpoint();
    }
    const std::string ms = "m=" + std::to_string(m);
    ctx.info(ms + " tolls satisfying (b)", std::to_string(degenerate) + " of 125");
    ctx.exact(ms + " condition (b) vs zero variance mismatches", std::to_string(mismatches), "0");
    ctx.exact(ms + " degeneracy_check mismatches", std::to_string(checker_mismatches), "0");
  }
}

using CheckFn = std::function<void(Context&)>;

struct Entry {
  CheckInfo info;
  CheckFn fn;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e{
      {{"enum-oracle", "tree counting recurrence", 1, true}, check_enum_oracle},
      {{"constants-m2", "singular expansion constants; Theorem 4.2", 2, true}, check_constants_m2},
      {{"tau-asymptotics", "asymptotics of tau_n", 3, true}, check_tau_asymptotics},
      {{"moment-oracle", "moment recurrence", 4, true}, check_moment_oracle},
      {{"space-degenerate-m2", "Section 6; Theorem A.1(c)", 5, true}, check_space_degenerate},
      {{"leaves-mean-flat", "Theorem 7.1 centering", 6, true}, check_leaves_mean_flat},
      {{"space-variance-slope", "space variance, Theorem 6.1", 7, true}, check_space_variance_slope},
      {{"clt-space-m3", "Theorem 6.1", 8, true}, [](Context& c) { check_clt(c, space_toll(3)); }},
      {{"clt-leaves-m3", "Theorem 7.1", 8, true}, [](Context& c) { check_clt(c, leaves_toll(3)); }},
      {{"shape-variance-trend", "Theorem 5.1", 9, true}, check_shape_variance_trend},
      {{"sampler-exactness", "split distribution", 10, true}, check_sampler_exactness},
      {{"mc-vs-exact", "distributional recurrence vs moment recurrence", 11, true}, check_mc_vs_exact},
      {{"limit-quantities", "Theorems 4.1, 4.2, 5.1", 12, true}, check_limit_quantities},
      {{"invariance-alpha1", "Section 4 invariance principle", 13, true}, check_invariance_alpha1},
      {{"table1-contrast", "Table 1", 14, false}, check_table1_contrast},
      {{"degeneracy-dichotomy", "Theorem A.1", 15, true}, check_degeneracy_dichotomy},
  };
  return e;
}

const Entry& find_entry(const std::string& id) {
  for (const Entry& e : entries()) {
    if (e.info.id == id) return e;
  }
  throw InvalidArgument("unknown check '" + id + "'");
}

}  // namespace

std::string to_string(Suite suite) { return suite == Suite::kFast ? "fast" : "full"; }

Suite parse_suite(const std::string& text) {
  if (text == "fast") return Suite::kFast;
  if (text == "full") return Suite::kFull;
  throw InvalidArgument("unknown suite '" + text + "' (expected fast or full)");
}

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::kPass:
      return "pass";
    case CheckStatus::kFail:
      return "fail";
    case CheckStatus::kSkipped:
      return "skipped";
  }
  return "fail";
}

const std::vector<CheckInfo>& check_catalog() {
  static const std::vector<CheckInfo> infos = [] {
    std::vector<CheckInfo> v;
    for (const Entry& e : entries()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

CheckReport run_check(const std::string& id, const VerifyConfig& config) {
  const Entry& entry = find_entry(id);
  CheckReport report;
  report.check_id = entry.info.id;
  report.theorem_ref = entry.info.theorem_ref;
  report.criterion = entry.info.criterion;
  report.inputs.emplace_back("suite", to_string(config.suite));
  const auto start = std::chrono::steady_clock::now();
  Context ctx(config, report);
  try {
    entry.fn(ctx);
    const bool ok = std::all_of(report.items.begin(), report.items.end(),
                                [](const CheckItem& it) { return it.pass; });
    report.status = ok ? CheckStatus::kPass : CheckStatus::kFail;
  } catch (const BudgetExceeded&) {
    report.status = CheckStatus::kSkipped;
    report.message = "budget of " + dec(config.budget_seconds) + " s exceeded";
  } catch (const std::exception& e) {
    report.status = CheckStatus::kFail;
    report.message = e.what();
  }
  report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<CheckReport> run_suite(const VerifyConfig& config) {
  std::vector<std::string> ids;
  if (!config.only.empty()) {
    for (const std::string& id : config.only) ids.push_back(find_entry(id).info.id);
  } else {
    for (const CheckInfo& info : check_catalog()) {
      if (config.suite == Suite::kFull || info.fast) ids.push_back(info.id);
    }
  }
  std::vector<CheckReport> reports(ids.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < ids.size(); i = next++) reports[i] = run_check(ids[i], config);
  };
  const int threads = std::max(1, std::min<int>(config.threads, static_cast<int>(ids.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return reports;
}

std::string verify_report_json(const std::vector<CheckReport>& reports, const VerifyConfig& config,
                               bool include_timing) {
  nlohmann::ordered_json j;
  j["suite"] = to_string(config.suite);
  j["seed"] = config.seed;
  int passed = 0, failed = 0, skipped = 0;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const CheckReport& r : reports) {
    nlohmann::ordered_json c;
    c["check_id"] = r.check_id;
    c["theorem_ref"] = r.theorem_ref;
    c["criterion"] = r.criterion;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.inputs) inputs[k] = v;
    c["inputs"] = inputs;
    nlohmann::ordered_json items = nlohmann::ordered_json::array();
    nlohmann::ordered_json offending = nlohmann::ordered_json::array();
    for (const CheckItem& it : r.items) {
      items.push_back({{"name", it.name},
                       {"metric", it.metric},
                       {"observed", it.observed},
                       {"expected", it.expected},
                       {"tolerance", it.tolerance},
                       {"pass", it.pass}});
      if (!it.pass) offending.push_back(it.name + ": " + it.observed);
    }
    c["items"] = items;
    c["status"] = to_string(r.status);
    c["pass"] = r.pass();
    if (!offending.empty()) c["offending"] = offending;
    if (!r.message.empty()) c["message"] = r.message;
    if (include_timing) c["runtime_seconds"] = r.runtime_seconds;
    checks.push_back(c);
    (r.status == CheckStatus::kPass ? passed : r.status == CheckStatus::kFail ? failed : skipped)++;
  }
  j["checks"] = checks;
  j["passed"] = passed;
  j["failed"] = failed;
  j["skipped"] = skipped;
  return j.dump(2) + "\n";
}

}  // namespace msearch
