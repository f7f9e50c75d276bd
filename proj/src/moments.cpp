#include "msearch/moments.hpp"

#include <algorithm>

#include "msearch/errors.hpp"
#include "msearch/series.hpp"

namespace msearch {

MomentMode MomentMode::parse(const std::string& text) {
  if (text == "exact") return Exact();
  if (text.rfind("float:", 0) == 0) {
    long bits = 0;
    try {
      std::size_t used = 0;
      bits = std::stol(text.substr(6), &used);
      if (used != text.size() - 6) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw InvalidArgument("bad mode '" + text + "'");
    }
    if (bits < 32) throw InvalidArgument("float mode needs at least 32 bits");
    return Float(bits);
  }
  throw InvalidArgument("unknown mode '" + text + "' (expected exact or float:BITS)");
}

std::string MomentMode::name() const {
  return exact ? "exact" : "float:" + std::to_string(bits);
}

namespace {

inline void scale(BigInt& v, long c) { mpz_mul_si(v.get_mpz_t(), v.get_mpz_t(), c); }
inline void scale(BigFloat& v, long c) { v *= c; }
inline void add_into(BigInt& acc, const BigInt& v) { acc += v; }
inline void add_into(BigFloat& acc, const BigFloat& v) { acc += v; }

long binomial(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Coefficient recurrence on the bivariate exponential generating function
// E(x, z) = sum_s G_s(z) x^s / s!, G_s[n] = tau_n mu_n^{[s]}. P[k][t] holds
// t! [x^t] E^k for 2 <= k <= m and 1 <= t <= S; the x^0 rows are the powers
// of tau(z).
template <class T>
struct Engine {
  int m = 2;
  int S = 1;
  std::size_t N = 0;
  const std::vector<std::vector<T>>* conv = nullptr;
  std::vector<T> b;  // indexed by n; entries below m-1 unused
  std::vector<T> x;  // x_0..x_{m-2}
  bool keep = false;

  std::vector<std::vector<T>> G;
  std::vector<std::vector<T>> R;
  std::vector<std::vector<std::vector<T>>> P;

  const std::vector<T>& row(int k, int t) const {
    if (t == 0) return (*conv)[static_cast<std::size_t>(k)];
    if (k == 1) return G[static_cast<std::size_t>(t)];
    return P[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)];
  }

  void run() {
    const auto Su = static_cast<std::size_t>(S);
    G.assign(Su + 1, std::vector<T>(N + 1, T(0)));
    for (std::size_t n = 0; n <= N; ++n) G[0][n] = (*conv)[1][n];
    P.assign(static_cast<std::size_t>(m) + 1, {});
    for (int k = 2; k <= m; ++k) {
      P[static_cast<std::size_t>(k)].assign(Su + 1, std::vector<T>(N + 1, T(0)));
    }
    if (keep) R.assign(Su + 1, std::vector<T>(N + 1, T(0)));

    std::vector<T> bp(Su + 1, T(1));
    for (std::size_t n = 0; n <= N; ++n) {
      if (n + 2 <= static_cast<std::size_t>(m)) {
        T p(1);
        for (std::size_t s = 1; s <= Su; ++s) {
          p *= x[n];
          G[s][n] = p;
          if (keep) R[s][n] = p;
        }
        continue;
      }
      const std::size_t j = n - static_cast<std::size_t>(m - 1);
      for (int k = 2; k <= m; ++k) {
        for (int t = 1; t <= S; ++t) {
          T acc(0);
          for (int u = 0; u <= t; ++u) {
            const int v = t - u;
            if (k == 2 && u > v) break;
            T c = cauchy_coefficient(row(k - 1, u), row(1, v), j);
            long w = binomial(t, u);
            // For k = 2 both factors are G, so (u, v) and (v, u) coincide.
            if (k == 2 && u != v) w *= 2;
            if (w != 1) scale(c, w);
            add_into(acc, c);
          }
          P[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)][j] = std::move(acc);
        }
      }
      // G_s[n] = sum_{s0} binom(s, s0) b_n^{s0} P[m][s - s0][j].
      for (std::size_t s = 1; s <= Su; ++s) bp[s] = bp[s - 1] * b[n];
      for (int s = 1; s <= S; ++s) {
        T acc(0);
        for (int s0 = 0; s0 <= s; ++s0) {
          if (s0 > 0 && b[n] == T(0)) break;
          T term = row(m, s - s0)[j] * bp[static_cast<std::size_t>(s0)];
          const long w = binomial(s, s0);
          if (w != 1) scale(term, w);
          add_into(acc, term);
        }
        G[static_cast<std::size_t>(s)][n] = std::move(acc);
      }
      if (keep) {
        const auto& tm1 = (*conv)[static_cast<std::size_t>(m - 1)];
        for (std::size_t s = 1; s <= Su; ++s) {
          T c = cauchy_coefficient(G[s], tm1, j);
          scale(c, m);
          R[s][n] = G[s][n] - c;
        }
      }
    }
  }
};

void check_request(const TollSpec& toll, int table_m, std::size_t table_N,
                   int s_max, std::size_t N) {
  if (toll.m != table_m) throw InvalidArgument("toll and table use different m");
  if (s_max < 1) throw InvalidArgument("s_max must be at least 1");
  if (N > table_N) {
    throw InvalidArgument("tree count table covers " + std::to_string(table_N) +
                          " keys, moments requested to " + std::to_string(N));
  }
  if (toll.initial.size() != static_cast<std::size_t>(toll.m - 1)) {
    throw InvalidArgument("toll needs m-1 initial values");
  }
}

std::vector<std::vector<BigInt>> truncated_conv(const TreeCountTable& table, std::size_t N) {
  std::vector<std::vector<BigInt>> out(table.conv.size());
  for (std::size_t k = 1; k < table.conv.size(); ++k) {
    out[k].assign(table.conv[k].begin(), table.conv[k].begin() + static_cast<long>(N) + 1);
  }
  return out;
}

}  // namespace

MomentTable exact_moments(const TollSpec& toll, const TreeCountTable& table,
                          int s_max, std::size_t N, MomentMode mode,
                          bool keep_intermediates) {
  check_request(toll, table.m, table.N, s_max, N);
  if (!mode.exact) {
    return exact_moments(toll, to_float(table, mode.bits), s_max, N, keep_intermediates);
  }
  if (!toll.is_rational()) {
    throw ModeError("exact mode cannot represent toll " + toll.name() +
                    "; use float:BITS");
  }
  const int m = toll.m;
  // Common denominator of all initial values and tolls up to N.
  BigInt D = 1;
  std::vector<Rational> bq(N + 1, Rational(0));
  for (std::size_t n = static_cast<std::size_t>(m - 1); n <= N; ++n) {
    bq[n] = toll.b_exact(static_cast<long>(n));
    mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), bq[n].get_den_mpz_t());
  }
  for (const auto& xj : toll.initial) {
    mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), xj.get_den_mpz_t());
  }
  const auto conv = truncated_conv(table, N);
  Engine<BigInt> e;
  e.m = m;
  e.S = s_max;
  e.N = N;
  e.conv = &conv;
  e.keep = keep_intermediates;
  e.b.resize(N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    Rational v = bq[n] * Rational(D);
    v.canonicalize();
    e.b[n] = v.get_num();
  }
  for (const auto& xj : toll.initial) {
    Rational v = xj * Rational(D);
    v.canonicalize();
    e.x.push_back(v.get_num());
  }
  e.run();

  MomentTable mt;
  mt.toll_ = toll;
  mt.N_ = N;
  mt.s_max_ = s_max;
  mt.mode_ = mode;
  mt.D_ = D;
  mt.G_int_ = std::move(e.G);
  mt.r_int_ = std::move(e.R);
  mt.tau_int_ = conv[1];
  return mt;
}

MomentTable exact_moments(const TollSpec& toll, const FloatTreeCountTable& table,
                          int s_max, std::size_t N, bool keep_intermediates) {
  check_request(toll, table.m, table.N, s_max, N);
  const long bits = table.counts.front().precision();
  PrecisionGuard guard(bits);
  const int m = toll.m;
  std::vector<std::vector<BigFloat>> conv(table.conv.size());
  for (std::size_t k = 1; k < table.conv.size(); ++k) {
    conv[k].assign(table.conv[k].begin(), table.conv[k].begin() + static_cast<long>(N) + 1);
  }
  Engine<BigFloat> e;
  e.m = m;
  e.S = s_max;
  e.N = N;
  e.conv = &conv;
  e.keep = keep_intermediates;
  e.b.assign(N + 1, BigFloat(0));
  for (std::size_t n = static_cast<std::size_t>(m - 1); n <= N; ++n) {
    e.b[n] = toll.b_float(static_cast<long>(n));
  }
  for (const auto& xj : toll.initial) e.x.emplace_back(xj);
  e.run();

  MomentTable mt;
  mt.toll_ = toll;
  mt.N_ = N;
  mt.s_max_ = s_max;
  mt.mode_ = MomentMode::Float(bits);
  mt.G_float_ = std::move(e.G);
  mt.r_float_ = std::move(e.R);
  mt.tau_float_ = conv[1];
  return mt;
}

MomentTable compute_moments(const TollSpec& toll, int s_max, std::size_t N,
                            MomentMode mode, bool keep_intermediates) {
  if (mode.exact) {
    return exact_moments(toll, tree_counts(toll.m, N), s_max, N, mode, keep_intermediates);
  }
  return exact_moments(toll, tree_counts_float(toll.m, N, mode.bits), s_max, N,
                       keep_intermediates);
}

namespace {

void check_index(const MomentTable& mt, int s, std::size_t n) {
  if (s < 0 || s > mt.s_max() || n > mt.N()) {
    throw InvalidArgument("moment index (s=" + std::to_string(s) + ", n=" +
                          std::to_string(n) + ") out of range");
  }
}

}  // namespace

Rational MomentTable::mu_exact(int s, std::size_t n) const {
  check_index(*this, s, n);
  if (!mode_.exact) throw ModeError("mu_exact on a float-mode table");
  BigInt Ds;
  mpz_pow_ui(Ds.get_mpz_t(), D_.get_mpz_t(), static_cast<unsigned long>(s));
  Rational q(G_int_[static_cast<std::size_t>(s)][n], Ds);
  q.canonicalize();
  return q;
}

Rational MomentTable::moment_exact(int s, std::size_t n) const {
  Rational q = mu_exact(s, n) / Rational(tau_int_[n]);
  q.canonicalize();
  return q;
}

BigFloat MomentTable::mu(int s, std::size_t n) const {
  check_index(*this, s, n);
  PrecisionGuard guard(mode_.bits);
  if (mode_.exact) return BigFloat(mu_exact(s, n));
  return G_float_[static_cast<std::size_t>(s)][n];
}

BigFloat MomentTable::moment(int s, std::size_t n) const {
  check_index(*this, s, n);
  PrecisionGuard guard(mode_.bits);
  if (mode_.exact) return BigFloat(moment_exact(s, n));
  return G_float_[static_cast<std::size_t>(s)][n] / tau_float_[n];
}

Rational MomentTable::r_exact(int s, std::size_t n) const {
  check_index(*this, s, n);
  if (!mode_.exact) throw ModeError("r_exact on a float-mode table");
  if (r_int_.empty()) throw InvalidArgument("intermediates were not kept");
  BigInt Ds;
  mpz_pow_ui(Ds.get_mpz_t(), D_.get_mpz_t(), static_cast<unsigned long>(s));
  Rational q(r_int_[static_cast<std::size_t>(s)][n], Ds);
  q.canonicalize();
  return q;
}

BigFloat MomentTable::r(int s, std::size_t n) const {
  check_index(*this, s, n);
  PrecisionGuard guard(mode_.bits);
  if (mode_.exact) return BigFloat(r_exact(s, n));
  if (r_float_.empty()) throw InvalidArgument("intermediates were not kept");
  return r_float_[static_cast<std::size_t>(s)][n];
}

Rational central_moment_exact(const MomentTable& mt, int s, std::size_t n) {
  const Rational mean = mt.moment_exact(1, n);
  Rational acc = 0;
  Rational neg_mean_pow = 1;  // (-mean)^{s-k}, built from k = s downwards
  for (int k = s; k >= 0; --k) {
    acc += Rational(binomial(s, k)) * mt.moment_exact(k, n) * neg_mean_pow;
    neg_mean_pow *= -mean;
  }
  acc.canonicalize();
  return acc;
}

BigFloat central_moment(const MomentTable& mt, int s, std::size_t n) {
  if (mt.mode().exact) {
    PrecisionGuard guard(mt.mode().bits);
    return BigFloat(central_moment_exact(mt, s, n));
  }
  PrecisionGuard guard(mt.mode().bits);
  const BigFloat mean = mt.moment(1, n);
  BigFloat acc(0);
  BigFloat neg_mean_pow(1);
  for (int k = s; k >= 0; --k) {
    acc += mt.moment(k, n) * neg_mean_pow * binomial(s, k);
    neg_mean_pow *= -mean;
  }
  return acc;
}

CentralStats central_stats(const MomentTable& mt, std::size_t n) {
  if (mt.s_max() < 2) throw InvalidArgument("central_stats needs s_max >= 2");
  PrecisionGuard guard(mt.mode().bits);
  CentralStats st;
  st.n = n;
  if (mt.mode().exact) {
    st.mean_exact = mt.moment_exact(1, n);
    st.variance_exact = central_moment_exact(mt, 2, n);
    st.mean = BigFloat(*st.mean_exact);
    st.variance = BigFloat(*st.variance_exact);
    st.degenerate = *st.variance_exact == 0;
    if (st.degenerate) return st;
  } else {
    st.mean = mt.moment(1, n);
    st.variance = central_moment(mt, 2, n);
    const BigFloat tol = ldexp(abs(mt.moment(2, n)) + BigFloat(1), -(mt.mode().bits - 12));
    if (st.variance < -tol) {
      throw NumericalError("variance " + to_decimal(st.variance, 6) + " at n=" +
                           std::to_string(n) + " is negative beyond rounding");
    }
    if (abs(st.variance) <= tol) {
      st.degenerate = true;
      return st;
    }
  }
  const BigFloat sd = sqrt(st.variance);
  if (mt.s_max() >= 3) st.skewness = central_moment(mt, 3, n) / (sd * st.variance);
  if (mt.s_max() >= 4) {
    st.excess_kurtosis = central_moment(mt, 4, n) / (st.variance * st.variance) - BigFloat(3);
  }
  return st;
}

std::string moments_csv(const MomentTable& mt) {
  PrecisionGuard guard(mt.mode().bits);
  const int digits = 20;
  std::string out = "n,s,mu_exact,mean,var,skew,kurt\n";
  for (std::size_t n = 0; n <= mt.N(); ++n) {
    std::string stats;
    if (mt.s_max() >= 2) {
      const CentralStats st = central_stats(mt, n);
      stats = to_decimal(st.mean, digits) + "," + to_decimal(st.variance, digits) + ",";
      if (st.skewness) stats += to_decimal(*st.skewness, digits);
      stats += ",";
      if (st.excess_kurtosis) stats += to_decimal(*st.excess_kurtosis + BigFloat(3), digits);
    } else {
      stats = to_decimal(mt.moment(1, n), digits) + ",,,";
    }
    for (int s = 1; s <= mt.s_max(); ++s) {
      const std::string mu = mt.mode().exact
                                 ? to_string(mt.moment_exact(s, n))
                                 : to_decimal(mt.moment(s, n), decimal_digits_for_bits(mt.mode().bits));
      out += std::to_string(n) + "," + std::to_string(s) + "," + mu + "," + stats + "\n";
    }
  }
  return out;
}

Rational DegeneracyResult::predicted(std::size_t n) const {
  const Rational nn(static_cast<long>(n));
  return nn * x1 - (nn - 1) * x0;
}

DegeneracyResult degeneracy_check(const TollSpec& toll, std::size_t n_max) {
  if (!toll.is_rational()) {
    throw ModeError("degeneracy_check needs a rational toll, got " + toll.name());
  }
  const int m = toll.m;
  DegeneracyResult res;
  // The theorem takes x_j = b_j for j <= m-2; report kinds whose own toll
  // disagrees with their initial values there.
  if (toll.kind != TollKind::kCustom) {
    std::string mismatches;
    for (int j = 0; j <= m - 2; ++j) {
      Rational own;
      switch (toll.kind) {
        case TollKind::kSpace:
          own = 1;
          break;
        case TollKind::kLeaves:
          own = 0;
          break;
        case TollKind::kPower:
          own = j == 0 && toll.alpha > 0 ? Rational(0) : Rational(1);
          if (toll.alpha > 0 && j > 0) {
            BigInt p;
            mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(j), toll.alpha.get_num().get_ui());
            own = Rational(p);
          }
          break;
        default:
          break;
      }
      const Rational& xj = toll.initial[static_cast<std::size_t>(j)];
      if (own != xj) {
        if (!mismatches.empty()) mismatches += ", ";
        mismatches += "x_" + std::to_string(j) + " = " + to_string(xj) + " but b_" +
                      std::to_string(j) + " = " + to_string(own);
      }
    }
    if (!mismatches.empty()) {
      res.convention_note = toll.name() + ": " + mismatches + "; using b_j := x_j for j <= m-2";
    }
  }
  res.x0 = toll.initial[0];
  res.x1 = m == 2 ? Rational(2 * res.x0 + toll.b_exact(1)) : toll.initial[1];
  res.x1.canonicalize();
  for (std::size_t n = 2; n + 2 <= static_cast<std::size_t>(m) && n <= n_max; ++n) {
    if (toll.initial[n] != res.predicted(n)) {
      res.violating_n = n;
      break;
    }
  }
  if (!res.violating_n) {
    const Rational level = Rational(m - 1) * (res.x1 - 2 * res.x0);
    for (std::size_t n = static_cast<std::size_t>(m - 1); n <= n_max; ++n) {
      if (toll.b_exact(static_cast<long>(n)) != level) {
        res.violating_n = n;
        break;
      }
    }
  }
  res.degenerate = !res.violating_n.has_value();
  if (!res.degenerate) {
    const MomentTable mt = compute_moments(toll, 2, n_max, MomentMode::Exact());
    for (std::size_t n = 0; n <= n_max; ++n) {
      if (central_moment_exact(mt, 2, n) > 0) {
        res.positive_variance_n = n;
        break;
      }
    }
  }
  return res;
}

}  // namespace msearch
