#include "msearch/singular.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "json.hpp"
#include "msearch/errors.hpp"
#include "msearch/special.hpp"

namespace msearch {

namespace {

// Internal precision for m: the residual check involves (m-1)^{m-1}.
long internal_bits(int m, long bits) {
  return bits + kGuardBits + 8 +
         static_cast<long>(std::ceil((m - 1) * std::log2(static_cast<double>(m))));
}

// m^{m/(m-1)}
BigFloat m_power(int m) {
  const BigFloat mm(static_cast<long>(m));
  return mm * root(mm, static_cast<unsigned long>(m - 1));
}

// m^{m/(m-1)} sum_{j=1}^{m-1} z^j - (m-1) and its derivative.
void defining_function(int m, const BigFloat& mp, const BigFloat& z, BigFloat& f,
                       BigFloat& df) {
  BigFloat sum(0);
  BigFloat dsum(0);
  BigFloat zp(1);  // z^{j-1}
  for (int j = 1; j <= m - 1; ++j) {
    dsum += zp * static_cast<long>(j);
    zp *= z;
    sum += zp;
  }
  f = mp * sum - BigFloat(static_cast<long>(m - 1));
  df = mp * dsum;
}

struct RootResult {
  BigFloat rho;
  BigFloat lo;
  BigFloat hi;
};

RootResult find_root(int m, long bits) {
  PrecisionGuard guard(bits);
  const BigFloat mp = m_power(m);
  BigFloat lo(0);
  BigFloat hi(1);
  BigFloat f;
  BigFloat df;
  defining_function(m, mp, lo, f, df);
  if (!(f < BigFloat(0))) throw NumericalError("dominant_singularity: no sign change at 0");
  defining_function(m, mp, hi, f, df);
  if (!(f > BigFloat(0))) throw NumericalError("dominant_singularity: no sign change at 1");
  for (int i = 0; i < 64; ++i) {
    BigFloat mid = (lo + hi) / 2L;
    defining_function(m, mp, mid, f, df);
    if (f < BigFloat(0)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  BigFloat z = (lo + hi) / 2L;
  const BigFloat eps = ldexp(BigFloat(1), -(bits - 4));
  for (int i = 0; i < 200; ++i) {
    defining_function(m, mp, z, f, df);
    BigFloat step = f / df;
    z -= step;
    if (abs(step) <= eps * z) break;
  }
  // Newton never leaves the bracket here (the function is convex, increasing),
  // but keep the bracket honest.
  if (z < lo || z > hi) throw NumericalError("dominant_singularity: Newton left the bracket");
  return {z, lo, hi};
}

BigFloat original_residual(int m, const BigFloat& rho) {
  BigFloat sum(0);
  BigFloat zp(1);
  for (int j = 1; j <= m - 1; ++j) {
    zp *= rho;
    sum += zp;
  }
  const BigFloat mm(static_cast<long>(m));
  return pow(mm, static_cast<long>(m)) * pow(sum, static_cast<long>(m - 1)) -
         pow(BigFloat(static_cast<long>(m - 1)), static_cast<long>(m - 1));
}

}  // namespace

BigFloat dominant_singularity(int m, long precision_bits) {
  if (m < 2) throw InvalidArgument("m must be at least 2");
  const long p = internal_bits(m, precision_bits);
  RootResult r = find_root(m, p);
  PrecisionGuard guard(p);
  const BigFloat res = original_residual(m, r.rho);
  if (abs(res) >= ldexp(BigFloat(1), -precision_bits + 8)) {
    throw PrecisionError("dominant_singularity: residual above tolerance");
  }
  return r.rho;
}

SingularData expansion_coefficients(int m, long precision_bits) {
  if (m < 2) throw InvalidArgument("m must be at least 2");
  if (precision_bits < 16) throw InvalidArgument("precision must be at least 16 bits");
  const long p = internal_bits(m, precision_bits);
  RootResult r = find_root(m, p);
  PrecisionGuard guard(p);
  SingularData sd;
  sd.m = m;
  sd.precision_bits = precision_bits;
  sd.rho = r.rho;
  sd.bracket_lo = r.lo;
  sd.bracket_hi = r.hi;
  sd.residual = original_residual(m, r.rho);
  if (abs(sd.residual) >= ldexp(BigFloat(1), -precision_bits + 8)) {
    throw PrecisionError("expansion_coefficients: residual above tolerance");
  }
  const BigFloat one(1);
  const BigFloat mm(static_cast<long>(m));
  const BigFloat mp = m_power(m);
  const BigFloat& rho = sd.rho;

  BigFloat geo(0);
  BigFloat zp(1);
  for (int j = 0; j <= m - 2; ++j) {
    geo += zp;
    zp *= rho;
  }
  sd.w_rho = mm * geo / static_cast<long>(m - 1);
  sd.a0 = one / (root(mm, static_cast<unsigned long>(m - 1)) * rho);
  sd.alpha_star = mm - (mp - one) / (one / rho - one);
  sd.a1 = -sqrt(mm * 2L * sd.alpha_star) / (mp * rho);
  sd.a2 = sd.a0 - BigFloat(static_cast<long>(m - 2)) * sd.a1 * sd.a1 / (sd.a0 * 6L);
  sd.c0 = BigFloat(Rational(m - 2, 3 * (m - 1)));
  sd.sigma_m = -sd.a1 * static_cast<long>(m - 1) / (sqrt(BigFloat(2)) * sd.a0);
  sd.sigma_m_alt = BigFloat(static_cast<long>(m - 1)) * sqrt(sd.alpha_star / mm);

  const BigFloat tol = ldexp(BigFloat(1), -precision_bits);
  if (abs(sd.w_rho - sd.a0) > tol * sd.a0) {
    throw PrecisionError("expansion_coefficients: w_rho and a0 disagree");
  }
  if (abs(sd.sigma_m - sd.sigma_m_alt) > tol * sd.sigma_m) {
    throw PrecisionError("expansion_coefficients: sigma_m forms disagree");
  }
  return sd;
}

namespace {

BigFloat scaled_count(const FloatTreeCountTable& table, const BigFloat& rho,
                      std::size_t n) {
  return table.counts[n] * pow(rho, static_cast<long>(n));
}

}  // namespace

TauAsymptotics fit_tau_asymptotics(const SingularData& sd,
                                   const FloatTreeCountTable& table,
                                   std::size_t N) {
  if (N < 64 || N > table.N) {
    throw InvalidArgument("fit_tau_asymptotics: need 64 <= N <= table size");
  }
  const long p = std::max(sd.rho.precision(), table.counts[N].precision());
  PrecisionGuard guard(p);
  const BigFloat sqrt_pi = sqrt(const_pi());
  TauAsymptotics fit;
  fit.N = N;
  fit.K0 = -sd.a1 / (sqrt_pi * 2L);
  const std::size_t ns[3] = {N / 4, N / 2, N};
  BigFloat u[3];
  BigFloat g[3];
  for (int i = 0; i < 3; ++i) {
    const BigFloat n(static_cast<long>(ns[i]));
    const BigFloat f = scaled_count(table, sd.rho, ns[i]) * n * sqrt(n);
    u[i] = BigFloat(1) / n;
    g[i] = n * (f - fit.K0);
  }
  // Quadratic in u through the three points: g = K1 + K2 u + K3 u^2.
  const BigFloat d01 = (g[1] - g[0]) / (u[1] - u[0]);
  const BigFloat d12 = (g[2] - g[1]) / (u[2] - u[1]);
  fit.K3 = (d12 - d01) / (u[2] - u[0]);
  fit.K2 = d12 - fit.K3 * (u[1] + u[2]);
  fit.K1 = g[2] - fit.K2 * u[2] - fit.K3 * u[2] * u[2];
  const BigFloat two_point = g[2] - d12 * u[2];
  fit.K1_uncertainty = abs(fit.K1 - two_point);
  // K1 = (3/8) a1 / Gamma(-1/2) + a3 / Gamma(-3/2).
  const BigFloat gamma_m12 = -sqrt_pi * 2L;
  const BigFloat gamma_m32 = sqrt_pi * 4L / 3L;
  fit.a3 = gamma_m32 * (fit.K1 - sd.a1 * 3L / (gamma_m12 * 8L));
  return fit;
}

namespace {

bool is_half(const Rational& a) { return a == Rational(1, 2); }

void check_convergent(const TollSpec& toll) {
  if (toll.kind == TollKind::kPower && toll.alpha > Rational(1, 2)) {
    throw DivergentSeriesError("series constant diverges for power toll with alpha = " +
                               to_string(toll.alpha) + " > 1/2");
  }
}

// Index past which a custom toll is constant.
std::size_t custom_stable_from(const TollSpec& toll) {
  return static_cast<std::size_t>(toll.m - 1) + toll.values.size();
}

}  // namespace

BigFloat toll_series_estimate(const TollSpec& toll,
                              const FloatTreeCountTable& table,
                              const SingularData& sd, std::size_t cutoff) {
  check_convergent(toll);
  if (toll.m != table.m || toll.m != sd.m) {
    throw InvalidArgument("toll_series_estimate: m mismatch");
  }
  if (toll.kind == TollKind::kCustom) cutoff = std::max(cutoff, custom_stable_from(toll) + 64);
  if (cutoff > table.N) throw InvalidArgument("toll_series_estimate: table too short");
  const int m = toll.m;
  const long p = std::max(sd.rho.precision(), table.counts[0].precision());
  PrecisionGuard guard(p);
  const BigFloat& rho = sd.rho;
  const BigFloat sqrt_pi = sqrt(const_pi());
  const bool half = toll.kind == TollKind::kPower && is_half(toll.alpha);
  const BigFloat comp = sd.a1 / (sqrt_pi * 2L);  // a1 / (2 sqrt(pi))

  BigFloat sum(0);
  BigFloat rp = pow(rho, static_cast<long>(m - 1));
  for (std::size_t n = static_cast<std::size_t>(m - 1); n <= cutoff; ++n) {
    const BigFloat t = table.counts[n] * rp;
    const long nl = static_cast<long>(n);
    if (half) {
      sum += sqrt(BigFloat(nl)) * t + comp / nl;
    } else {
      sum += t * toll.b_float(nl);
    }
    rp *= rho;
  }
  BigFloat xp(1);
  for (int j = 0; j <= m - 2; ++j) {
    sum += BigFloat(toll.initial[static_cast<std::size_t>(j)]) * xp;
    xp *= rho;
  }

  // Tail beyond the cutoff.
  if (toll.has_finite_support()) return sum;
  const TauAsymptotics fit = fit_tau_asymptotics(sd, table, cutoff);
  const BigFloat K[4] = {fit.K0, fit.K1, fit.K2, fit.K3};
  const long a = static_cast<long>(cutoff) + 1;
  const BigFloat three_halves(1.5);
  BigFloat tail(0);
  switch (toll.kind) {
    case TollKind::kPower: {
      if (half) {
        for (int i = 1; i <= 3; ++i) tail += K[i] * log_power_tail(BigFloat(1 + i), 0, a);
      } else {
        const BigFloat alpha(toll.alpha);
        for (int i = 0; i <= 3; ++i) {
          tail += K[i] * log_power_tail(three_halves + BigFloat(i) - alpha, 0, a);
        }
      }
      break;
    }
    case TollKind::kSpace:
    case TollKind::kCustom: {
      const BigFloat v = toll.kind == TollKind::kSpace
                             ? BigFloat(1)
                             : BigFloat(toll.values.back());
      for (int i = 0; i <= 3; ++i) {
        tail += v * K[i] * log_power_tail(three_halves + BigFloat(i), 0, a);
      }
      break;
    }
    case TollKind::kShape: {
      // ln binom(n, m-1) = (m-1) ln n - ln (m-1)! - sum_k S_k / (k n^k),
      // S_k = sum_{i=1}^{m-2} i^k.
      BigFloat lfact(0);
      for (int i = 2; i <= m - 1; ++i) lfact += log(BigFloat(static_cast<long>(i)));
      BigFloat S[4] = {BigFloat(0), BigFloat(0), BigFloat(0), BigFloat(0)};
      for (int k = 1; k <= 3; ++k) {
        BigInt s = 0;
        for (long i = 1; i <= m - 2; ++i) {
          BigInt ik;
          mpz_ui_pow_ui(ik.get_mpz_t(), static_cast<unsigned long>(i), static_cast<unsigned long>(k));
          s += ik;
        }
        S[k] = BigFloat(s) / static_cast<long>(k);
      }
      for (int i = 0; i <= 3; ++i) {
        const BigFloat s0 = three_halves + BigFloat(i);
        BigFloat term = BigFloat(static_cast<long>(m - 1)) * log_power_tail(s0, 1, a) -
                        lfact * log_power_tail(s0, 0, a);
        for (int k = 1; k + i <= 3; ++k) {
          if (S[k].is_zero()) continue;
          term -= S[k] * log_power_tail(s0 + BigFloat(k), 0, a);
        }
        tail += K[i] * term;
      }
      break;
    }
    case TollKind::kLeaves:
      break;
  }
  return sum + tail;
}

SeriesConstant toll_series_constant(const TollSpec& toll,
                                    FloatTreeCountTable& table,
                                    const SingularData& sd,
                                    const BigFloat& target_error,
                                    std::size_t initial_cutoff,
                                    std::size_t max_cutoff) {
  check_convergent(toll);
  std::size_t cutoff = std::max<std::size_t>(initial_cutoff, 256);
  if (toll.kind == TollKind::kCustom) {
    cutoff = std::max(cutoff, 2 * (custom_stable_from(toll) + 64));
  }
  for (;;) {
    extend(table, cutoff);
    SeriesConstant out;
    out.cutoff = cutoff;
    out.value = toll_series_estimate(toll, table, sd, cutoff);
    const BigFloat coarse = toll_series_estimate(toll, table, sd, cutoff / 2);
    out.tail_error_bound = abs(out.value - coarse) +
                           ldexp(abs(out.value) + BigFloat(1), -sd.precision_bits);
    if (out.tail_error_bound <= target_error) return out;
    if (cutoff * 2 > max_cutoff) {
      throw PrecisionError("toll_series_constant: error bound " +
                           to_decimal(out.tail_error_bound, 6) + " above target " +
                           to_decimal(target_error, 6) + " at cutoff " +
                           std::to_string(cutoff));
    }
    cutoff *= 2;
  }
}

TheoremConstants theorem_constants(const TollSpec& toll, long precision_bits,
                                   const ConstantsOptions& options) {
  const int m = toll.m;
  TheoremConstants tc;
  tc.toll = toll;
  tc.sd = expansion_coefficients(m, precision_bits);
  const SingularData& sd = tc.sd;
  PrecisionGuard guard(sd.rho.precision());
  const BigFloat one(1);
  const BigFloat mm(static_cast<long>(m));
  const BigFloat m1(static_cast<long>(m - 1));
  const BigFloat sqrt_pi = sqrt(const_pi());
  const BigFloat& a0 = sd.a0;
  const BigFloat& a1 = sd.a1;
  const BigFloat& rho = sd.rho;
  // 2 a0 / ((m-1) a1^2) = rho m^{m/(m-1)} / ((m-1) alpha*).
  const BigFloat slope = a0 * 2L / (m1 * a1 * a1);
  tc.tail_error_bound = BigFloat(0);

  const bool convergent =
      !(toll.kind == TollKind::kPower && toll.alpha > Rational(1, 2));
  if (convergent) {
    FloatTreeCountTable table =
        tree_counts_float(m, options.initial_cutoff, sd.rho.precision());
    SeriesConstant c = toll_series_constant(toll, table, sd, BigFloat(options.target_error),
                                            options.initial_cutoff, options.max_cutoff);
    tc.C = c.value;
    tc.tail_error_bound = c.tail_error_bound;
    tc.cutoff = c.cutoff;
  }

  auto delta1_of = [&](const BigFloat& d1) {
    // sum_j (x_j - (j+1) d1)^2 rho^j
    BigFloat acc(0);
    BigFloat rp(1);
    for (int j = 0; j <= m - 2; ++j) {
      BigFloat xt = BigFloat(toll.initial[static_cast<std::size_t>(j)]) -
                    d1 * static_cast<long>(j + 1);
      acc += xt * xt * rp;
      rp *= rho;
    }
    return acc;
  };

  switch (toll.kind) {
    case TollKind::kPower: {
      const Rational& alpha = toll.alpha;
      if (alpha < Rational(1, 2)) {
        tc.d1 = slope * *tc.C;
        if (alpha > 0) {
          tc.mean_lead = a0 * gamma(Rational(alpha - Rational(1, 2))) /
                         (-a1 * m1 * gamma(alpha));
        }
      } else if (alpha == Rational(1, 2)) {
        tc.d0 = slope * *tc.C;
        tc.mean_lead = a0 / (-a1 * sqrt_pi * m1);
        tc.eta_half = a0 * (const_euler() + const_log2() * 2L) / (-a1 * sqrt_pi * m1) + *tc.d0;
      } else {
        tc.mean_lead = a0 * gamma(Rational(alpha - Rational(1, 2))) /
                       (-a1 * m1 * gamma(alpha));
      }
      break;
    }
    case TollKind::kShape: {
      tc.d1 = slope * *tc.C;
      const BigFloat r = a0 / a1;
      tc.sigma2 = r * r * 8L * (one - const_log2());
      break;
    }
    case TollKind::kSpace: {
      const BigFloat d1 = mm * (one - rho * root(mm, static_cast<unsigned long>(m - 1))) /
                          (m1 * sd.alpha_star);
      tc.d1 = d1;
      tc.delta1 = delta1_of(d1);
      tc.B1 = -a0 / m1;
      tc.B2 = a0 / (-a1 * m1) * (*tc.delta1 - a0 / (mm * m1));
      tc.sigma2 = *tc.B2 * 2L / (-a1);
      break;
    }
    case TollKind::kLeaves: {
      const BigFloat d1 = rho / sd.alpha_star;
      tc.d1 = d1;
      tc.delta1 = delta1_of(d1);
      tc.B1 = BigFloat(0);
      const BigFloat rm = pow(rho, static_cast<long>(m - 1));
      tc.B2 = a0 * (rm * (one - mm * 2L * d1) + *tc.delta1) / (-a1 * m1);
      tc.sigma2 = *tc.B2 * 2L / (-a1);
      tc.B2_printed = a0 * (rm + *tc.delta1) / (-a1 * m1);
      tc.sigma2_printed = *tc.B2_printed * 2L / (-a1);
      break;
    }
    case TollKind::kCustom: {
      if (tc.C) tc.d1 = slope * *tc.C;
      break;
    }
  }
  return tc;
}

std::string theorem_constants_json(const TheoremConstants& tc) {
  const SingularData& sd = tc.sd;
  const int digits = decimal_digits_for_bits(sd.precision_bits);
  auto dec = [digits](const BigFloat& x) { return to_decimal(x, digits); };
  nlohmann::ordered_json j;
  j["m"] = sd.m;
  j["toll"] = tc.toll.name();
  j["precision_bits"] = sd.precision_bits;
  j["rho"] = dec(sd.rho);
  j["rho_bracket"] = {dec(sd.bracket_lo), dec(sd.bracket_hi)};
  j["rho_residual"] = to_decimal(sd.residual, 6);
  j["w_rho"] = dec(sd.w_rho);
  j["a0"] = dec(sd.a0);
  j["a1"] = dec(sd.a1);
  j["a2"] = dec(sd.a2);
  j["alpha_star"] = dec(sd.alpha_star);
  j["c0"] = dec(sd.c0);
  j["sigma_m"] = dec(sd.sigma_m);
  j["sigma_m_alt"] = dec(sd.sigma_m_alt);
  const std::pair<const char*, const std::optional<BigFloat>*> fields[] = {
      {"C", &tc.C},
      {"d1", &tc.d1},
      {"d0", &tc.d0},
      {"eta_half", &tc.eta_half},
      {"mean_lead", &tc.mean_lead},
      {"delta1", &tc.delta1},
      {"B1", &tc.B1},
      {"B2", &tc.B2},
      {"sigma2", &tc.sigma2},
      {"B2_printed", &tc.B2_printed},
      {"sigma2_printed", &tc.sigma2_printed},
  };
  for (const auto& [name, value] : fields) {
    if (value->has_value()) j[name] = dec(**value);
  }
  j["tail_error_bound"] = to_decimal(tc.tail_error_bound, 6);
  j["cutoff"] = tc.cutoff;
  return j.dump(2) + "\n";
}

}  // namespace msearch
