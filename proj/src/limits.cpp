#include "msearch/limits.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "msearch/errors.hpp"
#include "msearch/io.hpp"
#include "msearch/special.hpp"
#include "msearch/toll.hpp"

namespace msearch {

namespace {

BigFloat binom(int n, int k) {
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return BigFloat(r);
}

std::string alpha_key(const Rational& alpha) {
  std::string s = to_string(alpha);
  std::replace(s.begin(), s.end(), '/', '_');
  return s;
}

void check_alpha(const Rational& alpha) {
  if (alpha <= 0) throw InvalidArgument("alpha must be positive");
  if (alpha == Rational(1, 2)) {
    throw InvalidArgument("alpha = 1/2 has its own limit law; use yhalf");
  }
}

// Normal moments sigma^s (s-1)!! for even s.
std::vector<BigFloat> normal_moments(const BigFloat& sigma2, int s_max) {
  std::vector<BigFloat> out(static_cast<std::size_t>(s_max) + 1, BigFloat(0));
  out[0] = BigFloat(1);
  for (int s = 2; s <= s_max; s += 2) {
    out[static_cast<std::size_t>(s)] = out[static_cast<std::size_t>(s - 2)] * sigma2 * (s - 1);
  }
  return out;
}

}  // namespace

std::string to_string(LimitKind kind) {
  switch (kind) {
    case LimitKind::kYAlpha:
      return "yalpha";
    case LimitKind::kYHalf:
      return "yhalf";
    case LimitKind::kShapeNormal:
      return "shape";
    case LimitKind::kSpaceNormal:
      return "space";
    case LimitKind::kLeavesNormal:
      return "leaves";
  }
  return "?";
}

LimitLaw LimitLaw::parse(const std::string& text, int m) {
  if (m < 2) throw InvalidArgument("m must be at least 2");
  LimitLaw law;
  law.m = m;
  if (text.rfind("yalpha:", 0) == 0) {
    law.kind = LimitKind::kYAlpha;
    try {
      law.alpha = parse_rational(text.substr(7));
    } catch (const std::exception&) {
      throw InvalidArgument("bad alpha in '" + text + "'");
    }
    check_alpha(law.alpha);
  } else if (text == "yhalf") {
    law.kind = LimitKind::kYHalf;
    law.alpha = Rational(1, 2);
  } else if (text == "shape") {
    law.kind = LimitKind::kShapeNormal;
  } else if (text == "space") {
    law.kind = LimitKind::kSpaceNormal;
  } else if (text == "leaves") {
    law.kind = LimitKind::kLeavesNormal;
  } else {
    throw InvalidArgument("unknown law '" + text +
                          "' (expected yalpha:A, yhalf, shape, space or leaves)");
  }
  return law;
}

std::string LimitLaw::key() const {
  switch (kind) {
    case LimitKind::kYAlpha:
      return "yalpha-a" + alpha_key(alpha);
    case LimitKind::kYHalf:
      return "yhalf";
    default:
      return to_string(kind) + "-m" + std::to_string(m);
  }
}

LimitMomentSequence moments_Y_alpha(const Rational& alpha, int s_max, long precision_bits) {
  check_alpha(alpha);
  if (s_max < 1) throw InvalidArgument("s_max must be at least 1");
  PrecisionGuard guard(precision_bits + kGuardBits);
  const Rational ap = alpha + Rational(1, 2);
  const Rational half(1, 2);
  const BigFloat sqrt2 = sqrt(BigFloat(2));
  const BigFloat four_sqrt_pi = BigFloat(4) * sqrt(const_pi());
  // g[j] = Gamma(j alpha' - 1/2), j >= 1.
  std::vector<BigFloat> g(static_cast<std::size_t>(s_max) + 1);
  for (int j = 1; j <= s_max; ++j) g[static_cast<std::size_t>(j)] = gamma(Rational(j * ap - half));

  std::vector<BigFloat> M(static_cast<std::size_t>(s_max) + 1, BigFloat(0));
  M[0] = BigFloat(1);
  M[1] = gamma(Rational(alpha - half)) / (sqrt2 * gamma(alpha));
  for (int s = 2; s <= s_max; ++s) {
    const auto su = static_cast<std::size_t>(s);
    BigFloat acc(0);
    for (int j = 1; j < s; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      acc += binom(s, j) * g[ju] * g[su - ju] * M[ju] * M[su - ju];
    }
    acc /= four_sqrt_pi * g[su];
    acc += BigFloat(s) * gamma(Rational(s * ap - 1)) / (sqrt2 * g[su]) * M[su - 1];
    M[su] = acc;
  }
  LimitMomentSequence seq;
  seq.law.kind = LimitKind::kYAlpha;
  seq.law.alpha = alpha;
  seq.precision_bits = precision_bits;
  seq.s_max = s_max;
  for (auto& v : M) v = BigFloat::rounded(v, precision_bits);
  seq.moments = M;
  seq.recurrence = M;
  seq.provenance = "Y_alpha moment recurrence (power toll limit, alpha' = alpha + 1/2)";
  return seq;
}

std::vector<BigFloat> D_coefficients(const Rational& alpha, int s_max, const SingularData& sd) {
  check_alpha(alpha);
  if (s_max < 1) throw InvalidArgument("s_max must be at least 1");
  PrecisionGuard guard(sd.precision_bits + kGuardBits);
  const int m = sd.m;
  const Rational ap = alpha + Rational(1, 2);
  const BigFloat pref = sd.a0 / (BigFloat(m - 1) * -sd.a1);
  const BigFloat half_ratio = BigFloat(m - 1) / (BigFloat(2) * sd.a0);
  std::vector<BigFloat> D(static_cast<std::size_t>(s_max) + 1, BigFloat(0));
  D[0] = sd.a0;
  D[1] = sd.a0 * gamma(Rational(alpha - Rational(1, 2))) /
         (BigFloat(2 * (m - 1)) * sqrt(const_pi()));
  for (int s = 2; s <= s_max; ++s) {
    const auto su = static_cast<std::size_t>(s);
    BigFloat conv(0);
    for (int j = 1; j < s; ++j) {
      conv += binom(s, j) * D[static_cast<std::size_t>(j)] * D[su - static_cast<std::size_t>(j)];
    }
    const BigFloat lin = gamma(Rational(s * ap - 1)) / gamma(Rational((s - 1) * ap - Rational(1, 2))) *
                         BigFloat(s) * D[su - 1];
    D[su] = pref * (half_ratio * conv + lin);
  }
  return D;
}

LimitMomentSequence moments_Y_half(int k_max, long precision_bits) {
  if (k_max < 2) throw InvalidArgument("k_max must be at least 2");
  PrecisionGuard guard(precision_bits + kGuardBits);
  LimitMomentSequence seq;
  seq.law.kind = LimitKind::kYHalf;
  seq.law.alpha = Rational(1, 2);
  seq.precision_bits = precision_bits;
  seq.s_max = k_max;
  seq.quadrature_error = BigFloat(0);
  const BigFloat pi = const_pi();
  const BigFloat inv_sqrt_2pi = BigFloat(1) / sqrt(BigFloat(2) * pi);
  const BigFloat lin_coeff = BigFloat(4) * sqrt(pi / BigFloat(2));

  auto J = [&](int k1, int k2, int k3) -> BigFloat {
    // J is symmetric in (k1, k2); store the ordered triple only.
    const std::array<int, 3> key{std::min(k1, k2), std::max(k1, k2), k3};
    auto it = seq.j_integrals.find(key);
    if (it == seq.j_integrals.end()) {
      it = seq.j_integrals.emplace(key, J_integral(key[0], key[1], key[2])).first;
      seq.quadrature_error = max(seq.quadrature_error, it->second.error_estimate);
    }
    return it->second.value;
  };

  std::vector<BigFloat> mk(static_cast<std::size_t>(k_max) + 1, BigFloat(0));
  mk[0] = BigFloat(1);
  mk[1] = BigFloat(0);
  std::vector<BigFloat> fact(static_cast<std::size_t>(k_max) + 1, BigFloat(1));
  for (int i = 1; i <= k_max; ++i) fact[static_cast<std::size_t>(i)] = fact[static_cast<std::size_t>(i - 1)] * i;
  for (int k = 2; k <= k_max; ++k) {
    BigFloat acc(0);
    for (int k1 = 0; k1 < k; ++k1) {
      if (k1 == 1) continue;  // m_1 = 0
      for (int k2 = 0; k1 + k2 <= k && k2 < k; ++k2) {
        if (k2 == 1) continue;
        const int k3 = k - k1 - k2;
        const BigFloat multinom = fact[static_cast<std::size_t>(k)] /
                                  (fact[static_cast<std::size_t>(k1)] * fact[static_cast<std::size_t>(k2)] *
                                   fact[static_cast<std::size_t>(k3)]);
        acc += multinom * mk[static_cast<std::size_t>(k1)] * mk[static_cast<std::size_t>(k2)] *
               pow(inv_sqrt_2pi, static_cast<long>(k3)) * J(k1, k2, k3);
      }
    }
    acc += lin_coeff * BigFloat(k) * mk[static_cast<std::size_t>(k - 1)];
    mk[static_cast<std::size_t>(k)] =
        acc * gamma(Rational(k - 1)) / (BigFloat(4) * sqrt(pi) * gamma(Rational(2 * k - 1, 2)));
  }
  for (auto& v : mk) v = BigFloat::rounded(v, precision_bits);
  seq.moments = mk;
  seq.recurrence = mk;
  seq.provenance = "Y_1/2 moment recurrence with J integrals (power toll n^{1/2})";
  return seq;
}

ShapeCoefficients shape_C_coefficients(int m, int s_max, long precision_bits) {
  if (s_max < 1) throw InvalidArgument("s_max must be at least 1");
  const SingularData sd = expansion_coefficients(m, precision_bits);
  PrecisionGuard guard(precision_bits + kGuardBits);
  const BigFloat neg_a1 = -sd.a1;
  const BigFloat sigma2 = BigFloat(8) * (sd.a0 / sd.a1) * (sd.a0 / sd.a1) * (BigFloat(1) - const_log2());
  ShapeCoefficients out;
  out.recurrence.assign(static_cast<std::size_t>(s_max) + 1, BigFloat(0));
  out.closed_form.assign(static_cast<std::size_t>(s_max) + 1, BigFloat(0));
  out.recurrence[1] = BigFloat(4) * sd.a0 * sd.a0 * (BigFloat(1) - const_log2()) / neg_a1;
  for (int l = 2; l <= s_max; ++l) {
    BigFloat acc(0);
    for (int j = 1; j < l; ++j) {
      acc += binom(2 * l, 2 * j) * out.recurrence[static_cast<std::size_t>(j)] *
             out.recurrence[static_cast<std::size_t>(l - j)];
    }
    out.recurrence[static_cast<std::size_t>(l)] = acc / (BigFloat(2) * neg_a1);
  }
  // (-a1/2) (2s)! (2s-2)! / (2^s 2^{2s-2} s! (s-1)!) sigma^{2s}
  for (int s = 1; s <= s_max; ++s) {
    BigInt f2s, f2s2, fs, fs1;
    mpz_fac_ui(f2s.get_mpz_t(), static_cast<unsigned long>(2 * s));
    mpz_fac_ui(f2s2.get_mpz_t(), static_cast<unsigned long>(2 * s - 2));
    mpz_fac_ui(fs.get_mpz_t(), static_cast<unsigned long>(s));
    mpz_fac_ui(fs1.get_mpz_t(), static_cast<unsigned long>(s - 1));
    const BigFloat ratio = BigFloat(Rational(f2s * f2s2, fs * fs1));
    out.closed_form[static_cast<std::size_t>(s)] =
        neg_a1 / BigFloat(2) * ldexp(ratio, -(3 * s - 2)) * pow(sigma2, static_cast<long>(s));
  }
  return out;
}

std::vector<BigFloat> leaves_B_coefficients(int m, int s_max, long precision_bits, LeavesSign sign) {
  const TheoremConstants tc = theorem_constants(leaves_toll(m), precision_bits);
  PrecisionGuard guard(precision_bits + kGuardBits);
  std::vector<BigFloat> B(static_cast<std::size_t>(s_max) + 1, BigFloat(0));
  if (s_max >= 2) B[2] = *tc.B2;
  const BigFloat factor = BigFloat(1) / (BigFloat(-2) * tc.sd.a1);
  for (int s = 3; s <= s_max; ++s) {
    BigFloat acc(0);
    for (int j = 1; j < s; ++j) {
      acc += binom(s, j) * B[static_cast<std::size_t>(j)] * B[static_cast<std::size_t>(s - j)];
    }
    acc *= factor;
    B[static_cast<std::size_t>(s)] = sign == LeavesSign::kGaussian ? acc : -acc;
  }
  return B;
}

LimitMomentSequence normal_limit_moments(LimitKind kind, int m, int s_max, long precision_bits,
                                         LeavesSign sign) {
  if (s_max < 2) throw InvalidArgument("s_max must be at least 2");
  LimitMomentSequence seq;
  seq.law.kind = kind;
  seq.law.m = m;
  seq.precision_bits = precision_bits;
  seq.s_max = s_max;
  const auto S = static_cast<std::size_t>(s_max);
  seq.moments.assign(S + 1, BigFloat(0));
  seq.recurrence.assign(S + 1, BigFloat(0));

  if (kind == LimitKind::kShapeNormal) {
    const ShapeCoefficients c = shape_C_coefficients(m, s_max / 2, precision_bits);
    const SingularData sd = expansion_coefficients(m, precision_bits);
    PrecisionGuard guard(precision_bits + kGuardBits);
    seq.sigma2 = BigFloat(8) * (sd.a0 / sd.a1) * (sd.a0 / sd.a1) * (BigFloat(1) - const_log2());
    seq.moments[0] = BigFloat(1);
    for (int s = 1; 2 * s <= s_max; ++s) {
      const auto i = static_cast<std::size_t>(2 * s);
      seq.recurrence[i] = c.recurrence[static_cast<std::size_t>(s)];
      seq.moments[i] = BigFloat(2) * sqrt(const_pi()) * seq.recurrence[i] /
                       (-sd.a1 * gamma(Rational(2 * s - 1, 2)));
    }
    seq.provenance = "shape functional: C_{2s,0} recurrence, normalized by sqrt(n ln n)";
  } else if (kind == LimitKind::kSpaceNormal || kind == LimitKind::kLeavesNormal) {
    const bool space = kind == LimitKind::kSpaceNormal;
    const TheoremConstants tc = theorem_constants(space ? space_toll(m) : leaves_toll(m), precision_bits);
    const SingularData& sd = tc.sd;
    PrecisionGuard guard(precision_bits + kGuardBits);
    seq.sigma2 = *tc.sigma2;
    auto& B = seq.recurrence;
    if (space) {
      B[1] = -sd.a0 / BigFloat(m - 1);
      B[2] = *tc.B2;
      const BigFloat pref = sd.a0 / (-sd.a1 * BigFloat(m - 1));
      const BigFloat half_ratio = BigFloat(m - 1) / (BigFloat(2) * sd.a0);
      for (std::size_t s = 3; s <= S; ++s) {
        BigFloat conv(0);
        for (std::size_t j = 1; j < s; ++j) {
          conv += binom(static_cast<int>(s), static_cast<int>(j)) * B[j] * B[s - j];
        }
        B[s] = pref * (half_ratio * conv + BigFloat(static_cast<long>(s)) * B[s - 1]);
      }
      seq.provenance = "space requirement: B_s recurrence, normalized by sqrt(n)";
    } else {
      B = leaves_B_coefficients(m, s_max, precision_bits, sign);
      seq.provenance = sign == LeavesSign::kGaussian
                           ? "leaves: B_s recurrence (sign giving Gaussian moments), normalized by sqrt(n)"
                           : "leaves: B_s recurrence with leading minus, normalized by sqrt(n)";
    }
    seq.moments[0] = BigFloat(1);
    // mu~_s ~ 2 sqrt(pi) B_s n^{s/2} / ((-a1) Gamma((s-1)/2)), s >= 2.
    for (std::size_t s = 2; s <= S; ++s) {
      seq.moments[s] = BigFloat(2) * sqrt(const_pi()) * B[s] /
                       (-sd.a1 * gamma(Rational(static_cast<long>(s) - 1, 2)));
    }
  } else {
    throw InvalidArgument("normal_limit_moments: not a normal kind");
  }

  PrecisionGuard guard(precision_bits + kGuardBits);
  seq.closed_form = normal_moments(seq.sigma2, s_max);
  seq.max_disagreement = BigFloat(0);
  for (std::size_t s = 0; s <= S; ++s) {
    const BigFloat scale = max(BigFloat(1), abs(seq.closed_form[s]));
    seq.max_disagreement = max(seq.max_disagreement, abs(seq.moments[s] - seq.closed_form[s]) / scale);
  }
  for (auto* v : {&seq.moments, &seq.recurrence, &seq.closed_form}) {
    for (auto& x : *v) x = BigFloat::rounded(x, precision_bits);
  }
  seq.sigma2 = BigFloat::rounded(seq.sigma2, precision_bits);
  seq.max_disagreement = BigFloat::rounded(seq.max_disagreement, 53);
  if (seq.max_disagreement > ldexp(BigFloat(1), -(precision_bits - 24))) {
    throw NumericalError(seq.law.key() + ": recurrence moments disagree with the normal moments (relative " +
                         to_decimal(seq.max_disagreement, 6) + ")");
  }
  return seq;
}

LimitMomentSequence limit_moments(const LimitLaw& law, int s_max, long precision_bits) {
  switch (law.kind) {
    case LimitKind::kYAlpha:
      return moments_Y_alpha(law.alpha, s_max, precision_bits);
    case LimitKind::kYHalf:
      return moments_Y_half(s_max, precision_bits);
    default:
      return normal_limit_moments(law.kind, law.m, s_max, precision_bits);
  }
}

namespace {

using nlohmann::ordered_json;

ordered_json floats_json(const std::vector<BigFloat>& v, int digits) {
  ordered_json a = ordered_json::array();
  for (const auto& x : v) a.push_back(to_decimal(x, digits));
  return a;
}

std::vector<BigFloat> floats_from(const ordered_json& a) {
  std::vector<BigFloat> out;
  for (const auto& x : a) out.emplace_back(x.get<std::string>());
  return out;
}

ordered_json to_json_doc(const LimitMomentSequence& seq) {
  const int digits = decimal_digits_for_bits(seq.precision_bits);
  ordered_json j;
  j["law"] = seq.law.key();
  j["kind"] = to_string(seq.law.kind);
  if (seq.law.kind == LimitKind::kYAlpha || seq.law.kind == LimitKind::kYHalf) {
    j["alpha"] = to_string(seq.law.alpha);
  } else {
    j["m"] = seq.law.m;
  }
  j["precision_bits"] = seq.precision_bits;
  j["s_max"] = seq.s_max;
  j["provenance"] = seq.provenance;
  j["moments"] = floats_json(seq.moments, digits);
  j["recurrence"] = floats_json(seq.recurrence, digits);
  if (!seq.closed_form.empty()) {
    j["closed_form"] = floats_json(seq.closed_form, digits);
    j["sigma2"] = to_decimal(seq.sigma2, digits);
    j["max_disagreement"] = to_decimal(seq.max_disagreement, 6);
  }
  if (!seq.j_integrals.empty()) {
    ordered_json js = ordered_json::array();
    for (const auto& [key, r] : seq.j_integrals) {
      js.push_back({{"k", {key[0], key[1], key[2]}},
                    {"value", to_decimal(r.value, 18)},
                    {"error_estimate", to_decimal(r.error_estimate, 3)}});
    }
    j["j_integrals"] = js;
    j["quadrature_error"] = to_decimal(seq.quadrature_error, 3);
  }
  return j;
}

}  // namespace

std::string limit_moments_json(const LimitMomentSequence& seq) { return to_json_doc(seq).dump(2) + "\n"; }

std::string limits_cache_path(const std::string& cache_dir, const LimitLaw& law, int s_max,
                              long precision_bits) {
  return (std::filesystem::path(cache_dir) / ("limits-" + law.key() + "-s" + std::to_string(s_max) +
                                               "-b" + std::to_string(precision_bits) + ".json"))
      .string();
}

LimitMomentSequence cached_limit_moments(const LimitLaw& law, int s_max, long precision_bits,
                                         const std::string& cache_dir) {
  const std::string path = limits_cache_path(cache_dir, law, s_max, precision_bits);
  if (std::filesystem::exists(path)) {
    try {
      const auto j = ordered_json::parse(read_file(path));
      if (j.at("law").get<std::string>() == law.key() && j.at("s_max").get<int>() == s_max &&
          j.at("precision_bits").get<long>() == precision_bits) {
        PrecisionGuard guard(precision_bits + kGuardBits);
        LimitMomentSequence seq;
        seq.law = law;
        seq.precision_bits = precision_bits;
        seq.s_max = s_max;
        seq.provenance = j.at("provenance").get<std::string>();
        seq.moments = floats_from(j.at("moments"));
        seq.recurrence = floats_from(j.at("recurrence"));
        if (j.contains("closed_form")) {
          seq.closed_form = floats_from(j.at("closed_form"));
          seq.sigma2 = BigFloat(j.at("sigma2").get<std::string>());
          seq.max_disagreement = BigFloat(j.at("max_disagreement").get<std::string>());
        }
        if (j.contains("j_integrals")) {
          for (const auto& e : j.at("j_integrals")) {
            const auto k = e.at("k");
            seq.j_integrals[{k[0].get<int>(), k[1].get<int>(), k[2].get<int>()}] =
                QuadratureResult{BigFloat(e.at("value").get<std::string>()),
                                 BigFloat(e.at("error_estimate").get<std::string>())};
          }
          seq.quadrature_error = BigFloat(j.at("quadrature_error").get<std::string>());
        }
        return seq;
      }
    } catch (const std::exception&) {
      // Unreadable cache entries are recomputed and overwritten.
    }
  }
  LimitMomentSequence seq = limit_moments(law, s_max, precision_bits);
  write_file_atomic(path, limit_moments_json(seq));
  return seq;
}

}  // namespace msearch
