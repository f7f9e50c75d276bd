#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "msearch/bigfloat.hpp"
#include "msearch/quadrature.hpp"
#include "msearch/singular.hpp"

namespace msearch {

enum class LimitKind { kYAlpha, kYHalf, kShapeNormal, kSpaceNormal, kLeavesNormal };

std::string to_string(LimitKind kind);

/// A limit law: Y_alpha (power tolls, alpha != 1/2), Y_{1/2}, or one of the
/// normal limits (shape, space, leaves) for a given m.
struct LimitLaw {
  LimitKind kind = LimitKind::kYAlpha;
  Rational alpha = 1;
  /// Normal kinds only; the Y laws do not depend on m.
  int m = 2;

  /// "yalpha:A", "yhalf", "shape", "space" or "leaves".
  static LimitLaw parse(const std::string& text, int m);
  /// Stable identifier, e.g. "yalpha-a3_2", "yhalf", "space-m3".
  std::string key() const;
};

/// Sign of the leaves recurrence for B_s, s >= 3. kGaussian uses
/// B_s = (1/(-2 a1)) sum binom(s,j) B_j B_{s-j}; kPrinted puts a leading
/// minus in front.
enum class LeavesSign { kGaussian, kPrinted };

struct LimitMomentSequence {
  LimitLaw law;
  long precision_bits = 0;
  int s_max = 0;
  /// Moments of the limit law, moments[0] = 1.
  std::vector<BigFloat> moments;
  /// Raw recurrence values: M_s, m_k, B_s or C_{s,0} (index s).
  std::vector<BigFloat> recurrence;
  /// Normal kinds: sigma^s (s-1)!! for even s, 0 for odd s.
  std::vector<BigFloat> closed_form;
  /// Normal kinds: limit variance.
  BigFloat sigma2;
  /// Normal kinds: max_s |moments[s] - closed_form[s]| / max(1, |closed_form[s]|).
  BigFloat max_disagreement;
  /// Y_{1/2}: the J integrals used, keyed by (k1, k2, k3).
  std::map<std::array<int, 3>, QuadratureResult> j_integrals;
  /// Y_{1/2}: largest quadrature error estimate among the J integrals.
  BigFloat quadrature_error;
  std::string provenance;
};

/// M_1..M_{s_max} of Y_alpha. InvalidArgument for alpha = 1/2 or alpha <= 0.
LimitMomentSequence moments_Y_alpha(const Rational& alpha, int s_max,
                                    long precision_bits = kDefaultPrecisionBits);

/// D_1..D_{s_max}: leading singular coefficients of the moment generating
/// functions for the power toll n^alpha, alpha > 1/2, from their own
/// m-dependent recurrence. Index 0 holds a0.
std::vector<BigFloat> D_coefficients(const Rational& alpha, int s_max, const SingularData& sd);

/// m_0..m_{k_max} of Y_{1/2}. The J integrals are evaluated in long double,
/// so the result carries roughly 1e-15 relative accuracy.
LimitMomentSequence moments_Y_half(int k_max, long precision_bits = kDefaultPrecisionBits);

/// Limit moments of (X_n - d1 (n+1)) / sqrt(n) (space, leaves) or
/// (X_n - E X_n) / sqrt(n ln n) (shape), from the B_s / C_{2s,0} recurrence,
/// together with the normal moments of the theorem's variance. Throws
/// NumericalError when the two disagree beyond the working precision
/// (always the case for LeavesSign::kPrinted and s_max >= 4).
LimitMomentSequence normal_limit_moments(LimitKind kind, int m, int s_max,
                                         long precision_bits = kDefaultPrecisionBits,
                                         LeavesSign sign = LeavesSign::kGaussian);

/// Shape: C_{2s,0} from the recurrence and from the closed form, s = 1..s_max.
struct ShapeCoefficients {
  std::vector<BigFloat> recurrence;
  std::vector<BigFloat> closed_form;
};
ShapeCoefficients shape_C_coefficients(int m, int s_max,
                                       long precision_bits = kDefaultPrecisionBits);

/// Leaves B_s (s = 0..s_max, B_0 unused) under the given sign reading,
/// without the agreement check.
std::vector<BigFloat> leaves_B_coefficients(int m, int s_max, long precision_bits,
                                            LeavesSign sign);

/// Dispatches on the law.
LimitMomentSequence limit_moments(const LimitLaw& law, int s_max,
                                  long precision_bits = kDefaultPrecisionBits);

/// JSON document for a sequence (decimal strings at full precision).
std::string limit_moments_json(const LimitMomentSequence& seq);

/// Cache path: <dir>/limits-<key>-s<S>-b<BITS>.json.
std::string limits_cache_path(const std::string& cache_dir, const LimitLaw& law, int s_max,
                              long precision_bits);

/// limit_moments through the on-disk cache: reuses a cached sequence for the
/// same (law, s_max, bits), otherwise computes and stores it.
LimitMomentSequence cached_limit_moments(const LimitLaw& law, int s_max, long precision_bits,
                                         const std::string& cache_dir);

}  // namespace msearch
