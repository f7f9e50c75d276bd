#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "msearch/bigfloat.hpp"
#include "msearch/enumeration.hpp"
#include "msearch/toll.hpp"

namespace msearch {

/// Guard bits added to every requested precision.
inline constexpr long kGuardBits = 16;

/// Dominant singularity rho of tau(z) and the leading singular expansion
/// coefficients tau(z) ~ a0 + a1 Z^{1/2} + a2 Z + ..., Z = 1 - z/rho.
struct SingularData {
  int m = 2;
  long precision_bits = 0;
  BigFloat rho;
  /// Certified bracket: the defining function changes sign on [lo, hi].
  BigFloat bracket_lo;
  BigFloat bracket_hi;
  /// m^m (sum_{j=1}^{m-1} rho^j)^{m-1} - (m-1)^{m-1}.
  BigFloat residual;
  /// (m/(m-1)) sum_{j=0}^{m-2} rho^j; equals a0.
  BigFloat w_rho;
  BigFloat a0;
  BigFloat a1;
  BigFloat a2;
  BigFloat alpha_star;
  BigFloat c0;
  /// -a1 (m-1) / (sqrt(2) a0).
  BigFloat sigma_m;
  /// (m-1) sqrt(alpha*/m); agrees with sigma_m.
  BigFloat sigma_m_alt;
};

/// Root rho in (0, 1) of m^{m/(m-1)} sum_{j=1}^{m-1} z^j = m - 1, found by
/// bisection on (0, 1) and polished by Newton's method.
BigFloat dominant_singularity(int m, long precision_bits);

/// All SingularData fields. Throws PrecisionError if the internal
/// consistency checks (w_rho = a0, both sigma_m forms) fail at the requested
/// precision.
SingularData expansion_coefficients(int m, long precision_bits);

/// tau_n rho^n n^{3/2} = K0 + K1/n + K2/n^2 + K3/n^3 + O(n^{-4}), with K0
/// exact and K1..K3 fitted at n = N/4, N/2, N. a3 is recovered from K1 and
/// is not certified.
struct TauAsymptotics {
  std::size_t N = 0;
  BigFloat K0;
  BigFloat K1;
  BigFloat K2;
  BigFloat K3;
  /// |K1 - (two-point estimate of K1)|.
  BigFloat K1_uncertainty;
  BigFloat a3;
};

TauAsymptotics fit_tau_asymptotics(const SingularData& sd,
                                   const FloatTreeCountTable& table,
                                   std::size_t N);

struct SeriesConstant {
  BigFloat value;
  /// Heuristic bound: difference of the estimates at cutoffs N and N/2.
  BigFloat tail_error_bound;
  std::size_t cutoff = 0;
};

/// sum_{n >= m-1} rho^n b_n tau_n + sum_j x_j rho^j for the toll. For
/// power tolls with alpha = 1/2 the compensated series of C'_{1/2} is used.
/// The partial sum to the cutoff is completed by a tail model built from
/// TauAsymptotics and Euler-Maclaurin tail sums.
///
/// The cutoff starts at `initial_cutoff` and doubles until the bound drops
/// below `target_error`; PrecisionError when `max_cutoff` is reached first.
/// DivergentSeriesError for power tolls with alpha > 1/2. The table is
/// extended in place as needed.
SeriesConstant toll_series_constant(const TollSpec& toll,
                                    FloatTreeCountTable& table,
                                    const SingularData& sd,
                                    const BigFloat& target_error,
                                    std::size_t initial_cutoff = 1024,
                                    std::size_t max_cutoff = 16384);

/// Estimate at a fixed cutoff, without error control.
BigFloat toll_series_estimate(const TollSpec& toll,
                              const FloatTreeCountTable& table,
                              const SingularData& sd, std::size_t cutoff);

struct ConstantsOptions {
  double target_error = 1e-9;
  std::size_t initial_cutoff = 1024;
  std::size_t max_cutoff = 16384;
};

/// Constants of the limit theorems for a toll. Fields that a toll kind does
/// not define are empty.
struct TheoremConstants {
  TollSpec toll;
  SingularData sd;
  /// Series constant (C_alpha, C'_{1/2}, C_ln, or the space/leaves value).
  std::optional<BigFloat> C;
  /// Centering slope: E X_n = d1 (n+1) + lower order.
  std::optional<BigFloat> d1;
  /// alpha = 1/2 only.
  std::optional<BigFloat> d0;
  std::optional<BigFloat> eta_half;
  /// Coefficient of the leading growth term of E X_n (n^{alpha+1/2} for
  /// alpha > 1/2, n ln n for alpha = 1/2).
  std::optional<BigFloat> mean_lead;
  std::optional<BigFloat> delta1;
  std::optional<BigFloat> B1;
  std::optional<BigFloat> B2;
  /// Var X_n ~ sigma2 n (space, leaves) or sigma2 n ln n (shape).
  std::optional<BigFloat> sigma2;
  /// Leaves only: B2 and sigma2 from the uncorrected formula.
  std::optional<BigFloat> B2_printed;
  std::optional<BigFloat> sigma2_printed;
  BigFloat tail_error_bound;
  std::size_t cutoff = 0;
};

TheoremConstants theorem_constants(const TollSpec& toll, long precision_bits,
                                   const ConstantsOptions& options = {});

/// JSON document with every SingularData and TheoremConstants field as a
/// decimal string; empty fields are omitted.
std::string theorem_constants_json(const TheoremConstants& tc);

}  // namespace msearch
