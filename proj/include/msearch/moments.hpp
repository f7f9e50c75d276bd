#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "msearch/bigfloat.hpp"
#include "msearch/enumeration.hpp"
#include "msearch/toll.hpp"

namespace msearch {

/// Arithmetic used by the moment recurrence: exact (rational, evaluated on
/// integers scaled by a common denominator) or big-float at `bits`.
struct MomentMode {
  bool exact = true;
  long bits = kDefaultPrecisionBits;

  static MomentMode Exact() { return {true, kDefaultPrecisionBits}; }
  static MomentMode Float(long bits) { return {false, bits}; }
  /// Parses "exact" or "float:BITS".
  static MomentMode parse(const std::string& text);
  std::string name() const;
};

/// Moments mu_n^{[s]} = E X_n^s for s <= s_max and n <= N, stored as the
/// generating-function coefficients tau_n mu_n^{[s]}.
class MomentTable {
 public:
  const TollSpec& toll() const { return toll_; }
  std::size_t N() const { return N_; }
  int s_max() const { return s_max_; }
  const MomentMode& mode() const { return mode_; }
  bool has_intermediates() const { return !r_int_.empty() || !r_float_.empty(); }

  /// tau_n mu_n^{[s]}; exact mode only.
  Rational mu_exact(int s, std::size_t n) const;
  /// mu_n^{[s]}; exact mode only.
  Rational moment_exact(int s, std::size_t n) const;
  /// tau_n mu_n^{[s]} as a big float (both modes).
  BigFloat mu(int s, std::size_t n) const;
  /// mu_n^{[s]} as a big float (both modes).
  BigFloat moment(int s, std::size_t n) const;
  /// r_n^{[s]} of the recurrence; requires keep_intermediates.
  BigFloat r(int s, std::size_t n) const;
  Rational r_exact(int s, std::size_t n) const;

 private:
  friend MomentTable exact_moments(const TollSpec&, const TreeCountTable&, int,
                                   std::size_t, MomentMode, bool);
  friend MomentTable exact_moments(const TollSpec&, const FloatTreeCountTable&, int,
                                   std::size_t, bool);

  TollSpec toll_;
  std::size_t N_ = 0;
  int s_max_ = 0;
  MomentMode mode_;
  // Exact mode: G_int_[s][n] = D^s tau_n mu_n^{[s]}.
  BigInt D_ = 1;
  std::vector<std::vector<BigInt>> G_int_;
  std::vector<std::vector<BigInt>> r_int_;
  std::vector<BigInt> tau_int_;
  // Float mode.
  std::vector<std::vector<BigFloat>> G_float_;
  std::vector<std::vector<BigFloat>> r_float_;
  std::vector<BigFloat> tau_float_;
};

/// Runs the moment recurrence. In exact mode the toll must be rational
/// (ModeError otherwise). The table must cover N. With keep_intermediates
/// the r_n^{[s]} rows are stored as well.
MomentTable exact_moments(const TollSpec& toll, const TreeCountTable& table,
                          int s_max, std::size_t N, MomentMode mode,
                          bool keep_intermediates = false);

/// Float-mode run on a big-float tree count table (precision of the table).
MomentTable exact_moments(const TollSpec& toll, const FloatTreeCountTable& table,
                          int s_max, std::size_t N, bool keep_intermediates = false);

/// Convenience: builds the tree count table itself. Float mode uses a
/// big-float table, so large N stays cheap.
MomentTable compute_moments(const TollSpec& toll, int s_max, std::size_t N,
                            MomentMode mode, bool keep_intermediates = false);

struct CentralStats {
  std::size_t n = 0;
  BigFloat mean;
  BigFloat variance;
  /// Empty when the variance is zero (or s_max is too small).
  std::optional<BigFloat> skewness;
  std::optional<BigFloat> excess_kurtosis;
  /// Exact mode only.
  std::optional<Rational> mean_exact;
  std::optional<Rational> variance_exact;
  bool degenerate = false;
};

/// s-th central moment of X_n.
BigFloat central_moment(const MomentTable& mt, int s, std::size_t n);
Rational central_moment_exact(const MomentTable& mt, int s, std::size_t n);

/// Mean, variance, skewness and excess kurtosis at n. Requires s_max >= 2
/// (skewness needs 3, kurtosis 4). Throws NumericalError when float-mode
/// cancellation drives the variance below -tolerance.
CentralStats central_stats(const MomentTable& mt, std::size_t n);

/// CSV with columns n,s,mu_exact,mean,var,skew,kurt, one row per (n, s) for
/// n <= N and 1 <= s <= s_max. mu_exact is "p/q" in exact mode and a decimal
/// string in float mode; kurt is the standardized fourth central moment.
/// Statistics that are undefined for a row (degenerate n, s_max too small)
/// are left empty.
std::string moments_csv(const MomentTable& mt);

/// Result of the degeneracy test for a toll.
struct DegeneracyResult {
  bool degenerate = false;
  /// Empty when the toll's initial values follow the b_j = x_j convention;
  /// otherwise a description of the mismatch.
  std::string convention_note;
  /// x_0 and X_1; when degenerate, X_n = n X_1 - (n - 1) x_0.
  Rational x0;
  Rational x1;
  /// First n violating the toll condition (when not degenerate).
  std::optional<std::size_t> violating_n;
  /// First n <= n_max with positive exact variance (when not degenerate).
  std::optional<std::size_t> positive_variance_n;

  Rational predicted(std::size_t n) const;
};

/// Checks whether the toll makes X_n deterministic for every n, using
/// b_j := x_j for j <= m-2 and X_1 in place of b_1 (for m = 2, X_1 = 2 x_0 +
/// b_1). The condition is checked for n <= n_max. Exact tolls only.
DegeneracyResult degeneracy_check(const TollSpec& toll, std::size_t n_max);

}  // namespace msearch
