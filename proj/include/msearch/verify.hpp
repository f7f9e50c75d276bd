#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace msearch {

enum class Suite { kFast, kFull };

std::string to_string(Suite suite);
/// "fast" or "full".
Suite parse_suite(const std::string& text);

struct VerifyConfig {
  Suite suite = Suite::kFast;
  /// Run only these check ids (all checks of the suite when empty).
  std::vector<std::string> only;
  /// Checks run concurrently on this many threads.
  int threads = 1;
  std::uint64_t seed = 1;
  /// Per-check wall-clock budget in seconds; 0 disables it.
  double budget_seconds = 0;
  /// Tree count cache; empty disables caching.
  std::string cache_dir;
};

/// One compared quantity of a check. Metrics: "abs" (|o - e| <= tol),
/// "rel" (|o - e| <= tol |e|), "exact", "bound" (o <= tol), "trend"
/// (stated ordering holds) and "info" (reported, never failing).
struct CheckItem {
  std::string name;
  std::string metric;
  std::string observed;
  std::string expected;
  std::string tolerance;
  bool pass = true;
};

enum class CheckStatus { kPass, kFail, kSkipped };

std::string to_string(CheckStatus status);

struct CheckReport {
  std::string check_id;
  std::string theorem_ref;
  int criterion = 0;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<CheckItem> items;
  CheckStatus status = CheckStatus::kPass;
  /// Reason for a skip or an error raised by a module.
  std::string message;
  double runtime_seconds = 0;

  bool pass() const { return status == CheckStatus::kPass; }
};

struct CheckInfo {
  std::string id;
  std::string theorem_ref;
  int criterion = 0;
  /// Member of the fast suite (every check belongs to the full suite).
  bool fast = true;
};

/// The check catalog in criterion order.
const std::vector<CheckInfo>& check_catalog();

/// Runs one check with the suite's parameters. A check that exceeds the
/// budget is reported as skipped; module errors make it fail with the
/// module's message. InvalidArgument for unknown ids.
CheckReport run_check(const std::string& id, const VerifyConfig& config);

/// Runs the suite (or config.only), reports in catalog order.
std::vector<CheckReport> run_suite(const VerifyConfig& config);

/// JSON document for a set of reports; runtimes only with include_timing.
std::string verify_report_json(const std::vector<CheckReport>& reports,
                               const VerifyConfig& config, bool include_timing);

}  // namespace msearch
