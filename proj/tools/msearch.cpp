// msearch: command-line front end.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "msearch/enumeration.hpp"
#include "msearch/errors.hpp"
#include "msearch/io.hpp"
#include "msearch/limits.hpp"
#include "msearch/moments.hpp"
#include "msearch/sampler.hpp"
#include "msearch/singular.hpp"
#include "msearch/toll.hpp"
#include "msearch/verify.hpp"

using namespace msearch;

namespace {

// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::fwrite(contents.data(), 1, contents.size(), stdout);
    std::fflush(stdout);
  } else {
    write_file_atomic(path, contents);
  }
}

// Explicit --cache, else $MSEARCH_CACHE; empty disables caching.
std::string cache_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  const char* env = std::getenv("MSEARCH_CACHE");
  return env && *env ? std::string(env) : std::string();
}

TreeCountTable counts_for(int m, std::size_t N, const std::string& cache) {
  return cache.empty() ? tree_counts(m, N) : cached_tree_counts(m, N, cache);
}

struct EnumerateArgs {
  int m = 2;
  std::size_t n = 0;
  std::string cache;
  std::string format = "json";
  std::string out;
};

int run_enumerate(const EnumerateArgs& a) {
  const TreeCountTable t = counts_for(a.m, a.n, cache_dir(a.cache));
  if (a.format == "csv") {
    std::string s = "n,tau\n";
    for (std::size_t i = 0; i <= a.n; ++i) s += std::to_string(i) + "," + to_string(t.counts[i]) + "\n";
    emit(a.out, s);
  } else {
    nlohmann::ordered_json j;
    j["m"] = a.m;
    j["N"] = a.n;
    auto& c = j["counts"] = nlohmann::ordered_json::array();
    for (const auto& v : t.counts) c.push_back(to_string(v));
    emit(a.out, j.dump(2) + "\n");
  }
  return 0;
}

struct ConstantsArgs {
  int m = 2;
  std::string toll = "space";
  long bits = 128;
  double target_error = 1e-9;
  std::size_t max_cutoff = 16384;
  std::string format = "json";
  std::string out;
};

int run_constants(const ConstantsArgs& a) {
  ConstantsOptions o;
  o.target_error = a.target_error;
  o.max_cutoff = a.max_cutoff;
  const TheoremConstants tc = theorem_constants(parse_toll(a.toll, a.m), a.bits, o);
  emit(a.out, theorem_constants_json(tc));
  return 0;
}

struct MomentsArgs {
  int m = 2;
  std::string toll = "space";
  int smax = 4;
  std::size_t n = 100;
  std::string mode;
  std::string cache;
  std::string out;
};

int run_moments(const MomentsArgs& a) {
  const TollSpec toll = parse_toll(a.toll, a.m);
  // Exact arithmetic when the toll is rational, 192-bit floats otherwise.
  const MomentMode mode = !a.mode.empty()        ? MomentMode::parse(a.mode)
                          : toll.is_rational() ? MomentMode::Exact()
                                               : MomentMode::Float(kDefaultPrecisionBits);
  const std::string cache = cache_dir(a.cache);
  MomentTable mt;
  if (mode.exact && !cache.empty()) {
    mt = exact_moments(toll, cached_tree_counts(a.m, a.n, cache), a.smax, a.n, mode);
  } else {
    mt = compute_moments(toll, a.smax, a.n, mode);
  }
  emit(a.out, moments_csv(mt));
  return 0;
}

struct LimitsArgs {
  std::string law;
  int m = 2;
  int smax = 6;
  long bits = kDefaultPrecisionBits;
  std::string format = "json";
  std::string cache;
  std::string out;
};

int run_limits(const LimitsArgs& a) {
  const LimitLaw law = LimitLaw::parse(a.law, a.m);
  const std::string cache = cache_dir(a.cache);
  const LimitMomentSequence seq = cache.empty() ? limit_moments(law, a.smax, a.bits)
                                                : cached_limit_moments(law, a.smax, a.bits, cache);
  emit(a.out, limit_moments_json(seq));
  return 0;
}

struct SimulateArgs {
  int m = 2;
  std::size_t n = 100;
  std::string toll = "space";
  std::size_t reps = 1000;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string model = "uniform";
  int bins = 50;
  std::string cache;
  std::string out;
  std::string histogram;
  std::string tree;
  bool timing = false;
};

int run_simulate(const SimulateArgs& a) {
  const TollSpec toll = parse_toll(a.toll, a.m);
  const SplitModel model = parse_split_model(a.model);
  const std::unique_ptr<SplitSampler> sampler =
      model == SplitModel::kUniform
          ? std::make_unique<SplitSampler>(
                std::make_shared<const TreeCountTable>(counts_for(a.m, a.n, cache_dir(a.cache))), model)
          : std::make_unique<SplitSampler>(a.m, model);
  MonteCarloOptions o;
  o.reps = a.reps;
  o.seed = a.seed;
  o.threads = a.threads;
  o.histogram_bins = a.bins;
  const SimulationSummary sum = monte_carlo(*sampler, a.n, toll, o);
  emit(a.out, simulation_json(sum, a.timing));
  if (!a.histogram.empty()) write_file_atomic(a.histogram, histogram_csv(sum.histogram));
  if (!a.tree.empty()) {
    // The tree of replication 0.
    Philox4x32 rng(a.seed, 0);
    write_file_atomic(a.tree, sample_tree(*sampler, a.n, rng).to_json() + "\n");
  }
  return 0;
}

struct VerifyArgs {
  std::string suite = "fast";
  std::vector<std::string> only;
  std::string report;
  int threads = 1;
  std::uint64_t seed = 1;
  double budget = 0;
  std::string cache;
  bool timing = false;
};

int run_verify(const VerifyArgs& a) {
  VerifyConfig c;
  c.suite = parse_suite(a.suite);
  c.only = a.only;
  c.threads = a.threads;
  c.seed = a.seed;
  c.budget_seconds = a.budget;
  c.cache_dir = cache_dir(a.cache);
  const std::vector<CheckReport> reports = run_suite(c);
  bool ok = true;
  for (const CheckReport& r : reports) {
    std::printf("%-22s %s\n", r.check_id.c_str(), to_string(r.status).c_str());
    ok = ok && r.pass();
  }
  std::fflush(stdout);
  if (!a.report.empty()) write_file_atomic(a.report, verify_report_json(reports, c, a.timing));
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Additive functionals on random m-ary search trees"};
  app.require_subcommand(1);

  EnumerateArgs ea;
  auto* enumerate = app.add_subcommand("enumerate", "Tree counts tau_0..tau_N");
  enumerate->add_option("--m", ea.m, "Branching factor")->required()->check(CLI::Range(2, 64));
  enumerate->add_option("--n", ea.n, "Largest n")->required();
  enumerate->add_option("--cache", ea.cache, "Cache directory (default $MSEARCH_CACHE, none if unset)");
  enumerate->add_option("--format", ea.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  enumerate->add_option("--out", ea.out, "Output file (default stdout)");

  ConstantsArgs ca;
  auto* constants = app.add_subcommand("constants", "Singular expansion and limit theorem constants");
  constants->add_option("--m", ca.m, "Branching factor")->required()->check(CLI::Range(2, 64));
  constants->add_option("--toll", ca.toll, "power:ALPHA, shape, space, leaves or custom:...");
  constants->add_option("--bits", ca.bits, "Precision in bits")->check(CLI::Range(64L, 100000L));
  constants->add_option("--target-error", ca.target_error, "Target bound for series constants");
  constants->add_option("--max-cutoff", ca.max_cutoff, "Largest series cutoff");
  constants->add_option("--format", ca.format, "Output format")->check(CLI::IsMember({"json"}));
  constants->add_option("--out", ca.out, "Output file (default stdout)");

  MomentsArgs ma;
  auto* moments = app.add_subcommand("moments", "Exact moments E X_n^s");
  moments->add_option("--m", ma.m, "Branching factor")->required()->check(CLI::Range(2, 64));
  moments->add_option("--toll", ma.toll, "power:ALPHA, shape, space, leaves or custom:...");
  moments->add_option("--smax", ma.smax, "Highest moment")->check(CLI::Range(1, 64));
  moments->add_option("--n", ma.n, "Largest n")->required();
  moments->add_option("--mode", ma.mode,
                      "exact or float:BITS (default exact for rational tolls, float:192 otherwise)");
  moments->add_option("--cache", ma.cache, "Cache directory for tree counts");
  moments->add_option("--out", ma.out, "Output CSV file (default stdout)");

  LimitsArgs la;
  auto* limits = app.add_subcommand("limits", "Moments of the limit laws");
  limits->add_option("--law", la.law, "yalpha:A, yhalf, shape, space or leaves")->required();
  limits->add_option("--m", la.m, "Branching factor (normal laws)")->check(CLI::Range(2, 64));
  limits->add_option("--smax", la.smax, "Highest moment")->check(CLI::Range(1, 200));
  limits->add_option("--bits", la.bits, "Precision in bits")->check(CLI::Range(64L, 100000L));
  limits->add_option("--format", la.format, "Output format")->check(CLI::IsMember({"json"}));
  limits->add_option("--cache", la.cache, "Cache directory for moment sequences");
  limits->add_option("--out", la.out, "Output file (default stdout)");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo simulation of X_n");
  simulate->add_option("--m", sa.m, "Branching factor")->required()->check(CLI::Range(2, 64));
  simulate->add_option("--n", sa.n, "Number of keys")->required();
  simulate->add_option("--toll", sa.toll, "power:ALPHA, shape, space, leaves or custom:...");
  simulate->add_option("--reps", sa.reps, "Replications")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40));
  simulate->add_option("--seed", sa.seed, "Random seed");
  simulate->add_option("--threads", sa.threads, "Worker threads")->check(CLI::Range(1, 1024));
  simulate->add_option("--model", sa.model, "Split model")->check(CLI::IsMember({"uniform", "rp"}));
  simulate->add_option("--bins", sa.bins, "Histogram bins")->check(CLI::Range(1, 100000));
  simulate->add_option("--cache", sa.cache, "Cache directory for tree counts");
  simulate->add_option("--out", sa.out, "Summary JSON file (default stdout)");
  simulate->add_option("--histogram", sa.histogram, "Histogram CSV file");
  simulate->add_option("--tree", sa.tree, "JSON file for one sampled tree (replication 0)");
  simulate->add_flag("--timing", sa.timing, "Include the elapsed time in the summary");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run the verification checks");
  verify->add_option("--suite", va.suite, "Suite")->check(CLI::IsMember({"fast", "full"}));
  verify->add_option("--only", va.only, "Run only this check (repeatable)");
  verify->add_option("--report", va.report, "Report JSON file");
  verify->add_option("--threads", va.threads, "Checks run concurrently")->check(CLI::Range(1, 1024));
  verify->add_option("--seed", va.seed, "Random seed for the sampling checks");
  verify->add_option("--budget", va.budget, "Per-check budget in seconds (0 = none)");
  verify->add_option("--cache", va.cache, "Cache directory for tree counts");
  verify->add_flag("--timing", va.timing, "Include runtimes in the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*enumerate) return run_enumerate(ea);
    if (*constants) return run_constants(ca);
    if (*moments) return run_moments(ma);
    if (*limits) return run_limits(la);
    if (*simulate) return run_simulate(sa);
    if (*verify) return run_verify(va);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
