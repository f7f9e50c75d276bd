#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "msearch/enumeration.hpp"
#include "msearch/errors.hpp"
#include "msearch/limits.hpp"
#include "msearch/moments.hpp"
#include "msearch/quadrature.hpp"
#include "msearch/rng.hpp"
#include "msearch/sampler.hpp"
#include "msearch/singular.hpp"
#include "msearch/toll.hpp"
#include "msearch/verify.hpp"

namespace py = pybind11;
using namespace msearch;

namespace {

std::vector<std::string> decimal_counts(const TreeCountTable& t) {
  std::vector<std::string> out;
  for (const auto& c : t.counts) out.push_back(to_string(c));
  return out;
}

class Moments {
 public:
  Moments(const std::string& toll, int m, int s_max, std::size_t n, const std::string& mode)
      : table_(compute_moments(parse_toll(toll, m), s_max, n, MomentMode::parse(mode))) {}

  std::size_t N() const { return table_.N(); }
  int s_max() const { return table_.s_max(); }
  bool exact() const { return table_.mode().exact; }

  /// "p/q" in exact mode, a decimal string otherwise.
  std::string moment(int s, std::size_t n) const {
    if (table_.mode().exact) return to_string(table_.moment_exact(s, n));
    return to_decimal(table_.moment(s, n), decimal_digits_for_bits(table_.mode().bits));
  }

  std::string central(int s, std::size_t n) const {
    if (table_.mode().exact) return to_string(central_moment_exact(table_, s, n));
    return to_decimal(central_moment(table_, s, n), decimal_digits_for_bits(table_.mode().bits));
  }

  std::string csv() const { return moments_csv(table_); }

 private:
  MomentTable table_;
};

std::string simulate(int m, std::size_t n, const std::string& toll, std::size_t reps, std::uint64_t seed,
                     int threads, const std::string& model, int bins) {
  const SplitModel sm = parse_split_model(model);
  const TollSpec t = parse_toll(toll, m);
  py::gil_scoped_release release;
  const SplitSampler s = sm == SplitModel::kUniform
                             ? SplitSampler(std::make_shared<const TreeCountTable>(tree_counts(m, n)), sm)
                             : SplitSampler(m, sm);
  MonteCarloOptions o;
  o.reps = reps;
  o.seed = seed;
  o.threads = threads;
  o.histogram_bins = bins;
  return simulation_json(monte_carlo(s, n, t, o), false);
}

std::string sample_tree_json(int m, std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  const SplitSampler s(std::make_shared<const TreeCountTable>(tree_counts(m, n)), SplitModel::kUniform);
  Philox4x32 rng(seed, stream);
  return sample_tree(s, n, rng).to_json();
}

std::string verify(const std::string& suite, const std::vector<std::string>& only, int threads,
                   std::uint64_t seed) {
  VerifyConfig c;
  c.suite = parse_suite(suite);
  c.only = only;
  c.threads = threads;
  c.seed = seed;
  std::vector<CheckReport> reports;
  {
    py::gil_scoped_release release;
    reports = run_suite(c);
  }
  return verify_report_json(reports, c, false);
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Additive functionals on random m-ary search trees";

  py::register_exception<Error>(mod, "MsearchError", PyExc_RuntimeError);

  mod.def("tree_counts", [](int m, std::size_t n) { return decimal_counts(tree_counts(m, n)); },
          py::arg("m"), py::arg("n"), "Tree counts tau_0..tau_n as decimal strings.");
  mod.def("brute_force_count", [](int m, int n) { return to_string(brute_force_count(m, n)); },
          py::arg("m"), py::arg("n"));
  mod.def(
      "constants_json",
      [](int m, const std::string& toll, long bits) {
        return theorem_constants_json(theorem_constants(parse_toll(toll, m), bits));
      },
      py::arg("m"), py::arg("toll"), py::arg("bits") = 128);
  mod.def(
      "limits_json",
      [](const std::string& law, int m, int s_max, long bits) {
        return limit_moments_json(limit_moments(LimitLaw::parse(law, m), s_max, bits));
      },
      py::arg("law"), py::arg("m") = 2, py::arg("s_max") = 6, py::arg("bits") = kDefaultPrecisionBits);
  mod.def(
      "j_integral",
      [](int k1, int k2, int k3) {
        const QuadratureResult r = J_integral(k1, k2, k3);
        return py::make_tuple(r.value.to_double(), r.error_estimate.to_double());
      },
      py::arg("k1"), py::arg("k2"), py::arg("k3"));
  mod.def(
      "is_degenerate",
      [](const std::string& toll, int m, std::size_t n_max) {
        return degeneracy_check(parse_toll(toll, m), n_max).degenerate;
      },
      py::arg("toll"), py::arg("m"), py::arg("n_max") = 40);

  py::class_<Moments>(mod, "Moments")
      .def(py::init<const std::string&, int, int, std::size_t, const std::string&>(), py::arg("toll"),
           py::arg("m"), py::arg("s_max"), py::arg("n"), py::arg("mode") = "exact")
      .def_property_readonly("N", &Moments::N)
      .def_property_readonly("s_max", &Moments::s_max)
      .def_property_readonly("exact", &Moments::exact)
      .def("moment", &Moments::moment, py::arg("s"), py::arg("n"))
      .def("central", &Moments::central, py::arg("s"), py::arg("n"))
      .def("csv", &Moments::csv);

  mod.def(
      "philox_block",
      [](std::uint32_t c0, std::uint32_t c1, std::uint32_t c2, std::uint32_t c3, std::uint32_t k0,
         std::uint32_t k1) {
        const auto out = Philox4x32::apply({c0, c1, c2, c3}, {k0, k1});
        return std::vector<std::uint32_t>(out.begin(), out.end());
      },
      py::arg("c0"), py::arg("c1"), py::arg("c2"), py::arg("c3"), py::arg("k0"), py::arg("k1"));
  mod.def("simulate_json", &simulate, py::arg("m"), py::arg("n"), py::arg("toll"), py::arg("reps"),
          py::arg("seed") = 1, py::arg("threads") = 1, py::arg("model") = "uniform", py::arg("bins") = 50);
  mod.def("sample_tree_json", &sample_tree_json, py::arg("m"), py::arg("n"), py::arg("seed") = 1,
          py::arg("stream") = 0);
  mod.def("verify_json", &verify, py::arg("suite") = "fast", py::arg("only") = std::vector<std::string>{},
          py::arg("threads") = 1, py::arg("seed") = 1);
}
