#include "msearch/series.hpp"

namespace msearch {

std::string to_string(ArithmeticMode mode) {
  switch (mode) {
    case ArithmeticMode::kExactInteger:
      return "exact-integer";
    case ArithmeticMode::kExactRational:
      return "exact-rational";
    case ArithmeticMode::kBigFloat:
      return "big-float";
  }
  return "unknown";
}

AnySeries convolve(const AnySeries& a, const AnySeries& b, std::size_t N) {
  if (a.index() != b.index()) {
    const auto mode_of = [](const AnySeries& s) {
      return std::visit([](const auto& v) { return v.mode(); }, s);
    };
    throw ModeError("convolve: mode mismatch (" + to_string(mode_of(a)) +
                    " vs " + to_string(mode_of(b)) + ")");
  }
  return std::visit(
      [&](const auto& lhs) -> AnySeries {
        using S = std::decay_t<decltype(lhs)>;
        return convolve(lhs, std::get<S>(b), N);
      },
      a);
}

}  // namespace msearch
