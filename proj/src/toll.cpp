#include "msearch/toll.hpp"

#include <cmath>
#include <sstream>

#include "msearch/errors.hpp"
#include "msearch/special.hpp"

namespace msearch {

namespace {

void check_m(int m) {
  if (m < 2) throw InvalidArgument("m must be at least 2, got " + std::to_string(m));
}

std::vector<Rational> zeros(int m) {
  return std::vector<Rational>(static_cast<std::size_t>(m - 1), Rational(0));
}

std::vector<Rational> zero_then_ones(int m) {
  std::vector<Rational> x(static_cast<std::size_t>(m - 1), Rational(1));
  x[0] = 0;
  return x;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

bool TollSpec::is_rational() const {
  switch (kind) {
    case TollKind::kPower:
      return alpha.get_den() == 1;
    case TollKind::kShape:
      // ln binom(n, m-1) vanishes only for m = 2 at n = 1; irrational otherwise.
      return false;
    default:
      return true;
  }
}

Rational TollSpec::b_exact(long n) const {
  if (n < m - 1) throw InvalidArgument("toll index below m-1");
  switch (kind) {
    case TollKind::kPower: {
      if (alpha.get_den() != 1) {
        throw ModeError("toll n^" + to_string(alpha) + " is not rational");
      }
      if (alpha < 0) throw InvalidArgument("power toll needs alpha >= 0");
      BigInt r;
      mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(n),
                    alpha.get_num().get_ui());
      return Rational(r);
    }
    case TollKind::kShape:
      throw ModeError("shape toll ln binom(n, m-1) is not rational");
    case TollKind::kSpace:
      return 1;
    case TollKind::kLeaves:
      return n == m - 1 ? 1 : 0;
    case TollKind::kCustom: {
      if (values.empty()) return 0;
      const auto i = static_cast<std::size_t>(n - (m - 1));
      if (i < values.size()) return values[i];
      return tail == TailRule::kRepeatLast ? values.back() : Rational(0);
    }
  }
  return 0;
}

BigFloat TollSpec::b_float(long n) const {
  if (kind == TollKind::kShape) return log_binomial(n, m - 1);
  if (kind == TollKind::kPower && alpha.get_den() != 1) {
    if (n == 0) return BigFloat(0);
    return pow(BigFloat(n), BigFloat(alpha));
  }
  return BigFloat(b_exact(n));
}

double TollSpec::b_double(long n) const {
  if (kind == TollKind::kShape) {
    double acc = 0.0;
    for (long i = 0; i < m - 1; ++i) acc += std::log(static_cast<double>(n - i));
    for (long i = 2; i <= m - 1; ++i) acc -= std::log(static_cast<double>(i));
    return acc;
  }
  if (kind == TollKind::kPower) {
    return std::pow(static_cast<double>(n), alpha.get_d());
  }
  return b_exact(n).get_d();
}

bool TollSpec::has_finite_support() const {
  if (kind == TollKind::kLeaves) return true;
  if (kind == TollKind::kCustom) {
    return values.empty() || tail == TailRule::kZero || values.back() == 0;
  }
  return false;
}

std::string TollSpec::name() const {
  switch (kind) {
    case TollKind::kPower:
      return "power:" + to_string(alpha);
    case TollKind::kShape:
      return "shape";
    case TollKind::kSpace:
      return "space";
    case TollKind::kLeaves:
      return "leaves";
    case TollKind::kCustom: {
      std::string s = "custom:";
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) s += ',';
        s += to_string(values[i]);
      }
      s += tail == TailRule::kZero ? ";tail=zero" : ";tail=last";
      s += ";init=";
      for (std::size_t i = 0; i < initial.size(); ++i) {
        if (i > 0) s += ',';
        s += to_string(initial[i]);
      }
      return s;
    }
  }
  return "unknown";
}

TollSpec power_toll(int m, const Rational& alpha) {
  check_m(m);
  if (alpha < 0) throw InvalidArgument("power toll needs alpha >= 0");
  TollSpec t;
  t.m = m;
  t.kind = TollKind::kPower;
  t.alpha = alpha;
  t.initial = zeros(m);
  return t;
}

TollSpec shape_toll(int m) {
  check_m(m);
  TollSpec t;
  t.m = m;
  t.kind = TollKind::kShape;
  t.initial = zeros(m);
  return t;
}

TollSpec space_toll(int m) {
  check_m(m);
  TollSpec t;
  t.m = m;
  t.kind = TollKind::kSpace;
  t.initial = zero_then_ones(m);
  return t;
}

TollSpec leaves_toll(int m) {
  check_m(m);
  TollSpec t;
  t.m = m;
  t.kind = TollKind::kLeaves;
  t.initial = zero_then_ones(m);
  return t;
}

TollSpec custom_toll(int m, std::vector<Rational> values, TailRule tail,
                     std::vector<Rational> initial) {
  check_m(m);
  if (initial.size() != static_cast<std::size_t>(m - 1)) {
    throw InvalidArgument("custom toll needs m-1 initial values");
  }
  TollSpec t;
  t.m = m;
  t.kind = TollKind::kCustom;
  t.values = std::move(values);
  t.tail = tail;
  t.initial = std::move(initial);
  return t;
}

TollSpec parse_toll(const std::string& text, int m) {
  if (text == "shape") return shape_toll(m);
  if (text == "space") return space_toll(m);
  if (text == "leaves") return leaves_toll(m);
  try {
    if (text.rfind("power:", 0) == 0) return power_toll(m, parse_rational(text.substr(6)));
    if (text.rfind("custom:", 0) == 0) {
      const auto parts = split(text.substr(7), ';');
      std::vector<Rational> values;
      for (const auto& v : split(parts.at(0), ',')) values.push_back(parse_rational(v));
      TailRule tail = TailRule::kRepeatLast;
      std::vector<Rational> init = zeros(m);
      for (std::size_t i = 1; i < parts.size(); ++i) {
        if (parts[i] == "tail=zero") {
          tail = TailRule::kZero;
        } else if (parts[i] == "tail=last") {
          tail = TailRule::kRepeatLast;
        } else if (parts[i].rfind("init=", 0) == 0) {
          init.clear();
          for (const auto& v : split(parts[i].substr(5), ',')) init.push_back(parse_rational(v));
        } else {
          throw InvalidArgument("unknown custom toll option '" + parts[i] + "'");
        }
      }
      return custom_toll(m, std::move(values), tail, std::move(init));
    }
  } catch (const std::invalid_argument& e) {
    throw InvalidArgument("bad toll '" + text + "': " + e.what());
  }
  throw InvalidArgument("unknown toll '" + text +
                        "' (expected power:ALPHA, shape, space, leaves or custom:...)");
}

TollSpec centered_spec(const TollSpec& toll, const Rational& c) {
  TollSpec out = toll;
  for (std::size_t j = 0; j < out.initial.size(); ++j) {
    out.initial[j] -= c * Rational(static_cast<long>(j) + 1);
  }
  return out;
}

}  // namespace msearch

namespace msearch {

TollSpec centered_spec(const TollSpec& toll, const BigFloat& c) {
  return centered_spec(toll, to_rational(c));
}

}  // namespace msearch
