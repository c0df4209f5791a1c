#include "erwlab/regime.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

#include "erwlab/errors.hpp"

namespace erwlab {

namespace {

// Exact decimal value as digits * 10^exponent with no leading or trailing
// zeros in digits (digits empty means zero).
struct Decimal {
  bool negative = false;
  std::string digits;
  std::int64_t exponent = 0;
};

Decimal parse_exact(std::string_view text) {
  Decimal out;
  std::size_t i = 0;
  auto fail = [&] {
    throw std::invalid_argument("malformed decimal: '" + std::string(text) + "'");
  };
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    out.negative = text[i] == '-';
    ++i;
  }
  bool seen_digit = false;
  bool seen_point = false;
  std::int64_t frac_digits = 0;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      seen_digit = true;
      out.digits.push_back(c);
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) fail();
  std::int64_t exp10 = 0;
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') fail();
    ++i;
    const char* first = text.data() + i;
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, exp10);
    if (ec != std::errc() || ptr != last || first == last) fail();
  }
  out.exponent = exp10 - frac_digits;
  const auto lead = out.digits.find_first_not_of('0');
  if (lead == std::string::npos) {
    out.digits.clear();
    out.exponent = 0;
    return out;
  }
  out.digits.erase(0, lead);
  while (out.digits.back() == '0') {
    out.digits.pop_back();
    ++out.exponent;
  }
  return out;
}

// Sign of (value - 3/4) for a non-negative decimal.
int compare_to_three_quarters(const Decimal& d) {
  if (d.digits.empty()) return -1;
  // Scientific exponent: value in [10^e, 10^(e+1)).
  const std::int64_t sci = static_cast<std::int64_t>(d.digits.size()) - 1 + d.exponent;
  if (sci != -1) return sci < -1 ? -1 : 1;
  const std::string_view ref = "75";
  const int cmp = std::string_view(d.digits).compare(ref);
  return cmp < 0 ? -1 : (cmp > 0 ? 1 : 0);
}

}  // namespace

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::Diffusive: return "diffusive";
    case Regime::Marginal: return "marginal";
    case Regime::Superdiffusive: return "superdiffusive";
  }
  return "unknown";
}

Regime classify_regime(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("memory parameter p must lie in (0, 1)");
  if (p < 0.75) return Regime::Diffusive;
  if (p == 0.75) return Regime::Marginal;
  return Regime::Superdiffusive;
}

Regime classify_regime(std::string_view decimal) {
  const Decimal d = parse_exact(decimal);
  if (d.negative || d.digits.empty())
    throw std::invalid_argument("memory parameter p must lie in (0, 1)");
  // Range check against 1 on the exact digits as well.
  const std::int64_t sci = static_cast<std::int64_t>(d.digits.size()) - 1 + d.exponent;
  if (sci >= 0)
    throw std::invalid_argument("memory parameter p must lie in (0, 1)");
  const int cmp = compare_to_three_quarters(d);
  if (cmp < 0) return Regime::Diffusive;
  if (cmp == 0) return Regime::Marginal;
  return Regime::Superdiffusive;
}

double parse_decimal(std::string_view decimal) {
  parse_exact(decimal);  // validates the grammar
  double value = 0.0;
  const char* first = decimal.data();
  const char* last = decimal.data() + decimal.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw std::invalid_argument("malformed decimal: '" + std::string(decimal) + "'");
  return value;
}

double walk_normalizer(Regime regime, double p, std::int64_t n) {
  if (n < 1) throw DomainError("walk_normalizer requires n >= 1");
  const auto x = static_cast<double>(n);
  switch (regime) {
    case Regime::Diffusive:
      return std::sqrt(x);
    case Regime::Marginal:
      if (n < 2) throw DomainError("sqrt(n log n) requires n >= 2");
      return std::sqrt(x * std::log(x));
    case Regime::Superdiffusive:
      return std::pow(x, 2.0 * p - 1.0);
  }
  throw DomainError("unknown regime");
}

std::int64_t diff_normalizer_min_n(Regime regime) noexcept {
  switch (regime) {
    case Regime::Diffusive: return 3;    // log log n > 0  <=>  n > e
    case Regime::Marginal: return 16;    // log log log n > 0  <=>  n > e^e
    case Regime::Superdiffusive: return 1;
  }
  return 1;
}

double diff_normalizer(Regime regime, double p, std::int64_t n) {
  if (n < diff_normalizer_min_n(regime))
    throw DomainError("difference normalizer evaluated where an iterated logarithm is non-positive");
  const auto x = static_cast<double>(n);
  switch (regime) {
    case Regime::Diffusive:
      return std::sqrt(x * std::log(std::log(x)));
    case Regime::Marginal: {
      const double l = std::log(x);
      return std::sqrt(x * l * std::log(std::log(l)));
    }
    case Regime::Superdiffusive:
      return std::pow(x, 2.0 * p - 1.0);
  }
  throw DomainError("unknown regime");
}

double lil_constant(Regime regime, double p) {
  switch (regime) {
    case Regime::Diffusive: return 2.0 / std::sqrt(3.0 - 4.0 * p);
    case Regime::Marginal: return 2.0;
    case Regime::Superdiffusive: break;
  }
  throw RegimeError("no LIL constant in the superdiffusive regime");
}

}  // namespace erwlab
