#include "rough/rational.hpp"

#include <charconv>
#include <limits>

#include "rough/errors.hpp"

namespace rough {

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw InputError("not a rational: '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

std::string to_string(const Rational& value) {
  return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
}

Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto den = parse_int(text.substr(slash + 1), text);
    if (den == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
    return Rational(parse_int(text.substr(0, slash), text), den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    const auto frac = text.substr(dot + 1);
    if (frac.size() > 15) throw InputError("too many decimal digits: '" + std::string(text) + "'");
    std::int64_t scale = 1;
    for (std::size_t k = 0; k < frac.size(); ++k) scale *= 10;
    const bool negative = !text.empty() && text.front() == '-';
    const auto int_part = text.substr(0, dot);
    const std::int64_t whole =
        (int_part.empty() || int_part == "-" || int_part == "+") ? 0 : parse_int(int_part, text);
    const std::int64_t fraction = frac.empty() ? 0 : parse_int(frac, text);
    if (fraction < 0) throw InputError("not a rational: '" + std::string(text) + "'");
    Rational out(whole);
    out += Rational(negative ? -fraction : fraction, scale);
    return out;
  }
  return Rational(parse_int(text, text));
}

std::int64_t floor(const Rational& value) {
  const auto n = value.numerator();
  const auto d = value.denominator();
  auto q = n / d;
  if ((n % d != 0) && (n < 0)) --q;
  return q;
}

std::int64_t ceil(const Rational& value) {
  const auto n = value.numerator();
  const auto d = value.denominator();
  auto q = n / d;
  if ((n % d != 0) && (n > 0)) ++q;
  return q;
}

}  // namespace rough
