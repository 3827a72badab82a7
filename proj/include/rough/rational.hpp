#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>

#include <boost/rational.hpp>

// boost 1.74's mixed rational/integer equality recurses forever under C++20
// rewritten comparisons. Make such calls fail to compile; compare against
// Rational(n) instead.
namespace boost {
template <class I>
  requires std::is_integral_v<I>
bool operator==(const rational<std::int64_t>&, I) = delete;
template <class I>
  requires std::is_integral_v<I>
bool operator==(I, const rational<std::int64_t>&) = delete;
}  // namespace boost

namespace rough {

/// Exact rational used for every distance, radius and measure value.
using Rational = boost::rational<std::int64_t>;

/// Always "p/q", including integers ("3/1").
std::string to_string(const Rational& value);

/// Accepts "p/q", "p", and finite decimals ("0.25").
Rational parse_rational(std::string_view text);

std::int64_t floor(const Rational& value);
std::int64_t ceil(const Rational& value);

}  // namespace rough
