#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

// Under C++20 the mixed integer/rational operator== templates of older Boost
// releases rewrite into themselves and recurse forever. Exact non-template
// overloads win overload resolution and break the cycle.
namespace boost {
#define SWMAT_RATIONAL_EQ(I)                                                                             \
  inline bool operator==(const rational<std::int64_t>& a, I b) { return a == rational<std::int64_t>(b); } \
  inline bool operator==(I b, const rational<std::int64_t>& a) { return a == rational<std::int64_t>(b); }
SWMAT_RATIONAL_EQ(int)
SWMAT_RATIONAL_EQ(long)
SWMAT_RATIONAL_EQ(long long)
#undef SWMAT_RATIONAL_EQ
} // namespace boost

namespace swmat {

/// Exact score arithmetic. Questionnaire values such as 3.25 or 10/3 must sum
/// without drift, so every score, weight and maturity ratio is a rational.
using Score = boost::rational<std::int64_t>;

/// Missing is modelled as an empty optional throughout.
using MaybeScore = std::optional<Score>;

double to_double(const Score& s);

/// Parses "3.25", "-1", "10/3" or "1e2"-free decimal text exactly.
/// Throws InputError on anything else.
Score parse_score(std::string_view text);

/// Nearest rational with denominator <= max_den; exact for any value that was
/// produced by to_double on such a rational.
Score score_from_double(double v, std::int64_t max_den = 100000);

/// Fixed 4-decimal rendering used by every report ("0.7500").
std::string format_fixed4(const Score& s);
std::string format_fixed4(double v);

/// "13/4" style, or the integer when the denominator is 1.
std::string to_fraction_string(const Score& s);

} // namespace swmat
