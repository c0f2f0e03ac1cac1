#include "swmat/score.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>

#include <fmt/format.h>

#include "swmat/error.hpp"

namespace swmat {

double to_double(const Score& s) { return boost::rational_cast<double>(s); }

namespace {

std::int64_t parse_digits(std::string_view digits, std::string_view whole) {
  if (digits.empty() || digits.size() > 17) {
    throw InputError(fmt::format("invalid score '{}'", whole));
  }
  std::int64_t v = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw InputError(fmt::format("invalid score '{}'", whole));
    }
    v = v * 10 + (c - '0');
  }
  return v;
}

} // namespace

Score parse_score(std::string_view text) {
  std::string_view t = text;
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
  bool negative = false;
  if (!t.empty() && (t.front() == '-' || t.front() == '+')) {
    negative = t.front() == '-';
    t.remove_prefix(1);
  }
  Score result;
  if (auto slash = t.find('/'); slash != std::string_view::npos) {
    std::int64_t num = parse_digits(t.substr(0, slash), text);
    std::int64_t den = parse_digits(t.substr(slash + 1), text);
    if (den == 0) throw InputError(fmt::format("invalid score '{}': zero denominator", text));
    result = Score(num, den);
  } else if (auto dot = t.find('.'); dot != std::string_view::npos) {
    std::string_view ip = t.substr(0, dot);
    std::string_view fp = t.substr(dot + 1);
    std::int64_t whole = ip.empty() ? 0 : parse_digits(ip, text);
    std::int64_t frac = fp.empty() ? 0 : parse_digits(fp, text);
    std::int64_t den = 1;
    for (std::size_t i = 0; i < fp.size(); ++i) den *= 10;
    if (ip.empty() && fp.empty()) throw InputError(fmt::format("invalid score '{}'", text));
    result = Score(whole) + Score(frac, den);
  } else {
    result = Score(parse_digits(t, text));
  }
  return negative ? -result : result;
}

Score score_from_double(double v, std::int64_t max_den) {
  if (!std::isfinite(v)) throw InputError("non-finite score");
  // Continued-fraction convergents; stop at the first exact hit.
  const bool negative = v < 0;
  double x = std::fabs(v);
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double rest = x;
  for (int i = 0; i < 64; ++i) {
    double a = std::floor(rest);
    if (a > static_cast<double>(std::numeric_limits<std::int64_t>::max() / 4)) break;
    auto ai = static_cast<std::int64_t>(a);
    std::int64_t p2 = ai * p1 + p0;
    std::int64_t q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    if (static_cast<double>(p1) / static_cast<double>(q1) == x) break;
    double frac = rest - a;
    if (frac <= 0) break;
    rest = 1.0 / frac;
  }
  if (q1 == 0) return Score(0);
  Score r(p1, q1);
  return negative ? -r : r;
}

std::string format_fixed4(const Score& s) {
  // Exact half-up rounding at the fourth decimal.
  Score scaled = s * 10000;
  bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::int64_t q = scaled.numerator() / scaled.denominator();
  Score rem = scaled - Score(q);
  if (rem * 2 >= 1) ++q;
  std::string out = fmt::format("{}{}.{:04d}", negative && q != 0 ? "-" : "", q / 10000, q % 10000);
  return out;
}

std::string format_fixed4(double v) { return fmt::format("{:.4f}", v); }

std::string to_fraction_string(const Score& s) {
  if (s.denominator() == 1) return std::to_string(s.numerator());
  return fmt::format("{}/{}", s.numerator(), s.denominator());
}

} // namespace swmat
