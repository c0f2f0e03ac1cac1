#include "swmat/statistics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "swmat/error.hpp"

namespace swmat {

namespace {

// Two-tailed critical values, df = 1..30.
constexpr std::array<double, 30> kT05 = {
    12.7062, 4.3027, 3.1824, 2.7764, 2.5706, 2.4469, 2.3646, 2.3060, 2.2622, 2.2281,
    2.2010,  2.1788, 2.1604, 2.1448, 2.1314, 2.1199, 2.1098, 2.1009, 2.0930, 2.0860,
    2.0796,  2.0739, 2.0687, 2.0639, 2.0595, 2.0555, 2.0518, 2.0484, 2.0452, 2.0423,
};
constexpr std::array<double, 30> kT01 = {
    63.6567, 9.9248, 5.8409, 4.6041, 4.0321, 3.7074, 3.4995, 3.3554, 3.2498, 3.1693,
    3.1058,  3.0545, 3.0123, 2.9768, 2.9467, 2.9208, 2.8982, 2.8784, 2.8609, 2.8453,
    2.8314,  2.8188, 2.8073, 2.7969, 2.7874, 2.7787, 2.7707, 2.7633, 2.7564, 2.7500,
};

} // namespace

std::string_view to_string(Significance s) {
  switch (s) {
    case Significance::None: return "";
    case Significance::P05: return "*";
    case Significance::P01: return "**";
  }
  return "";
}

double critical_t(int df, double alpha) {
  if (df < 1) throw InvariantError(fmt::format("critical t needs df >= 1, got {}", df));
  if (alpha != 0.05 && alpha != 0.01) throw InvariantError(fmt::format("unsupported alpha {}", alpha));
  if (df <= 30) return alpha == 0.05 ? kT05[df - 1] : kT01[df - 1];
  boost::math::students_t dist(df);
  return boost::math::quantile(boost::math::complement(dist, alpha / 2));
}

CorrelationResult pearson(const std::vector<std::optional<double>>& xs, const std::vector<std::optional<double>>& ys) {
  if (xs.size() != ys.size()) throw InvariantError("pearson needs paired series of equal length");
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] && ys[i]) {
      x.push_back(*xs[i]);
      y.push_back(*ys[i]);
    }
  }
  return pearson(x, y);
}

CorrelationResult pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw InvariantError("pearson needs paired series of equal length");
  const std::size_t n = xs.size();
  if (n < 2) throw InvariantError(fmt::format("degenerate sample: {} complete pair(s)", n));
  auto constant = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  };
  if (constant(xs) || constant(ys)) throw InvariantError("degenerate sample: zero variance");

  double mx = 0;
  double my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0;
  double sxx = 0;
  double syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0 || syy == 0) throw InvariantError("degenerate sample: zero variance");

  CorrelationResult res;
  res.n = static_cast<int>(n);
  res.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  if (n < 4) return res;

  const int df = res.n - 2;
  const double denom = 1.0 - res.r * res.r;
  res.t = denom <= 0 ? INFINITY : std::fabs(res.r) * std::sqrt(df / denom);
  if (res.t >= critical_t(df, 0.01)) {
    res.significance = Significance::P01;
  } else if (res.t >= critical_t(df, 0.05)) {
    res.significance = Significance::P05;
  }
  return res;
}

} // namespace swmat
