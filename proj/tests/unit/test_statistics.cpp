#include "doctest.h"

#include <cmath>
#include <random>

#include <boost/math/distributions/students_t.hpp>

#include "swmat/error.hpp"
#include "swmat/statistics.hpp"

using namespace swmat;

namespace {

/// Textbook definition: covariance over the product of standard deviations,
/// all with the n-1 denominator.
double covariance_r(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double cov = 0, vx = 0, vy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cov += (x[i] - mx) * (y[i] - my) / (n - 1);
    vx += (x[i] - mx) * (x[i] - mx) / (n - 1);
    vy += (y[i] - my) * (y[i] - my) / (n - 1);
  }
  return cov / (std::sqrt(vx) * std::sqrt(vy));
}

} // namespace

TEST_CASE("pearson examples") {
  CHECK(pearson(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 2, 3, 4}).r == doctest::Approx(1.0));
  CHECK(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}).r == doctest::Approx(-1.0));
  CorrelationResult c = pearson(std::vector<double>{1, 2, 3, 4, 5}, std::vector<double>{2, 1, 4, 3, 5});
  CHECK(c.r == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(c.n == 5);
  // t = 0.8 * sqrt(3 / 0.36) = 2.309 < 3.182
  CHECK(c.t == doctest::Approx(0.8 * std::sqrt(3 / 0.36)));
  CHECK(c.significance == Significance::None);
}

TEST_CASE("pearson rejects degenerate samples") {
  CHECK_THROWS_WITH_AS(pearson(std::vector<double>{1}, std::vector<double>{2}),
                       doctest::Contains("degenerate sample"), InvariantError);
  CHECK_THROWS_WITH_AS(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{4, 4, 4}),
                       doctest::Contains("degenerate sample"), InvariantError);
  CHECK_THROWS_AS(pearson(std::vector<double>{0.1, 0.1, 0.1}, std::vector<double>{1, 2, 3}), InvariantError);
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1}), InvariantError);
}

TEST_CASE("pearson skips pairs with a missing value") {
  std::vector<std::optional<double>> xs = {1, std::nullopt, 2, 3, 4, 5};
  std::vector<std::optional<double>> ys = {2, 9, 1, 4, std::nullopt, 5};
  CorrelationResult c = pearson(xs, ys);
  CHECK(c.n == 4);
  CHECK(c.r == doctest::Approx(covariance_r({1, 2, 3, 5}, {2, 1, 4, 5})));
  CHECK_THROWS_AS(pearson({std::optional<double>(1), std::nullopt}, {std::nullopt, std::optional<double>(2)}),
                  InvariantError);
}

TEST_CASE("significance levels") {
  std::vector<double> x, y;
  for (int i = 0; i < 12; ++i) {
    x.push_back(i);
    y.push_back(i + ((i % 2) ? 0.5 : -0.5));
  }
  CHECK(pearson(x, y).significance == Significance::P01);
  CHECK(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}).significance == Significance::None);
  // r = 16/21 with n = 8: t = 2.881, between 2.447 and 3.707
  std::vector<double> a = {1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<double> b = {2, 4, 1, 3, 6, 8, 5, 7};
  CorrelationResult c = pearson(a, b);
  CHECK(c.r == doctest::Approx(16.0 / 21.0));
  CHECK(c.t > critical_t(6, 0.05));
  CHECK(c.t < critical_t(6, 0.01));
  CHECK(c.significance == Significance::P05);
  CHECK(to_string(Significance::P01) == "**");
  CHECK(to_string(Significance::P05) == "*");
  CHECK(to_string(Significance::None).empty());
}

TEST_CASE("embedded critical values agree with the t distribution") {
  for (int df = 1; df <= 40; ++df) {
    boost::math::students_t dist(df);
    for (double alpha : {0.05, 0.01}) {
      const double exact = boost::math::quantile(boost::math::complement(dist, alpha / 2));
      CAPTURE(df);
      CAPTURE(alpha);
      CHECK(std::fabs(critical_t(df, alpha) - exact) < 1e-4);
    }
  }
  CHECK_THROWS_AS(critical_t(0, 0.05), InvariantError);
  CHECK_THROWS_AS(critical_t(5, 0.1), InvariantError);
}

TEST_CASE("pearson matches the covariance definition and is affine invariant") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 18);
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = u(rng);
      y[i] = 0.5 * x[i] + u(rng);
    }
    const double r = pearson(x, y).r;
    CHECK(std::fabs(r - covariance_r(x, y)) < 1e-9);
    CHECK(std::fabs(r) <= 1.0);

    const double a = 0.1 + std::fabs(u(rng)), b = 10 * u(rng);
    std::vector<double> xt(n);
    for (int i = 0; i < n; ++i) xt[i] = a * x[i] + b;
    CHECK(std::fabs(pearson(xt, y).r - r) < 1e-12);
    for (int i = 0; i < n; ++i) xt[i] = -a * x[i] + b;
    CHECK(std::fabs(pearson(xt, y).r + r) < 1e-12);
  }
}
