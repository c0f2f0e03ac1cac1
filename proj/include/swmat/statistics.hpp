#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace swmat {

enum class Significance { None, P05, P01 };
std::string_view to_string(Significance s); // "", "*", "**"

struct CorrelationResult {
  double r = 0.0;
  int n = 0;
  double t = 0.0;
  Significance significance = Significance::None;
};

/// Two-tailed critical t for alpha 0.05 or 0.01. Embedded table for df <= 30,
/// the Student t quantile beyond that.
double critical_t(int df, double alpha);

/// Sample Pearson correlation over the pairs where both values are present.
/// Throws InvariantError("degenerate sample") for fewer than two pairs or a
/// constant series. Significance stays None below four pairs.
CorrelationResult pearson(const std::vector<std::optional<double>>& xs, const std::vector<std::optional<double>>& ys);
CorrelationResult pearson(const std::vector<double>& xs, const std::vector<double>& ys);

} // namespace swmat
