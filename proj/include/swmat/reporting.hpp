#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "swmat/assessment.hpp"
#include "swmat/maturity.hpp"
#include "swmat/modularity.hpp"
#include "swmat/serialize.hpp"

namespace swmat {

// ---------------------------------------------------------------------------
// Radar diagrams

enum class SeriesStyle { Solid, Dashed };

struct RadarSeries {
  std::string name;
  std::vector<std::optional<double>> values; // 0..5, one per spoke
  SeriesStyle style = SeriesStyle::Solid;
};

struct RadarSpec {
  std::string title;
  std::vector<std::pair<int, std::string>> spokes; // question id, label
  std::vector<RadarSeries> series;
};

struct RadarGeometry {
  double size = 640;
  double inner = 24;  // radius of value 0
  double outer = 240; // radius of value 5

  double radius(double value) const { return inner + (outer - inner) * value / 5.0; }
};

/// Runs of spoke indices drawn as one polyline each. Without gaps the single
/// run is closed (first index repeated at the end); a Missing value splits
/// the series into linear runs in spoke order.
std::vector<std::vector<std::size_t>> radar_segments(const std::vector<std::optional<double>>& values);

/// Throws InvariantError for fewer than three spokes or a series whose length
/// differs from the spoke count.
std::string emit_radar_svg(const RadarSpec& spec, const RadarGeometry& geometry = {});

/// Company profile over the given question ids with a dashed cohort mean.
RadarSpec company_radar(const QuestionnaireSchema& schema, const MaturityReport& report, const CohortStats& cohort,
                        const std::vector<int>& ids, std::string title);

// ---------------------------------------------------------------------------
// CSV

std::string csv_field(std::string_view s);

/// company,category,M_MOD,M_TEST,M_OP,overall with 4 decimals; Missing is an
/// empty cell.
std::string emit_overview_csv(const std::vector<MaturityReport>& reports);

struct ScatterPoint {
  std::string company;
  BusinessCategory category = BusinessCategory::Machine;
  double x = 0;
  double y = 0;
};

/// kind,company,category,<x>,<y>; one "point" row per input followed by one
/// "median" row per category present.
std::string emit_scatter_csv(std::string_view x_label, std::string_view y_label, const std::vector<ScatterPoint>& points);

double median(std::vector<double> values);

// ---------------------------------------------------------------------------
// Text and JSON reports

std::string format_maybe(const MaybeScore& s); // 4 decimals or "missing"

std::string maturity_report_text(const MaturityReport& report, const std::vector<std::string>& ingestion_log = {});
Json maturity_report_json(const MaturityReport& report, const std::vector<std::string>& ingestion_log = {});

std::string analysis_report_text(const ProjectAnalysis& analysis);
Json analysis_report_json(const ProjectAnalysis& analysis);

} // namespace swmat
