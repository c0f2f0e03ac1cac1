#include "doctest.h"

#include <cmath>
#include <regex>
#include <sstream>

#include "swmat/error.hpp"
#include "swmat/reporting.hpp"

using namespace swmat;

namespace {

std::vector<std::pair<double, double>> polyline_points(const std::string& poly) {
  std::vector<std::pair<double, double>> pts;
  std::istringstream in(poly);
  std::string pair;
  while (in >> pair) {
    auto comma = pair.find(',');
    pts.emplace_back(std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1)));
  }
  return pts;
}

std::vector<std::string> polylines(const std::string& svg) {
  std::vector<std::string> out;
  static const std::regex re(R"re(<polyline points="([^"]*)"/>)re");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    out.push_back((*it)[1].str());
  }
  return out;
}

RadarSpec spec_with(std::vector<std::optional<double>> values, std::size_t spokes = 5) {
  RadarSpec s;
  s.title = "t";
  for (std::size_t i = 0; i < spokes; ++i) s.spokes.emplace_back(static_cast<int>(i + 1), "q");
  s.series.push_back({"a", std::move(values), SeriesStyle::Solid});
  return s;
}

/// Crude structural check: every opened element is closed in order.
bool balanced_xml(const std::string& s) {
  std::vector<std::string> stack;
  static const std::regex tag(R"(<(/?)([A-Za-z][A-Za-z0-9]*)[^>]*?(/?)>)");
  for (auto it = std::sregex_iterator(s.begin(), s.end(), tag); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    if (m[3].length() > 0) continue;
    if (m[1].length() == 0) {
      stack.push_back(m[2].str());
    } else {
      if (stack.empty() || stack.back() != m[2].str()) return false;
      stack.pop_back();
    }
  }
  return stack.empty();
}

MaturityReport report(std::string company, BusinessCategory cat, MaybeScore mod, MaybeScore test, MaybeScore op,
                      MaybeScore overall) {
  MaturityReport r;
  r.company = std::move(company);
  r.category = cat;
  r.m_mod = mod;
  r.m_test = test;
  r.m_op = op;
  r.overall = overall;
  return r;
}

} // namespace

TEST_CASE("radar segments") {
  using V = std::vector<std::optional<double>>;
  CHECK(radar_segments(V{1, 2, 3}) == std::vector<std::vector<std::size_t>>{{0, 1, 2, 0}});
  CHECK(radar_segments(V{1, std::nullopt, 3, 4}) == std::vector<std::vector<std::size_t>>{{0}, {2, 3}});
  CHECK(radar_segments(V{1, 2, std::nullopt, 4, 5}) == std::vector<std::vector<std::size_t>>{{0, 1}, {3, 4}});
  CHECK(radar_segments(V{std::nullopt, std::nullopt, std::nullopt}).empty());
  CHECK(radar_segments(V{}).empty());
}

TEST_CASE("radar with all values at the maximum touches the outer ring") {
  RadarGeometry g;
  std::string svg = emit_radar_svg(spec_with({5, 5, 5, 5, 5}), g);
  auto lines = polylines(svg);
  REQUIRE(lines.size() == 1);
  auto pts = polyline_points(lines.front());
  REQUIRE(pts.size() == 6);
  for (auto [x, y] : pts) CHECK(std::hypot(x - g.size / 2, y - g.size / 2) == doctest::Approx(g.outer).epsilon(1e-3));
  CHECK(pts.front() == pts.back());
}

TEST_CASE("radar leaves a gap at a missing value") {
  std::string svg = emit_radar_svg(spec_with({1, 2, std::nullopt, 4, 5}));
  auto lines = polylines(svg);
  REQUIRE(lines.size() == 2);
  CHECK(polyline_points(lines[0]).size() == 2);
  CHECK(polyline_points(lines[1]).size() == 2);
}

TEST_CASE("radar radius is affine in the value") {
  RadarGeometry g;
  CHECK(g.radius(0) == g.inner);
  CHECK(g.radius(5) == g.outer);
  CHECK(g.radius(2.5) == doctest::Approx((g.inner + g.outer) / 2));
  for (double v : {0.0, 1.0, 2.5, 3.7}) {
    std::string svg = emit_radar_svg(spec_with({v, v, v}, 3), g);
    auto pts = polyline_points(polylines(svg).front());
    CHECK(std::hypot(pts[1].first - g.size / 2, pts[1].second - g.size / 2) ==
          doctest::Approx(g.radius(v)).epsilon(1e-3));
  }
}

TEST_CASE("radar series styles and validation") {
  RadarSpec s = spec_with({1, 2, 3});
  s.spokes.resize(3);
  s.series.push_back({"mean", {2, 2, 2}, SeriesStyle::Dashed});
  std::string svg = emit_radar_svg(s);
  auto first = svg.find("data-name=\"a\"");
  auto second = svg.find("data-name=\"mean\"");
  REQUIRE(first != std::string::npos);
  REQUIRE(second != std::string::npos);
  CHECK(first < second);
  CHECK(svg.find("stroke-dasharray", second) != std::string::npos);
  CHECK(svg.substr(first, second - first).find("stroke-dasharray") == std::string::npos);
  CHECK(balanced_xml(svg));

  CHECK_THROWS_AS(emit_radar_svg(spec_with({1, 2}, 2)), InvariantError);
  CHECK_THROWS_AS(emit_radar_svg(spec_with({1, 2}, 3)), InvariantError);

  RadarSpec esc = spec_with({1, 2, 3}, 3);
  esc.title = "A & B <c>";
  std::string e = emit_radar_svg(esc);
  CHECK(e.find("A &amp; B &lt;c&gt;") != std::string::npos);
  CHECK(balanced_xml(e));
}

TEST_CASE("company radar pairs the company with the cohort mean") {
  QuestionnaireSchema schema = default_schema();
  MaturityReport r;
  r.company = "A";
  r.per_question_normalized[1] = Score(3, 5);
  r.per_question_normalized[2] = std::nullopt;
  CohortStats cohort;
  cohort.question_mean[1] = Score(1, 2);
  cohort.question_mean[2] = Score(1);
  RadarSpec spec = company_radar(schema, r, cohort, {1, 2, 3}, "title");
  REQUIRE(spec.series.size() == 2);
  CHECK(spec.series[0].style == SeriesStyle::Solid);
  CHECK(spec.series[1].style == SeriesStyle::Dashed);
  CHECK(spec.series[0].values[0] == doctest::Approx(0.6));
  CHECK_FALSE(spec.series[0].values[1].has_value());
  CHECK_FALSE(spec.series[0].values[2].has_value());
  CHECK(spec.series[1].values[1] == doctest::Approx(1.0));
}

TEST_CASE("overview csv") {
  std::vector<MaturityReport> reports;
  reports.push_back(report("A", BusinessCategory::Machine, Score(1, 2), std::nullopt, Score(3, 4), Score(5, 8)));
  std::string csv = emit_overview_csv(reports);
  CHECK(csv == "company,category,M_MOD,M_TEST,M_OP,overall\nA,machine,0.5000,,0.7500,0.6250\n");

  reports.clear();
  for (int i = 0; i < 16; ++i) reports.push_back(report("C" + std::to_string(i), BusinessCategory::Plant, Score(0), Score(0), Score(0), Score(0)));
  csv = emit_overview_csv(reports);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);
}

TEST_CASE("csv quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("scatter csv and medians") {
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 3, 2}) == 2.5);
  CHECK_THROWS_AS(median({}), InvariantError);

  std::string one = emit_scatter_csv("x", "y", {{"A", BusinessCategory::Machine, 0.5, 0.25}});
  CHECK(one == "kind,company,category,x,y\npoint,A,machine,0.5000,0.2500\nmedian,,machine,0.5000,0.2500\n");

  std::vector<ScatterPoint> pts = {{"A", BusinessCategory::Plant, 1, 3},
                                   {"B", BusinessCategory::Plant, 2, 2},
                                   {"C", BusinessCategory::Plant, 3, 1},
                                   {"D", BusinessCategory::Platform, 0.1, 0.2}};
  std::string csv = emit_scatter_csv("M_MOD", "M_TEST", pts);
  CHECK(csv.find("median,,plant,2.0000,2.0000\n") != std::string::npos);
  CHECK(csv.find("median,,platform,0.1000,0.2000\n") != std::string::npos);
  CHECK(csv.find("median,,machine") == std::string::npos);
}

TEST_CASE("format maybe") {
  CHECK(format_maybe(Score(1, 3)) == "0.3333");
  CHECK(format_maybe(std::nullopt) == "missing");
}

TEST_CASE("maturity text report") {
  MaturityReport r = report("A", BusinessCategory::Machine, Score(1, 2), std::nullopt, Score(3, 4), Score(5, 8));
  std::string text = maturity_report_text(r, {"answer #5 skipped"});
  CHECK(text.find("company: A") != std::string::npos);
  CHECK(text.find("overall: 0.6250") != std::string::npos);
  CHECK(text.find("answer #5 skipped") != std::string::npos);
  Json j = maturity_report_json(r);
  CHECK(j.is_object());
}
