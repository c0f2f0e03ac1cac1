#include "swmat/reporting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "swmat/error.hpp"

namespace swmat {

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr std::array kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string maybe_cell(const MaybeScore& s) { return s ? format_fixed4(*s) : std::string{}; }

std::string tally_text(const CategoryTally& t) {
  return fmt::format("{} ({} of {})", format_maybe(t.maturity), to_fraction_string(t.gained),
                     to_fraction_string(t.reachable));
}

} // namespace

std::vector<std::vector<std::size_t>> radar_segments(const std::vector<std::optional<double>>& values) {
  std::vector<std::vector<std::size_t>> runs;
  const bool gaps = std::any_of(values.begin(), values.end(), [](const auto& v) { return !v.has_value(); });
  if (!gaps) {
    std::vector<std::size_t> all;
    for (std::size_t i = 0; i < values.size(); ++i) all.push_back(i);
    if (!all.empty()) all.push_back(0);
    if (!all.empty()) runs.push_back(std::move(all));
    return runs;
  }
  std::vector<std::size_t> cur;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i]) {
      cur.push_back(i);
    } else if (!cur.empty()) {
      runs.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) runs.push_back(std::move(cur));
  return runs;
}

std::string emit_radar_svg(const RadarSpec& spec, const RadarGeometry& g) {
  const std::size_t n = spec.spokes.size();
  if (n < 3) throw InvariantError(fmt::format("a radar diagram needs at least 3 spokes, got {}", n));
  for (const RadarSeries& s : spec.series) {
    if (s.values.size() != n) {
      throw InvariantError(fmt::format("series '{}' has {} values for {} spokes", s.name, s.values.size(), n));
    }
  }

  const double c = g.size / 2;
  auto point = [&](std::size_t i, double r) {
    const double a = -std::numbers::pi / 2 + 2 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    return std::pair{c + r * std::cos(a), c + r * std::sin(a)};
  };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{0}\" "
                     "viewBox=\"0 0 {0} {0}\">\n",
                     g.size);
  out += fmt::format("<title>{}</title>\n", xml_escape(spec.title));
  out += fmt::format("<circle class=\"ring\" cx=\"{0:.2f}\" cy=\"{0:.2f}\" r=\"{1:.2f}\" fill=\"none\" stroke=\"#bbbbbb\"/>\n",
                     c, g.radius(0));
  out += fmt::format("<circle class=\"ring\" cx=\"{0:.2f}\" cy=\"{0:.2f}\" r=\"{1:.2f}\" fill=\"none\" stroke=\"#555555\"/>\n",
                     c, g.radius(5));
  for (std::size_t i = 0; i < n; ++i) {
    auto [x0, y0] = point(i, g.radius(0));
    auto [x1, y1] = point(i, g.radius(5));
    auto [tx, ty] = point(i, g.radius(5) + 18);
    out += fmt::format("<line class=\"spoke\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#dddddd\"/>\n",
                       x0, y0, x1, y1);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"middle\">#{} {}</text>\n", tx, ty,
                       spec.spokes[i].first, xml_escape(spec.spokes[i].second));
  }

  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const RadarSeries& s = spec.series[k];
    const char* color = kPalette[k % kPalette.size()];
    out += fmt::format("<g class=\"series\" data-name=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"{}>\n",
                       xml_escape(s.name), color, s.style == SeriesStyle::Dashed ? " stroke-dasharray=\"6 4\"" : "");
    for (const auto& run : radar_segments(s.values)) {
      std::vector<std::string> pts;
      for (std::size_t i : run) {
        auto [x, y] = point(i, g.radius(*s.values[i]));
        pts.push_back(fmt::format("{:.2f},{:.2f}", x, y));
      }
      out += fmt::format("  <polyline points=\"{}\"/>\n", fmt::join(pts, " "));
    }
    out += "</g>\n";
    out += fmt::format("<text x=\"12\" y=\"{}\" font-size=\"12\" fill=\"{}\">{}{}</text>\n", 20 + 16 * k, color,
                       xml_escape(s.name), s.style == SeriesStyle::Dashed ? " (dashed)" : "");
  }
  out += "</svg>\n";
  return out;
}

RadarSpec company_radar(const QuestionnaireSchema& schema, const MaturityReport& report, const CohortStats& cohort,
                        const std::vector<int>& ids, std::string title) {
  RadarSpec spec;
  spec.title = std::move(title);
  RadarSeries company{report.company, {}, SeriesStyle::Solid};
  RadarSeries mean{"cohort mean", {}, SeriesStyle::Dashed};
  for (int id : ids) {
    const Question* q = schema.find(id);
    std::string label = q != nullptr ? q->text : std::string{};
    if (label.size() > 28) label = label.substr(0, 27) + "...";
    spec.spokes.emplace_back(id, label);
    auto own = report.per_question_normalized.find(id);
    company.values.push_back(own != report.per_question_normalized.end() && own->second
                                 ? std::optional<double>(to_double(*own->second))
                                 : std::nullopt);
    auto avg = cohort.question_mean.find(id);
    mean.values.push_back(avg != cohort.question_mean.end() && avg->second ? std::optional<double>(to_double(*avg->second))
                                                                           : std::nullopt);
  }
  spec.series.push_back(std::move(company));
  spec.series.push_back(std::move(mean));
  return spec;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string emit_overview_csv(const std::vector<MaturityReport>& reports) {
  std::string out = "company,category,M_MOD,M_TEST,M_OP,overall\n";
  for (const MaturityReport& r : reports) {
    out += fmt::format("{},{},{},{},{},{}\n", csv_field(r.company), to_string(r.category), maybe_cell(r.m_mod),
                       maybe_cell(r.m_test), maybe_cell(r.m_op), maybe_cell(r.overall));
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvariantError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 == 1 ? values[m] : (values[m - 1] + values[m]) / 2;
}

std::string emit_scatter_csv(std::string_view x_label, std::string_view y_label, const std::vector<ScatterPoint>& points) {
  std::string out = fmt::format("kind,company,category,{},{}\n", csv_field(x_label), csv_field(y_label));
  for (const ScatterPoint& p : points) {
    out += fmt::format("point,{},{},{},{}\n", csv_field(p.company), to_string(p.category), format_fixed4(p.x),
                       format_fixed4(p.y));
  }
  for (BusinessCategory c : {BusinessCategory::Platform, BusinessCategory::Machine, BusinessCategory::Plant}) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const ScatterPoint& p : points) {
      if (p.category != c) continue;
      xs.push_back(p.x);
      ys.push_back(p.y);
    }
    if (xs.empty()) continue;
    out += fmt::format("median,,{},{},{}\n", to_string(c), format_fixed4(median(xs)), format_fixed4(median(ys)));
  }
  return out;
}

std::string format_maybe(const MaybeScore& s) { return s ? format_fixed4(*s) : std::string("missing"); }

std::string maturity_report_text(const MaturityReport& r, const std::vector<std::string>& ingestion_log) {
  std::string out;
  out += fmt::format("company: {}\n", r.company);
  out += fmt::format("category: {}\n", to_string(r.category));
  out += fmt::format("M_MOD: {}\n", tally_text(r.mod));
  out += fmt::format("M_TEST: {}\n", tally_text(r.test));
  out += fmt::format("M_OP: {}\n", tally_text(r.op));
  out += fmt::format("overall: {}\n", format_maybe(r.overall));
  out += fmt::format("complexity_14: {}\n", format_maybe(r.complexity_14));
  out += fmt::format("unanswered: {}\n", fmt::join(r.unanswered, ","));
  out += "normalized scores:\n";
  for (const auto& [id, v] : r.per_question_normalized) out += fmt::format("  #{}: {}\n", id, format_maybe(v));
  if (!r.manual_answers.empty()) {
    out += "manually evaluated answers:\n";
    for (const auto& [id, text] : r.manual_answers) out += fmt::format("  #{}: {}\n", id, text);
  }
  if (!ingestion_log.empty()) {
    out += "ingestion notes:\n";
    for (const std::string& line : ingestion_log) out += fmt::format("  {}\n", line);
  }
  return out;
}

Json maturity_report_json(const MaturityReport& report, const std::vector<std::string>& ingestion_log) {
  Json j = report;
  j["ingestion_log"] = ingestion_log;
  return j;
}

std::string analysis_report_text(const ProjectAnalysis& a) {
  const ModularityAssessment& m = a.assessment;
  std::string out;
  out += fmt::format("structure_style: {}\n", to_string(m.structure_style));
  out += fmt::format("coupling: {:.4f} ({} global edges, {} call edges)\n", a.style.coupling, a.style.global_edges,
                     a.style.call_edges);
  out += fmt::format("levels_below_entry: {}\n", m.levels_below_entry);
  out += fmt::format("decomposability: {}\n", to_string(m.grades.decomposability));
  out += fmt::format("composability: {}\n", to_string(m.grades.composability));
  out += fmt::format("understandability: {}\n", to_string(m.grades.understandability));
  out += fmt::format("protection: {}\n", to_string(m.grades.protection));
  out += fmt::format("governance: {} {} ({})\n", governance_plus(m.governance) ? "+" : "-", to_string(m.governance),
                     a.governance.rationale);
  out += fmt::format("score_sum: {}\n", m.score_sum);
  out += fmt::format("treeness: {:.4f}\n", a.measures.treeness);
  out += fmt::format("reuse_ratio: {:.4f}\n", a.measures.reuse_ratio);
  out += fmt::format("mean_fanout: {:.4f}\n", a.measures.mean_fanout);
  out += fmt::format("clone_ratio: {:.4f}\n", a.clones.clone_ratio);
  for (const auto& g : a.clones.groups) out += fmt::format("clone_group: {}\n", fmt::join(g, ", "));
  out += fmt::format("cross_cutting: {}\n", fmt::join(a.cross_cutting, ", "));
  out += fmt::format("manual_markers: {}\n", a.manual_markers);
  out += "levels:\n";
  for (const LevelEntry& e : a.levels.levels) {
    out += fmt::format("  {}: {} {}\n", e.pou, e.stratum ? std::to_string(*e.stratum) : std::string("unreachable"),
                       to_string(e.level));
  }
  for (const std::string& w : a.warnings) out += fmt::format("warning: {}\n", w);
  return out;
}

Json analysis_report_json(const ProjectAnalysis& a) {
  Json levels = Json::array();
  for (const LevelEntry& e : a.levels.levels) {
    levels.push_back(Json{{"pou", e.pou},
                          {"stratum", e.stratum ? Json(*e.stratum) : Json(nullptr)},
                          {"level", to_string(e.level)}});
  }
  return Json{{"assessment", a.assessment},
              {"coupling", a.style.coupling},
              {"global_edges", a.style.global_edges},
              {"call_edges", a.style.call_edges},
              {"governance_rationale", a.governance.rationale},
              {"treeness", a.measures.treeness},
              {"reuse_ratio", a.measures.reuse_ratio},
              {"mean_fanout", a.measures.mean_fanout},
              {"clone_ratio", a.clones.clone_ratio},
              {"clone_groups", a.clones.groups},
              {"cross_cutting", a.cross_cutting},
              {"manual_markers", a.manual_markers},
              {"levels", levels},
              {"unreachable", a.levels.unreachable},
              {"warnings", a.warnings}};
}

} // namespace swmat
