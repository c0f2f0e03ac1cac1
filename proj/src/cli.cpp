#include "swmat/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "swmat/configurator.hpp"
#include "swmat/error.hpp"
#include "swmat/maturity.hpp"
#include "swmat/modularity.hpp"
#include "swmat/reporting.hpp"
#include "swmat/statistics.hpp"

namespace swmat {

namespace fs = std::filesystem;

namespace {

struct AnalyzeArgs {
  std::string project;
  std::string dot;
  std::string globals_dot;
  std::string assessment;
  bool per_instance = false;
  bool plant = false;
  std::string thresholds;
  std::vector<std::string> governance;
};

struct ScoreArgs {
  std::string schema;
  std::string answers;
  bool strict = false;
  std::string out;
};

struct CohortArgs {
  std::string schema;
  std::string answers_dir;
  std::string category;
  bool strict = false;
  std::string out;
};

struct CorrelateArgs {
  std::string schema;
  std::string answers_dir;
  std::vector<int> interaction = {23, 24, 26, 27};
  std::vector<int> targets;
  bool strict = false;
  std::string out;
};

struct ConfigureArgs {
  std::string mode;
  std::string templates;
  std::string config;
  std::string out;
};

void write_file(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream o(path, std::ios::binary);
  if (!o) throw InputError(fmt::format("cannot write {}", path.string()));
  o << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool same_dir(const fs::path& a, const fs::path& b) {
  std::error_code ec;
  return fs::weakly_canonical(a, ec) == fs::weakly_canonical(b, ec);
}

/// Outputs must never land in (and so modify) an input directory.
void require_outside(const std::string& output, const fs::path& input_dir, std::string_view what) {
  if (output.empty()) return;
  fs::path parent = fs::path(output).parent_path();
  if (parent.empty()) parent = ".";
  if (same_dir(parent, input_dir)) {
    throw UsageError(fmt::format("{} must not be written into the input directory {}", what, input_dir.string()));
  }
}

std::string safe_file_name(std::string_view s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
  return out.empty() ? "company" : out;
}

ScoringMode scoring_mode(bool strict) { return strict ? ScoringMode::Strict : ScoringMode::Lenient; }

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  const fs::path dir = a.project;
  for (const std::string* o : {&a.dot, &a.globals_dot, &a.assessment}) require_outside(*o, dir, "analysis output");

  AnalysisOptions opts;
  opts.per_instance = a.per_instance;
  opts.plant = a.plant;
  std::string thresholds = a.thresholds;
  if (thresholds.empty()) {
    if (const char* env = std::getenv("SWMAT_THRESHOLDS"); env != nullptr) thresholds = env;
  }
  if (!thresholds.empty()) opts.thresholds = load_thresholds(thresholds);
  for (const std::string& g : a.governance) {
    if (g == "templates") opts.evidence.templates_present = true;
    else if (g == "parameters") opts.evidence.parameters_present = true;
    else if (g == "provenance") opts.evidence.provenance_log_present = true;
    else throw UsageError(fmt::format("unknown governance evidence '{}'", g));
  }

  ProjectLoad load = load_project(dir);
  for (const Diagnostic& d : load.diagnostics) fmt::print(err, "{}\n", to_string(d));

  ProjectAnalysis analysis = analyze_project(load.project, opts);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".st") analysis.manual_markers += count_manual_markers(read_file(entry.path()));
  }
  for (const std::string& w : analysis.warnings) fmt::print(err, "warning: {}\n", w);

  if (!a.dot.empty()) write_file(a.dot, emit_dot(analysis.call_graph));
  if (!a.globals_dot.empty()) write_file(a.globals_dot, emit_dot(analysis.global_graph));
  if (!a.assessment.empty()) {
    write_file(a.assessment, a.assessment.ends_with(".json") ? analysis_report_json(analysis).dump(2) + "\n"
                                                             : analysis_report_text(analysis));
  } else {
    out << analysis_report_text(analysis);
  }
  return has_errors(load.diagnostics) ? kExitInput : kExitOk;
}

int cmd_score(const ScoreArgs& a, std::ostream& out, std::ostream& err) {
  QuestionnaireSchema schema = load_schema(a.schema);
  AnswerSet answers = load_answers(schema, a.answers);
  for (const std::string& note : answers.ingestion_log) fmt::print(err, "{}: {}\n", a.answers, note);
  MaturityReport report = build_report(schema, answers, scoring_mode(a.strict));
  std::string text = a.out.ends_with(".json") ? maturity_report_json(report, answers.ingestion_log).dump(2) + "\n"
                                              : maturity_report_text(report, answers.ingestion_log);
  if (a.out.empty()) {
    out << text;
  } else {
    write_file(a.out, text);
  }
  return kExitOk;
}

std::vector<MaturityReport> load_reports(const QuestionnaireSchema& schema, const fs::path& dir, bool strict,
                                         std::ostream& err) {
  std::vector<MaturityReport> reports;
  for (const AnswerSet& set : load_answers_dir(schema, dir)) {
    for (const std::string& note : set.ingestion_log) fmt::print(err, "{}: {}\n", set.company, note);
    reports.push_back(build_report(schema, set, scoring_mode(strict)));
  }
  return reports;
}

int cmd_cohort(const CohortArgs& a, std::ostream& out, std::ostream& err) {
  if (same_dir(a.out, a.answers_dir)) throw UsageError("--out must differ from --answers-dir");
  QuestionnaireSchema schema = load_schema(a.schema);
  std::vector<MaturityReport> all = load_reports(schema, a.answers_dir, a.strict, err);
  std::optional<BusinessCategory> filter;
  if (!a.category.empty()) filter = business_category_from_string(a.category);

  std::vector<MaturityReport> reports;
  for (const MaturityReport& r : all) {
    if (!filter || r.category == *filter) reports.push_back(r);
  }
  CohortStats cohort = cohort_stats(reports);

  const fs::path dir = a.out;
  write_file(dir / "overview.csv", emit_overview_csv(reports));

  struct Axis {
    const char* name;
    MaybeScore MaturityReport::*field;
  };
  const Axis axes[] = {{"M_MOD", &MaturityReport::m_mod}, {"M_TEST", &MaturityReport::m_test},
                       {"M_OP", &MaturityReport::m_op}};
  auto scatter = [&](std::string_view xn, auto xf, std::string_view yn, auto yf) {
    std::vector<ScatterPoint> pts;
    for (const MaturityReport& r : reports) {
      MaybeScore x = xf(r);
      MaybeScore y = yf(r);
      if (x && y) pts.push_back(ScatterPoint{r.company, r.category, to_double(*x), to_double(*y)});
    }
    write_file(dir / fmt::format("scatter_{}_{}.csv", xn, yn), emit_scatter_csv(xn, yn, pts));
  };
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      scatter(axes[i].name, [f = axes[i].field](const MaturityReport& r) { return r.*f; }, axes[j].name,
              [f = axes[j].field](const MaturityReport& r) { return r.*f; });
    }
  }
  scatter("complexity_14", [](const MaturityReport& r) { return r.complexity_14; }, "M_MOD",
          [](const MaturityReport& r) { return r.m_mod; });

  std::vector<int> mod_ids = schema.ids_in(Category::MOD);
  std::vector<int> test_op_ids = schema.ids_in(Category::TEST);
  for (int id : schema.ids_in(Category::OP)) test_op_ids.push_back(id);
  std::set<std::string> used_names;
  for (const MaturityReport& r : reports) {
    std::string base = safe_file_name(r.company);
    while (!used_names.insert(base).second) base += "_";
    if (mod_ids.size() >= 3) {
      write_file(dir / "radar" / (base + "_MOD.svg"),
                 emit_radar_svg(company_radar(schema, r, cohort, mod_ids, r.company + ": modularity")));
    }
    if (test_op_ids.size() >= 3) {
      write_file(dir / "radar" / (base + "_TEST_OP.svg"),
                 emit_radar_svg(company_radar(schema, r, cohort, test_op_ids,
                                              r.company + ": testing and start-up/operation/maintenance")));
    }
  }
  fmt::print(out, "{} companies; mean overall {}\n", cohort.companies, format_maybe(cohort.mean_overall));
  return kExitOk;
}

int cmd_correlate(const CorrelateArgs& a, std::ostream& out, std::ostream& err) {
  require_outside(a.out, a.answers_dir, "correlation output");
  QuestionnaireSchema schema = load_schema(a.schema);
  for (int id : a.interaction) {
    if (schema.find(id) == nullptr) throw InputError(fmt::format("interaction question #{} is not in the schema", id));
  }
  std::vector<MaturityReport> reports = load_reports(schema, a.answers_dir, a.strict, err);

  std::vector<std::optional<double>> xs;
  for (const MaturityReport& r : reports) {
    MaybeScore v = interaction_variable(r, a.interaction);
    xs.push_back(v ? std::optional<double>(to_double(*v)) : std::nullopt);
  }
  std::string csv = fmt::format("target,r,n,significance\n");
  for (int t : a.targets) {
    if (schema.find(t) == nullptr) throw InputError(fmt::format("target question #{} is not in the schema", t));
    std::vector<std::optional<double>> ys;
    for (const MaturityReport& r : reports) {
      auto it = r.per_question_normalized.find(t);
      ys.push_back(it != r.per_question_normalized.end() && it->second ? std::optional<double>(to_double(*it->second))
                                                                       : std::nullopt);
    }
    CorrelationResult c;
    try {
      c = pearson(xs, ys);
    } catch (const InvariantError& e) {
      throw InvariantError(fmt::format("target #{}: {}", t, e.what()));
    }
    csv += fmt::format("{},{},{},{}\n", t, format_fixed4(c.r), c.n, to_string(c.significance));
  }
  if (a.out.empty()) {
    out << csv;
  } else {
    write_file(a.out, csv);
  }
  return kExitOk;
}

int cmd_configure(const ConfigureArgs& a, std::ostream& out, std::ostream&) {
  if (same_dir(a.out, a.templates)) throw UsageError("--out must differ from --templates");
  GeneratedProject project;
  if (a.mode == "template") {
    TemplateSet templates = load_templates(a.templates);
    ModuleConfig config = parse_module_config(read_file(a.config), a.config);
    project = generate_template_project(templates, config);
  } else {
    project = generate_parameter_project(load_parameter_project(a.templates, a.config));
  }
  write_project(project, a.out);
  fmt::print(out, "wrote {} files to {}; specificity {}\n", project.files.size(), a.out,
             format_fixed4(specificity_ratio(project)));
  return kExitOk;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Software maturity benchmark for automated production systems", "swmat"};
  app.require_subcommand(1);

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Static analysis of a Structured Text project");
  analyze->add_option("project", an.project, "Project directory")->required();
  analyze->add_option("--dot", an.dot, "Call graph DOT output");
  analyze->add_option("--globals-dot", an.globals_dot, "Global-variable graph DOT output");
  analyze->add_option("--assessment", an.assessment, "Assessment report (.json for JSON)");
  analyze->add_flag("--per-instance", an.per_instance, "One node per FB instance");
  analyze->add_flag("--plant", an.plant, "Entry POUs sit at plant level");
  analyze->add_option("--thresholds", an.thresholds, "Thresholds file (default: $SWMAT_THRESHOLDS)");
  analyze->add_option("--governance", an.governance, "Process evidence: templates, parameters, provenance")
      ->check(CLI::IsMember({"templates", "parameters", "provenance"}));

  ScoreArgs sc;
  auto* score = app.add_subcommand("score", "Maturity scores of one answer set");
  score->add_option("--schema", sc.schema)->required();
  score->add_option("--answers", sc.answers)->required();
  score->add_flag("--strict", sc.strict, "Unanswered questions count as reachable");
  score->add_option("--out", sc.out, "Report file (.json for JSON)");

  CohortArgs co;
  auto* cohort = app.add_subcommand("cohort", "Overview CSV, scatter CSVs and radar diagrams for a cohort");
  cohort->add_option("--schema", co.schema)->required();
  cohort->add_option("--answers-dir", co.answers_dir)->required();
  cohort->add_option("--category", co.category)->check(CLI::IsMember({"machine", "plant", "platform"}));
  cohort->add_flag("--strict", co.strict);
  cohort->add_option("--out", co.out)->required();

  CorrelateArgs cr;
  auto* correlate = app.add_subcommand("correlate", "Pearson correlation with the interaction variable");
  correlate->add_option("--schema", cr.schema)->required();
  correlate->add_option("--answers-dir", cr.answers_dir)->required();
  correlate->add_option("--interaction", cr.interaction)->delimiter(',');
  correlate->add_option("--targets", cr.targets)->delimiter(',')->required();
  correlate->add_flag("--strict", cr.strict);
  correlate->add_option("--out", cr.out);

  ConfigureArgs cf;
  auto* configure = app.add_subcommand("configure", "Generate a project from templates or a parameter table");
  configure->add_option("--mode", cf.mode)->required()->check(CLI::IsMember({"template", "parameter"}));
  configure->add_option("--templates", cf.templates)->required();
  configure->add_option("--config", cf.config)->required();
  configure->add_option("--out", cf.out)->required();

  std::string schema_out;
  auto* schema = app.add_subcommand("schema", "Write the built-in questionnaire schema");
  schema->add_option("--out", schema_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  }

  try {
    if (*analyze) return cmd_analyze(an, out, err);
    if (*score) return cmd_score(sc, out, err);
    if (*cohort) return cmd_cohort(co, out, err);
    if (*correlate) return cmd_correlate(cr, out, err);
    if (*configure) return cmd_configure(cf, out, err);
    if (*schema) {
      write_file(schema_out, schema_to_json(default_schema()));
      return kExitOk;
    }
  } catch (const UsageError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const InputError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitInput;
  } catch (const InvariantError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitInvariant;
  } catch (const fs::filesystem_error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitInput;
  }
  return kExitUsage;
}

} // namespace swmat
