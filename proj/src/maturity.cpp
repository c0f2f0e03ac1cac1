#include "swmat/maturity.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "swmat/error.hpp"
#include "swmat/serialize.hpp"

namespace swmat {

namespace {

struct Choice {
  const char* key;
  const char* label;
};

Question numeric(int id, const char* text) {
  Question q;
  q.id = id;
  q.text = text;
  q.category = Category::GEN;
  q.mode = AnswerMode::Numeric;
  return q;
}

Question free_text(int id, const char* text) {
  Question q;
  q.id = id;
  q.text = text;
  q.category = expected_category(id);
  q.mode = AnswerMode::FreeText;
  return q;
}

/// Options best first, scores evenly spaced from 5 to 0.
Question graded(int id, const char* text, std::initializer_list<Choice> choices) {
  Question q;
  q.id = id;
  q.text = text;
  q.category = expected_category(id);
  const auto steps = static_cast<std::int64_t>(choices.size()) - 1;
  std::int64_t k = 0;
  for (const Choice& c : choices) {
    q.options.push_back(AnswerOption{c.key, c.label, Score(5 * (steps - k), steps)});
    ++k;
  }
  return q;
}

Question scored(int id, const char* text, std::initializer_list<AnswerOption> options) {
  Question q;
  q.id = id;
  q.text = text;
  q.category = expected_category(id);
  q.options = options;
  return q;
}

const std::initializer_list<Choice> kFrequency = {
    {"very_often", "Very often"}, {"often", "Often"}, {"rarely", "Rarely"}, {"never", "Never"}};
const std::initializer_list<Choice> kYesPartlyNo = {{"yes", "Yes"}, {"partly", "Partly"}, {"no", "No"}};

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot read {}", p.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse_json(std::string_view text, std::string_view file) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // byte offsets are the only position nlohmann reports; turn it into a line
    std::size_t line = 1 + static_cast<std::size_t>(
                               std::count(text.begin(), text.begin() + std::min(e.byte, text.size()), '\n'));
    throw InputError(fmt::format("{}:{}: invalid JSON: {}", file, line, e.what()));
  }
}

MaybeScore mean_present(const std::vector<MaybeScore>& values) {
  Score sum{0};
  int n = 0;
  for (const MaybeScore& v : values) {
    if (!v) continue;
    sum += *v;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

} // namespace

QuestionnaireSchema default_schema() {
  QuestionnaireSchema s;
  auto& q = s.questions;
  q.push_back(numeric(1, "How many engineers and technicians are involved in the development projects?"));
  q.push_back(numeric(2, "How many engineers and technicians work on-site?"));
  q.push_back(numeric(3, "How many programmers are employed in the IT department?"));
  q.push_back(numeric(4, "What number of start-up personnel is employed in the department?"));
  q.push_back(numeric(5, "How many programmers are on-site (at customer's premises)?"));
  q.push_back(numeric(6, "How many employees are involved in on-site start-up (at customer's premises)?"));
  q.push_back(numeric(7, "How many programmers are there per application/machine?"));
  q.push_back(numeric(8, "How many start-up employees are there per application/machine?"));
  q.push_back(numeric(9, "Number of CPUs per machine/plant?"));
  q.push_back(graded(10, "Are these CPUs PC-based?", kYesPartlyNo));
  q.push_back(free_text(11, "What is the scale of the main applications created in your company?"));
  q.push_back(numeric(12, "What is the scope of an application: lines of code?"));
  q.push_back(numeric(13, "What is the scope of an application: number of components?"));
  q.push_back(numeric(14, "Measure for complexity calculated as 0.5 (CPUs + programmer)"));

  q.push_back(graded(15, "How is the in-house cooperation arranged?",
                     {{"integrated_teams", "Interdisciplinary teams work on shared modules"},
                      {"coordinated", "Disciplines coordinate at fixed milestones"},
                      {"sequential", "Disciplines hand over sequentially"}}));
  q.push_back(graded(16, "Which documents are exchanged during a development project?",
                     {{"interface_specs", "Models and interface specifications"},
                      {"structured_documents", "Structured documents from templates"},
                      {"informal", "Informal documents only"}}));
  q.push_back(graded(17, "How is the development project documented?",
                     {{"tool_supported", "Tool-supported and versioned"},
                      {"templates", "Standardized document templates"},
                      {"ad_hoc", "Ad hoc"}}));
  q.push_back(graded(18, "Who started the initiative to use modularization?",
                     {{"management", "Management as part of the product strategy"},
                      {"engineering", "Engineering department"},
                      {"individuals", "Individual programmers"},
                      {"nobody", "No initiative"}}));
  q.push_back(graded(19, "What is modularized?",
                     {{"all_disciplines", "Mechanics, electrics/electronics and software together"},
                      {"software", "Software only"},
                      {"nothing", "Nothing"}}));
  q.push_back(graded(20, "Is continuous integration used?", kYesPartlyNo));
  q.push_back(graded(21, "If yes, what is the tool chain you use?",
                     {{"integrated", "Integrated automated tool chain"},
                      {"partial", "Partially automated tool chain"},
                      {"none", "No tool chain"}}));
  q.push_back(graded(22, "What programming languages are used in your company?",
                     {{"per_level", "Languages chosen per architectural level"},
                      {"several", "Several IEC 61131-3 languages mixed"},
                      {"single", "A single language everywhere"}}));
  q.push_back(graded(23, "How often are library components used?", kFrequency));
  q.push_back(graded(24, "Please briefly describe the release procedure of library components.",
                     {{"defined_with_tests", "Defined release procedure with tests and approval"},
                      {"review", "Informal review before release"},
                      {"none", "No release procedure"}}));
  q.push_back(graded(25, "How is the decision to form new variants made?",
                     {{"platform_strategy", "Product management following a platform strategy"},
                      {"project_review", "Per project with an engineering review"},
                      {"programmer", "By the individual programmer"}}));
  q.push_back(graded(26, "Is your company using a tool for version management?", kYesPartlyNo));
  q.push_back(graded(27, "How are changes for versions in your company tracked?",
                     {{"tool", "Tool-based change tracking"},
                      {"manual_log", "Manually maintained change log"},
                      {"not_tracked", "Not tracked"}}));
  q.push_back(graded(28, "How often is code generation from EPLAN or other engineering tools applied?", kFrequency));
  q.push_back(graded(29, "Which tools/models are used for code generation in your company?",
                     {{"model_based", "Model-based generators"},
                      {"scripts", "Spreadsheets or scripts"},
                      {"none", "None"}}));
  q.push_back(graded(30, "Are projects configured automatically from libraries based on templates?", kYesPartlyNo));

  q.push_back(graded(31, "Are there any quality gates before adding a new library component?", kYesPartlyNo));
  q.push_back(graded(32, "What quality assurance measures are used in your company?",
                     {{"analysis_reviews_tests", "Static analysis, reviews and tests"},
                      {"reviews_or_tests", "Reviews or tests"},
                      {"none", "None"}}));
  q.push_back(graded(33, "What scenarios are tested or what requirements have to be met by the created tests?",
                     {{"requirements_and_faults", "Requirement-based including fault scenarios"},
                      {"normal_operation", "Normal operation only"},
                      {"none", "No defined scenarios"}}));
  q.push_back(graded(34, "How is the software tested?",
                     {{"automated", "Automated tests"},
                      {"test_plan", "Manual tests following a test plan"},
                      {"on_machine", "Ad hoc on the machine"}}));
  q.push_back(graded(35, "Are simulations used for testing?", kFrequency));

  q.push_back(scored(36, "Is the start-up of the machine/plant done on-site by the designer/programmer?",
                     {{"never", "Never", Score(5)},
                      {"rarely", "Rarely", Score(13, 4)},
                      {"sometimes", "Sometimes", Score(5, 2)},
                      {"very_often", "Very often", Score(0)}}));
  q.push_back(scored(37, "How is the delivery to the customer conducted?",
                     {{"no_source", "Customer does not receive the source code", Score(5)},
                      {"parts", "Customer only receives parts of the source code", Score(5, 2)},
                      {"whole_source", "Customer receives the whole source code", Score(0)}}));
  q.push_back(scored(38, "How are updates installed?",
                     {{"remote_and_on_demand", "Remote maintenance and on demand", Score(5)},
                      {"remote", "Remote maintenance", Score(4)},
                      {"on_site", "On site", Score(2)}}));
  q.push_back(scored(39, "Does the service department know the current customer's software status on-site?",
                     {{"very_often", "Very often", Score(5)},
                      {"often", "Often", Score(15, 4)},
                      {"rarely", "Rarely", Score(5, 4)},
                      {"never", "Never", Score(0)}}));

  q.push_back(free_text(40, "How long does a typical start-up process take?"));
  q.push_back(free_text(41, "How are new elements added to libraries?"));
  q.push_back(free_text(42, "Please describe the release procedure of a library element."));
  q.push_back(free_text(43, "By whom is the start-up of the machine/plant done on-site otherwise?"));
  q.push_back(free_text(44, "On which level of the software do you use which programming language?"));
  q.push_back(free_text(45, "Which are the most critical technical tasks to be automatically controlled in your "
                            "applications?"));
  return s;
}

QuestionnaireSchema parse_schema_json(std::string_view text, std::string_view file) {
  Json j = parse_json(text, file);
  QuestionnaireSchema s;
  try {
    s = j.get<QuestionnaireSchema>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("{}: malformed schema: {}", file, e.what()));
  } catch (const Error& e) {
    throw InputError(fmt::format("{}: malformed schema: {}", file, e.what()));
  }
  validate_schema(s);
  return s;
}

QuestionnaireSchema load_schema(const std::filesystem::path& path) {
  return parse_schema_json(read_text(path), path.string());
}

std::string schema_to_json(const QuestionnaireSchema& schema) { return Json(schema).dump(2) + "\n"; }

Score resolve_numeric_text(std::string_view text, std::string* note) {
  std::string t;
  for (char c : text) {
    if (c != ' ' && c != '\t') t += c;
  }
  if (t.empty()) throw InputError("empty numeric answer");
  if (t[0] == '>' || t[0] == '<') {
    std::string_view rest = std::string_view(t).substr(t.size() > 1 && t[1] == '=' ? 2 : 1);
    Score v = parse_score(rest);
    if (note != nullptr) *note = fmt::format("bound '{}' resolved to {}", text, to_fraction_string(v));
    return v;
  }
  // A dash after the first character separates a range.
  if (auto dash = t.find('-', 1); dash != std::string::npos) {
    Score lo = parse_score(std::string_view(t).substr(0, dash));
    Score hi = parse_score(std::string_view(t).substr(dash + 1));
    if (hi < lo) throw InputError(fmt::format("range '{}' is reversed", text));
    Score mid = (lo + hi) / 2;
    if (note != nullptr) *note = fmt::format("range '{}' resolved to midpoint {}", text, to_fraction_string(mid));
    return mid;
  }
  return parse_score(t);
}

AnswerSet parse_answers_json(const QuestionnaireSchema& schema, std::string_view text, std::string_view file) {
  Json j = parse_json(text, file);
  AnswerSet a;
  try {
    a.company = j.at("company").get<std::string>();
    a.category = business_category_from_string(j.value("category", std::string("machine")));
    for (const auto& [key, value] : j.at("answers").items()) {
      int id = 0;
      try {
        std::size_t used = 0;
        id = std::stoi(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        throw InputError(fmt::format("{}: answer key '{}' is not a question number", file, key));
      }
      if (value.is_null()) continue;
      const Question* q = schema.find(id);
      if (q != nullptr && q->mode == AnswerMode::Numeric) {
        if (value.is_number()) {
          a.answers[id] = score_from_json(value);
        } else if (value.is_string()) {
          std::string note;
          a.answers[id] = resolve_numeric_text(value.get<std::string>(), &note);
          if (!note.empty()) a.ingestion_log.push_back(fmt::format("#{}: {}", id, note));
        } else {
          throw InputError(fmt::format("{}: question #{} expects a number", file, id));
        }
      } else if (value.is_string()) {
        a.answers[id] = value.get<std::string>();
      } else if (value.is_number()) {
        a.answers[id] = score_from_json(value);
      } else {
        throw InputError(fmt::format("{}: question #{} has an unsupported answer {}", file, id, value.dump()));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("{}: malformed answers: {}", file, e.what()));
  }
  validate_answers(schema, a);
  return a;
}

AnswerSet load_answers(const QuestionnaireSchema& schema, const std::filesystem::path& path) {
  return parse_answers_json(schema, read_text(path), path.string());
}

std::vector<AnswerSet> load_answers_dir(const QuestionnaireSchema& schema, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw InputError(fmt::format("{}: not a directory", dir.string()));
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<AnswerSet> out;
  for (const fs::path& p : paths) out.push_back(load_answers(schema, p));
  return out;
}

Score normalize(const Score& score, const Score& weight) { return score / weight * 5; }

ScoredAnswer score_answer(const QuestionnaireSchema& schema, int id, const Answer& answer) {
  const Question* q = schema.find(id);
  if (q == nullptr) throw InvariantError(fmt::format("question #{} is not in the schema", id));
  if (q->mode != AnswerMode::SingleChoice) throw InvariantError(fmt::format("question #{} is not scored", id));
  const auto* key = std::get_if<std::string>(&answer);
  const AnswerOption* o = key != nullptr ? q->find_option(*key) : nullptr;
  if (o == nullptr) {
    std::vector<std::string> valid;
    for (const AnswerOption& opt : q->options) valid.push_back(opt.key);
    throw InvariantError(fmt::format("question #{}: unknown option '{}' (valid: {})", id,
                                     key != nullptr ? *key : std::string("<number>"), fmt::join(valid, ", ")));
  }
  return ScoredAnswer{o->score, normalize(o->score, q->weight)};
}

CategoryTally category_maturity(const QuestionnaireSchema& schema, const AnswerSet& answers, Category category,
                                ScoringMode mode) {
  CategoryTally t;
  for (const Question& q : schema.questions) {
    if (q.category != category || q.mode != AnswerMode::SingleChoice) continue;
    auto it = answers.answers.find(q.id);
    if (it == answers.answers.end()) {
      t.unanswered.push_back(q.id);
      if (mode == ScoringMode::Strict) t.reachable += q.weight;
      continue;
    }
    t.gained += score_answer(schema, q.id, it->second).score;
    t.reachable += q.weight;
  }
  if (t.reachable != 0) t.maturity = t.gained / t.reachable;
  return t;
}

MaybeScore overall_maturity(const std::vector<CategoryTally>& tallies) {
  Score gained{0};
  Score reachable{0};
  for (const CategoryTally& t : tallies) {
    gained += t.gained;
    reachable += t.reachable;
  }
  if (reachable == 0) return std::nullopt;
  return gained / reachable;
}

Score complexity_14(const Score& cpus, const Score& programmers) {
  if (cpus < 0 || programmers < 0) {
    throw InputError(fmt::format("complexity needs non-negative inputs, got CPUs {} and programmers {}",
                                 to_fraction_string(cpus), to_fraction_string(programmers)));
  }
  return (cpus + programmers) / 2;
}

MaybeScore interaction_variable(const std::vector<MaybeScore>& normalized) { return mean_present(normalized); }

MaybeScore interaction_variable(const MaturityReport& report, const std::vector<int>& ids) {
  std::vector<MaybeScore> values;
  for (int id : ids) {
    auto it = report.per_question_normalized.find(id);
    values.push_back(it == report.per_question_normalized.end() ? std::nullopt : it->second);
  }
  return interaction_variable(values);
}

MaturityReport build_report(const QuestionnaireSchema& schema, const AnswerSet& answers, ScoringMode mode) {
  MaturityReport r;
  r.company = answers.company;
  r.category = answers.category;
  for (const Question& q : schema.questions) {
    auto it = answers.answers.find(q.id);
    if (q.category != Category::GEN && q.mode == AnswerMode::SingleChoice) {
      r.per_question_normalized[q.id] =
          it == answers.answers.end() ? MaybeScore{} : MaybeScore{score_answer(schema, q.id, it->second).normalized};
    }
    if (it == answers.answers.end()) {
      r.unanswered.push_back(q.id);
    } else if (q.id >= 40) {
      if (const auto* text = std::get_if<std::string>(&it->second)) r.manual_answers[q.id] = *text;
    }
  }
  r.mod = category_maturity(schema, answers, Category::MOD, mode);
  r.test = category_maturity(schema, answers, Category::TEST, mode);
  r.op = category_maturity(schema, answers, Category::OP, mode);
  r.m_mod = r.mod.maturity;
  r.m_test = r.test.maturity;
  r.m_op = r.op.maturity;
  r.overall = overall_maturity({r.mod, r.test, r.op});

  auto number = [&](int id) -> MaybeScore {
    auto it = answers.answers.find(id);
    if (it == answers.answers.end()) return std::nullopt;
    if (const auto* s = std::get_if<Score>(&it->second)) return *s;
    return std::nullopt;
  };
  if (MaybeScore given = number(kComplexityQuestion)) {
    r.complexity_14 = *given;
  } else if (MaybeScore cpus = number(kCpuQuestion), programmers = number(kProgrammerQuestion); cpus && programmers) {
    r.complexity_14 = complexity_14(*cpus, *programmers);
  }
  return r;
}

CohortStats cohort_stats(const std::vector<MaturityReport>& reports, std::optional<BusinessCategory> filter) {
  CohortStats c;
  std::map<int, Score> sums;
  std::vector<MaybeScore> mods;
  std::vector<MaybeScore> tests;
  std::vector<MaybeScore> ops;
  std::vector<MaybeScore> overalls;
  for (const MaturityReport& r : reports) {
    if (filter && r.category != *filter) continue;
    ++c.companies;
    for (const auto& [id, v] : r.per_question_normalized) {
      c.contributors.try_emplace(id, 0);
      if (!v) continue;
      sums[id] += *v;
      ++c.contributors[id];
    }
    mods.push_back(r.m_mod);
    tests.push_back(r.m_test);
    ops.push_back(r.m_op);
    overalls.push_back(r.overall);
  }
  if (c.companies == 0) throw InputError("empty cohort after filtering");
  for (const auto& [id, n] : c.contributors) {
    c.question_mean[id] = n == 0 ? MaybeScore{} : MaybeScore{sums[id] / n};
  }
  c.mean_mod = mean_present(mods);
  c.mean_test = mean_present(tests);
  c.mean_op = mean_present(ops);
  c.mean_overall = mean_present(overalls);
  return c;
}

} // namespace swmat
