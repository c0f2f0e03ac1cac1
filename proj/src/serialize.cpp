#include "swmat/serialize.hpp"

#include <fmt/format.h>

#include "swmat/error.hpp"

namespace swmat {

namespace {

/// Number of decimal places needed to write s exactly, if it terminates.
std::optional<int> decimal_places(const Score& s) {
  std::int64_t d = s.denominator();
  int twos = 0;
  int fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d != 1) return std::nullopt;
  return std::max(twos, fives);
}

} // namespace

Json score_to_json(const Score& s) {
  if (s.denominator() == 1) return Json(s.numerator());
  auto places = decimal_places(s);
  if (places && *places <= 12) return Json(to_double(s));
  return Json(to_fraction_string(s));
}

Json maybe_score_to_json(const MaybeScore& s) { return s ? score_to_json(*s) : Json(nullptr); }

Score score_from_json(const Json& j) {
  if (j.is_number_integer()) return Score(j.get<std::int64_t>());
  if (j.is_number()) {
    try {
      return parse_score(j.dump());
    } catch (const InputError&) {
      return score_from_double(j.get<double>());
    }
  }
  if (j.is_string()) return parse_score(j.get<std::string>());
  throw InputError(fmt::format("expected a number, got {}", j.dump()));
}

MaybeScore maybe_score_from_json(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return score_from_json(j);
}

void to_json(Json& j, const AnswerOption& o) {
  j = Json{{"key", o.key}, {"label", o.label}, {"score", score_to_json(o.score)}};
}

void from_json(const Json& j, AnswerOption& o) {
  o.key = j.at("key").get<std::string>();
  o.label = j.value("label", o.key);
  o.score = score_from_json(j.at("score"));
}

void to_json(Json& j, const Question& q) {
  j = Json{{"id", q.id},
           {"text", q.text},
           {"category", to_string(q.category)},
           {"weight", score_to_json(q.weight)},
           {"mode", to_string(q.mode)},
           {"options", q.options}};
}

void from_json(const Json& j, Question& q) {
  q.id = j.at("id").get<int>();
  q.text = j.value("text", std::string{});
  q.category = category_from_string(j.at("category").get<std::string>());
  q.weight = j.contains("weight") ? score_from_json(j.at("weight")) : Score(5);
  q.mode = answer_mode_from_string(j.value("mode", std::string("single-choice")));
  q.options = j.value("options", std::vector<AnswerOption>{});
}

void to_json(Json& j, const QuestionnaireSchema& s) { j = Json{{"questions", s.questions}}; }

void from_json(const Json& j, QuestionnaireSchema& s) {
  s.questions = j.at("questions").get<std::vector<Question>>();
  std::sort(s.questions.begin(), s.questions.end(), [](const Question& a, const Question& b) { return a.id < b.id; });
}

void to_json(Json& j, const CategoryTally& t) {
  j = Json{{"gained", score_to_json(t.gained)},
           {"reachable", score_to_json(t.reachable)},
           {"maturity", maybe_score_to_json(t.maturity)},
           {"unanswered", t.unanswered}};
}

void from_json(const Json& j, CategoryTally& t) {
  t.gained = score_from_json(j.at("gained"));
  t.reachable = score_from_json(j.at("reachable"));
  t.maturity = maybe_score_from_json(j.at("maturity"));
  t.unanswered = j.at("unanswered").get<std::vector<int>>();
}

void to_json(Json& j, const MaturityReport& r) {
  Json per = Json::object();
  for (const auto& [id, v] : r.per_question_normalized) per[std::to_string(id)] = maybe_score_to_json(v);
  Json manual = Json::object();
  for (const auto& [id, text] : r.manual_answers) manual[std::to_string(id)] = text;
  j = Json{{"company", r.company},
           {"category", to_string(r.category)},
           {"M_MOD", maybe_score_to_json(r.m_mod)},
           {"M_TEST", maybe_score_to_json(r.m_test)},
           {"M_OP", maybe_score_to_json(r.m_op)},
           {"overall", maybe_score_to_json(r.overall)},
           {"complexity_14", maybe_score_to_json(r.complexity_14)},
           {"MOD", r.mod},
           {"TEST", r.test},
           {"OP", r.op},
           {"per_question_normalized", per},
           {"unanswered", r.unanswered},
           {"manual_answers", manual}};
}

void from_json(const Json& j, MaturityReport& r) {
  r.company = j.at("company").get<std::string>();
  r.category = business_category_from_string(j.at("category").get<std::string>());
  r.m_mod = maybe_score_from_json(j.at("M_MOD"));
  r.m_test = maybe_score_from_json(j.at("M_TEST"));
  r.m_op = maybe_score_from_json(j.at("M_OP"));
  r.overall = maybe_score_from_json(j.at("overall"));
  r.complexity_14 = maybe_score_from_json(j.at("complexity_14"));
  r.mod = j.at("MOD").get<CategoryTally>();
  r.test = j.at("TEST").get<CategoryTally>();
  r.op = j.at("OP").get<CategoryTally>();
  r.per_question_normalized.clear();
  for (const auto& [k, v] : j.at("per_question_normalized").items()) {
    r.per_question_normalized[std::stoi(k)] = maybe_score_from_json(v);
  }
  r.unanswered = j.at("unanswered").get<std::vector<int>>();
  r.manual_answers.clear();
  for (const auto& [k, v] : j.at("manual_answers").items()) r.manual_answers[std::stoi(k)] = v.get<std::string>();
}

void to_json(Json& j, const MeyerGrades& g) {
  j = Json{{"decomposability", to_string(g.decomposability)},
           {"composability", to_string(g.composability)},
           {"understandability", to_string(g.understandability)},
           {"protection", to_string(g.protection)}};
}

void from_json(const Json& j, MeyerGrades& g) {
  g.decomposability = grade_from_string(j.at("decomposability").get<std::string>());
  g.composability = grade_from_string(j.at("composability").get<std::string>());
  g.understandability = grade_from_string(j.at("understandability").get<std::string>());
  g.protection = grade_from_string(j.at("protection").get<std::string>());
}

void to_json(Json& j, const ModularityAssessment& a) {
  j = Json{{"grades", a.grades},
           {"governance", to_string(a.governance)},
           {"structure_style", to_string(a.structure_style)},
           {"levels_below_entry", a.levels_below_entry},
           {"score_sum", a.score_sum}};
}

void from_json(const Json& j, ModularityAssessment& a) {
  a.grades = j.at("grades").get<MeyerGrades>();
  a.governance = governance_from_string(j.at("governance").get<std::string>());
  a.structure_style = structure_style_from_string(j.at("structure_style").get<std::string>());
  a.levels_below_entry = j.at("levels_below_entry").get<int>();
  a.score_sum = j.at("score_sum").get<int>();
}

} // namespace swmat
