#include "swmat/assessment.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "swmat/error.hpp"
#include "swmat/model.hpp"

namespace swmat {

std::string_view to_string(Category c) {
  switch (c) {
    case Category::GEN: return "GEN";
    case Category::MOD: return "MOD";
    case Category::TEST: return "TEST";
    case Category::OP: return "OP";
  }
  return "?";
}

std::string_view to_string(AnswerMode m) {
  switch (m) {
    case AnswerMode::SingleChoice: return "single-choice";
    case AnswerMode::Numeric: return "numeric";
    case AnswerMode::FreeText: return "free-text";
  }
  return "?";
}

Category category_from_string(std::string_view s) {
  for (Category c : {Category::GEN, Category::MOD, Category::TEST, Category::OP}) {
    if (iequals(s, to_string(c))) return c;
  }
  throw InputError(fmt::format("unknown question category '{}'", s));
}

AnswerMode answer_mode_from_string(std::string_view s) {
  for (AnswerMode m : {AnswerMode::SingleChoice, AnswerMode::Numeric, AnswerMode::FreeText}) {
    if (iequals(s, to_string(m))) return m;
  }
  throw InputError(fmt::format("unknown answer mode '{}'", s));
}

const AnswerOption* Question::find_option(std::string_view key_or_label) const {
  for (const AnswerOption& o : options) {
    if (iequals(o.key, key_or_label)) return &o;
  }
  for (const AnswerOption& o : options) {
    if (iequals(o.label, key_or_label)) return &o;
  }
  return nullptr;
}

const Question* QuestionnaireSchema::find(int id) const {
  for (const Question& q : questions) {
    if (q.id == id) return &q;
  }
  return nullptr;
}

std::vector<int> QuestionnaireSchema::ids_in(Category c) const {
  std::vector<int> ids;
  for (const Question& q : questions) {
    if (q.category == c) ids.push_back(q.id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

Category expected_category(int id) {
  if (id >= 15 && id <= 30) return Category::MOD;
  if (id >= 31 && id <= 35) return Category::TEST;
  if (id >= 36 && id <= 39) return Category::OP;
  return Category::GEN;
}

void validate_schema(const QuestionnaireSchema& schema) {
  std::set<int> seen;
  for (const Question& q : schema.questions) {
    if (q.id < 1 || q.id > 45) throw InvariantError(fmt::format("question id {} outside 1..45", q.id));
    if (!seen.insert(q.id).second) throw InvariantError(fmt::format("duplicate question id {}", q.id));
    if (q.category != expected_category(q.id)) {
      throw InvariantError(fmt::format("question #{} must be in category {}, found {}", q.id,
                                       to_string(expected_category(q.id)), to_string(q.category)));
    }
    if (q.weight <= 0) throw InvariantError(fmt::format("question #{} has non-positive weight", q.id));
    if (q.mode == AnswerMode::SingleChoice && q.options.empty()) {
      throw InvariantError(fmt::format("single-choice question #{} has no options", q.id));
    }
    if (q.options.empty()) continue;
    Score best = q.options.front().score;
    std::set<std::string> keys;
    for (const AnswerOption& o : q.options) {
      if (o.score < 0 || o.score > q.weight) {
        throw InvariantError(fmt::format("question #{} option '{}' score {} outside 0..{}", q.id, o.key,
                                         to_fraction_string(o.score), to_fraction_string(q.weight)));
      }
      if (!keys.insert(fold(o.key)).second) {
        throw InvariantError(fmt::format("question #{} has duplicate option key '{}'", q.id, o.key));
      }
      best = std::max(best, o.score);
    }
    if (best != q.weight) {
      throw InvariantError(fmt::format("question #{}: best option scores {} but weight is {}", q.id,
                                       to_fraction_string(best), to_fraction_string(q.weight)));
    }
  }
}

std::string_view to_string(BusinessCategory c) {
  switch (c) {
    case BusinessCategory::Platform: return "platform";
    case BusinessCategory::Machine: return "machine";
    case BusinessCategory::Plant: return "plant";
  }
  return "?";
}

BusinessCategory business_category_from_string(std::string_view s) {
  for (BusinessCategory c : {BusinessCategory::Platform, BusinessCategory::Machine, BusinessCategory::Plant}) {
    if (iequals(s, to_string(c))) return c;
  }
  throw InputError(fmt::format("unknown company category '{}' (expected platform, machine or plant)", s));
}

void validate_answers(const QuestionnaireSchema& schema, AnswerSet& answers) {
  for (const auto& [id, answer] : answers.answers) {
    const Question* q = schema.find(id);
    if (q == nullptr) {
      throw InvariantError(fmt::format("{}: answer to unknown question #{}", answers.company, id));
    }
    if (q->mode == AnswerMode::SingleChoice) {
      const auto* key = std::get_if<std::string>(&answer);
      if (key == nullptr) {
        throw InvariantError(fmt::format("{}: question #{} expects an option, got a number", answers.company, id));
      }
      if (q->find_option(*key) == nullptr) {
        std::vector<std::string> valid;
        for (const AnswerOption& o : q->options) valid.push_back(o.key);
        throw InvariantError(fmt::format("{}: question #{} has no option '{}' (valid: {})", answers.company, id,
                                         *key, fmt::join(valid, ", ")));
      }
    }
  }
  answers.unanswered.clear();
  for (const Question& q : schema.questions) {
    if (!answers.answers.contains(q.id)) answers.unanswered.push_back(q.id);
  }
}

std::string_view to_string(Grade g) {
  switch (g) {
    case Grade::Minus: return "-";
    case Grade::Plus: return "+";
    case Grade::PlusPlus: return "++";
  }
  return "?";
}

std::string_view to_string(GovernanceLevel l) {
  switch (l) {
    case GovernanceLevel::L0: return "L0";
    case GovernanceLevel::L1: return "L1";
    case GovernanceLevel::L2: return "L2";
    case GovernanceLevel::L3: return "L3";
  }
  return "?";
}

std::string_view to_string(StructureStyle s) {
  switch (s) {
    case StructureStyle::HierarchicalCalls: return "HierarchicalCalls";
    case StructureStyle::FlatGlobal: return "FlatGlobal";
    case StructureStyle::Mixed: return "Mixed";
  }
  return "?";
}

Grade grade_from_string(std::string_view s) {
  for (Grade g : {Grade::Minus, Grade::Plus, Grade::PlusPlus}) {
    if (s == to_string(g)) return g;
  }
  throw InputError(fmt::format("unknown grade '{}'", s));
}

GovernanceLevel governance_from_string(std::string_view s) {
  for (GovernanceLevel l : {GovernanceLevel::L0, GovernanceLevel::L1, GovernanceLevel::L2, GovernanceLevel::L3}) {
    if (iequals(s, to_string(l))) return l;
  }
  throw InputError(fmt::format("unknown governance level '{}'", s));
}

StructureStyle structure_style_from_string(std::string_view s) {
  for (StructureStyle st : {StructureStyle::HierarchicalCalls, StructureStyle::FlatGlobal, StructureStyle::Mixed}) {
    if (iequals(s, to_string(st))) return st;
  }
  throw InputError(fmt::format("unknown structure style '{}'", s));
}

int grade_points(Grade g) {
  switch (g) {
    case Grade::Minus: return 0;
    case Grade::Plus: return 1;
    case Grade::PlusPlus: return 2;
  }
  return 0;
}

bool governance_plus(GovernanceLevel l) { return l != GovernanceLevel::L0; }

} // namespace swmat
