#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "swmat/score.hpp"

namespace swmat {

// ---------------------------------------------------------------------------
// Questionnaire

enum class Category { GEN, MOD, TEST, OP };
enum class AnswerMode { SingleChoice, Numeric, FreeText };

std::string_view to_string(Category c);
std::string_view to_string(AnswerMode m);
Category category_from_string(std::string_view s);
AnswerMode answer_mode_from_string(std::string_view s);

struct AnswerOption {
  std::string key;
  std::string label;
  Score score;

  friend bool operator==(const AnswerOption&, const AnswerOption&) = default;
};

struct Question {
  int id = 0;
  std::string text;
  Category category = Category::GEN;
  std::vector<AnswerOption> options; // best first
  Score weight{5};
  AnswerMode mode = AnswerMode::SingleChoice;

  /// Case-insensitive lookup by key, then by label.
  const AnswerOption* find_option(std::string_view key_or_label) const;

  friend bool operator==(const Question&, const Question&) = default;
};

struct QuestionnaireSchema {
  std::vector<Question> questions; // ordered by id

  const Question* find(int id) const;
  std::vector<int> ids_in(Category c) const;

  friend bool operator==(const QuestionnaireSchema&, const QuestionnaireSchema&) = default;
};

/// Throws InvariantError when an id is out of range or duplicated, a
/// single-choice question's best option differs from its weight, an option
/// score leaves [0, weight], or the category differs from the fixed grouping.
void validate_schema(const QuestionnaireSchema& schema);

/// Fixed grouping of question ids into categories.
Category expected_category(int id);

// ---------------------------------------------------------------------------
// Answers

enum class BusinessCategory { Platform, Machine, Plant };

std::string_view to_string(BusinessCategory c);
BusinessCategory business_category_from_string(std::string_view s);

/// Option key (single choice), free text, or a numeric value.
using Answer = std::variant<std::string, Score>;

struct AnswerSet {
  std::string company;
  BusinessCategory category = BusinessCategory::Machine;
  std::map<int, Answer> answers;
  std::vector<int> unanswered;            // schema ids without an answer
  std::vector<std::string> ingestion_log; // range/threshold resolutions

  friend bool operator==(const AnswerSet&, const AnswerSet&) = default;
};

/// Throws InvariantError if an answered id is missing from the schema, a
/// choice names no option, or a numeric answer is given to a choice question.
/// Recomputes `unanswered`.
void validate_answers(const QuestionnaireSchema& schema, AnswerSet& answers);

// ---------------------------------------------------------------------------
// Maturity results

struct CategoryTally {
  Score gained{0};
  Score reachable{0};
  MaybeScore maturity; // gained / reachable, Missing when reachable == 0
  std::vector<int> unanswered;

  friend bool operator==(const CategoryTally&, const CategoryTally&) = default;
};

struct MaturityReport {
  std::string company;
  BusinessCategory category = BusinessCategory::Machine;
  std::map<int, MaybeScore> per_question_normalized; // scored questions only
  CategoryTally mod;
  CategoryTally test;
  CategoryTally op;
  MaybeScore m_mod;
  MaybeScore m_test;
  MaybeScore m_op;
  MaybeScore overall;
  MaybeScore complexity_14;
  std::vector<int> unanswered;
  std::map<int, std::string> manual_answers; // echoed, never scored

  friend bool operator==(const MaturityReport&, const MaturityReport&) = default;
};

// ---------------------------------------------------------------------------
// Modularity

enum class Grade { Minus, Plus, PlusPlus };
enum class GovernanceLevel { L0, L1, L2, L3 };
enum class StructureStyle { HierarchicalCalls, FlatGlobal, Mixed };

std::string_view to_string(Grade g);       // "-", "+", "++"
std::string_view to_string(GovernanceLevel l);
std::string_view to_string(StructureStyle s);
Grade grade_from_string(std::string_view s);
GovernanceLevel governance_from_string(std::string_view s);
StructureStyle structure_style_from_string(std::string_view s);

int grade_points(Grade g);
/// Table-style governance mark: L0 is "-", anything above is "+".
bool governance_plus(GovernanceLevel l);

struct MeyerGrades {
  Grade decomposability = Grade::Minus;
  Grade composability = Grade::Minus;
  Grade understandability = Grade::Minus;
  Grade protection = Grade::Minus;

  friend bool operator==(const MeyerGrades&, const MeyerGrades&) = default;
};

struct ModularityAssessment {
  MeyerGrades grades;
  GovernanceLevel governance = GovernanceLevel::L0;
  StructureStyle structure_style = StructureStyle::Mixed;
  int levels_below_entry = 0;
  int score_sum = 0;

  friend bool operator==(const ModularityAssessment&, const ModularityAssessment&) = default;
};

} // namespace swmat
