#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swmat/assessment.hpp"

namespace swmat {

/// Built-in 45-question schema. #36-#39 carry a fixed score table;
/// the remaining scored questions use evenly spaced options from 5 down to 0.
QuestionnaireSchema default_schema();

QuestionnaireSchema parse_schema_json(std::string_view text, std::string_view file = "schema");
QuestionnaireSchema load_schema(const std::filesystem::path& path);
std::string schema_to_json(const QuestionnaireSchema& schema);

/// Numeric answers may be numbers or strings. Ranges ("2-6") resolve to their
/// midpoint and bounds (">10", "<5") to the bound; every resolution is logged
/// in AnswerSet::ingestion_log. The result is validated against the schema.
AnswerSet parse_answers_json(const QuestionnaireSchema& schema, std::string_view text,
                             std::string_view file = "answers");
AnswerSet load_answers(const QuestionnaireSchema& schema, const std::filesystem::path& path);
/// Every *.json file in the directory, in file-name order.
std::vector<AnswerSet> load_answers_dir(const QuestionnaireSchema& schema, const std::filesystem::path& dir);

/// "2-6" -> 4, ">10" -> 10, "3.5" -> 3.5. Sets `note` when a rule was applied.
Score resolve_numeric_text(std::string_view text, std::string* note = nullptr);

struct ScoredAnswer {
  Score score;      // 0..weight
  Score normalized; // 0..5
};

/// Throws InvariantError naming the question and its valid keys when the
/// option is unknown, and when the question is not single-choice.
ScoredAnswer score_answer(const QuestionnaireSchema& schema, int id, const Answer& answer);

/// score / weight * 5
Score normalize(const Score& score, const Score& weight);

enum class ScoringMode { Lenient, Strict };

CategoryTally category_maturity(const QuestionnaireSchema& schema, const AnswerSet& answers, Category category,
                                ScoringMode mode = ScoringMode::Lenient);

/// Sum of gained over sum of reachable; Missing when nothing is reachable.
MaybeScore overall_maturity(const std::vector<CategoryTally>& tallies);

/// 0.5 * (cpus + programmers). Throws InputError on negative input.
Score complexity_14(const Score& cpus, const Score& programmers);

inline constexpr int kCpuQuestion = 9;
inline constexpr int kProgrammerQuestion = 7;
inline constexpr int kComplexityQuestion = 14;

/// Mean of the present values; Missing when none is present.
MaybeScore interaction_variable(const std::vector<MaybeScore>& normalized);
MaybeScore interaction_variable(const MaturityReport& report, const std::vector<int>& ids = {23, 24, 26, 27});

MaturityReport build_report(const QuestionnaireSchema& schema, const AnswerSet& answers,
                            ScoringMode mode = ScoringMode::Lenient);

struct CohortStats {
  std::map<int, MaybeScore> question_mean;
  std::map<int, int> contributors;
  MaybeScore mean_mod;
  MaybeScore mean_test;
  MaybeScore mean_op;
  MaybeScore mean_overall;
  int companies = 0;
};

/// Throws InputError when no report survives the filter.
CohortStats cohort_stats(const std::vector<MaturityReport>& reports,
                         std::optional<BusinessCategory> filter = std::nullopt);

} // namespace swmat
