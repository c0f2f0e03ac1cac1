#pragma once

#include "json.hpp"

#include "swmat/assessment.hpp"
#include "swmat/score.hpp"

namespace swmat {

using Json = nlohmann::ordered_json;

/// Terminating decimals become JSON numbers, anything else an "n/d" string.
Json score_to_json(const Score& s);
Json maybe_score_to_json(const MaybeScore& s);
/// Accepts numbers and the strings parse_score understands.
Score score_from_json(const Json& j);
MaybeScore maybe_score_from_json(const Json& j);

void to_json(Json& j, const AnswerOption& o);
void from_json(const Json& j, AnswerOption& o);
void to_json(Json& j, const Question& q);
void from_json(const Json& j, Question& q);
void to_json(Json& j, const QuestionnaireSchema& s);
void from_json(const Json& j, QuestionnaireSchema& s);

void to_json(Json& j, const CategoryTally& t);
void from_json(const Json& j, CategoryTally& t);
void to_json(Json& j, const MaturityReport& r);
void from_json(const Json& j, MaturityReport& r);

void to_json(Json& j, const MeyerGrades& g);
void from_json(const Json& j, MeyerGrades& g);
void to_json(Json& j, const ModularityAssessment& a);
void from_json(const Json& j, ModularityAssessment& a);

} // namespace swmat
