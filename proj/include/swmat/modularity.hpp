#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swmat/assessment.hpp"
#include "swmat/graph.hpp"
#include "swmat/model.hpp"

namespace swmat {

struct Thresholds {
  // structure style
  double flat_min_coupling = 0.5;
  int flat_max_depth = 2;
  double hierarchical_max_coupling = 0.25;
  int hierarchical_min_depth = 3;
  // decomposability
  double decomposability_minus_coupling = 0.5;
  double decomposability_minus_treeness = 0.5;
  double decomposability_plusplus_coupling = 0.1;
  double decomposability_plusplus_treeness = 0.9;
  // protection
  double protection_plusplus_coupling = 0.1;
  double protection_plus_coupling = 0.35;
  // composability
  double composability_plusplus_reuse = 0.5;
  double composability_plus_reuse = 0.2;
  // understandability
  double max_mean_fanout = 7.0;
  int understandability_min_depth = 2;
  int understandability_max_depth = 5;
  // clones and cross-cutting
  int clone_min_tokens = 20;
  int cross_cutting_min_callers = 4;
  int cross_cutting_min_strata = 3;

  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

/// `key = value` lines, `#` comments. Unknown keys and bad numbers are input
/// errors with file:line.
Thresholds parse_thresholds(std::string_view text, std::string_view file = "thresholds");
Thresholds load_thresholds(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Levels

enum class NamedLevel { Plant, Facility, Application, Basic, AtomicBasic };
std::string_view to_string(NamedLevel l);

struct LevelEntry {
  std::string pou;
  std::optional<int> stratum; // empty when unreachable from every entry
  NamedLevel level = NamedLevel::Basic;

  friend bool operator==(const LevelEntry&, const LevelEntry&) = default;
};

struct LevelAssignment {
  std::vector<LevelEntry> levels; // call-graph node order, project POUs only
  int levels_below_entry = 0;
  std::vector<std::string> unreachable;

  const LevelEntry* find(std::string_view pou) const;
  friend bool operator==(const LevelAssignment&, const LevelAssignment&) = default;
};

/// BFS from the graph's entries over edges between project POUs. Throws
/// InvariantError when the graph has no entry.
LevelAssignment assign_levels(const CallGraph& graph, bool plant = false);

// ---------------------------------------------------------------------------
// Structure style

struct StyleResult {
  StructureStyle style = StructureStyle::Mixed;
  double coupling = 0.0; // global edges / (global edges + call edges)
  int global_edges = 0;
  int call_edges = 0;
  std::optional<std::string> warning;
};

StyleResult classify_structure_style(const CallGraph& calls, const GlobalCommGraph& globals,
                                     int levels_below_entry, const Thresholds& t = {});

// ---------------------------------------------------------------------------
// Clones

/// Identifiers become `$ID`, literals and addresses `$LIT`; keywords and
/// operators are kept. Applying it to its own output changes nothing.
std::vector<std::string> normalize_tokens(const TokenSeq& toks);
std::vector<std::string> normalize_tokens(const std::vector<std::string>& toks);

struct CloneReport {
  std::vector<std::vector<std::string>> groups; // each sorted, size >= 2
  double clone_ratio = 0.0;                     // cloned POUs / total POUs

  friend bool operator==(const CloneReport&, const CloneReport&) = default;
};

CloneReport detect_clones(const Project& project, int min_tokens = 20);

// ---------------------------------------------------------------------------
// Cross-cutting POUs

std::vector<std::string> detect_cross_cutting(const CallGraph& graph, const LevelAssignment& levels,
                                              int min_callers = 4, int min_strata = 3);

// ---------------------------------------------------------------------------
// Meyer grades

struct ModularityMeasures {
  double coupling = 0.0;
  double treeness = 1.0;    // non-entry reachable POUs with exactly one caller
  double reuse_ratio = 0.0; // reused FB types and library stubs / all of them
  int fb_types = 0;
  int reused_fb_types = 0;
  int library_stubs = 0;
  int reused_library_stubs = 0;
  double mean_fanout = 0.0; // over POUs that call anything
  int levels_below_entry = 0;
};

ModularityMeasures measure_modularity(const Project& project, const CallGraph& graph,
                                      const LevelAssignment& levels, const StyleResult& style);

MeyerGrades grade_meyer(const ModularityMeasures& m, const Thresholds& t = {});

// ---------------------------------------------------------------------------
// Governance

struct GovernanceEvidence {
  bool templates_present = false;
  bool parameters_present = false;
  bool provenance_log_present = false;
};

struct GovernanceEstimate {
  GovernanceLevel level = GovernanceLevel::L0;
  std::string rationale;
};

GovernanceEstimate estimate_governance(const CloneReport& clones, int library_stubs_used,
                                       const GovernanceEvidence& evidence);

int assessment_score(const MeyerGrades& grades, GovernanceLevel governance);

// ---------------------------------------------------------------------------
// Whole-project analysis

struct AnalysisOptions {
  bool per_instance = false;
  bool plant = false;
  Thresholds thresholds;
  GovernanceEvidence evidence;
};

struct ProjectAnalysis {
  CallGraph call_graph;
  GlobalCommGraph global_graph;
  LevelAssignment levels;
  StyleResult style;
  CloneReport clones;
  std::vector<std::string> cross_cutting;
  ModularityMeasures measures;
  GovernanceEstimate governance;
  ModularityAssessment assessment;
  int manual_markers = 0; // `MANUAL:` comments left by the configurator
  std::vector<std::string> warnings;
};

ProjectAnalysis analyze_project(const Project& project, const AnalysisOptions& options = {});

/// Occurrences of the `MANUAL:` marker in raw source text.
int count_manual_markers(std::string_view source);

} // namespace swmat
