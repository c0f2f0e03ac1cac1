#include "swmat/modularity.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "swmat/error.hpp"
#include "swmat/st_parser.hpp"

namespace swmat {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
bool parse_number(const std::string& text, T& out) {
  if constexpr (std::is_same_v<T, int>) {
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && p == text.data() + text.size();
  } else {
    try {
      std::size_t used = 0;
      out = std::stod(text, &used);
      return used == text.size();
    } catch (const std::exception&) {
      return false;
    }
  }
}

/// Adjacency between project POUs, keyed by folded name.
std::map<std::string, std::set<std::string>> internal_adjacency(const CallGraph& g) {
  std::map<std::string, std::set<std::string>> adj;
  for (const CallEdge& e : internal_edges(g)) adj[fold(e.caller)].insert(fold(e.callee));
  return adj;
}

} // namespace

Thresholds parse_thresholds(std::string_view text, std::string_view file) {
  Thresholds t;
  const std::map<std::string, double*> doubles = {
      {"flat_min_coupling", &t.flat_min_coupling},
      {"hierarchical_max_coupling", &t.hierarchical_max_coupling},
      {"decomposability_minus_coupling", &t.decomposability_minus_coupling},
      {"decomposability_minus_treeness", &t.decomposability_minus_treeness},
      {"decomposability_plusplus_coupling", &t.decomposability_plusplus_coupling},
      {"decomposability_plusplus_treeness", &t.decomposability_plusplus_treeness},
      {"protection_plusplus_coupling", &t.protection_plusplus_coupling},
      {"protection_plus_coupling", &t.protection_plus_coupling},
      {"composability_plusplus_reuse", &t.composability_plusplus_reuse},
      {"composability_plus_reuse", &t.composability_plus_reuse},
      {"max_mean_fanout", &t.max_mean_fanout},
  };
  const std::map<std::string, int*> ints = {
      {"flat_max_depth", &t.flat_max_depth},
      {"hierarchical_min_depth", &t.hierarchical_min_depth},
      {"understandability_min_depth", &t.understandability_min_depth},
      {"understandability_max_depth", &t.understandability_max_depth},
      {"clone_min_tokens", &t.clone_min_tokens},
      {"cross_cutting_min_callers", &t.cross_cutting_min_callers},
      {"cross_cutting_min_strata", &t.cross_cutting_min_strata},
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InputError(fmt::format("{}:{}: expected 'key = value'", file, lineno));
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    bool ok = false;
    if (auto d = doubles.find(key); d != doubles.end()) {
      ok = parse_number(value, *d->second);
    } else if (auto i = ints.find(key); i != ints.end()) {
      ok = parse_number(value, *i->second);
    } else {
      throw InputError(fmt::format("{}:{}: unknown threshold '{}'", file, lineno, key));
    }
    if (!ok) throw InputError(fmt::format("{}:{}: bad value '{}' for {}", file, lineno, value, key));
  }
  return t;
}

Thresholds load_thresholds(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_thresholds(ss.str(), path.string());
}

std::string_view to_string(NamedLevel l) {
  switch (l) {
    case NamedLevel::Plant: return "Plant";
    case NamedLevel::Facility: return "Facility";
    case NamedLevel::Application: return "Application";
    case NamedLevel::Basic: return "Basic";
    case NamedLevel::AtomicBasic: return "AtomicBasic";
  }
  return "?";
}

const LevelEntry* LevelAssignment::find(std::string_view pou) const {
  for (const LevelEntry& e : levels) {
    if (iequals(e.pou, pou)) return &e;
  }
  return nullptr;
}

LevelAssignment assign_levels(const CallGraph& graph, bool plant) {
  if (graph.entries.empty()) throw InvariantError("call graph has no entry POU");
  const auto adj = internal_adjacency(graph);

  std::map<std::string, int> dist;
  std::deque<std::string> queue;
  for (const std::string& e : graph.entries) {
    if (dist.emplace(fold(e), 0).second) queue.push_back(fold(e));
  }
  while (!queue.empty()) {
    std::string u = queue.front();
    queue.pop_front();
    auto it = adj.find(u);
    if (it == adj.end()) continue;
    for (const std::string& v : it->second) {
      if (dist.emplace(v, dist[u] + 1).second) queue.push_back(v);
    }
  }

  LevelAssignment out;
  const int offset = plant ? 0 : 1;
  for (const GraphNode& n : graph.nodes) {
    if (n.external()) continue;
    LevelEntry e;
    e.pou = n.name;
    const std::string key = fold(n.name);
    const bool leaf = !adj.contains(key);
    if (auto d = dist.find(key); d != dist.end()) {
      e.stratum = d->second;
      out.levels_below_entry = std::max(out.levels_below_entry, d->second);
      e.level = static_cast<NamedLevel>(std::min(d->second + offset, static_cast<int>(NamedLevel::Basic)));
    } else {
      out.unreachable.push_back(n.name);
    }
    if (leaf) e.level = NamedLevel::AtomicBasic;
    out.levels.push_back(std::move(e));
  }
  return out;
}

StyleResult classify_structure_style(const CallGraph& calls, const GlobalCommGraph& globals,
                                     int levels_below_entry, const Thresholds& t) {
  StyleResult r;
  r.global_edges = static_cast<int>(globals.edges.size());
  r.call_edges = static_cast<int>(internal_edges(calls).size());
  if (r.global_edges + r.call_edges == 0) {
    r.warning = "no call edges and no global-variable edges; structure style defaults to Mixed";
    return r;
  }
  r.coupling = static_cast<double>(r.global_edges) / (r.global_edges + r.call_edges);
  if (r.coupling >= t.flat_min_coupling && levels_below_entry <= t.flat_max_depth) {
    r.style = StructureStyle::FlatGlobal;
  } else if (r.coupling <= t.hierarchical_max_coupling && levels_below_entry >= t.hierarchical_min_depth) {
    r.style = StructureStyle::HierarchicalCalls;
  }
  return r;
}

std::vector<std::string> normalize_tokens(const TokenSeq& toks) {
  std::vector<std::string> out;
  out.reserve(toks.size());
  for (const Token& t : toks) {
    switch (t.kind) {
      case TokenKind::Identifier: out.emplace_back("$ID"); break;
      case TokenKind::Literal:
      case TokenKind::Address: out.emplace_back("$LIT"); break;
      case TokenKind::EndOfFile: break;
      default: out.push_back(t.text); break;
    }
  }
  return out;
}

std::vector<std::string> normalize_tokens(const std::vector<std::string>& toks) {
  // Placeholders are kept as they are, which makes normalisation idempotent.
  TokenSeq seq;
  for (const std::string& s : toks) {
    if (s == "$ID" || s == "$LIT") {
      seq.push_back(Token{s == "$ID" ? TokenKind::Identifier : TokenKind::Literal, s, {}});
      continue;
    }
    LexResult r = lex(s, "<token>");
    for (const Token& t : r.tokens) {
      if (t.kind != TokenKind::EndOfFile) seq.push_back(t);
    }
  }
  return normalize_tokens(seq);
}

CloneReport detect_clones(const Project& project, int min_tokens) {
  std::map<std::vector<std::string>, std::vector<std::string>> buckets;
  for (const Pou& p : project.pous) {
    auto norm = normalize_tokens(body_tokens(p));
    if (static_cast<int>(norm.size()) < min_tokens) continue;
    buckets[std::move(norm)].push_back(p.name);
  }
  CloneReport r;
  std::size_t cloned = 0;
  for (auto& [stream, names] : buckets) {
    if (names.size() < 2) continue;
    std::sort(names.begin(), names.end(), NameLess{});
    cloned += names.size();
    r.groups.push_back(names);
  }
  std::sort(r.groups.begin(), r.groups.end(),
            [](const auto& a, const auto& b) { return NameLess{}(a.front(), b.front()); });
  if (!project.pous.empty()) r.clone_ratio = static_cast<double>(cloned) / project.pous.size();
  return r;
}

std::vector<std::string> detect_cross_cutting(const CallGraph& graph, const LevelAssignment& levels,
                                              int min_callers, int min_strata) {
  std::map<std::string, std::set<std::string>> callers;
  for (const CallEdge& e : graph.edges) callers[fold(e.callee)].insert(fold(e.caller));

  std::vector<std::string> out;
  for (const GraphNode& n : graph.nodes) {
    auto it = callers.find(fold(n.name));
    if (it == callers.end() || static_cast<int>(it->second.size()) < min_callers) continue;
    std::set<int> strata;
    for (const std::string& c : it->second) {
      const LevelEntry* e = levels.find(c);
      if (e != nullptr && e->stratum) strata.insert(*e->stratum);
    }
    if (static_cast<int>(strata.size()) >= min_strata) out.push_back(n.name);
  }
  return out;
}

ModularityMeasures measure_modularity(const Project& project, const CallGraph& graph,
                                      const LevelAssignment& levels, const StyleResult& style) {
  ModularityMeasures m;
  m.coupling = style.coupling;
  m.levels_below_entry = levels.levels_below_entry;

  // Tree-ness: reachable non-entry POUs reached from exactly one caller.
  std::map<std::string, std::set<std::string>> callers;
  for (const CallEdge& e : internal_edges(graph)) callers[fold(e.callee)].insert(fold(e.caller));
  int inner = 0;
  int single = 0;
  for (const LevelEntry& e : levels.levels) {
    if (!e.stratum || *e.stratum == 0) continue;
    ++inner;
    if (callers[fold(e.pou)].size() == 1) ++single;
  }
  m.treeness = inner == 0 ? 1.0 : static_cast<double>(single) / inner;

  // Reuse: FB types declared twice or more, library stubs used twice or more.
  std::map<std::string, int> type_uses;
  for (const Pou& p : project.pous) {
    for (const VarSection& s : p.var_sections) {
      for (const VarDecl& d : s.decls) ++type_uses[fold(d.type_name)];
    }
  }
  for (const GlobalVar& g : project.globals) ++type_uses[fold(g.type_name)];
  std::map<std::string, int> stub_sites;
  for (const Pou& p : project.pous) {
    for (const CallSite& cs : p.call_sites) {
      if (cs.resolution == Resolution::External) ++stub_sites[fold(cs.target)];
    }
  }
  for (const Pou& p : project.pous) {
    if (p.kind != PouKind::FunctionBlock) continue;
    ++m.fb_types;
    if (type_uses[fold(p.name)] >= 2) ++m.reused_fb_types;
  }
  for (const ExternalStub& e : project.externals) {
    ++m.library_stubs;
    if (stub_sites[fold(e.name)] >= 2 || type_uses[fold(e.name)] >= 2) ++m.reused_library_stubs;
  }
  const int pool = m.fb_types + m.library_stubs;
  if (pool > 0) m.reuse_ratio = static_cast<double>(m.reused_fb_types + m.reused_library_stubs) / pool;

  std::map<std::string, int> fanout;
  for (const CallEdge& e : graph.edges) {
    const GraphNode* caller = graph.find(e.caller);
    if (caller != nullptr && !caller->external()) ++fanout[fold(e.caller)];
  }
  if (!fanout.empty()) {
    int total = 0;
    for (const auto& [k, v] : fanout) total += v;
    m.mean_fanout = static_cast<double>(total) / fanout.size();
  }
  return m;
}

MeyerGrades grade_meyer(const ModularityMeasures& m, const Thresholds& t) {
  MeyerGrades g;

  if (m.coupling >= t.decomposability_minus_coupling || m.treeness < t.decomposability_minus_treeness) {
    g.decomposability = Grade::Minus;
  } else if (m.coupling <= t.decomposability_plusplus_coupling &&
             m.treeness >= t.decomposability_plusplus_treeness) {
    g.decomposability = Grade::PlusPlus;
  } else {
    g.decomposability = Grade::Plus;
  }

  if (m.coupling <= t.protection_plusplus_coupling) {
    g.protection = Grade::PlusPlus;
  } else if (m.coupling <= t.protection_plus_coupling) {
    g.protection = Grade::Plus;
  } else {
    g.protection = Grade::Minus;
  }

  // Top marks need reuse of library components, not only of in-house FBs.
  if (m.reuse_ratio >= t.composability_plusplus_reuse && m.reused_library_stubs > 0) {
    g.composability = Grade::PlusPlus;
  } else if (m.reuse_ratio >= t.composability_plus_reuse) {
    g.composability = Grade::Plus;
  } else {
    g.composability = Grade::Minus;
  }

  const bool narrow = m.mean_fanout <= t.max_mean_fanout;
  const bool layered = m.levels_below_entry >= t.understandability_min_depth &&
                       m.levels_below_entry <= t.understandability_max_depth;
  g.understandability = narrow && layered ? Grade::PlusPlus : (narrow || layered ? Grade::Plus : Grade::Minus);
  return g;
}

GovernanceEstimate estimate_governance(const CloneReport& clones, int library_stubs_used,
                                       const GovernanceEvidence& evidence) {
  GovernanceEstimate g;
  std::string libs = library_stubs_used > 0 ? fmt::format("; {} library component(s) in use", library_stubs_used)
                                            : std::string{};
  if (evidence.templates_present) {
    g.level = GovernanceLevel::L3;
    g.rationale = "template-based configuration evidence: clone-and-own with configuration";
  } else if (evidence.parameters_present) {
    g.level = GovernanceLevel::L2;
    g.rationale = "parameter-based configuration evidence; reported at the lower of the two adjacent levels";
  } else if (evidence.provenance_log_present && clones.clone_ratio > 0) {
    g.level = GovernanceLevel::L1;
    g.rationale = fmt::format("clones ({:.2f} of POUs) with a provenance log: managed clone-and-own", clones.clone_ratio);
  } else {
    g.level = GovernanceLevel::L0;
    g.rationale = clones.clone_ratio > 0
                      ? fmt::format("clones ({:.2f} of POUs) without process evidence: ad-hoc clone-and-own",
                                    clones.clone_ratio)
                      : "no process evidence supplied";
  }
  g.rationale += libs;
  return g;
}

int assessment_score(const MeyerGrades& grades, GovernanceLevel governance) {
  return grade_points(grades.decomposability) + grade_points(grades.composability) +
         grade_points(grades.understandability) + grade_points(grades.protection) +
         (governance_plus(governance) ? 1 : 0);
}

ProjectAnalysis analyze_project(const Project& project, const AnalysisOptions& options) {
  ProjectAnalysis a;
  a.call_graph = build_call_graph(project, CallGraphOptions{options.per_instance});
  a.global_graph = build_global_comm_graph(project);
  a.levels = assign_levels(a.call_graph, options.plant);
  a.style = classify_structure_style(a.call_graph, a.global_graph, a.levels.levels_below_entry, options.thresholds);
  if (a.style.warning) a.warnings.push_back(*a.style.warning);
  if (!a.levels.unreachable.empty()) {
    a.warnings.push_back(fmt::format("POUs unreachable from any entry: {}", fmt::join(a.levels.unreachable, ", ")));
  }
  a.clones = detect_clones(project, options.thresholds.clone_min_tokens);
  a.cross_cutting = detect_cross_cutting(a.call_graph, a.levels, options.thresholds.cross_cutting_min_callers,
                                         options.thresholds.cross_cutting_min_strata);
  a.measures = measure_modularity(project, a.call_graph, a.levels, a.style);

  int stubs_used = 0;
  for (const GraphNode& n : a.call_graph.nodes) stubs_used += n.library ? 1 : 0;
  a.governance = estimate_governance(a.clones, stubs_used, options.evidence);

  a.assessment.grades = grade_meyer(a.measures, options.thresholds);
  a.assessment.governance = a.governance.level;
  a.assessment.structure_style = a.style.style;
  a.assessment.levels_below_entry = a.levels.levels_below_entry;
  a.assessment.score_sum = assessment_score(a.assessment.grades, a.assessment.governance);
  return a;
}

int count_manual_markers(std::string_view source) {
  int n = 0;
  for (std::size_t at = source.find("MANUAL:"); at != std::string_view::npos; at = source.find("MANUAL:", at + 1)) {
    ++n;
  }
  return n;
}

} // namespace swmat
