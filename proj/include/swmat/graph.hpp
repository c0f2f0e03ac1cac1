#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swmat/model.hpp"

namespace swmat {

enum class NodeKind { Program, FunctionBlock, Function, External };

std::string_view to_string(NodeKind k);
NodeKind node_kind(PouKind k);

struct GraphNode {
  std::string name;
  NodeKind kind = NodeKind::Program;
  int complexity = 0;
  bool library = false; // declared in externals.txt
  std::string group;    // externals.txt group, rendered as a DOT cluster

  bool external() const { return kind == NodeKind::External; }
  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

/// `multiplicity` counts call handles: each direct call site is one handle and
/// every distinct FB instance is one handle however often it is invoked, so two
/// instances of one FB give multiplicity 2. `call_sites` counts raw syntactic
/// occurrences.
struct CallEdge {
  std::string caller;
  std::string callee;
  int multiplicity = 1;
  int call_sites = 1;

  friend bool operator==(const CallEdge&, const CallEdge&) = default;
};

struct CallGraph {
  std::vector<GraphNode> nodes;     // NameLess order
  std::vector<CallEdge> edges;      // (caller, callee) NameLess order
  std::vector<std::string> entries; // task entries, else uncalled project POUs

  const GraphNode* find(std::string_view name) const;
  friend bool operator==(const CallGraph&, const CallGraph&) = default;
};

struct GlobalEdge {
  std::string writer;
  std::string reader;
  std::string via;

  friend bool operator==(const GlobalEdge&, const GlobalEdge&) = default;
};

struct GlobalCommGraph {
  std::vector<GraphNode> nodes; // project POUs, NameLess order
  std::vector<GlobalEdge> edges;

  friend bool operator==(const GlobalCommGraph&, const GlobalCommGraph&) = default;
};

/// Statements (assignments + calls) plus decision points (IF, each ELSIF,
/// each CASE branch, each loop header), over the body and all actions.
int complexity(const Pou& pou);

struct CallGraphOptions {
  /// Expand FB instances into `Owner.instance` nodes instead of collapsing them
  /// onto their FB type.
  bool per_instance = false;
};

CallGraph build_call_graph(const Project& project, const CallGraphOptions& options = {});
GlobalCommGraph build_global_comm_graph(const Project& project);

/// Edges between project POUs only (stub nodes excluded).
std::vector<CallEdge> internal_edges(const CallGraph& graph);

struct DotOptions {
  bool size_by_complexity = true;
  bool color_by_kind = true;
  double min_width = 0.3; // inches; also the width of a complexity-1 node
};

/// Diameter proportional to sqrt(complexity) so node area tracks complexity;
/// never below min_width.
double node_width(int complexity, const DotOptions& options);

std::string emit_dot(const CallGraph& graph, const DotOptions& options = {});
std::string emit_dot(const GlobalCommGraph& graph, const DotOptions& options = {});

} // namespace swmat
