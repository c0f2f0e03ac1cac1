#include "swmat/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

namespace swmat {

std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Program: return "PROGRAM";
    case NodeKind::FunctionBlock: return "FUNCTION_BLOCK";
    case NodeKind::Function: return "FUNCTION";
    case NodeKind::External: return "EXTERNAL";
  }
  return "?";
}

NodeKind node_kind(PouKind k) {
  switch (k) {
    case PouKind::Program: return NodeKind::Program;
    case PouKind::FunctionBlock: return NodeKind::FunctionBlock;
    case PouKind::Function: return NodeKind::Function;
  }
  return NodeKind::Program;
}

const GraphNode* CallGraph::find(std::string_view name) const {
  for (const GraphNode& n : nodes) {
    if (iequals(n.name, name)) return &n;
  }
  return nullptr;
}

int complexity(const Pou& pou) {
  int total = 0;
  for_each_statement(pou, [&](const Statement& s) {
    switch (s.kind) {
      case StmtKind::Assign:
      case StmtKind::Call: total += 1; break;
      case StmtKind::If:
      case StmtKind::Case: total += static_cast<int>(s.branches.size()); break;
      case StmtKind::For:
      case StmtKind::While:
      case StmtKind::Repeat: total += 1; break;
      default: break;
    }
  });
  return total;
}

namespace {

/// True when the call's first path segment names a variable, i.e. the call
/// goes through an FB instance rather than naming a POU directly.
bool through_instance(const Project& project, const Pou& pou, const CallSite& cs) {
  std::string root = cs.callee_text.substr(0, cs.callee_text.find('.'));
  return pou.find_decl(root) != nullptr || project.find_global(root) != nullptr;
}

struct EdgeAcc {
  std::string caller;
  std::string callee;
  std::set<std::string> handles;
  int sites = 0;
};

class GraphBuilder {
public:
  explicit GraphBuilder(const Project& p) : project_(p) {}

  void add_node(GraphNode n) {
    std::string key = fold(n.name);
    if (!nodes_.contains(key)) nodes_.emplace(key, std::move(n));
  }

  const std::string& stub(const std::string& target) {
    std::string key = fold(target);
    auto it = nodes_.find(key);
    if (it == nodes_.end()) {
      GraphNode n;
      n.kind = NodeKind::External;
      if (const ExternalStub* e = project_.find_external(target)) {
        n.name = e->name;
        n.library = true;
        n.group = e->group;
      } else {
        n.name = target;
      }
      it = nodes_.emplace(key, std::move(n)).first;
    }
    return it->second.name;
  }

  void add_call(const std::string& caller, const std::string& callee, std::string handle) {
    std::string key = fold(caller) + '\n' + fold(callee);
    EdgeAcc& e = edges_[key];
    if (e.sites == 0) {
      e.caller = caller;
      e.callee = callee;
    }
    e.handles.insert(std::move(handle));
    ++e.sites;
  }

  CallGraph finish() {
    CallGraph g;
    for (auto& [k, n] : nodes_) g.nodes.push_back(n);
    std::sort(g.nodes.begin(), g.nodes.end(),
              [](const GraphNode& a, const GraphNode& b) { return NameLess{}(a.name, b.name); });
    for (auto& [k, e] : edges_) {
      g.edges.push_back(CallEdge{e.caller, e.callee, static_cast<int>(e.handles.size()), e.sites});
    }
    std::sort(g.edges.begin(), g.edges.end(), [](const CallEdge& a, const CallEdge& b) {
      if (!iequals(a.caller, b.caller)) return NameLess{}(a.caller, b.caller);
      return NameLess{}(a.callee, b.callee);
    });

    std::set<std::string> called;
    for (const CallEdge& e : g.edges) called.insert(fold(e.callee));
    if (!project_.tasks.empty()) {
      for (const TaskDef& t : project_.tasks) {
        const GraphNode* n = g.find(t.entry);
        std::string name = n != nullptr ? n->name : t.entry;
        if (std::none_of(g.entries.begin(), g.entries.end(), [&](const std::string& s) { return iequals(s, name); })) {
          g.entries.push_back(name);
        }
      }
    } else {
      for (const GraphNode& n : g.nodes) {
        if (!n.external() && !called.contains(fold(n.name))) g.entries.push_back(n.name);
      }
    }
    std::sort(g.entries.begin(), g.entries.end(), NameLess{});
    return g;
  }

private:
  const Project& project_;
  std::map<std::string, GraphNode> nodes_;
  std::map<std::string, EdgeAcc> edges_;
};

GraphNode pou_node(const Pou& p) {
  GraphNode n;
  n.name = p.name;
  n.kind = node_kind(p.kind);
  n.complexity = p.complexity;
  return n;
}

std::string instance_node_name(const Project& project, const Pou& owner, const CallSite& cs) {
  std::string root = cs.callee_text.substr(0, cs.callee_text.find('.'));
  if (owner.find_decl(root) == nullptr && project.find_global(root) != nullptr) {
    return "GLOBAL." + project.find_global(root)->name;
  }
  if (const VarDecl* d = owner.find_decl(root)) root = d->name;
  return owner.name + "." + root;
}

CallGraph build_type_level(const Project& project) {
  GraphBuilder b(project);
  for (const Pou& p : project.pous) b.add_node(pou_node(p));
  for (const Pou& p : project.pous) {
    int site = 0;
    for (const CallSite& cs : p.call_sites) {
      ++site;
      if (cs.resolution == Resolution::LocalAction) continue;
      std::string callee = cs.resolution == Resolution::External ? b.stub(cs.target)
                                                                 : project.find_pou(cs.target)->name;
      std::string handle = through_instance(project, p, cs)
                               ? "instance:" + fold(cs.callee_text.substr(0, cs.callee_text.find('.')))
                               : fmt::format("site:{}", site);
      b.add_call(p.name, callee, std::move(handle));
    }
  }
  return b.finish();
}

CallGraph build_per_instance(const Project& project) {
  GraphBuilder b(project);

  // Instance nodes and the FB type each one runs.
  std::map<std::string, std::pair<std::string, const Pou*>> instances; // folded -> (name, type)
  std::set<std::string> directly_used;
  for (const TaskDef& t : project.tasks) directly_used.insert(fold(t.entry));
  for (const Pou& p : project.pous) {
    for (const CallSite& cs : p.call_sites) {
      if (cs.resolution == Resolution::InstanceOfFb) {
        std::string name = instance_node_name(project, p, cs);
        instances.emplace(fold(name), std::make_pair(name, project.find_pou(cs.target)));
      } else if (cs.resolution == Resolution::DirectPou) {
        directly_used.insert(fold(cs.target));
      }
    }
  }
  std::set<std::string> instantiated_types;
  for (const auto& [k, v] : instances) instantiated_types.insert(fold(v.second->name));

  std::vector<std::pair<std::string, const Pou*>> code_nodes;
  for (const Pou& p : project.pous) {
    bool instance_only = p.kind == PouKind::FunctionBlock && instantiated_types.contains(fold(p.name)) &&
                         !directly_used.contains(fold(p.name));
    if (instance_only) continue;
    b.add_node(pou_node(p));
    code_nodes.emplace_back(p.name, &p);
  }
  for (const auto& [k, v] : instances) {
    GraphNode n = pou_node(*v.second);
    n.name = v.first;
    b.add_node(n);
    code_nodes.emplace_back(v.first, v.second);
  }

  for (const auto& [node, type] : code_nodes) {
    int site = 0;
    for (const CallSite& cs : type->call_sites) {
      ++site;
      switch (cs.resolution) {
        case Resolution::LocalAction: break;
        case Resolution::InstanceOfFb: {
          std::string inst = instance_node_name(project, *type, cs);
          b.add_call(node, inst, "instance");
          break;
        }
        case Resolution::DirectPou:
          b.add_call(node, project.find_pou(cs.target)->name, fmt::format("site:{}", site));
          break;
        case Resolution::External: {
          std::string handle = through_instance(project, *type, cs)
                                   ? "instance:" + fold(cs.callee_text.substr(0, cs.callee_text.find('.')))
                                   : fmt::format("site:{}", site);
          b.add_call(node, b.stub(cs.target), std::move(handle));
          break;
        }
      }
    }
  }
  return b.finish();
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string_view fill_color(NodeKind k) {
  switch (k) {
    case NodeKind::Program: return "#cfe2f3";
    case NodeKind::FunctionBlock: return "#fff2cc";
    case NodeKind::Function: return "#d9ead3";
    case NodeKind::External: return "#eeeeee";
  }
  return "#ffffff";
}

std::string node_statement(const GraphNode& n, const DotOptions& opt) {
  std::vector<std::string> attrs;
  std::string label = quote(n.name);
  label.insert(label.size() - 1, fmt::format("\\n{}", n.complexity));
  attrs.push_back("label=" + label);
  attrs.push_back("shape=circle");
  if (opt.size_by_complexity) {
    attrs.push_back("fixedsize=true");
    attrs.push_back(fmt::format("width={:.3f}", node_width(n.complexity, opt)));
  }
  if (opt.color_by_kind) {
    attrs.push_back(n.external() ? "style=\"filled,dashed\"" : "style=filled");
    attrs.push_back(fmt::format("fillcolor={}", quote(fill_color(n.kind))));
  }
  return fmt::format("{} [{}];", quote(n.name), fmt::join(attrs, ", "));
}

void emit_nodes(std::string& out, const std::vector<GraphNode>& nodes, const DotOptions& opt) {
  std::map<std::string, std::vector<const GraphNode*>, NameLess> clusters;
  for (const GraphNode& n : nodes) {
    if (!n.group.empty()) {
      clusters[n.group].push_back(&n);
    } else {
      out += "  " + node_statement(n, opt) + "\n";
    }
  }
  for (const auto& [group, members] : clusters) {
    out += fmt::format("  subgraph {} {{\n", quote("cluster_" + group));
    out += fmt::format("    label={};\n", quote(group));
    for (const GraphNode* n : members) out += "    " + node_statement(*n, opt) + "\n";
    out += "  }\n";
  }
}

} // namespace

CallGraph build_call_graph(const Project& project, const CallGraphOptions& options) {
  return options.per_instance ? build_per_instance(project) : build_type_level(project);
}

GlobalCommGraph build_global_comm_graph(const Project& project) {
  GlobalCommGraph g;
  for (const Pou& p : project.pous) g.nodes.push_back(pou_node(p));
  std::sort(g.nodes.begin(), g.nodes.end(),
            [](const GraphNode& a, const GraphNode& b) { return NameLess{}(a.name, b.name); });

  auto touches = [](const std::set<std::string>& set, const std::string& name) {
    return std::any_of(set.begin(), set.end(), [&](const std::string& s) { return iequals(s, name); });
  };
  for (const GlobalVar& var : project.globals) {
    for (const Pou& w : project.pous) {
      if (!touches(w.global_writes, var.name)) continue;
      for (const Pou& r : project.pous) {
        if (&r == &w || !touches(r.global_reads, var.name)) continue;
        g.edges.push_back(GlobalEdge{w.name, r.name, var.name});
      }
    }
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const GlobalEdge& a, const GlobalEdge& b) {
    if (!iequals(a.writer, b.writer)) return NameLess{}(a.writer, b.writer);
    if (!iequals(a.reader, b.reader)) return NameLess{}(a.reader, b.reader);
    return NameLess{}(a.via, b.via);
  });
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  return g;
}

std::vector<CallEdge> internal_edges(const CallGraph& graph) {
  std::vector<CallEdge> out;
  for (const CallEdge& e : graph.edges) {
    const GraphNode* a = graph.find(e.caller);
    const GraphNode* b = graph.find(e.callee);
    if (a != nullptr && b != nullptr && !a->external() && !b->external()) out.push_back(e);
  }
  return out;
}

double node_width(int complexity, const DotOptions& options) {
  return options.min_width * std::max(1.0, std::sqrt(static_cast<double>(std::max(0, complexity))));
}

std::string emit_dot(const CallGraph& graph, const DotOptions& options) {
  std::string out = "digraph \"callgraph\" {\n  rankdir=TB;\n";
  emit_nodes(out, graph.nodes, options);
  for (const CallEdge& e : graph.edges) {
    out += fmt::format("  {} -> {} [label=\"{}\"];\n", quote(e.caller), quote(e.callee), e.multiplicity);
  }
  out += "}\n";
  return out;
}

std::string emit_dot(const GlobalCommGraph& graph, const DotOptions& options) {
  std::string out = "digraph \"globals\" {\n  rankdir=LR;\n";
  emit_nodes(out, graph.nodes, options);
  for (const GlobalEdge& e : graph.edges) {
    out += fmt::format("  {} -> {} [label={}];\n", quote(e.writer), quote(e.reader), quote(e.via));
  }
  out += "}\n";
  return out;
}

} // namespace swmat
