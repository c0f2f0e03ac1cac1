#include "swmat/model.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include <fmt/format.h>

namespace swmat {

std::string fold(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::toupper(static_cast<unsigned char>(x)) ==
                  std::toupper(static_cast<unsigned char>(y));
         });
}

bool NameLess::operator()(std::string_view a, std::string_view b) const {
  std::string fa = fold(a), fb = fold(b);
  if (fa != fb) return fa < fb;
  return a < b;
}

std::string to_string(const Diagnostic& d) {
  std::string where = d.file.empty() ? "<input>" : d.file;
  if (d.pos.line > 0) where += fmt::format(":{}:{}", d.pos.line, d.pos.column);
  std::string out = fmt::format("{}: {}: {}", where,
                                d.severity == Severity::Error ? "error" : "warning", d.message);
  if (!d.pou.empty()) out += fmt::format(" [{}]", d.pou);
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

namespace {

bool glue_before(const Token& prev, const Token& next) {
  if (next.kind == TokenKind::Operator) {
    const std::string& t = next.text;
    if (t == "," || t == ";" || t == ")" || t == "]" || t == "." || t == ".." || t == "^") return false;
    if ((t == "(" || t == "[") &&
        (prev.kind == TokenKind::Identifier || prev.is_op("]") || prev.is_op(")"))) {
      return false;
    }
  }
  if (prev.kind == TokenKind::Operator) {
    const std::string& t = prev.text;
    if (t == "(" || t == "[" || t == "." || t == "..") return false;
  }
  return true;
}

} // namespace

std::string join_tokens(const TokenSeq& toks) {
  std::string out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i > 0 && glue_before(toks[i - 1], toks[i])) out += ' ';
    out += toks[i].text;
  }
  return out;
}

std::string callee_of(const Statement& call) {
  std::string path;
  for (const Token& t : call.expr) {
    if (t.is_op("(")) break;
    if (t.kind == TokenKind::Identifier) {
      if (!path.empty()) path += '.';
      path += t.text;
    }
  }
  return path;
}

std::string_view to_string(PouKind k) {
  switch (k) {
    case PouKind::Program: return "PROGRAM";
    case PouKind::FunctionBlock: return "FUNCTION_BLOCK";
    case PouKind::Function: return "FUNCTION";
  }
  return "?";
}

std::string_view to_string(SectionKind k) {
  switch (k) {
    case SectionKind::Var: return "VAR";
    case SectionKind::VarInput: return "VAR_INPUT";
    case SectionKind::VarOutput: return "VAR_OUTPUT";
    case SectionKind::VarInOut: return "VAR_IN_OUT";
    case SectionKind::VarTemp: return "VAR_TEMP";
    case SectionKind::VarGlobal: return "VAR_GLOBAL";
    case SectionKind::VarExternal: return "VAR_EXTERNAL";
  }
  return "?";
}

std::string_view to_string(Resolution r) {
  switch (r) {
    case Resolution::DirectPou: return "DirectPou";
    case Resolution::InstanceOfFb: return "InstanceOfFb";
    case Resolution::LocalAction: return "LocalAction";
    case Resolution::External: return "External";
  }
  return "?";
}

const VarDecl* Pou::find_decl(std::string_view n) const {
  for (const VarSection& s : var_sections) {
    for (const VarDecl& d : s.decls) {
      if (iequals(d.name, n)) return &d;
    }
  }
  return nullptr;
}

const Action* Pou::find_action(std::string_view n) const {
  for (const Action& a : actions) {
    if (iequals(a.name, n)) return &a;
  }
  return nullptr;
}

const Pou* Project::find_pou(std::string_view n) const {
  for (const Pou& p : pous) {
    if (iequals(p.name, n)) return &p;
  }
  return nullptr;
}

const GlobalVar* Project::find_global(std::string_view n) const {
  for (const GlobalVar& g : globals) {
    if (iequals(g.name, n)) return &g;
  }
  return nullptr;
}

const ExternalStub* Project::find_external(std::string_view n) const {
  for (const ExternalStub& e : externals) {
    if (iequals(e.name, n)) return &e;
  }
  return nullptr;
}

std::vector<CallOccurrence> find_calls(const TokenSeq& toks) {
  std::vector<CallOccurrence> out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].kind != TokenKind::Identifier) continue;
    if (i > 0 && toks[i - 1].is_op(".")) continue; // inside a path started earlier
    CallOccurrence occ;
    occ.pos = toks[i].pos;
    occ.segments.push_back(toks[i].text);
    std::size_t j = i + 1;
    while (j + 1 < toks.size() && toks[j].is_op(".") && toks[j + 1].kind == TokenKind::Identifier) {
      occ.segments.push_back(toks[j + 1].text);
      j += 2;
    }
    if (j < toks.size() && toks[j].is_op("(")) {
      for (const std::string& s : occ.segments) {
        if (!occ.path.empty()) occ.path += '.';
        occ.path += s;
      }
      out.push_back(std::move(occ));
    }
  }
  return out;
}

std::vector<CallOccurrence> find_calls(const Pou& pou) {
  std::vector<CallOccurrence> out;
  auto take = [&](const TokenSeq& seq) {
    auto found = find_calls(seq);
    out.insert(out.end(), found.begin(), found.end());
  };
  for_each_statement(pou, [&](const Statement& s) {
    take(s.target);
    for (const Branch& b : s.branches) take(b.guard);
    take(s.expr);
  });
  return out;
}

std::vector<Diagnostic> validate_project(const Project& project) {
  std::vector<Diagnostic> out;
  auto report = [&](const std::string& pou, std::string message) {
    Diagnostic d;
    d.pou = pou;
    d.message = std::move(message);
    if (auto it = project.source_index.find(pou); it != project.source_index.end()) {
      d.file = it->second.file;
      d.pos.line = it->second.first_line;
    }
    out.push_back(std::move(d));
  };

  std::map<std::string, std::string> seen;
  for (const Pou& p : project.pous) {
    auto [it, inserted] = seen.emplace(fold(p.name), p.name);
    if (!inserted) report(p.name, fmt::format("duplicate POU name (also declared as {})", it->second));
  }
  std::map<std::string, std::string> seen_globals;
  for (const GlobalVar& g : project.globals) {
    if (!seen_globals.emplace(fold(g.name), g.name).second) {
      report({}, fmt::format("duplicate global variable {}", g.name));
    }
  }

  for (const TaskDef& t : project.tasks) {
    const Pou* entry = project.find_pou(t.entry);
    if (entry == nullptr) {
      report(t.entry, fmt::format("unresolved task entry (task {})", t.name));
    } else if (entry->kind == PouKind::Function) {
      report(t.entry, fmt::format("task entry must be a PROGRAM or FUNCTION_BLOCK (task {})", t.name));
    }
  }

  for (const Pou& p : project.pous) {
    const bool is_function = p.kind == PouKind::Function;
    if (is_function != p.return_type.has_value()) {
      report(p.name, is_function ? "FUNCTION without return type" : "return type on a non-FUNCTION POU");
    }

    std::map<std::string, int> names;
    for (const VarSection& s : p.var_sections) {
      for (const VarDecl& d : s.decls) {
        if (++names[fold(d.name)] == 2) report(p.name, fmt::format("duplicate declaration {}", d.name));
      }
    }

    std::vector<std::string> paths;
    for (const CallOccurrence& c : find_calls(p)) paths.push_back(fold(c.path));
    const SourceSpan* span = nullptr;
    if (auto it = project.source_index.find(p.name); it != project.source_index.end()) span = &it->second;
    for (const CallSite& cs : p.call_sites) {
      if (!iequals(cs.caller, p.name)) {
        report(p.name, fmt::format("call site of {} attributed to {}", cs.callee_text, cs.caller));
      }
      if (std::find(paths.begin(), paths.end(), fold(cs.callee_text)) == paths.end()) {
        report(p.name, fmt::format("call site {} not present in the statement tree", cs.callee_text));
      }
      if (cs.resolution == Resolution::InstanceOfFb) {
        const Pou* type = project.find_pou(cs.target);
        if (type == nullptr || type->kind != PouKind::FunctionBlock) {
          report(p.name, fmt::format("call {} resolved to instance of non-FB {}", cs.callee_text, cs.target));
        }
      }
      if (span != nullptr && cs.pos.line > 0 && !span->contains(cs.pos.line)) {
        report(p.name, fmt::format("call site {} at line {} outside the POU span", cs.callee_text, cs.pos.line));
      }
    }
  }
  return out;
}

} // namespace swmat
