#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace swmat {

// ---------------------------------------------------------------------------
// Identifiers

/// ASCII upper-case fold. IEC identifiers compare case-insensitively but are
/// stored as written.
std::string fold(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

/// Strict weak order used for every "lexicographic" output: case-folded first,
/// raw spelling as a tie-break so distinct spellings never compare equal.
struct NameLess {
  bool operator()(std::string_view a, std::string_view b) const;
};

// ---------------------------------------------------------------------------
// Source positions and diagnostics

struct SourcePos {
  int line = 0;   // 1-based, 0 = unknown
  int column = 0; // 1-based
};

struct SourceSpan {
  std::string file;
  int first_line = 0;
  int last_line = 0;

  bool contains(int line) const { return line >= first_line && line <= last_line; }
  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class Severity { Warning, Error };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string file;
  SourcePos pos;
  std::string pou;
  std::string message;
};

/// "file:line:col: error: message [pou]"
std::string to_string(const Diagnostic& d);
bool has_errors(const std::vector<Diagnostic>& diags);

// ---------------------------------------------------------------------------
// Tokens

enum class TokenKind { Identifier, Keyword, Literal, Address, Operator, EndOfFile };

/// Keywords are stored upper-cased; identifiers as written. Equality ignores
/// the position, which is metadata.
struct Token {
  TokenKind kind = TokenKind::EndOfFile;
  std::string text;
  SourcePos pos;

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_op(std::string_view t) const { return is(TokenKind::Operator, t); }
  bool is_kw(std::string_view t) const { return is(TokenKind::Keyword, t); }

  friend bool operator==(const Token& a, const Token& b) {
    return a.kind == b.kind && a.text == b.text;
  }
};

using TokenSeq = std::vector<Token>;

/// Renders a token sequence as compact ST text ("a.b[i] + f(x, 1)").
std::string join_tokens(const TokenSeq& toks);

// ---------------------------------------------------------------------------
// Statement tree

enum class StmtKind { Assign, Call, If, Case, For, While, Repeat, Exit, Return, Continue };

struct Statement;

/// IF/ELSIF arm (guard = condition) or CASE arm (guard = label list).
struct Branch {
  TokenSeq guard;
  std::vector<Statement> body;

  friend bool operator==(const Branch&, const Branch&) = default;
};

struct Statement {
  StmtKind kind = StmtKind::Assign;
  SourcePos pos;
  TokenSeq target;  // Assign: left-hand side; For: control variable
  TokenSeq expr;    // Assign: rhs; Call: whole call; Case: selector;
                    // While/Repeat: condition; For: "start TO end [BY step]"
  std::vector<Branch> branches;
  bool has_else = false;
  std::vector<Statement> else_body;
  std::vector<Statement> body; // loop bodies

  friend bool operator==(const Statement& a, const Statement& b) {
    return a.kind == b.kind && a.target == b.target && a.expr == b.expr &&
           a.branches == b.branches && a.has_else == b.has_else &&
           a.else_body == b.else_body && a.body == b.body;
  }
};

/// Callee path of a Call statement ("Prate.automatic").
std::string callee_of(const Statement& call);

// ---------------------------------------------------------------------------
// POUs

enum class PouKind { Program, FunctionBlock, Function };

enum class SectionKind { Var, VarInput, VarOutput, VarInOut, VarTemp, VarGlobal, VarExternal };

std::string_view to_string(PouKind k);
std::string_view to_string(SectionKind k);

struct VarDecl {
  std::string name;
  std::string type_name;
  std::optional<std::string> initializer;
  SourcePos pos;

  friend bool operator==(const VarDecl& a, const VarDecl& b) {
    return a.name == b.name && a.type_name == b.type_name && a.initializer == b.initializer;
  }
};

struct VarSection {
  SectionKind section_kind = SectionKind::Var;
  bool constant = false;
  bool retain = false;
  std::vector<VarDecl> decls;

  friend bool operator==(const VarSection&, const VarSection&) = default;
};

/// Named sub-body of a PROGRAM or FUNCTION_BLOCK (ACTION ... END_ACTION).
struct Action {
  std::string name;
  std::vector<Statement> statements;

  friend bool operator==(const Action&, const Action&) = default;
};

enum class Resolution { DirectPou, InstanceOfFb, LocalAction, External };

std::string_view to_string(Resolution r);

/// One syntactic call occurrence. `target` is the resolved node name: the POU
/// for DirectPou, the FB type for InstanceOfFb, the action for LocalAction and
/// the stub name (instance type or callee text) for External.
struct CallSite {
  std::string caller;
  std::string callee_text;
  Resolution resolution = Resolution::External;
  std::string target;
  SourcePos pos;

  friend bool operator==(const CallSite& a, const CallSite& b) {
    return a.caller == b.caller && a.callee_text == b.callee_text &&
           a.resolution == b.resolution && a.target == b.target;
  }
};

struct Pou {
  std::string name;
  PouKind kind = PouKind::Program;
  std::optional<std::string> return_type;
  std::vector<VarSection> var_sections;
  std::vector<Statement> statements;
  std::vector<Action> actions;

  // Filled by the resolution pass.
  std::vector<CallSite> call_sites;
  std::set<std::string> global_reads;
  std::set<std::string> global_writes;
  int complexity = 0;

  /// Set when the parser had to recover inside this POU.
  bool partial = false;

  const VarDecl* find_decl(std::string_view name) const;
  const Action* find_action(std::string_view name) const;

  friend bool operator==(const Pou&, const Pou&) = default;
};

struct GlobalVar {
  std::string name;
  std::string type_name;
  std::optional<std::string> initializer;
  bool constant = false;

  friend bool operator==(const GlobalVar&, const GlobalVar&) = default;
};

struct TaskDef {
  std::string name;
  int cycle_ms = 0;
  std::string entry;

  friend bool operator==(const TaskDef&, const TaskDef&) = default;
};

/// Opaque POU declared in externals.txt (non-ST body or vendor library).
struct ExternalStub {
  std::string name;
  std::string group;

  friend bool operator==(const ExternalStub&, const ExternalStub&) = default;
};

struct Project {
  std::string name;
  std::vector<Pou> pous;
  std::vector<GlobalVar> globals;
  std::vector<TaskDef> tasks;
  std::vector<ExternalStub> externals;
  std::map<std::string, SourceSpan> source_index; // POU name -> location

  const Pou* find_pou(std::string_view name) const;
  const GlobalVar* find_global(std::string_view name) const;
  const ExternalStub* find_external(std::string_view name) const;

  friend bool operator==(const Project&, const Project&) = default;
};

/// A `name(` or `a.b(` occurrence inside a token sequence.
struct CallOccurrence {
  std::string path;          // segments joined by '.'
  std::vector<std::string> segments;
  SourcePos pos;
};

std::vector<CallOccurrence> find_calls(const TokenSeq& toks);

/// All call occurrences of a POU in source order: body first, then actions.
std::vector<CallOccurrence> find_calls(const Pou& pou);

/// Checks the Project/Pou invariants. Empty result iff all hold.
std::vector<Diagnostic> validate_project(const Project& project);

/// Visits every statement of a POU body and its actions in source order
/// (pre-order, nested bodies included).
template <typename F>
void for_each_statement(const std::vector<Statement>& stmts, F&& f) {
  for (const Statement& s : stmts) {
    f(s);
    for (const Branch& b : s.branches) for_each_statement(b.body, f);
    for_each_statement(s.else_body, f);
    for_each_statement(s.body, f);
  }
}

template <typename F>
void for_each_statement(const Pou& pou, F&& f) {
  for_each_statement(pou.statements, f);
  for (const Action& a : pou.actions) for_each_statement(a.statements, f);
}

} // namespace swmat
