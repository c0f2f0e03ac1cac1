#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "swmat/model.hpp"

namespace swmat {

struct SourceFile {
  std::string path;
  std::string text; // UTF-8
};

// ---------------------------------------------------------------------------
// Lexing

struct LexResult {
  TokenSeq tokens; // always terminated by an EndOfFile token
  std::vector<Diagnostic> diagnostics;
};

/// Tokenizes Structured Text. Skips (* *), /* */, // comments and {pragmas}.
LexResult lex(std::string_view text, std::string_view file = {});

bool is_keyword(std::string_view upper);

// ---------------------------------------------------------------------------
// Parsing

struct FileParseResult {
  std::vector<Pou> pous;
  std::vector<SourceSpan> spans; // parallel to pous
  std::vector<GlobalVar> globals;
  std::vector<Diagnostic> diagnostics;
};

/// Parses one file. Never throws on syntax errors: they become diagnostics and
/// the parser resynchronizes at the next END_* or POU keyword, flagging the
/// affected POU as partial. Call sites and global accesses are left empty
/// (they need the project-wide symbol table).
FileParseResult parse_file(const SourceFile& source);

// ---------------------------------------------------------------------------
// Resolution

struct PouSymbol {
  std::string name;
  PouKind kind = PouKind::Program;
};

struct SymbolTable {
  std::map<std::string, PouSymbol> pous;        // folded name -> symbol
  std::map<std::string, GlobalVar> globals;     // folded name -> global
  std::map<std::string, ExternalStub> externals; // folded name -> stub
};

SymbolTable build_symbol_table(const Project& project);

/// One CallSite per syntactic call occurrence, in source order.
std::vector<CallSite> extract_call_sites(const Pou& pou, const SymbolTable& symbols);

struct GlobalAccesses {
  std::set<std::string> reads;
  std::set<std::string> writes;
};

/// Identifier occurrences resolving to a global (not shadowed by a local
/// declaration): writes when they are the root of an assignment target or a
/// FOR control variable, reads otherwise. Output bindings (=>) count as reads.
GlobalAccesses extract_global_accesses(const Pou& pou, const SymbolTable& symbols);

// ---------------------------------------------------------------------------
// Projects

struct ProjectLoad {
  Project project;
  std::vector<Diagnostic> diagnostics; // parse errors and warnings
};

/// Parses a tasks.txt body: `task <name> cycle <ms> entry <pou>` per line.
std::vector<TaskDef> parse_tasks(std::string_view text, std::string_view file = "tasks.txt");

/// Parses an externals.txt body: `<name> [group]` per line, '#' comments.
std::vector<ExternalStub> parse_externals(std::string_view text, std::string_view file = "externals.txt");

/// Two-pass build from in-memory sources: declarations first, then call and
/// global resolution. Throws InputError for zero files or a POU declared in two
/// files and InvariantError when validate_project reports a violation.
ProjectLoad parse_project(std::string name, const std::vector<SourceFile>& files,
                          std::optional<std::string> tasks_text,
                          std::optional<std::string> externals_text = std::nullopt);

/// Reads a project directory (*.st, optional tasks.txt and externals.txt).
ProjectLoad load_project(const std::filesystem::path& dir);

/// Re-emits a POU as ST text; parse_file on the result yields an equal POU.
std::string pretty_print(const Pou& pou);
std::string pretty_print(const std::vector<Statement>& stmts, int indent = 0);

/// Canonical token stream of a POU body and its actions (what clone detection
/// and the configurator's behavior check compare).
TokenSeq body_tokens(const Pou& pou);

} // namespace swmat
