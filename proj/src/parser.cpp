#include <algorithm>

#include <fmt/format.h>

#include "swmat/st_parser.hpp"

namespace swmat {

namespace {

bool is_pou_kw(const Token& t) {
  return t.kind == TokenKind::Keyword &&
         (t.text == "PROGRAM" || t.text == "FUNCTION_BLOCK" || t.text == "FUNCTION");
}

bool is_end_kw(const Token& t) { return t.kind == TokenKind::Keyword && t.text.starts_with("END_"); }

bool is_var_kw(const Token& t) {
  return t.kind == TokenKind::Keyword && t.text.starts_with("VAR");
}

bool is_block_end(const Token& t) {
  return t.is_kw("END_IF") || t.is_kw("END_CASE") || t.is_kw("END_FOR") || t.is_kw("END_WHILE") ||
         t.is_kw("END_REPEAT");
}

std::optional<SectionKind> section_kind(const Token& t) {
  if (t.kind != TokenKind::Keyword) return std::nullopt;
  if (t.text == "VAR") return SectionKind::Var;
  if (t.text == "VAR_INPUT") return SectionKind::VarInput;
  if (t.text == "VAR_OUTPUT") return SectionKind::VarOutput;
  if (t.text == "VAR_IN_OUT") return SectionKind::VarInOut;
  if (t.text == "VAR_TEMP") return SectionKind::VarTemp;
  if (t.text == "VAR_GLOBAL") return SectionKind::VarGlobal;
  if (t.text == "VAR_EXTERNAL") return SectionKind::VarExternal;
  return std::nullopt;
}

std::string_view end_keyword(PouKind k) {
  switch (k) {
    case PouKind::Program: return "END_PROGRAM";
    case PouKind::FunctionBlock: return "END_FUNCTION_BLOCK";
    case PouKind::Function: return "END_FUNCTION";
  }
  return "";
}

struct SyntaxError {
  SourcePos pos;
  std::string message;
};

class Parser {
public:
  Parser(const TokenSeq& toks, std::string file, FileParseResult& out)
      : t_(toks), file_(std::move(file)), out_(out) {}

  void run() {
    while (!eof()) {
      const Token& c = cur();
      if (is_pou_kw(c)) {
        parse_pou();
      } else if (c.is_kw("VAR_GLOBAL")) {
        VarSection section = parse_var_section(nullptr);
        export_globals(section);
      } else if (c.is_kw("TYPE")) {
        skip_type_block();
      } else {
        error(c.pos, fmt::format("expected PROGRAM, FUNCTION_BLOCK, FUNCTION or VAR_GLOBAL, found '{}'", c.text));
        advance();
        while (!eof() && !is_pou_kw(cur()) && !cur().is_kw("VAR_GLOBAL") && !cur().is_kw("TYPE")) advance();
      }
    }
  }

private:
  const Token& cur() const { return t_[std::min(i_, t_.size() - 1)]; }
  const Token& peek(std::size_t k) const { return t_[std::min(i_ + k, t_.size() - 1)]; }
  bool eof() const { return cur().kind == TokenKind::EndOfFile; }
  void advance() {
    if (!eof()) ++i_;
  }
  int last_line() const { return i_ > 0 ? t_[std::min(i_, t_.size()) - 1].pos.line : cur().pos.line; }

  void diag(Severity sev, SourcePos p, std::string msg) {
    Diagnostic d;
    d.severity = sev;
    d.file = file_;
    d.pos = p;
    d.pou = current_pou_ != nullptr ? current_pou_->name : std::string{};
    d.message = std::move(msg);
    out_.diagnostics.push_back(std::move(d));
  }
  void error(SourcePos p, std::string msg) {
    diag(Severity::Error, p, std::move(msg));
    if (current_pou_ != nullptr) current_pou_->partial = true;
  }
  void warning(SourcePos p, std::string msg) { diag(Severity::Warning, p, std::move(msg)); }

  [[noreturn]] void fail(std::string msg) const { throw SyntaxError{cur().pos, std::move(msg)}; }

  std::string expect_identifier(std::string_view what) {
    if (cur().kind != TokenKind::Identifier) {
      fail(fmt::format("expected {} but found '{}'", what, eof() ? "end of file" : cur().text));
    }
    std::string name = cur().text;
    advance();
    return name;
  }

  void expect_op(std::string_view op) {
    if (!cur().is_op(op)) {
      fail(fmt::format("expected '{}' but found '{}'", op, eof() ? "end of file" : cur().text));
    }
    advance();
  }

  void skip_semicolons() {
    while (cur().is_op(";")) advance();
  }

  /// Closes a construct. A missing terminator at end of file is tolerated.
  void expect_end(std::string_view kw) {
    if (cur().is_kw(kw)) {
      advance();
      skip_semicolons();
      return;
    }
    if (eof()) {
      warning(cur().pos, fmt::format("missing {} at end of file", kw));
      return;
    }
    fail(fmt::format("expected {} but found '{}'", kw, cur().text));
  }

  // Token capture ------------------------------------------------------------

  static bool expression_keyword(const Token& t) {
    return t.is_kw("AND") || t.is_kw("OR") || t.is_kw("XOR") || t.is_kw("NOT") || t.is_kw("MOD") ||
           t.is_kw("AND_THEN") || t.is_kw("OR_ELSE");
  }

  /// Collects tokens until one of `stops` appears at bracket depth 0.
  TokenSeq capture(std::initializer_list<std::string_view> stops, std::initializer_list<std::string_view> extra_kw,
                   std::string_view what) {
    TokenSeq seq;
    int depth = 0;
    while (true) {
      const Token& c = cur();
      if (c.kind == TokenKind::EndOfFile) fail(fmt::format("unexpected end of file in {}", what));
      if (depth == 0) {
        bool stop = std::any_of(stops.begin(), stops.end(), [&](std::string_view s) {
          return (c.kind == TokenKind::Operator || c.kind == TokenKind::Keyword) && c.text == s;
        });
        if (stop) break;
      }
      if (c.kind == TokenKind::Keyword && !expression_keyword(c) &&
          std::find(extra_kw.begin(), extra_kw.end(), c.text) == extra_kw.end()) {
        fail(fmt::format("unexpected '{}' in {}", c.text, what));
      }
      if (c.is_op("(") || c.is_op("[")) ++depth;
      if (c.is_op(")") || c.is_op("]")) {
        if (--depth < 0) fail(fmt::format("unbalanced '{}' in {}", c.text, what));
      }
      if (depth == 0 && (c.is_op(";") || c.is_op(":=") || c.is_op("=>"))) {
        fail(fmt::format("unexpected '{}' in {}", c.text, what));
      }
      seq.push_back(c);
      advance();
    }
    if (seq.empty()) fail(fmt::format("empty {}", what));
    return seq;
  }

  /// Balanced "( ... )" starting at the current '('.
  void capture_group(TokenSeq& into) {
    int depth = 0;
    do {
      const Token& c = cur();
      if (c.kind == TokenKind::EndOfFile) fail("unexpected end of file in argument list");
      if (c.kind == TokenKind::Keyword && !expression_keyword(c)) {
        fail(fmt::format("unexpected '{}' in argument list", c.text));
      }
      if (c.is_op("(") || c.is_op("[")) ++depth;
      if (c.is_op(")") || c.is_op("]")) --depth;
      into.push_back(c);
      advance();
    } while (depth > 0);
  }

  // Declarations ---------------------------------------------------------------

  VarSection parse_var_section(Pou* owner) {
    VarSection section;
    section.section_kind = *section_kind(cur());
    SourcePos start = cur().pos;
    advance();
    while (cur().is_kw("CONSTANT") || cur().is_kw("RETAIN") || cur().is_kw("PERSISTENT")) {
      if (cur().is_kw("CONSTANT")) section.constant = true;
      else section.retain = true;
      advance();
    }
    while (true) {
      if (cur().is_kw("END_VAR")) {
        advance();
        skip_semicolons();
        break;
      }
      if (eof()) {
        warning(start, "missing END_VAR at end of file");
        break;
      }
      if (is_pou_kw(cur()) || (cur().kind == TokenKind::Keyword && cur().text != "END_VAR" &&
                                (is_end_kw(cur()) || is_var_kw(cur())))) {
        error(cur().pos, fmt::format("expected END_VAR before '{}'", cur().text));
        break;
      }
      try {
        parse_decl_line(section);
      } catch (const SyntaxError& e) {
        error(e.pos, e.message);
        if (owner != nullptr) owner->partial = true;
        while (!eof() && !cur().is_op(";") && !cur().is_kw("END_VAR") && !is_pou_kw(cur())) advance();
        if (cur().is_op(";")) advance();
      }
    }
    return section;
  }

  void parse_decl_line(VarSection& section) {
    std::vector<std::pair<std::string, SourcePos>> names;
    names.emplace_back(cur().text, cur().pos);
    expect_identifier("variable name");
    while (cur().is_op(",")) {
      advance();
      names.emplace_back(cur().text, cur().pos);
      expect_identifier("variable name");
    }
    if (cur().is_kw("AT")) {
      advance();
      if (cur().kind != TokenKind::Address) fail("expected a direct address after AT");
      advance();
    }
    expect_op(":");
    TokenSeq type = capture({":=", ";"}, {"OF"}, "type");
    std::optional<std::string> init;
    if (cur().is_op(":=")) {
      advance();
      init = join_tokens(capture({";"}, {}, "initializer"));
    }
    expect_op(";");
    for (auto& [n, p] : names) {
      VarDecl d;
      d.name = n;
      d.type_name = join_tokens(type);
      d.initializer = init;
      d.pos = p;
      section.decls.push_back(std::move(d));
    }
  }

  void export_globals(const VarSection& section) {
    for (const VarDecl& d : section.decls) {
      GlobalVar g;
      g.name = d.name;
      g.type_name = d.type_name;
      g.initializer = d.initializer;
      g.constant = section.constant;
      out_.globals.push_back(std::move(g));
    }
  }

  void skip_type_block() {
    SourcePos start = cur().pos;
    advance();
    while (!eof() && !cur().is_kw("END_TYPE")) advance();
    if (eof()) {
      warning(start, "missing END_TYPE at end of file");
      return;
    }
    advance();
    skip_semicolons();
  }

  // POUs -----------------------------------------------------------------------

  void parse_pou() {
    Pou pou;
    const Token& head = cur();
    pou.kind = head.is_kw("PROGRAM") ? PouKind::Program
               : head.is_kw("FUNCTION_BLOCK") ? PouKind::FunctionBlock
                                               : PouKind::Function;
    SourceSpan span;
    span.file = file_;
    span.first_line = head.pos.line;
    current_pou_ = &pou;
    advance();
    try {
      pou.name = expect_identifier("POU name");
      if (pou.kind == PouKind::Function) {
        expect_op(":");
        TokenSeq type;
        if (cur().kind != TokenKind::Identifier) fail("expected return type");
        type.push_back(cur());
        advance();
        if (cur().is_op("(") || cur().is_op("[")) capture_group(type);
        pou.return_type = join_tokens(type);
      }
      if (cur().is_kw("EXTENDS") || cur().is_kw("IMPLEMENTS")) {
        fail("object-oriented extensions (EXTENDS/IMPLEMENTS) are not supported");
      }
      skip_semicolons();
    } catch (const SyntaxError& e) {
      error(e.pos, e.message);
      recover_to_pou_end(pou.kind);
      finish_pou(pou, span);
      return;
    }

    while (section_kind(cur())) pou.var_sections.push_back(parse_var_section(&pou));

    pou.statements = parse_statements(false);
    while (cur().is_kw("ACTION")) parse_action(pou);

    const std::string_view end_kw = end_keyword(pou.kind);
    if (cur().is_kw(end_kw)) {
      span.last_line = cur().pos.line;
      advance();
      skip_semicolons();
    } else if (eof()) {
      warning(cur().pos, fmt::format("missing {} at end of file", end_kw));
    } else {
      error(cur().pos, fmt::format("expected {} but found '{}'", end_kw, cur().text));
      recover_to_pou_end(pou.kind);
    }
    finish_pou(pou, span);
  }

  void finish_pou(Pou& pou, SourceSpan& span) {
    if (span.last_line == 0) span.last_line = std::max(span.first_line, last_line());
    current_pou_ = nullptr;
    for (const VarSection& s : pou.var_sections) {
      if (s.section_kind == SectionKind::VarGlobal) export_globals(s);
    }
    out_.pous.push_back(std::move(pou));
    out_.spans.push_back(span);
  }

  void recover_to_pou_end(PouKind kind) {
    const std::string_view end_kw = end_keyword(kind);
    while (!eof() && !cur().is_kw(end_kw) && !is_pou_kw(cur())) advance();
    if (cur().is_kw(end_kw)) {
      advance();
      skip_semicolons();
    }
  }

  void parse_action(Pou& pou) {
    advance(); // ACTION
    Action action;
    try {
      action.name = expect_identifier("action name");
      if (cur().is_op(":")) advance();
    } catch (const SyntaxError& e) {
      error(e.pos, e.message);
    }
    action.statements = parse_statements(false);
    if (cur().is_kw("END_ACTION")) {
      advance();
      skip_semicolons();
    } else if (eof()) {
      warning(cur().pos, "missing END_ACTION at end of file");
    } else {
      error(cur().pos, fmt::format("expected END_ACTION but found '{}'", cur().text));
    }
    pou.actions.push_back(std::move(action));
  }

  // Statements -----------------------------------------------------------------

  bool looks_like_case_label() const {
    std::size_t k = 0;
    bool any = false;
    while (true) {
      const Token& t = peek(k);
      bool allowed = t.kind == TokenKind::Identifier || t.kind == TokenKind::Literal ||
                     t.is_op("..") || t.is_op(",") || t.is_op(".") || t.is_op("-") || t.is_op("+");
      if (!allowed) break;
      any = true;
      ++k;
    }
    return any && peek(k).is_op(":");
  }

  bool ends_statement_list(bool in_case) const {
    const Token& c = cur();
    if (c.kind == TokenKind::EndOfFile) return true;
    if (c.kind == TokenKind::Keyword) {
      if (is_end_kw(c) || is_pou_kw(c) || is_var_kw(c)) return true;
      if (c.text == "ELSE" || c.text == "ELSIF" || c.text == "UNTIL" || c.text == "ACTION") return true;
    }
    return in_case && looks_like_case_label();
  }

  std::vector<Statement> parse_statements(bool in_case) {
    std::vector<Statement> out;
    while (!ends_statement_list(in_case)) {
      if (cur().is_op(";")) {
        advance();
        continue;
      }
      try {
        out.push_back(parse_statement());
      } catch (const SyntaxError& e) {
        error(e.pos, e.message);
        recover_statement();
      }
    }
    return out;
  }

  /// Skips to the next END_* or POU keyword. A block terminator is consumed so
  /// the enclosing list can continue after the broken construct.
  void recover_statement() {
    while (!eof() && !is_end_kw(cur()) && !is_pou_kw(cur()) && !cur().is_kw("ACTION")) advance();
    if (is_block_end(cur())) {
      advance();
      skip_semicolons();
    }
  }

  Statement parse_statement() {
    const Token& c = cur();
    if (c.kind == TokenKind::Identifier) return parse_simple();
    if (c.is_kw("IF")) return parse_if();
    if (c.is_kw("CASE")) return parse_case();
    if (c.is_kw("FOR")) return parse_for();
    if (c.is_kw("WHILE")) return parse_while();
    if (c.is_kw("REPEAT")) return parse_repeat();
    if (c.is_kw("EXIT") || c.is_kw("RETURN") || c.is_kw("CONTINUE")) {
      Statement s;
      s.kind = c.text == "EXIT" ? StmtKind::Exit : c.text == "RETURN" ? StmtKind::Return : StmtKind::Continue;
      s.pos = c.pos;
      advance();
      expect_op(";");
      return s;
    }
    fail(fmt::format("unexpected '{}' at start of statement", c.text));
  }

  Statement parse_simple() {
    Statement s;
    s.pos = cur().pos;
    TokenSeq designator;
    designator.push_back(cur());
    advance();
    while (true) {
      if (cur().is_op(".") && peek(1).kind == TokenKind::Identifier) {
        designator.push_back(cur());
        designator.push_back(peek(1));
        advance();
        advance();
      } else if (cur().is_op("[")) {
        capture_group(designator);
      } else if (cur().is_op("^")) {
        designator.push_back(cur());
        advance();
      } else {
        break;
      }
    }
    if (cur().is_op(":=")) {
      advance();
      s.kind = StmtKind::Assign;
      s.target = std::move(designator);
      s.expr = capture({";"}, {}, "expression");
      expect_op(";");
      return s;
    }
    if (cur().is_op("(")) {
      s.kind = StmtKind::Call;
      s.expr = std::move(designator);
      capture_group(s.expr);
      expect_op(";");
      return s;
    }
    fail(fmt::format("expected ':=' or '(' after '{}'", join_tokens(designator)));
  }

  Statement parse_if() {
    Statement s;
    s.kind = StmtKind::If;
    s.pos = cur().pos;
    advance();
    Branch first;
    first.guard = capture({"THEN"}, {}, "IF condition");
    advance();
    first.body = parse_statements(false);
    s.branches.push_back(std::move(first));
    while (cur().is_kw("ELSIF")) {
      advance();
      Branch b;
      b.guard = capture({"THEN"}, {}, "ELSIF condition");
      advance();
      b.body = parse_statements(false);
      s.branches.push_back(std::move(b));
    }
    if (cur().is_kw("ELSE")) {
      advance();
      s.has_else = true;
      s.else_body = parse_statements(false);
    }
    expect_end("END_IF");
    return s;
  }

  Statement parse_case() {
    Statement s;
    s.kind = StmtKind::Case;
    s.pos = cur().pos;
    advance();
    s.expr = capture({"OF"}, {}, "CASE selector");
    advance();
    while (true) {
      if (cur().is_kw("ELSE")) {
        advance();
        s.has_else = true;
        s.else_body = parse_statements(true);
        continue;
      }
      if (cur().is_kw("END_CASE") || eof()) break;
      if (!looks_like_case_label()) {
        fail(fmt::format("expected CASE label but found '{}'", cur().text));
      }
      Branch b;
      while (!cur().is_op(":")) {
        b.guard.push_back(cur());
        advance();
      }
      advance(); // ':'
      b.body = parse_statements(true);
      s.branches.push_back(std::move(b));
    }
    expect_end("END_CASE");
    return s;
  }

  Statement parse_for() {
    Statement s;
    s.kind = StmtKind::For;
    s.pos = cur().pos;
    advance();
    s.target.push_back(cur());
    expect_identifier("FOR control variable");
    expect_op(":=");
    s.expr = capture({"DO"}, {"TO", "BY"}, "FOR range");
    advance();
    s.body = parse_statements(false);
    expect_end("END_FOR");
    return s;
  }

  Statement parse_while() {
    Statement s;
    s.kind = StmtKind::While;
    s.pos = cur().pos;
    advance();
    s.expr = capture({"DO"}, {}, "WHILE condition");
    advance();
    s.body = parse_statements(false);
    expect_end("END_WHILE");
    return s;
  }

  Statement parse_repeat() {
    Statement s;
    s.kind = StmtKind::Repeat;
    s.pos = cur().pos;
    advance();
    s.body = parse_statements(false);
    if (!cur().is_kw("UNTIL")) fail(fmt::format("expected UNTIL but found '{}'", cur().text));
    advance();
    s.expr = capture({"END_REPEAT"}, {}, "UNTIL condition");
    expect_end("END_REPEAT");
    return s;
  }

  const TokenSeq& t_;
  std::size_t i_ = 0;
  std::string file_;
  FileParseResult& out_;
  Pou* current_pou_ = nullptr;
};

// Pretty printing ---------------------------------------------------------------

void print_statements(std::string& out, const std::vector<Statement>& stmts, int indent);

void line(std::string& out, int indent, std::string_view text) {
  out.append(static_cast<std::size_t>(indent) * 2, ' ');
  out += text;
  out += '\n';
}

void print_statement(std::string& out, const Statement& s, int indent) {
  switch (s.kind) {
    case StmtKind::Assign:
      line(out, indent, fmt::format("{} := {};", join_tokens(s.target), join_tokens(s.expr)));
      break;
    case StmtKind::Call:
      line(out, indent, join_tokens(s.expr) + ";");
      break;
    case StmtKind::If:
      for (std::size_t k = 0; k < s.branches.size(); ++k) {
        line(out, indent, fmt::format("{} {} THEN", k == 0 ? "IF" : "ELSIF", join_tokens(s.branches[k].guard)));
        print_statements(out, s.branches[k].body, indent + 1);
      }
      if (s.has_else) {
        line(out, indent, "ELSE");
        print_statements(out, s.else_body, indent + 1);
      }
      line(out, indent, "END_IF;");
      break;
    case StmtKind::Case:
      line(out, indent, fmt::format("CASE {} OF", join_tokens(s.expr)));
      for (const Branch& b : s.branches) {
        line(out, indent + 1, join_tokens(b.guard) + ":");
        print_statements(out, b.body, indent + 2);
      }
      if (s.has_else) {
        line(out, indent + 1, "ELSE");
        print_statements(out, s.else_body, indent + 2);
      }
      line(out, indent, "END_CASE;");
      break;
    case StmtKind::For:
      line(out, indent, fmt::format("FOR {} := {} DO", join_tokens(s.target), join_tokens(s.expr)));
      print_statements(out, s.body, indent + 1);
      line(out, indent, "END_FOR;");
      break;
    case StmtKind::While:
      line(out, indent, fmt::format("WHILE {} DO", join_tokens(s.expr)));
      print_statements(out, s.body, indent + 1);
      line(out, indent, "END_WHILE;");
      break;
    case StmtKind::Repeat:
      line(out, indent, "REPEAT");
      print_statements(out, s.body, indent + 1);
      line(out, indent, fmt::format("UNTIL {}", join_tokens(s.expr)));
      line(out, indent, "END_REPEAT;");
      break;
    case StmtKind::Exit: line(out, indent, "EXIT;"); break;
    case StmtKind::Return: line(out, indent, "RETURN;"); break;
    case StmtKind::Continue: line(out, indent, "CONTINUE;"); break;
  }
}

void print_statements(std::string& out, const std::vector<Statement>& stmts, int indent) {
  for (const Statement& s : stmts) print_statement(out, s, indent);
}

} // namespace

FileParseResult parse_file(const SourceFile& source) {
  FileParseResult out;
  LexResult lexed = lex(source.text, source.path);
  out.diagnostics = std::move(lexed.diagnostics);
  Parser(lexed.tokens, source.path, out).run();
  return out;
}

std::string pretty_print(const std::vector<Statement>& stmts, int indent) {
  std::string out;
  print_statements(out, stmts, indent);
  return out;
}

std::string pretty_print(const Pou& pou) {
  std::string out;
  if (pou.kind == PouKind::Function) {
    line(out, 0, fmt::format("FUNCTION {} : {}", pou.name, pou.return_type.value_or("INT")));
  } else {
    line(out, 0, fmt::format("{} {}", to_string(pou.kind), pou.name));
  }
  for (const VarSection& s : pou.var_sections) {
    std::string head(to_string(s.section_kind));
    if (s.constant) head += " CONSTANT";
    if (s.retain) head += " RETAIN";
    line(out, 0, head);
    for (const VarDecl& d : s.decls) {
      if (d.initializer) {
        line(out, 1, fmt::format("{} : {} := {};", d.name, d.type_name, *d.initializer));
      } else {
        line(out, 1, fmt::format("{} : {};", d.name, d.type_name));
      }
    }
    line(out, 0, "END_VAR");
  }
  print_statements(out, pou.statements, 1);
  for (const Action& a : pou.actions) {
    line(out, 0, fmt::format("ACTION {}:", a.name));
    print_statements(out, a.statements, 1);
    line(out, 0, "END_ACTION");
  }
  line(out, 0, end_keyword(pou.kind));
  return out;
}

TokenSeq body_tokens(const Pou& pou) {
  TokenSeq out;
  auto append = [&](const std::vector<Statement>& stmts) {
    LexResult r = lex(pretty_print(stmts));
    out.insert(out.end(), r.tokens.begin(), r.tokens.end() - 1); // drop EOF
  };
  append(pou.statements);
  for (const Action& a : pou.actions) append(a.statements);
  return out;
}

} // namespace swmat
