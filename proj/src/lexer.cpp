#include <algorithm>
#include <array>
#include <cctype>

#include <fmt/format.h>

#include "swmat/st_parser.hpp"

namespace swmat {

namespace {

constexpr std::array kKeywords = {
    "PROGRAM",  "END_PROGRAM", "FUNCTION_BLOCK", "END_FUNCTION_BLOCK", "FUNCTION",   "END_FUNCTION",
    "VAR",      "VAR_INPUT",   "VAR_OUTPUT",     "VAR_IN_OUT",         "VAR_TEMP",   "VAR_GLOBAL",
    "VAR_EXTERNAL", "END_VAR", "CONSTANT",       "RETAIN",             "PERSISTENT", "AT",
    "IF",       "THEN",        "ELSIF",          "ELSE",               "END_IF",     "CASE",
    "OF",       "END_CASE",    "FOR",            "TO",                 "BY",         "DO",
    "END_FOR",  "WHILE",       "END_WHILE",      "REPEAT",             "UNTIL",      "END_REPEAT",
    "EXIT",     "RETURN",      "CONTINUE",       "ACTION",             "END_ACTION", "TYPE",
    "END_TYPE", "AND",         "OR",             "XOR",                "NOT",        "MOD",
    "AND_THEN", "OR_ELSE",     "EXTENDS",        "IMPLEMENTS",         "METHOD",     "END_METHOD",
    "INTERFACE", "END_INTERFACE", "PROPERTY",    "END_PROPERTY",
};

// Longest first so that ":=" wins over ":".
constexpr std::array kOperators = {
    ":=", "=>", "<>", "<=", ">=", "**", "..", "+", "-", "*", "/", "=", "<", ">",
    "&",  "(",  ")",  "[",  "]",  ",",  ";",  ":", ".", "^", "#",
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

bool date_prefix(std::string_view upper) {
  return upper == "D" || upper == "DATE" || upper == "DT" || upper == "DATE_AND_TIME" || upper == "TOD" ||
         upper == "TIME_OF_DAY";
}

class Lexer {
public:
  Lexer(std::string_view text, std::string_view file) : text_(text), file_(file) {}

  LexResult run() {
    while (true) {
      skip_trivia();
      if (at_end()) break;
      lex_one();
    }
    Token eof;
    eof.kind = TokenKind::EndOfFile;
    eof.pos = pos();
    result_.tokens.push_back(eof);
    return std::move(result_);
  }

private:
  bool at_end() const { return i_ >= text_.size(); }
  char peek(std::size_t k = 0) const { return i_ + k < text_.size() ? text_[i_ + k] : '\0'; }
  SourcePos pos() const { return {line_, col_}; }

  void advance(std::size_t n = 1) {
    for (std::size_t k = 0; k < n && !at_end(); ++k) {
      if (text_[i_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++i_;
    }
  }

  void error(SourcePos p, std::string msg) {
    Diagnostic d;
    d.severity = Severity::Error;
    d.file = std::string(file_);
    d.pos = p;
    d.message = std::move(msg);
    result_.diagnostics.push_back(std::move(d));
  }

  void skip_block(std::string_view open, std::string_view close) {
    SourcePos start = pos();
    advance(open.size());
    while (!at_end() && text_.substr(i_, close.size()) != close) advance();
    if (at_end()) {
      error(start, fmt::format("unterminated comment starting with {}", open));
      return;
    }
    advance(close.size());
  }

  void skip_trivia() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
        advance();
      } else if (c == '(' && peek(1) == '*') {
        skip_block("(*", "*)");
      } else if (c == '/' && peek(1) == '*') {
        skip_block("/*", "*/");
      } else if (c == '/' && peek(1) == '/') {
        while (!at_end() && peek() != '\n') advance();
      } else if (c == '{') {
        skip_block("{", "}");
      } else if (static_cast<unsigned char>(c) == 0xEF && static_cast<unsigned char>(peek(1)) == 0xBB &&
                 static_cast<unsigned char>(peek(2)) == 0xBF) {
        advance(3); // UTF-8 BOM
      } else {
        break;
      }
    }
  }

  void push(TokenKind kind, std::string text, SourcePos p) {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.pos = p;
    result_.tokens.push_back(std::move(t));
  }

  void lex_one() {
    SourcePos start = pos();
    char c = peek();
    if (ident_start(c)) {
      std::size_t b = i_;
      while (ident_char(peek())) advance();
      std::string word(text_.substr(b, i_ - b));
      std::string upper = fold(word);
      if (peek() == '#' && (ident_start(peek(1)) || digit(peek(1)) || peek(1) == '-' || peek(1) == '+')) {
        lex_typed_literal(b, upper, start);
        return;
      }
      if (upper == "TRUE" || upper == "FALSE") {
        push(TokenKind::Literal, upper, start);
      } else if (is_keyword(upper)) {
        push(TokenKind::Keyword, upper, start);
      } else {
        push(TokenKind::Identifier, word, start);
      }
      return;
    }
    if (digit(c)) {
      lex_number(start);
      return;
    }
    if (c == '\'' || c == '"') {
      lex_string(c, start);
      return;
    }
    if (c == '%') {
      std::size_t b = i_;
      advance();
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '.' || peek() == '*') advance();
      push(TokenKind::Address, std::string(text_.substr(b, i_ - b)), start);
      return;
    }
    for (std::string_view op : kOperators) {
      if (text_.substr(i_, op.size()) == op) {
        advance(op.size());
        push(TokenKind::Operator, std::string(op), start);
        return;
      }
    }
    error(start, fmt::format("unexpected character '{}'", c));
    advance();
  }

  void lex_typed_literal(std::size_t begin, const std::string& prefix, SourcePos start) {
    advance(); // '#'
    const bool dates = date_prefix(prefix);
    if (peek() == '-' || peek() == '+') advance();
    while (ident_char(peek()) || peek() == '.' || peek() == '#' || peek() == ':' || (dates && peek() == '-')) {
      if (peek() == '.' && peek(1) == '.') break;
      if (peek() == ':' && peek(1) == '=') break;
      advance();
    }
    push(TokenKind::Literal, std::string(text_.substr(begin, i_ - begin)), start);
  }

  void lex_number(SourcePos start) {
    std::size_t b = i_;
    while (digit(peek()) || peek() == '_') advance();
    if (peek() == '#') {
      // Based integer: 16#FF, 2#1010_0101.
      advance();
      while (std::isxdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      push(TokenKind::Literal, std::string(text_.substr(b, i_ - b)), start);
      return;
    }
    if (peek() == '.' && digit(peek(1))) {
      advance();
      while (digit(peek()) || peek() == '_') advance();
    }
    if ((peek() == 'e' || peek() == 'E') &&
        (digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') && digit(peek(2))))) {
      advance(2);
      while (digit(peek())) advance();
    }
    push(TokenKind::Literal, std::string(text_.substr(b, i_ - b)), start);
  }

  void lex_string(char quote, SourcePos start) {
    std::size_t b = i_;
    advance();
    while (!at_end() && peek() != quote) {
      if (peek() == '$') advance(); // escape: $' $$ $N ...
      if (peek() == '\n') break;
      advance();
    }
    if (peek() != quote) {
      error(start, "unterminated string literal");
    } else {
      advance();
    }
    push(TokenKind::Literal, std::string(text_.substr(b, i_ - b)), start);
  }

  std::string_view text_;
  std::string_view file_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
  LexResult result_;
};

} // namespace

bool is_keyword(std::string_view upper) {
  return std::find(kKeywords.begin(), kKeywords.end(), upper) != kKeywords.end();
}

LexResult lex(std::string_view text, std::string_view file) { return Lexer(text, file).run(); }

} // namespace swmat
