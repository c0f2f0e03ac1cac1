#include "synthetic.hpp"

#include <algorithm>
#include <random>
#include <regex>
#include <sstream>

#include <fmt/format.h>

namespace swmat::testing {

namespace {

enum class Kind { Program, Fb, Function };

struct Spec {
  std::string name;
  Kind kind;
};

class Generator {
public:
  Generator(std::uint32_t seed, int max_pous) : rng_(seed) {
    const int n = pick(2, std::max(2, max_pous));
    const int globals = pick(0, 3);
    for (int g = 0; g < globals; ++g) globals_.push_back(fmt::format("g{}", g));
    pous_.push_back({"Main", Kind::Program});
    for (int i = 1; i < n; ++i) {
      const Kind k = static_cast<Kind>(pick(0, 2));
      const char* prefix = k == Kind::Program ? "Prg" : k == Kind::Fb ? "Fb" : "Fn";
      pous_.push_back({fmt::format("{}{}", prefix, i), k});
    }
  }

  SyntheticProject run() {
    SyntheticProject p;
    const int files = pick(1, 3);
    std::vector<std::string> texts(files);
    for (std::size_t i = 0; i < pous_.size(); ++i) texts[pick(0, files - 1)] += pou_text(i) + "\n";
    for (int f = 0; f < files; ++f) {
      if (!texts[f].empty()) p.files.push_back({fmt::format("unit{}.st", f), texts[f]});
    }
    if (!globals_.empty()) {
      std::string g = "VAR_GLOBAL\n";
      for (const std::string& name : globals_) g += fmt::format("  {} : INT := {};\n", name, pick(0, 9));
      g += "END_VAR\n";
      p.files.push_back({"globals.st", g});
    }
    p.tasks = "task main cycle 10 entry Main\n";
    return p;
  }

private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return pick(0, 1) == 1; }

  std::string operand(bool allow_globals) {
    const int r = pick(0, 3);
    if (r == 0 && allow_globals && !globals_.empty()) return globals_[pick(0, static_cast<int>(globals_.size()) - 1)];
    if (r == 1) return std::to_string(pick(0, 20));
    return coin() ? "x" : "y";
  }

  std::string expr() {
    std::string e = operand(true);
    const int terms = pick(0, 2);
    for (int i = 0; i < terms; ++i) e += (coin() ? " + " : " * ") + operand(true);
    return e;
  }

  std::string lvalue() {
    if (!globals_.empty() && coin()) return globals_[pick(0, static_cast<int>(globals_.size()) - 1)];
    return coin() ? "x" : "y";
  }

  std::string call_statement(std::size_t self, std::vector<std::string>& decls) {
    std::vector<std::size_t> callees;
    for (std::size_t j = self + 1; j < pous_.size(); ++j) {
      if (pous_[self].kind == Kind::Function && pous_[j].kind != Kind::Function) continue;
      callees.push_back(j);
    }
    const int r = pick(0, 9);
    if (callees.empty() || r >= 8) {
      if (pous_[self].kind != Kind::Function && coin()) {
        const std::string inst = fmt::format("tmr{}", decls.size());
        decls.push_back(fmt::format("{} : TON_Lib;", inst));
        return fmt::format("{}(xIn := {});", inst, expr());
      }
      return fmt::format("LIB_Log({});", expr());
    }
    const Spec& callee = pous_[callees[pick(0, static_cast<int>(callees.size()) - 1)]];
    switch (callee.kind) {
      case Kind::Program:
        return callee.name + "();";
      case Kind::Function:
        return fmt::format("{} := {}({});", lvalue(), callee.name, expr());
      case Kind::Fb: {
        std::vector<std::string> existing;
        for (const auto& [inst, type] : instances_) {
          if (type == callee.name) existing.push_back(inst);
        }
        std::string inst;
        if (existing.empty() || pick(0, 2) == 0) {
          inst = fmt::format("inst{}", instance_counter_++);
          instances_.emplace_back(inst, callee.name);
          decls.push_back(fmt::format("{} : {};", inst, callee.name));
        } else {
          inst = existing[pick(0, static_cast<int>(existing.size()) - 1)];
        }
        if (pick(0, 3) == 0) return inst + ".reset();";
        return fmt::format("{}(in1 := {});", inst, expr());
      }
    }
    return {};
  }

  void statements(std::size_t self, int depth, int count, const std::string& indent, std::vector<std::string>& decls,
                  std::string& out) {
    for (int i = 0; i < count; ++i) {
      const int r = pick(0, depth > 1 ? 5 : 9);
      if (r <= 1) {
        out += fmt::format("{}{} := {};\n", indent, lvalue(), expr());
      } else if (r <= 5) {
        out += indent + call_statement(self, decls) + "\n";
      } else if (r <= 7) {
        out += fmt::format("{}IF {} > {} THEN\n", indent, operand(true), pick(0, 9));
        statements(self, depth + 1, pick(1, 2), indent + "  ", decls, out);
        if (coin()) {
          out += indent + "ELSE\n";
          statements(self, depth + 1, 1, indent + "  ", decls, out);
        }
        out += indent + "END_IF;\n";
      } else {
        out += fmt::format("{}CASE {} OF\n", indent, operand(true));
        const int labels = pick(1, 3);
        for (int l = 1; l <= labels; ++l) {
          out += fmt::format("{}  {}:\n", indent, l);
          statements(self, depth + 1, 1, indent + "    ", decls, out);
        }
        out += indent + "END_CASE;\n";
      }
    }
  }

  std::string pou_text(std::size_t self) {
    instances_.clear();
    const Spec& s = pous_[self];
    std::vector<std::string> decls;
    std::string body;
    statements(self, 0, pick(1, 5), "", decls, body);

    std::string out;
    switch (s.kind) {
      case Kind::Program: out += "PROGRAM " + s.name + "\n"; break;
      case Kind::Fb: out += "FUNCTION_BLOCK " + s.name + "\nVAR_INPUT\n  in1 : INT;\nEND_VAR\n"; break;
      case Kind::Function: out += "FUNCTION " + s.name + " : INT\nVAR_INPUT\n  a : INT;\nEND_VAR\n"; break;
    }
    out += "VAR\n  x : INT;\n  y : INT;\n";
    for (const std::string& d : decls) out += "  " + d + "\n";
    out += "END_VAR\n";
    out += body;
    switch (s.kind) {
      case Kind::Program: out += "END_PROGRAM\n"; break;
      case Kind::Fb: out += "ACTION reset:\n  x := 0;\nEND_ACTION\nEND_FUNCTION_BLOCK\n"; break;
      case Kind::Function: out += s.name + " := x;\nEND_FUNCTION\n"; break;
    }
    return out;
  }

  std::mt19937 rng_;
  std::vector<Spec> pous_;
  std::vector<std::string> globals_;
  std::vector<std::pair<std::string, std::string>> instances_;
  int instance_counter_ = 0;
};

bool is_reserved(const std::string& upper) {
  static const std::set<std::string> words = {"IF", "THEN", "ELSE", "ELSIF", "END_IF", "CASE", "OF", "END_CASE",
                                              "AND", "OR", "NOT", "TRUE", "FALSE"};
  return words.contains(upper);
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

} // namespace

SyntheticProject random_project(std::uint32_t seed, int max_pous) { return Generator(seed, max_pous).run(); }

SyntheticProject deep_chain(std::uint32_t seed, int depth) {
  std::mt19937 rng(seed);
  SyntheticProject p;
  std::string text;
  auto name = [](int i) { return i == 0 ? std::string("Main") : fmt::format("Layer{}", i); };
  std::vector<bool> is_fb(depth + 1, false);
  for (int i = 1; i <= depth; ++i) is_fb[i] = rng() % 2 == 0;
  for (int i = 0; i <= depth; ++i) {
    const bool fb = is_fb[i];
    text += fmt::format("{} {}\nVAR\n  x : INT;\n", fb ? "FUNCTION_BLOCK" : "PROGRAM", name(i));
    if (i < depth && is_fb[i + 1]) text += fmt::format("  child : {};\n", name(i + 1));
    text += "END_VAR\n";
    text += fmt::format("x := x + {};\n", rng() % 10);
    if (i < depth) text += is_fb[i + 1] ? "child();\n" : name(i + 1) + "();\n";
    text += fb ? "END_FUNCTION_BLOCK\n\n" : "END_PROGRAM\n\n";
  }
  p.files.push_back({"chain.st", text});
  p.tasks = "task main cycle 10 entry Main\n";
  return p;
}

SyntheticProject global_star(std::uint32_t seed, int leaves) {
  std::mt19937 rng(seed);
  SyntheticProject p;
  std::string main = "PROGRAM Main\n";
  std::string text;
  std::string globals = "VAR_GLOBAL\n";
  for (int i = 0; i < leaves; ++i) {
    globals += fmt::format("  s{} : INT := {};\n", i, rng() % 5);
    main += fmt::format("Leaf{}();\n", i);
    text += fmt::format("PROGRAM Leaf{}\ns{} := s{} + s{};\nEND_PROGRAM\n\n", i, i, (i + 1) % leaves, (i + 2) % leaves);
  }
  main += "END_PROGRAM\n";
  globals += "END_VAR\n";
  p.files.push_back({"main.st", main});
  p.files.push_back({"leaves.st", text});
  p.files.push_back({"globals.st", globals});
  p.tasks = "task main cycle 10 entry Main\n";
  return p;
}

ProjectLoad load(const SyntheticProject& p) { return parse_project("synthetic", p.files, p.tasks); }

OracleResult brute_force(const SyntheticProject& p) {
  struct PouText {
    std::string name;
    bool is_fb = false;
    std::map<std::string, std::string> decls; // name -> type
    std::vector<std::string> body;
  };
  std::vector<PouText> pous;
  std::set<std::string> globals;

  static const std::regex header(R"(^\s*(PROGRAM|FUNCTION_BLOCK|FUNCTION)\s+([A-Za-z_]\w*))");
  static const std::regex footer(R"(^\s*END_(PROGRAM|FUNCTION_BLOCK|FUNCTION)\b)");
  static const std::regex section(R"(^\s*VAR(_INPUT|_OUTPUT|_IN_OUT|_TEMP|_GLOBAL)?\b)");
  static const std::regex decl(R"(^\s*([A-Za-z_]\w*)\s*:\s*([A-Za-z_]\w*))");
  static const std::regex action(R"(^\s*(END_)?ACTION\b)");

  for (const SourceFile& f : p.files) {
    std::istringstream in(f.text);
    std::string line;
    PouText* cur = nullptr;
    bool in_section = false;
    bool global_section = false;
    std::smatch m;
    while (std::getline(in, line)) {
      if (in_section) {
        if (line.find("END_VAR") != std::string::npos) {
          in_section = false;
        } else if (std::regex_search(line, m, decl)) {
          if (global_section) globals.insert(m[1]);
          else if (cur != nullptr) cur->decls[m[1]] = m[2];
        }
      } else if (std::regex_search(line, m, section)) {
        in_section = true;
        global_section = m[1] == "_GLOBAL";
      } else if (std::regex_search(line, m, footer)) {
        cur = nullptr;
      } else if (std::regex_search(line, m, header)) {
        pous.push_back(PouText{m[2], m[1] == "FUNCTION_BLOCK", {}, {}});
        cur = &pous.back();
      } else if (std::regex_search(line, action)) {
        continue;
      } else if (cur != nullptr) {
        cur->body.push_back(line);
      }
    }
  }

  std::map<std::string, bool> project; // name -> is FB
  for (const PouText& pt : pous) project[pt.name] = pt.is_fb;

  static const std::regex call(R"(([A-Za-z_]\w*)(\.[A-Za-z_]\w*)?\s*\()");
  static const std::regex assign(R"(^\s*([A-Za-z_]\w*)\s*:=)");
  static const std::regex ident(R"([A-Za-z_]\w*)");

  OracleResult result;
  std::map<std::string, std::set<std::string>> writers;
  std::map<std::string, std::set<std::string>> readers;
  for (const PouText& pt : pous) {
    std::map<std::string, std::set<std::string>> handles;
    std::map<std::string, int> sites;
    int site_no = 0;
    for (const std::string& line : pt.body) {
      for (auto it = std::sregex_iterator(line.begin(), line.end(), call); it != std::sregex_iterator(); ++it) {
        const std::string root = (*it)[1];
        const bool dotted = (*it)[2].matched;
        std::string callee;
        std::string handle;
        if (auto d = pt.decls.find(root); d != pt.decls.end()) {
          callee = d->second;
          handle = "instance:" + root;
        } else {
          callee = dotted ? root + std::string((*it)[2]) : root;
          handle = fmt::format("site:{}", site_no);
        }
        ++site_no;
        handles[callee].insert(handle);
        ++sites[callee];
      }

      std::smatch m;
      std::string rest = line;
      if (std::regex_search(line, m, assign)) {
        if (globals.contains(m[1]) && !pt.decls.contains(m[1])) writers[m[1]].insert(pt.name);
        rest = m.suffix();
      }
      for (auto it = std::sregex_iterator(rest.begin(), rest.end(), ident); it != std::sregex_iterator(); ++it) {
        const std::string id = (*it)[0];
        if (is_reserved(upper(id))) continue;
        if (globals.contains(id) && !pt.decls.contains(id)) readers[id].insert(pt.name);
      }
    }
    for (const auto& [callee, hs] : handles) {
      result.call_edges.push_back(OracleEdge{pt.name, callee, static_cast<int>(hs.size()), sites[callee]});
    }
  }
  std::sort(result.call_edges.begin(), result.call_edges.end());

  for (const auto& [g, ws] : writers) {
    for (const std::string& w : ws) {
      for (const std::string& r : readers[g]) {
        if (r != w) result.global_edges.emplace(w, r, g);
      }
    }
  }
  return result;
}

} // namespace swmat::testing
