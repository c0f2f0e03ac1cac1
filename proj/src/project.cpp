#include <algorithm>
#include <fstream>
#include <future>
#include <sstream>

#include <fmt/format.h>

#include "swmat/error.hpp"
#include "swmat/graph.hpp"
#include "swmat/st_parser.hpp"

namespace swmat {

namespace {

bool shadows_globals(SectionKind k) {
  return k != SectionKind::VarGlobal && k != SectionKind::VarExternal;
}

/// Folded local name -> declaration, for sections that hide globals.
std::map<std::string, const VarDecl*> local_scope(const Pou& pou) {
  std::map<std::string, const VarDecl*> out;
  for (const VarSection& s : pou.var_sections) {
    if (!shadows_globals(s.section_kind)) continue;
    for (const VarDecl& d : s.decls) out.emplace(fold(d.name), &d);
  }
  return out;
}

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string_view strip_comment(std::string_view line) {
  if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
  return line;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot read {}", p.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

SymbolTable build_symbol_table(const Project& project) {
  SymbolTable t;
  for (const Pou& p : project.pous) t.pous.emplace(fold(p.name), PouSymbol{p.name, p.kind});
  for (const GlobalVar& g : project.globals) t.globals.emplace(fold(g.name), g);
  for (const ExternalStub& e : project.externals) t.externals.emplace(fold(e.name), e);
  return t;
}

std::vector<CallSite> extract_call_sites(const Pou& pou, const SymbolTable& symbols) {
  const auto locals = local_scope(pou);

  auto resolve_instance = [&](CallSite& cs, const std::string& type_name) {
    const std::string key = fold(type_name);
    if (auto it = symbols.pous.find(key); it != symbols.pous.end() && it->second.kind == PouKind::FunctionBlock) {
      cs.resolution = Resolution::InstanceOfFb;
      cs.target = it->second.name;
    } else if (auto ex = symbols.externals.find(key); ex != symbols.externals.end()) {
      cs.resolution = Resolution::External;
      cs.target = ex->second.name;
    } else {
      cs.resolution = Resolution::External;
      cs.target = type_name;
    }
  };

  std::vector<CallSite> out;
  for (const CallOccurrence& occ : find_calls(pou)) {
    CallSite cs;
    cs.caller = pou.name;
    cs.callee_text = occ.path;
    cs.pos = occ.pos;
    const std::string root = fold(occ.segments.front());
    if (auto it = locals.find(root); it != locals.end()) {
      resolve_instance(cs, it->second->type_name);
    } else if (auto g = symbols.globals.find(root); g != symbols.globals.end()) {
      resolve_instance(cs, g->second.type_name);
    } else if (const Action* a = occ.segments.size() == 1 ? pou.find_action(root) : nullptr) {
      cs.resolution = Resolution::LocalAction;
      cs.target = a->name;
    } else if (auto p = symbols.pous.find(root); p != symbols.pous.end()) {
      cs.resolution = Resolution::DirectPou;
      cs.target = p->second.name;
    } else if (auto e = symbols.externals.find(root); e != symbols.externals.end()) {
      cs.resolution = Resolution::External;
      cs.target = e->second.name;
    } else {
      cs.resolution = Resolution::External;
      cs.target = occ.path;
    }
    out.push_back(std::move(cs));
  }
  return out;
}

GlobalAccesses extract_global_accesses(const Pou& pou, const SymbolTable& symbols) {
  const auto locals = local_scope(pou);
  GlobalAccesses out;

  auto global_name = [&](const Token& t) -> const GlobalVar* {
    if (t.kind != TokenKind::Identifier) return nullptr;
    std::string key = fold(t.text);
    if (locals.contains(key)) return nullptr;
    auto it = symbols.globals.find(key);
    return it == symbols.globals.end() ? nullptr : &it->second;
  };

  auto scan_reads = [&](const TokenSeq& seq, std::size_t from) {
    for (std::size_t i = from; i < seq.size(); ++i) {
      if (i > 0 && seq[i - 1].is_op(".")) continue; // member, not a variable
      if (i + 1 < seq.size() && (seq[i + 1].is_op(":=") || seq[i + 1].is_op("=>"))) continue; // formal
      if (const GlobalVar* g = global_name(seq[i])) out.reads.insert(g->name);
    }
  };

  for_each_statement(pou, [&](const Statement& s) {
    if ((s.kind == StmtKind::Assign || s.kind == StmtKind::For) && !s.target.empty()) {
      if (const GlobalVar* g = global_name(s.target.front())) out.writes.insert(g->name);
      scan_reads(s.target, 1);
    }
    for (const Branch& b : s.branches) scan_reads(b.guard, 0);
    scan_reads(s.expr, 0);
  });
  return out;
}

std::vector<TaskDef> parse_tasks(std::string_view text, std::string_view file) {
  std::vector<TaskDef> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto words = split_ws(strip_comment(raw));
    if (words.empty()) continue;
    if (words.size() != 6 || !iequals(words[0], "task") || !iequals(words[2], "cycle") ||
        !iequals(words[4], "entry")) {
      throw InputError(fmt::format("{}:{}: expected 'task <name> cycle <ms> entry <pou>'", file, lineno));
    }
    TaskDef t;
    t.name = words[1];
    try {
      std::size_t used = 0;
      t.cycle_ms = std::stoi(words[3], &used);
      if (used != words[3].size() || t.cycle_ms <= 0) throw std::invalid_argument("cycle");
    } catch (const std::exception&) {
      throw InputError(fmt::format("{}:{}: cycle must be a positive integer (ms), got '{}'", file, lineno, words[3]));
    }
    t.entry = words[5];
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<ExternalStub> parse_externals(std::string_view text, std::string_view file) {
  std::vector<ExternalStub> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto words = split_ws(strip_comment(raw));
    if (words.empty()) continue;
    if (words.size() > 2) {
      throw InputError(fmt::format("{}:{}: expected '<name> [group]'", file, lineno));
    }
    out.push_back(ExternalStub{words[0], words.size() == 2 ? words[1] : std::string{}});
  }
  return out;
}

ProjectLoad parse_project(std::string name, const std::vector<SourceFile>& files,
                          std::optional<std::string> tasks_text, std::optional<std::string> externals_text) {
  if (files.empty()) throw InputError("no source files");

  // Files are independent; parse them concurrently and merge in input order.
  std::vector<std::future<FileParseResult>> jobs;
  jobs.reserve(files.size());
  for (const SourceFile& f : files) {
    jobs.push_back(std::async(files.size() > 1 ? std::launch::async : std::launch::deferred,
                              [&f] { return parse_file(f); }));
  }

  ProjectLoad load;
  Project& project = load.project;
  project.name = std::move(name);
  std::map<std::string, std::string> declared_in;
  for (std::size_t k = 0; k < files.size(); ++k) {
    FileParseResult r = jobs[k].get();
    for (std::size_t p = 0; p < r.pous.size(); ++p) {
      const std::string key = fold(r.pous[p].name);
      if (auto it = declared_in.find(key); it != declared_in.end() && it->second != files[k].path) {
        throw InputError(fmt::format("duplicate POU {} declared in {} and {}", r.pous[p].name, it->second,
                                     files[k].path));
      }
      declared_in.emplace(key, files[k].path);
      project.source_index.emplace(r.pous[p].name, r.spans[p]);
      project.pous.push_back(std::move(r.pous[p]));
    }
    project.globals.insert(project.globals.end(), r.globals.begin(), r.globals.end());
    load.diagnostics.insert(load.diagnostics.end(), r.diagnostics.begin(), r.diagnostics.end());
  }

  if (tasks_text) {
    project.tasks = parse_tasks(*tasks_text);
  } else {
    Diagnostic d;
    d.severity = Severity::Warning;
    d.file = "tasks.txt";
    d.message = "no task file; entry points default to POUs nobody calls";
    load.diagnostics.push_back(std::move(d));
  }
  if (externals_text) project.externals = parse_externals(*externals_text);

  const SymbolTable symbols = build_symbol_table(project);
  for (Pou& pou : project.pous) {
    pou.call_sites = extract_call_sites(pou, symbols);
    GlobalAccesses acc = extract_global_accesses(pou, symbols);
    pou.global_reads = std::move(acc.reads);
    pou.global_writes = std::move(acc.writes);
    pou.complexity = complexity(pou);
  }

  auto violations = validate_project(project);
  if (!violations.empty()) {
    std::string msg;
    for (const Diagnostic& d : violations) {
      if (!msg.empty()) msg += '\n';
      msg += to_string(d);
    }
    throw InvariantError(msg);
  }
  return load;
}

ProjectLoad load_project(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw InputError(fmt::format("{}: not a directory", dir.string()));
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".st") paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<SourceFile> files;
  for (const fs::path& p : paths) files.push_back(SourceFile{p.string(), read_file(p)});

  std::optional<std::string> tasks;
  if (fs::exists(dir / "tasks.txt")) tasks = read_file(dir / "tasks.txt");
  std::optional<std::string> externals;
  if (fs::exists(dir / "externals.txt")) externals = read_file(dir / "externals.txt");

  fs::path canonical = fs::weakly_canonical(dir);
  std::string name = canonical.filename().string();
  if (name.empty()) name = canonical.parent_path().filename().string();
  return parse_project(name, files, tasks, externals);
}

} // namespace swmat
