#include "swmat/configurator.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "swmat/error.hpp"

namespace swmat {

namespace {

const std::regex kPlaceholder(R"(@\{([A-Za-z_][A-Za-z0-9_]*)\})");
constexpr std::string_view kSentinel = "TPLPARAM__";

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot read {}", p.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) lines.push_back(std::move(cur));
  return lines;
}

/// Line-by-line rewrite; a line counts as configuration-specific when the
/// rewrite changed it.
template <class F>
GeneratedFile rewrite(std::string path, std::string_view text, F&& edit) {
  GeneratedFile f;
  f.path = std::move(path);
  for (const std::string& line : split_lines(text)) {
    std::string out = edit(line);
    f.origins.push_back(out == line ? LineOrigin::Template : LineOrigin::Configuration);
    f.text += out;
    f.text += '\n';
  }
  return f;
}

GeneratedFile verbatim(std::string path, std::string_view text) {
  return rewrite(std::move(path), text, [](const std::string& l) { return l; });
}

/// Builds a file from (line, origin) pairs.
class Emitter {
public:
  explicit Emitter(std::string path) { file_.path = std::move(path); }

  void line(LineOrigin o, std::string text) {
    file_.text += text;
    file_.text += '\n';
    file_.origins.push_back(o);
  }

  GeneratedFile take() { return std::move(file_); }

private:
  GeneratedFile file_;
};

std::string substitute_all(std::string_view text, const std::map<std::string, std::string>& values) {
  std::string out;
  std::string s(text);
  auto begin = std::sregex_iterator(s.begin(), s.end(), kPlaceholder);
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out.append(s, last, m.position(0) - last);
    auto v = values.find(m[1].str());
    out += v != values.end() ? v->second : m[0].str();
    last = m.position(0) + m.length(0);
  }
  out.append(s, last, std::string::npos);
  return out;
}

struct TemplateInfo {
  std::string name; // as declared by the FUNCTION_BLOCK
  std::string text;
  std::map<std::string, std::vector<std::string>> instance_params; // param -> declarations it initialises
  std::set<std::string> template_params;
};

TemplateInfo analyze_template(const std::string& name, const std::string& text) {
  TemplateInfo info;
  info.text = text;

  std::map<std::string, std::string> sentinels;
  for (const std::string& p : placeholders(text)) sentinels[p] = std::string(kSentinel) + p;
  if (text.find(kSentinel) != std::string::npos) {
    throw InputError(fmt::format("template {} uses the reserved prefix {}", name, kSentinel));
  }
  const std::string probe = substitute_all(text, sentinels);

  FileParseResult parsed = parse_file(SourceFile{name + ".st.tpl", probe});
  if (has_errors(parsed.diagnostics)) {
    const Diagnostic& d = *std::find_if(parsed.diagnostics.begin(), parsed.diagnostics.end(),
                                        [](const Diagnostic& x) { return x.severity == Severity::Error; });
    throw InputError(fmt::format("template {}: {}", name, to_string(d)));
  }
  if (parsed.pous.size() != 1 || parsed.pous.front().kind != PouKind::FunctionBlock) {
    throw InputError(fmt::format("template {} must declare exactly one FUNCTION_BLOCK", name));
  }
  const Pou& pou = parsed.pous.front();
  if (!iequals(pou.name, name)) {
    throw InputError(fmt::format("template file {} declares {}; names must match", name, pou.name));
  }
  info.name = pou.name;

  // Sentinel occurrences outside VAR ... END_VAR blocks.
  std::map<std::string, int> outside;
  bool in_var = false;
  for (const Token& t : lex(probe, name).tokens) {
    if (t.kind == TokenKind::Keyword && t.text.starts_with("VAR")) in_var = true;
    if (t.is_kw("END_VAR")) in_var = false;
    if (!in_var && t.kind == TokenKind::Identifier && t.text.starts_with(kSentinel)) ++outside[t.text];
  }

  const TokenSeq body = body_tokens(pou);
  for (const auto& [param, sentinel] : sentinels) {
    for (const Token& t : body) {
      if (t.kind == TokenKind::Identifier && t.text == sentinel) {
        throw InvariantError(fmt::format("template {}: placeholder @{{{}}} appears in the statement body", name, param));
      }
    }
    if (outside[sentinel] > 0) {
      throw InvariantError(fmt::format("template {}: placeholder @{{{}}} outside the declaration sections", name, param));
    }
    bool partial = false;
    std::vector<std::string> targets;
    for (const VarSection& s : pou.var_sections) {
      for (const VarDecl& d : s.decls) {
        if (d.initializer && *d.initializer == sentinel) {
          targets.push_back(d.name);
        } else if (d.type_name.find(sentinel) != std::string::npos ||
                   (d.initializer && d.initializer->find(sentinel) != std::string::npos)) {
          partial = true;
        }
      }
    }
    if (partial) {
      info.template_params.insert(param);
    } else {
      info.instance_params[param] = targets;
    }
  }
  return info;
}

std::string json_value_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "TRUE" : "FALSE";
  if (v.is_number()) return v.dump();
  throw InputError(fmt::format("unsupported parameter value {}", v.dump()));
}

std::string st_type_of(std::string_view value) {
  static const std::regex integer(R"([+-]?[0-9]+)");
  static const std::regex real(R"([+-]?[0-9]+\.[0-9]+([eE][+-]?[0-9]+)?)");
  std::string v(value);
  if (std::regex_match(v, integer)) return "DINT";
  if (std::regex_match(v, real)) return "LREAL";
  if (iequals(v, "TRUE") || iequals(v, "FALSE")) return "BOOL";
  return "STRING";
}

std::string st_literal(std::string_view value, std::string_view type) {
  if (type != "STRING") return std::string(value);
  if (value.size() >= 2 && value.front() == '\'' && value.back() == '\'') return std::string(value);
  std::string out = "'";
  for (char c : value) {
    if (c == '\'' || c == '$') out += '$';
    out += c;
  }
  return out + "'";
}

void check_unique_paths(const GeneratedProject& p) {
  std::set<std::string> seen;
  for (const GeneratedFile& f : p.files) {
    if (!seen.insert(fold(f.path)).second) throw InputError(fmt::format("generated file {} would be written twice", f.path));
  }
}

void check_reparses(const GeneratedProject& p) {
  ProjectLoad load = reparse(p);
  for (const Diagnostic& d : load.diagnostics) {
    if (d.severity == Severity::Error) throw InvariantError(fmt::format("generated code does not parse: {}", to_string(d)));
  }
}

} // namespace

std::vector<std::string> placeholders(std::string_view text) {
  std::vector<std::string> out;
  std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), kPlaceholder); it != std::sregex_iterator(); ++it) {
    std::string p = (*it)[1].str();
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  return out;
}

const GeneratedFile* GeneratedProject::find(std::string_view path) const {
  for (const GeneratedFile& f : files) {
    if (f.path == path) return &f;
  }
  return nullptr;
}

TemplateSet load_templates(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw InputError(fmt::format("{}: not a directory", dir.string()));
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  TemplateSet set;
  for (const fs::path& p : paths) {
    const std::string file = p.filename().string();
    if (file.size() > 7 && file.ends_with(".st.tpl")) {
      set.templates.emplace(file.substr(0, file.size() - 7), read_text(p));
    } else if (p.extension() == ".st") {
      set.library.push_back(SourceFile{file, read_text(p)});
    }
  }
  return set;
}

ModuleConfig parse_module_config(std::string_view json_text, std::string_view file) {
  ModuleConfig c;
  try {
    auto j = nlohmann::json::parse(json_text.begin(), json_text.end());
    c.supervisory = j.value("supervisory", c.supervisory);
    c.mode_variable = j.value("mode_variable", c.mode_variable);
    c.modes = j.value("modes", c.modes);
    c.cycle_ms = j.value("cycle_ms", c.cycle_ms);
    const nlohmann::json instances = j.value("instances", nlohmann::json::array());
    for (const auto& inst : instances) {
      InstanceConfig ic;
      ic.name = inst.at("name").get<std::string>();
      ic.template_name = inst.at("template").get<std::string>();
      const nlohmann::json params = inst.value("params", nlohmann::json::object());
      for (const auto& [k, v] : params.items()) ic.params[k] = json_value_text(v);
      c.instances.push_back(std::move(ic));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("{}: malformed configuration: {}", file, e.what()));
  }
  return c;
}

GeneratedProject generate_template_project(const TemplateSet& templates, const ModuleConfig& config) {
  for (const std::string& id : {config.supervisory, config.mode_variable}) {
    if (!is_identifier(id)) throw InputError(fmt::format("'{}' is not a valid identifier", id));
  }
  if (config.modes.empty()) throw InputError("at least one mode is required");
  for (const std::string& m : config.modes) {
    if (!is_identifier(m)) throw InputError(fmt::format("mode '{}' is not a valid identifier", m));
  }
  if (config.cycle_ms <= 0) throw InputError("cycle_ms must be positive");

  // Analyse each template in use once, in name order.
  std::map<std::string, TemplateInfo, NameLess> used;
  std::set<std::string> names;
  for (const InstanceConfig& inst : config.instances) {
    if (!is_identifier(inst.name)) throw InputError(fmt::format("instance name '{}' is not a valid identifier", inst.name));
    if (!names.insert(fold(inst.name)).second) throw InputError(fmt::format("duplicate instance name {}", inst.name));
    auto t = templates.templates.find(inst.template_name);
    if (t == templates.templates.end()) throw InputError(fmt::format("unknown template {}", inst.template_name));
    if (!used.contains(t->first)) used.emplace(t->first, analyze_template(t->first, t->second));
    const TemplateInfo& info = used.at(t->first);
    for (const std::string& p : placeholders(info.text)) {
      if (!inst.params.contains(p)) {
        throw InputError(fmt::format("template {}: instance {} is missing parameter {}", info.name, inst.name, p));
      }
    }
  }

  GeneratedProject out;
  for (const SourceFile& lib : templates.library) out.files.push_back(verbatim(lib.path, lib.text));

  for (const auto& [key, info] : used) {
    std::map<std::string, std::string> agreed;
    std::string first_instance;
    for (const InstanceConfig& inst : config.instances) {
      if (!iequals(inst.template_name, key)) continue;
      for (const std::string& p : info.template_params) {
        auto [it, fresh] = agreed.emplace(p, inst.params.at(p));
        if (!fresh && it->second != inst.params.at(p)) {
          throw InputError(fmt::format("template {}: instances {} and {} disagree on parameter {}, which is not a "
                                       "per-instance initializer",
                                       info.name, first_instance, inst.name, p));
        }
      }
      if (first_instance.empty()) first_instance = inst.name;
    }
    out.files.push_back(rewrite(info.name + ".st", info.text, [&](const std::string& line) {
      std::string l = line;
      for (const auto& [p, targets] : info.instance_params) {
        l = std::regex_replace(l, std::regex(R"(\s*:=\s*@\{)" + p + R"(\})"), "");
      }
      return substitute_all(l, agreed);
    }));
  }

  // Supervisory program: instance declarations and mode-propagating calls.
  Emitter sup(config.supervisory + ".st");
  const auto T = LineOrigin::Template;
  const auto C = LineOrigin::Configuration;
  sup.line(T, fmt::format("PROGRAM {}", config.supervisory));
  sup.line(T, "VAR");
  for (const InstanceConfig& inst : config.instances) {
    const TemplateInfo& info = used.at(inst.template_name);
    std::vector<std::string> inits;
    for (const auto& [p, targets] : info.instance_params) {
      for (const std::string& d : targets) inits.push_back(fmt::format("{} := {}", d, inst.params.at(p)));
    }
    if (inits.empty()) {
      sup.line(C, fmt::format("  {} : {};", inst.name, info.name));
    } else {
      sup.line(C, fmt::format("  {} : {} := ({});", inst.name, info.name, fmt::join(inits, ", ")));
    }
  }
  sup.line(T, "END_VAR");
  sup.line(T, fmt::format("CASE {} OF", config.mode_variable));
  for (const std::string& mode : config.modes) {
    sup.line(T, fmt::format("  {}:", mode));
    for (const InstanceConfig& inst : config.instances) sup.line(C, fmt::format("    {}(Mode := {});", inst.name, mode));
  }
  sup.line(T, "END_CASE;");
  sup.line(T, "(* MANUAL: interlock between modules has to be completed by hand *)");
  sup.line(T, "END_PROGRAM");
  out.files.push_back(sup.take());

  Emitter globals("globals.st");
  globals.line(T, "VAR_GLOBAL CONSTANT");
  for (std::size_t i = 0; i < config.modes.size(); ++i) {
    globals.line(T, fmt::format("  {} : INT := {};", config.modes[i], i + 1));
  }
  globals.line(T, "END_VAR");
  globals.line(T, "VAR_GLOBAL");
  globals.line(T, fmt::format("  {} : INT := {};", config.mode_variable, config.modes.front()));
  globals.line(T, "END_VAR");
  out.files.push_back(globals.take());

  GeneratedFile tasks;
  tasks.path = "tasks.txt";
  tasks.text = fmt::format("task main cycle {} entry {}\n", config.cycle_ms, config.supervisory);
  out.files.push_back(std::move(tasks));

  check_unique_paths(out);
  check_reparses(out);
  return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw InputError("unterminated quoted CSV field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

ParameterProject load_parameter_project(const std::filesystem::path& dir, const std::filesystem::path& table) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw InputError(fmt::format("{}: not a directory", dir.string()));
  ParameterProject pp;
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  int templates = 0;
  for (const fs::path& p : paths) {
    const std::string file = p.filename().string();
    if (file.ends_with(".st.tpl")) {
      ++templates;
      pp.component_template = read_text(p);
    } else if (p.extension() == ".st") {
      pp.invariable.push_back(SourceFile{file, read_text(p)});
    } else if (file == "tasks.txt") {
      pp.tasks = read_text(p);
    }
  }
  if (templates != 1) {
    throw InputError(fmt::format("{}: expected exactly one .st.tpl component template, found {}", dir.string(), templates));
  }
  auto rows = parse_csv(read_text(table));
  if (rows.empty()) throw InputError(fmt::format("{}: missing header row", table.string()));
  pp.columns = rows.front();
  for (std::string& c : pp.columns) {
    c.erase(0, c.find_first_not_of(" \t"));
    c.erase(c.find_last_not_of(" \t") + 1);
  }
  pp.rows.assign(rows.begin() + 1, rows.end());
  return pp;
}

GeneratedProject generate_parameter_project(const ParameterProject& pp) {
  const auto params = placeholders(pp.component_template);
  if (std::find(params.begin(), params.end(), "name") == params.end()) {
    throw InputError("the component template must name its POU with @{name}");
  }
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < pp.columns.size(); ++i) {
      if (pp.columns[i] == name) return i;
    }
    return std::nullopt;
  };

  std::set<std::string> taken;
  for (const SourceFile& f : pp.invariable) {
    for (const Pou& p : parse_file(f).pous) taken.insert(fold(p.name));
  }

  GeneratedProject out;
  for (const SourceFile& f : pp.invariable) out.files.push_back(verbatim(f.path, f.text));

  Emitter globals("generated_globals.st");
  bool any_global = false;
  std::set<std::string> generated;
  for (std::size_t r = 0; r < pp.rows.size(); ++r) {
    const auto& row = pp.rows[r];
    const std::size_t row_no = r + 1;
    std::map<std::string, std::string> values;
    for (const std::string& p : params) {
      auto c = column(p);
      if (!c || *c >= row.size() || row[*c].empty()) {
        throw InputError(fmt::format("row {}: missing value for template parameter {}", row_no, p));
      }
      values[p] = row[*c];
    }
    const std::string& name = values.at("name");
    if (!is_identifier(name)) throw InputError(fmt::format("row {}: '{}' is not a valid POU name", row_no, name));
    if (taken.contains(fold(name))) {
      throw InputError(fmt::format("row {}: component name {} clashes with an invariable POU", row_no, name));
    }
    if (!generated.insert(fold(name)).second) {
      throw InputError(fmt::format("row {}: duplicate component name {}", row_no, name));
    }
    out.files.push_back(rewrite(name + ".st", pp.component_template,
                                [&](const std::string& line) { return substitute_all(line, values); }));

    for (std::size_t c = 0; c < pp.columns.size(); ++c) {
      if (pp.columns[c] == "name" || c >= row.size() || row[c].empty()) continue;
      if (!is_identifier(pp.columns[c])) {
        throw InputError(fmt::format("column '{}' is not a valid identifier", pp.columns[c]));
      }
      if (!any_global) globals.line(LineOrigin::Configuration, "VAR_GLOBAL");
      any_global = true;
      const std::string type = st_type_of(row[c]);
      globals.line(LineOrigin::Configuration,
                   fmt::format("  {}_{} : {} := {};", name, pp.columns[c], type, st_literal(row[c], type)));
    }
  }
  if (any_global) {
    globals.line(LineOrigin::Configuration, "END_VAR");
    out.files.push_back(globals.take());
  }
  if (pp.tasks) {
    GeneratedFile tasks;
    tasks.path = "tasks.txt";
    tasks.text = *pp.tasks;
    out.files.push_back(std::move(tasks));
  }
  check_unique_paths(out);
  check_reparses(out);
  return out;
}

Score specificity_ratio(const GeneratedProject& project) {
  std::int64_t specific = 0;
  std::int64_t total = 0;
  for (const GeneratedFile& f : project.files) {
    for (LineOrigin o : f.origins) {
      ++total;
      specific += o == LineOrigin::Configuration ? 1 : 0;
    }
  }
  if (total == 0) return Score(0);
  return Score(specific, total);
}

ProjectLoad reparse(const GeneratedProject& project, std::string name) {
  std::vector<const GeneratedFile*> sources;
  std::optional<std::string> tasks;
  std::optional<std::string> externals;
  for (const GeneratedFile& f : project.files) {
    if (f.path.ends_with(".st")) sources.push_back(&f);
    if (f.path == "tasks.txt") tasks = f.text;
    if (f.path == "externals.txt") externals = f.text;
  }
  // same order load_project would use
  std::sort(sources.begin(), sources.end(), [](const GeneratedFile* a, const GeneratedFile* b) { return a->path < b->path; });
  std::vector<SourceFile> files;
  for (const GeneratedFile* f : sources) files.push_back(SourceFile{f->path, f->text});
  return parse_project(std::move(name), files, tasks, externals);
}

void write_project(const GeneratedProject& project, const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  for (const GeneratedFile& f : project.files) {
    std::ofstream o(out / f.path, std::ios::binary);
    if (!o) throw InputError(fmt::format("cannot write {}", (out / f.path).string()));
    o << f.text;
  }
}

} // namespace swmat
