#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "swmat/score.hpp"
#include "swmat/st_parser.hpp"

namespace swmat {

/// Template name -> ST text containing `@{param}` placeholders.
struct TemplateSet {
  std::map<std::string, std::string, NameLess> templates;
  std::vector<SourceFile> library; // plain .st files copied verbatim
};

/// `*.st.tpl` files become templates named after the file, `*.st` files are
/// library sources.
TemplateSet load_templates(const std::filesystem::path& dir);

/// Placeholder names in order of first appearance.
std::vector<std::string> placeholders(std::string_view text);

struct InstanceConfig {
  std::string name;
  std::string template_name;
  std::map<std::string, std::string> params; // ST source text per parameter
};

struct ModuleConfig {
  std::vector<InstanceConfig> instances;
  std::string supervisory = "Supervisor";
  std::string mode_variable = "_plcMod";
  std::vector<std::string> modes = {"PLCMODSETUP", "PLCMODAUTOMATIC", "PLCMODREINIT", "PLCMODERROR", "PLCMODSTOP"};
  int cycle_ms = 10;
};

ModuleConfig parse_module_config(std::string_view json_text, std::string_view file = "config");

enum class LineOrigin { Template, Configuration };

struct GeneratedFile {
  std::string path; // relative to the output directory
  std::string text;
  std::vector<LineOrigin> origins; // one per line; empty for non-source files
};

struct GeneratedProject {
  std::vector<GeneratedFile> files;

  const GeneratedFile* find(std::string_view path) const;
};

/// One FUNCTION_BLOCK per template in use plus a supervisory PROGRAM that runs
/// every instance in every mode branch. A placeholder that is a whole
/// initializer is set per instance; any other placeholder in a declaration
/// must get the same value from every instance of that template. Throws
/// InputError for unknown templates and missing parameters, InvariantError for
/// placeholders outside declarations.
GeneratedProject generate_template_project(const TemplateSet& templates, const ModuleConfig& config);

struct ParameterProject {
  std::vector<SourceFile> invariable;
  std::optional<std::string> tasks; // copied when present
  std::string component_template;   // must declare its POU as @{name}
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// RFC 4180 style: comma separated, double-quoted fields with "" escapes.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// `dir` holds the invariable .st files, optional tasks.txt and exactly one
/// .st.tpl; `table` is the CSV parameter table.
ParameterProject load_parameter_project(const std::filesystem::path& dir, const std::filesystem::path& table);

GeneratedProject generate_parameter_project(const ParameterProject& project);

/// Configuration-specific lines over all emitted source lines.
Score specificity_ratio(const GeneratedProject& project);

/// Parses the generated sources the same way load_project would.
ProjectLoad reparse(const GeneratedProject& project, std::string name = "generated");

void write_project(const GeneratedProject& project, const std::filesystem::path& out);

} // namespace swmat
