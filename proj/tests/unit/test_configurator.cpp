#include "doctest.h"

#include <random>

#include <fmt/format.h>

#include "swmat/configurator.hpp"
#include "swmat/error.hpp"
#include "swmat/graph.hpp"

using namespace swmat;

namespace {

const char* kFiller = R"(FUNCTION_BLOCK Filler
VAR_INPUT
  Mode : INT;
END_VAR
VAR
  target : REAL := @{target};
  limit : REAL := @{limit} * 2.0;
  level : REAL;
END_VAR
IF Mode = PLCMODAUTOMATIC THEN
  level := level + target;
END_IF;
IF level > limit THEN
  level := 0.0;
END_IF;
END_FUNCTION_BLOCK
)";

const char* kValve = R"(FUNCTION_BLOCK Valve
VAR_INPUT
  Mode : INT;
END_VAR
VAR
  open : BOOL := @{open};
END_VAR
IF Mode = PLCMODSTOP THEN
  open := FALSE;
END_IF;
END_FUNCTION_BLOCK
)";

TemplateSet templates() {
  TemplateSet t;
  t.templates.emplace("Filler", kFiller);
  t.templates.emplace("Valve", kValve);
  return t;
}

InstanceConfig filler(std::string name, std::string target, std::string limit = "5.0") {
  return InstanceConfig{std::move(name), "Filler", {{"target", std::move(target)}, {"limit", std::move(limit)}}};
}

const CallEdge* edge(const CallGraph& g, std::string_view from, std::string_view to) {
  for (const CallEdge& e : g.edges) {
    if (e.caller == from && e.callee == to) return &e;
  }
  return nullptr;
}

const char* kComponent = R"(FUNCTION_BLOCK @{name}
VAR
  setpoint : REAL := @{setpoint};
END_VAR
IF setpoint > @{limit} THEN
  setpoint := @{limit};
END_IF;
END_FUNCTION_BLOCK
)";

ParameterProject parameter_project(int rows) {
  ParameterProject pp;
  pp.invariable = {{"main.st", "PROGRAM Main\nVAR\n  x : INT;\nEND_VAR\nx := 1;\nEND_PROGRAM\n"},
                   {"util.st", "FUNCTION Clamp : INT\nVAR_INPUT\n  v : INT;\nEND_VAR\nClamp := v;\nEND_FUNCTION\n"}};
  pp.tasks = "task main cycle 10 entry Main\n";
  pp.component_template = kComponent;
  pp.columns = {"name", "setpoint", "limit"};
  for (int i = 0; i < rows; ++i) {
    pp.rows.push_back({fmt::format("Heater{}", i), fmt::format("{}.5", i), fmt::format("{}.0", 10 + i)});
  }
  return pp;
}

} // namespace

TEST_CASE("template mode produces one block per template and a supervisor") {
  ModuleConfig cfg;
  cfg.instances = {filler("f1", "1.0"), filler("f2", "2.5")};
  GeneratedProject out = generate_template_project(templates(), cfg);

  REQUIRE(out.find("Filler.st") != nullptr);
  REQUIRE(out.find("Supervisor.st") != nullptr);
  REQUIRE(out.find("globals.st") != nullptr);
  REQUIRE(out.find("tasks.txt") != nullptr);
  CHECK(out.find("Valve.st") == nullptr);

  const std::string& sup = out.find("Supervisor.st")->text;
  CHECK(sup.find("f1 : Filler := (target := 1.0);") != std::string::npos);
  CHECK(sup.find("f2 : Filler := (target := 2.5);") != std::string::npos);
  CHECK(out.find("Filler.st")->text.find("limit : REAL := 5.0 * 2.0;") != std::string::npos);
  CHECK(out.find("Filler.st")->text.find("@{") == std::string::npos);

  ProjectLoad load = reparse(out);
  REQUIRE_FALSE(has_errors(load.diagnostics));
  CallGraph g = build_call_graph(load.project);
  const CallEdge* e = edge(g, "Supervisor", "Filler");
  REQUIRE(e != nullptr);
  CHECK(e->multiplicity == 2);
  CHECK(e->call_sites == 2 * static_cast<int>(cfg.modes.size()));
}

TEST_CASE("template bodies keep their token stream") {
  ModuleConfig cfg;
  cfg.instances = {filler("f1", "1.0"), {"v1", "Valve", {{"open", "TRUE"}}}};
  GeneratedProject out = generate_template_project(templates(), cfg);
  ProjectLoad load = reparse(out);
  REQUIRE_FALSE(has_errors(load.diagnostics));
  for (const auto& [name, text] : templates().templates) {
    FileParseResult original = parse_file({name + ".st.tpl", text});
    REQUIRE(original.pous.size() == 1);
    const Pou* generated = load.project.find_pou(name);
    REQUIRE(generated != nullptr);
    CHECK(body_tokens(*generated) == body_tokens(original.pous.front()));
  }
}

TEST_CASE("template mode with no instances") {
  GeneratedProject out = generate_template_project(templates(), ModuleConfig{});
  ProjectLoad load = reparse(out);
  CHECK_FALSE(has_errors(load.diagnostics));
  CHECK(load.project.find_pou("Supervisor") != nullptr);
  CHECK(specificity_ratio(out) == Score(0));
}

TEST_CASE("template mode errors") {
  ModuleConfig cfg;
  cfg.instances = {{"x", "Pump", {}}};
  CHECK_THROWS_WITH_AS(generate_template_project(templates(), cfg), doctest::Contains("unknown template Pump"),
                       InputError);

  cfg.instances = {{"f1", "Filler", {{"target", "1.0"}}}};
  CHECK_THROWS_WITH_AS(generate_template_project(templates(), cfg),
                       doctest::Contains("template Filler: instance f1 is missing parameter limit"), InputError);

  cfg.instances = {filler("f1", "1.0", "5.0"), filler("f2", "1.0", "6.0")};
  CHECK_THROWS_WITH_AS(generate_template_project(templates(), cfg), doctest::Contains("disagree on parameter limit"),
                       InputError);

  cfg.instances = {filler("f1", "1.0"), filler("F1", "1.0")};
  CHECK_THROWS_WITH_AS(generate_template_project(templates(), cfg), doctest::Contains("duplicate instance name"),
                       InputError);

  TemplateSet bad;
  bad.templates.emplace("Bad", R"(FUNCTION_BLOCK Bad
VAR
  x : INT;
END_VAR
x := @{gain};
END_FUNCTION_BLOCK
)");
  cfg.instances = {{"b", "Bad", {{"gain", "2"}}}};
  CHECK_THROWS_WITH_AS(generate_template_project(bad, cfg), doctest::Contains("statement body"), InvariantError);

  TemplateSet misnamed;
  misnamed.templates.emplace("Other", "FUNCTION_BLOCK Thing\nEND_FUNCTION_BLOCK\n");
  cfg.instances = {{"t", "Other", {}}};
  CHECK_THROWS_AS(generate_template_project(misnamed, cfg), InputError);
}

TEST_CASE("module config JSON") {
  ModuleConfig c = parse_module_config(R"({
    "supervisory": "Cell",
    "cycle_ms": 20,
    "instances": [
      {"name": "f1", "template": "Filler", "params": {"target": 1.5, "limit": "3.0"}},
      {"name": "v1", "template": "Valve", "params": {"open": true}}
    ]
  })");
  CHECK(c.supervisory == "Cell");
  CHECK(c.cycle_ms == 20);
  CHECK(c.mode_variable == "_plcMod");
  REQUIRE(c.instances.size() == 2);
  CHECK(c.instances[0].params.at("target") == "1.5");
  CHECK(c.instances[0].params.at("limit") == "3.0");
  CHECK(c.instances[1].params.at("open") == "TRUE");
  CHECK_THROWS_WITH_AS(parse_module_config("{", "cfg.json"), doctest::Contains("cfg.json"), InputError);
  CHECK_THROWS_AS(parse_module_config(R"({"instances":[{"name":"x"}]})"), InputError);
}

TEST_CASE("parameter mode generates one POU per row") {
  ParameterProject pp = parameter_project(3);
  GeneratedProject out = generate_parameter_project(pp);
  ProjectLoad load = reparse(out);
  REQUIRE_FALSE(has_errors(load.diagnostics));
  CHECK(load.project.pous.size() == 5);
  CHECK(load.project.find_pou("Heater2") != nullptr);
  CHECK(out.find("generated_globals.st") != nullptr);
  CHECK(load.project.find_global("Heater1_setpoint") != nullptr);
  CHECK(load.project.find_global("Heater1_limit") != nullptr);
  CHECK(out.find("Heater1.st")->text.find("IF setpoint > 11.0 THEN") != std::string::npos);
  CHECK(out.find("tasks.txt")->text == *pp.tasks);

  GeneratedProject empty = generate_parameter_project(parameter_project(0));
  ProjectLoad e = reparse(empty);
  CHECK_FALSE(has_errors(e.diagnostics));
  CHECK(e.project.pous.size() == 2);
  CHECK(empty.find("generated_globals.st") == nullptr);
  CHECK(specificity_ratio(empty) == Score(0));
}

TEST_CASE("parameter mode errors") {
  ParameterProject dup = parameter_project(2);
  dup.rows[1][0] = "heater0";
  CHECK_THROWS_WITH_AS(generate_parameter_project(dup), doctest::Contains("row 2: duplicate component name"),
                       InputError);

  ParameterProject missing = parameter_project(3);
  missing.rows[2][2] = "";
  CHECK_THROWS_WITH_AS(generate_parameter_project(missing),
                       doctest::Contains("row 3: missing value for template parameter limit"), InputError);

  ParameterProject clash = parameter_project(1);
  clash.rows[0][0] = "Main";
  CHECK_THROWS_WITH_AS(generate_parameter_project(clash), doctest::Contains("clashes"), InputError);

  ParameterProject unnamed = parameter_project(1);
  unnamed.component_template = "FUNCTION_BLOCK Fixed\nEND_FUNCTION_BLOCK\n";
  CHECK_THROWS_AS(generate_parameter_project(unnamed), InputError);
}

TEST_CASE("specificity ratio counts configuration lines") {
  GeneratedProject p;
  GeneratedFile a;
  a.path = "a.st";
  a.origins.assign(70, LineOrigin::Template);
  GeneratedFile b;
  b.path = "b.st";
  b.origins.assign(30, LineOrigin::Configuration);
  p.files = {a, b};
  CHECK(specificity_ratio(p) == Score(30, 100));
  CHECK(specificity_ratio(GeneratedProject{}) == Score(0));

  ModuleConfig cfg;
  cfg.instances = {filler("f1", "1.0"), filler("f2", "2.0")};
  GeneratedProject out = generate_template_project(templates(), cfg);
  Score s = specificity_ratio(out);
  CHECK(s > Score(0));
  CHECK(s < Score(1));
}

TEST_CASE("generation is deterministic") {
  ModuleConfig cfg;
  cfg.instances = {filler("f1", "1.0"), {"v1", "Valve", {{"open", "FALSE"}}}, filler("f2", "3.0")};
  GeneratedProject a = generate_template_project(templates(), cfg);
  GeneratedProject b = generate_template_project(templates(), cfg);
  REQUIRE(a.files.size() == b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    CHECK(a.files[i].path == b.files[i].path);
    CHECK(a.files[i].text == b.files[i].text);
  }
  GeneratedProject c = generate_parameter_project(parameter_project(4));
  GeneratedProject d = generate_parameter_project(parameter_project(4));
  REQUIRE(c.files.size() == d.files.size());
  for (std::size_t i = 0; i < c.files.size(); ++i) CHECK(c.files[i].text == d.files[i].text);
}

TEST_CASE("random template configurations re-parse") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    ModuleConfig cfg;
    const int n = static_cast<int>(rng() % 6);
    int fillers = 0;
    for (int i = 0; i < n; ++i) {
      if (rng() % 2) {
        cfg.instances.push_back(filler(fmt::format("f{}", i), fmt::format("{}.0", rng() % 50)));
        ++fillers;
      } else {
        cfg.instances.push_back({fmt::format("v{}", i), "Valve", {{"open", rng() % 2 ? "TRUE" : "FALSE"}}});
      }
    }
    GeneratedProject out = generate_template_project(templates(), cfg);
    ProjectLoad load = reparse(out);
    REQUIRE_FALSE(has_errors(load.diagnostics));
    CallGraph g = build_call_graph(load.project);
    const CallEdge* e = edge(g, "Supervisor", "Filler");
    if (fillers == 0) {
      CHECK(e == nullptr);
    } else {
      REQUIRE(e != nullptr);
      CHECK(e->multiplicity == fillers);
    }
  }
}

TEST_CASE("csv parsing") {
  auto rows = parse_csv("a,b,c\r\n1,\"x, y\",\"say \"\"hi\"\"\"\n\n2,,3");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{"a", "b", "c"});
  CHECK(rows[1] == std::vector<std::string>{"1", "x, y", "say \"hi\""});
  CHECK(rows[2] == std::vector<std::string>{"2", "", "3"});
  CHECK(parse_csv("").empty());
  CHECK_THROWS_AS(parse_csv("a,\"b"), InputError);
}

TEST_CASE("placeholders are listed in order of appearance") {
  CHECK(placeholders("@{b} @{a} @{b} @{ not} @{c_1}") == std::vector<std::string>{"b", "a", "c_1"});
}
