#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "swmat/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("swmat_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    fs::create_directories((path / name).parent_path());
    std::ofstream(path / name) << text;
    return path / name;
  }
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "swmat");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = swmat::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kSchema = std::string(SWMAT_DATA) + "/schema.json";
const std::string kTankStation = std::string(SWMAT_FIXTURES) + "/tank_station";

const char* kOpAnswers = R"({"company":"A","category":"machine","answers":{
  "36":"never","37":"whole_source","38":"remote_and_on_demand","39":"very_often"}})";

} // namespace

TEST_CASE("score prints the category maturities") {
  TempDir t;
  auto answers = t.write("a.json", kOpAnswers);
  Result r = invoke({"score", "--schema", kSchema, "--answers", answers.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("M_OP: 0.7500") != std::string::npos);
  CHECK(r.out.find("M_MOD: missing") != std::string::npos);

  Result j = invoke({"score", "--schema", kSchema, "--answers", answers.string(), "--out", (t.path / "r.json").string()});
  CHECK(j.code == 0);
  CHECK(slurp(t.path / "r.json").find("\"M_OP\": 0.75") != std::string::npos);
}

TEST_CASE("exit codes") {
  TempDir t;
  fs::create_directories(t.path / "empty");
  Result empty = invoke({"analyze", (t.path / "empty").string()});
  CHECK(empty.code == 2);
  CHECK(empty.err.find("no source files") != std::string::npos);

  CHECK(invoke({}).code == 1);
  CHECK(invoke({"frobnicate"}).code == 1);
  CHECK(invoke({"score", "--schema", kSchema}).code == 1);
  CHECK(invoke({"--help"}).code == 0);
  CHECK(invoke({"analyze", kTankStation, "--governance", "magic"}).code == 1);

  Result missing = invoke({"score", "--schema", kSchema, "--answers", (t.path / "nope.json").string()});
  CHECK(missing.code == 2);

  t.write("answers/a.json", kOpAnswers);
  Result degenerate = invoke({"correlate", "--schema", kSchema, "--answers-dir", (t.path / "answers").string(),
                             "--targets", "36"});
  CHECK(degenerate.code == 3);
  CHECK(degenerate.err.find("degenerate sample") != std::string::npos);
}

TEST_CASE("analyze writes reports outside the project and leaves inputs untouched") {
  TempDir t;
  std::map<fs::path, std::string> before;
  for (const auto& e : fs::directory_iterator(kTankStation)) before[e.path()] = slurp(e.path());

  auto run_once = [&](const std::string& tag) {
    Result r = invoke({"analyze", kTankStation, "--dot", (t.path / (tag + ".dot")).string(), "--assessment",
                      (t.path / (tag + ".json")).string()});
    CHECK(r.code == 0);
  };
  run_once("a");
  run_once("b");
  CHECK(slurp(t.path / "a.dot") == slurp(t.path / "b.dot"));
  CHECK(slurp(t.path / "a.json") == slurp(t.path / "b.json"));
  CHECK(slurp(t.path / "a.dot").find("digraph") != std::string::npos);

  for (const auto& [p, text] : before) CHECK(slurp(p) == text);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(kTankStation)) ++files;
  CHECK(files == before.size());

  Result inside = invoke({"analyze", kTankStation, "--dot", kTankStation + "/out.dot"});
  CHECK(inside.code == 1);
  CHECK_FALSE(fs::exists(kTankStation + "/out.dot"));
}

TEST_CASE("cohort writes the overview, scatter plots and radars") {
  TempDir t;
  t.write("answers/a.json", kOpAnswers);
  t.write("answers/b.json", R"({"company":"B","category":"plant","answers":{"36":"rarely","15":"coordinated"}})");
  Result r = invoke({"cohort", "--schema", kSchema, "--answers-dir", (t.path / "answers").string(), "--out",
                    (t.path / "out").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("2 companies") != std::string::npos);
  CHECK(fs::exists(t.path / "out/overview.csv"));
  CHECK(fs::exists(t.path / "out/scatter_M_MOD_M_TEST.csv"));
  CHECK(fs::exists(t.path / "out/scatter_complexity_14_M_MOD.csv"));
  CHECK(fs::exists(t.path / "out/radar/A_MOD.svg"));
  CHECK(fs::exists(t.path / "out/radar/B_TEST_OP.svg"));
  std::string first = slurp(t.path / "out/overview.csv");

  Result again = invoke({"cohort", "--schema", kSchema, "--answers-dir", (t.path / "answers").string(), "--out",
                        (t.path / "out").string()});
  CHECK(again.code == 0);
  CHECK(slurp(t.path / "out/overview.csv") == first);

  Result plant = invoke({"cohort", "--schema", kSchema, "--answers-dir", (t.path / "answers").string(), "--category",
                        "plant", "--out", (t.path / "plant").string()});
  CHECK(plant.out.find("1 companies") != std::string::npos);
}

TEST_CASE("configure and schema commands") {
  TempDir t;
  t.write("tpl/Valve.st.tpl", R"(FUNCTION_BLOCK Valve
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
)");
  auto cfg = t.write("cfg.json", R"({"instances":[{"name":"v1","template":"Valve","params":{"open":true}}]})");
  Result r = invoke({"configure", "--mode", "template", "--templates", (t.path / "tpl").string(), "--config",
                    cfg.string(), "--out", (t.path / "gen").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("wrote 4 files") != std::string::npos);
  Result analysed = invoke({"analyze", (t.path / "gen").string()});
  CHECK(analysed.code == 0);
  CHECK(analysed.out.find("manual_markers: 1") != std::string::npos);

  Result s = invoke({"schema", "--out", (t.path / "schema.json").string()});
  CHECK(s.code == 0);
  CHECK(slurp(t.path / "schema.json") == slurp(kSchema));
}
