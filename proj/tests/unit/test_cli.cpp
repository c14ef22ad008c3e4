#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "support.hpp"
#include "zoea/document.hpp"

namespace fs = std::filesystem;
using J = nlohmann::json;

namespace {

struct Ran {
  int code = -1;
  std::string out;  // stdout and stderr together
};

Ran zoea_cli(const std::string& args) {
  const std::string cmd = std::string(ZOEA_CLI_PATH) + " " + args + " 2>&1";
  Ran r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

struct Scratch {
  fs::path dir;
  Scratch() {
    static int n = 0;
    dir = fs::temp_directory_path() / ("zoea-cli-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string write(const std::string& name, const std::string& content) const {
    const fs::path p = dir / name;
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("compile is_week_day, then run the pipeline") {
  Scratch s;
  const std::string src = s.write("listing.zoea", zt::kWeekDay);
  const std::string pipeline = s.path("listing.pipeline.json");
  const Ran c = zoea_cli("compile " + src + " --emit-pipeline " + pipeline);
  INFO(c.out);
  REQUIRE(c.code == 0);
  CHECK(c.out.find("#3 solved") != std::string::npos);
  CHECK(c.out.find(R"(#3 = (if (member (in 0) (lowercase (in 1))) (const "weekday") (const "unrecognised")))") !=
        std::string::npos);
  CHECK(c.out.find(" candidates, ") != std::string::npos);

  const Ran banana = zoea_cli("run " + pipeline + " --input banana");
  CHECK(banana.code == 0);
  CHECK(J::parse(banana.out) == J::array({"unrecognised"}));
  CHECK(J::parse(zoea_cli("run " + pipeline + " --input '\"Friday\"'").out) == J::array({"weekday"}));

  const std::string fruit = s.write("fruit.json", R"(["banana"])");
  const Ran bound = zoea_cli("run " + pipeline + " --input banana --data 1=" + fruit);
  CHECK(bound.code == 0);
  CHECK(J::parse(bound.out) == J::array({"weekday"}));

  CHECK(zoea_cli("run " + pipeline).code == 2);
  CHECK(zoea_cli("run " + pipeline + " --input 3").code == 3);
  CHECK(zoea_cli("run " + s.path("missing.json") + " --input x").code == 1);
}

TEST_CASE("exit codes") {
  Scratch s;
  const Ran parse = zoea_cli("compile " + s.write("bad.zoea", "program: p\ncase: 1\n  inpt: 3 output: 4\n"));
  CHECK(parse.code == 1);
  CHECK(parse.out.find("bad.zoea:3: error [UnknownTag]") != std::string::npos);

  const std::string dup = s.write("dup.zoea", "program: p case: 1 input: 1 output: 1 case: 1 input: 2 output: 2");
  CHECK(zoea_cli("validate " + dup).code == 2);
  CHECK(zoea_cli("compile " + dup).code == 2);

  const Ran contradictory =
      zoea_cli("compile " + s.write("c.zoea", "program: p case: 1 input: 1 output: 1 case: 2 input: 1 output: 2"));
  CHECK(contradictory.code == 3);

  const Ran uses = zoea_cli("compile " + s.write("u.zoea", "program: p use: helper case: 1 input: 1 output: 1"));
  CHECK(uses.code == 2);
  CHECK(uses.out.find("UnresolvedUse") != std::string::npos);

  CHECK(zoea_cli("validate " + s.write("ok.zoea", zt::kWeekDay)).code == 0);
  CHECK(zoea_cli("compile " + s.path("ok.zoea") + " --max-cost 0").code == 2);
  CHECK(zoea_cli("frobnicate").code != 0);
}

TEST_CASE("import and export") {
  Scratch s;
  const std::string src = s.write("listing.zoea", zt::kWeekDay);
  const std::string doc = s.path("listing.json");
  REQUIRE(zoea_cli("import " + src + " -o " + doc).code == 0);
  CHECK(zoea_cli("validate " + doc).code == 0);
  const zoea::Document d = zoea::document_from_json(zt::read_file(doc));
  CHECK(d.cases.size() == 4);

  const Ran exported = zoea_cli("export " + doc);
  REQUIRE(exported.code == 0);
  CHECK(zoea::same_ast(zoea::parse_zoea(exported.out), zoea::export_to_zoea(d)));

  REQUIRE(zoea_cli("import " + src + " --mode list -o " + s.path("wrapped.json")).code == 0);
  CHECK(zoea::document_from_json(zt::read_file(s.path("wrapped.json"))).cases[0].dependencies.empty());
}

TEST_CASE("compile with --json prints event records") {
  Scratch s;
  const Ran r = zoea_cli("compile --json " +
                         s.write("twostep.zoea", "program: t case: 1 input: ' a ' derive: 'a' output: 'A' "
                                                 "case: 2 input: 'b ' derive: 'b' output: 'B'"));
  REQUIRE(r.code == 0);
  std::vector<zoea::CompileEvent> events;
  std::istringstream lines(r.out);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.front() == '{') events.push_back(zoea::event_from_json(line));
  }
  CHECK_FALSE(zoea::check_event_stream(events).has_value());
}

TEST_CASE("bench over the shipped suite") {
  Scratch s;
  const std::string csv = s.path("bench.csv");
  const Ran r = zoea_cli("bench " + std::string(ZOEA_SOURCE_DIR) + "/bench/suite --repeat 1 --csv " + csv);
  INFO(r.out);
  CHECK(r.code == 0);
  CHECK(r.out.find("median") != std::string::npos);
  const std::string table = zt::read_file(csv);
  CHECK(std::count(table.begin(), table.end(), '\n') == 11);  // header and ten problems
}
