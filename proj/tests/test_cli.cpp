#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sys/wait.h>

#include "ccl/json_io.hpp"

using ccl::json;

namespace {

struct Out {
  int code = -1;
  std::string text;
};

Out ccl_cli(const std::string &args) {
  std::string cmd = std::string(CCL_BINARY) + " " + args + " 2>/dev/null";
  Out o;
  FILE *p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0)
    o.text.append(buf, n);
  int st = pclose(p);
  o.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return o;
}

std::string model(const std::string &name) {
  return std::string(CCL_SOURCE_DIR) + "/models/" + name;
}

std::string temp_file(const std::string &name, const std::string &content) {
  std::string path = std::string(CCL_BINARY_DIR) + "/" + name;
  std::ofstream(path) << content;
  return path;
}

json without_wall(json j) {
  j.erase("wall_ms");
  if (j["result"].contains("stats"))
    j["result"]["stats"].erase("wall_ms");
  return j;
}

} // namespace

TEST_CASE("cli: run reproduces the worked trace") {
  auto in = temp_file("cli_inputs.json",
                      R"([{"mtr":355555,"vote":"mbse"},{"mtr":500000,"vote":"sa"},)"
                      R"({"mtr":399999,"vote":"sa"}])");
  auto o = ccl_cli("run " + model("student_vote.arc") +
                   " --args 400000 --inputs " + in + " --oracle 0,1");
  REQUIRE(o.code == 0);
  json j = json::parse(o.text);
  CHECK(j["schema"] == 1);
  const auto &ticks = j["result"]["ticks"];
  REQUIRE(ticks.size() == 3);
  CHECK(ticks[2]["outputs"]["mbse"]["conc"] == "1.5");
  CHECK(ticks[2]["outputs"]["sa"]["conc"] == "1.0");
}

TEST_CASE("cli: validate reports diagnostics with exit code 1") {
  CHECK(ccl_cli("validate " + model("student_vote.arc")).code == 0);
  auto o = ccl_cli("validate " + model("invalid/cycle_no_delay.arc"));
  CHECK(o.code == 1);
  CHECK(o.text.find("CYCLE_NO_DELAY") != std::string::npos);
  o = ccl_cli("validate " + model("invalid/type_error.arc"));
  CHECK(o.code == 1);
  CHECK(o.text.find("TYPE_MISMATCH") != std::string::npos);
}

TEST_CASE("cli: semdiff exit codes") {
  auto self = ccl_cli("semdiff " + model("controller_b.arc") + " " +
                      model("controller_b.arc") + " --input-length 2");
  CHECK(self.code == 0);
  CHECK(json::parse(self.text)["result"]["witness_count"] == 0);
  auto diff = ccl_cli("semdiff " + model("controller_b.arc") + " " +
                      model("controller_b_alt.arc") + " --input-length 2");
  CHECK(diff.code == 1);
  CHECK(ccl_cli("semdiff " + model("controller_b.arc") + " " +
                model("student_vote.arc") + " --args2 400000")
            .code == 2);
}

TEST_CASE("cli: usage and input errors exit with 2") {
  CHECK(ccl_cli("").code == 2);
  CHECK(ccl_cli("dse " + model("missing.arc")).code == 2);
  CHECK(ccl_cli("dse " + model("controller_b.arc") + " --controller nope").code == 2);
  CHECK(ccl_cli("run " + model("student_vote.arc") + " --inputs /nonexistent").code == 2);
}

TEST_CASE("cli: same seed gives the same payload") {
  std::string cmd = "dse " + model("controller_b.arc") +
                    " --controller random-input --iterations 5 --seed 42 "
                    "--input-length 3";
  auto a = ccl_cli(cmd), b = ccl_cli(cmd);
  REQUIRE(a.code == 0);
  CHECK(without_wall(json::parse(a.text)) == without_wall(json::parse(b.text)));
}

TEST_CASE("cli: metrics, brute and sweep emit their reports") {
  auto m = ccl_cli("metrics " + model("student_vote.arc") +
                   " --args 400000 --input-length 3 --nondet existence");
  REQUIRE(m.code == 0);
  json j = json::parse(m.text)["result"];
  CHECK(j["coverage"]["transition_ratio"] == 1.0);
  CHECK(j.contains("minimality"));
  CHECK(j.contains("redundancy"));
  CHECK(j["nondet"]["mode"] == "existence");

  auto d = temp_file("cli_domain.json", R"({"x":[0,6,10,12]})");
  auto b = ccl_cli("brute " + model("controller_b.arc") + " " +
                   model("controller_b_alt.arc") + " --domain " + d +
                   " --input-length 2");
  CHECK(b.code == 1);
  CHECK(json::parse(b.text)["result"]["runs"] == 16);

  auto s = ccl_cli("sweep " + model("controller_b.arc") +
                   " --controller pc-gc --input-length 3 --timeouts 1,5,10,30");
  REQUIRE(s.code == 0);
  json rows = json::parse(s.text)["result"]["rows"];
  REQUIRE(rows.size() == 4);
  for (const auto &r : rows) {
    CHECK(r["time_improvement"].get<double>() <= 1.0);
    CHECK(r["result_deterioration"].get<double>() <= 1.0);
  }
}
