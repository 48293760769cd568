#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

using nlohmann::json;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(SPHERINT_CLI_PATH) + " " + args + " 2>/dev/null";
  std::array<char, 4096> buf{};
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    res.out.append(buf.data(), got);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string write_spectrum(const std::string& name, const std::string& body) {
  const std::string path = std::string("/tmp/spherint_test_") + name + ".txt";
  std::ofstream out(path);
  out << body;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Minimal structural validator: required keys present, primitive types match.
bool type_matches(const json& schema_type, const json& value) {
  auto one = [&](const std::string& t) {
    if (t == "object") return value.is_object();
    if (t == "array") return value.is_array();
    if (t == "string") return value.is_string();
    if (t == "boolean") return value.is_boolean();
    if (t == "integer") return value.is_number_integer() || value.is_number_unsigned();
    if (t == "number") return value.is_number();
    if (t == "null") return value.is_null();
    return false;
  };
  if (schema_type.is_string()) return one(schema_type.get<std::string>());
  for (const auto& t : schema_type)
    if (one(t.get<std::string>())) return true;
  return false;
}

void check_against_schema(const json& doc, const json& schema) {
  if (schema.contains("required"))
    for (const auto& key : schema["required"]) {
      INFO("required key: ", key.get<std::string>());
      CHECK(doc.contains(key.get<std::string>()));
    }
  if (!schema.contains("properties")) return;
  for (const auto& [key, sub] : schema["properties"].items()) {
    if (!doc.contains(key)) continue;
    if (sub.contains("type")) {
      INFO("key: ", key);
      CHECK(type_matches(sub["type"], doc[key]));
    }
    if (sub.contains("properties") && doc[key].is_object())
      check_against_schema(doc[key], sub);
    if (sub.contains("items") && doc[key].is_array() && sub["items"].is_object())
      for (const auto& item : doc[key]) check_against_schema(item, sub["items"]);
  }
}

json load_schema(const std::string& name) {
  return json::parse(slurp(std::string(SPHERINT_SCHEMA_DIR) + "/" + name));
}

}  // namespace

TEST_CASE("verify passes on a constant spectrum") {
  const auto path = write_spectrum("const", "0.5\n0.5\n0.5\n");
  auto res = run("verify --spectrum " + path + " --theta 0.05");
  CHECK(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j["pass"] == true);
  CHECK(j["schema"] == "spherint/1");
  for (const auto& c : j["checks"]) CHECK(c["pass"] == true);
}

TEST_CASE("verify runs the identity suite on a random-ish spectrum") {
  const auto path = write_spectrum("mix", "-0.9\n-0.3\n0.2\n0.4\n0.8\n");
  auto res = run("verify --spectrum " + path + " --theta 0.04");
  CHECK(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j["checks"].size() >= 9);
}

TEST_CASE("expand emits the documented flat schema") {
  const auto path = write_spectrum("two", "-1\n1\n");
  auto res = run("expand --spectrum " + path + " --theta 0.1");
  CHECK(res.exit_code == 0);
  const json j = json::parse(res.out);
  for (const char* key : {"beta", "theta", "v", "A2", "A3", "A4", "F", "G",
                          "m0", "m1", "J", "admissible", "schema"})
    CHECK(j.contains(key));
  CHECK(j["m0"].get<double>() == doctest::Approx(0.98196).epsilon(1e-4));
  CHECK(j["beta"] == 1);
  CHECK(j["admissible"] == false);
}

TEST_CASE("sweep produces a csv row per grid point with the theta=0 limit") {
  const auto path = write_spectrum("sw", "-1\n1\n");
  auto res = run("sweep --spectrum " + path + " --theta-grid 0:0.05:0.2 --output csv");
  CHECK(res.exit_code == 0);
  std::istringstream lines(res.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "theta,v,A2,m0,m1,J,admissible");
  int rows = 0, admissible = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    if (line.back() == '1') ++admissible;
  }
  CHECK(rows == 5);
  CHECK(admissible == 2);  // 0 and 0.05 are inside 1/15; 0.1+ are not
}

TEST_CASE("mc subcommand: naive json and deterministic rerun") {
  const auto path = write_spectrum("mc", "-1\n1\n");
  const std::string args =
      "mc --spectrum " + path + " --theta 0.1 --n 8 --samples 2000 --seed 42";
  auto a = run(args);
  auto b = run(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  const json j = json::parse(a.out);
  CHECK(j["n"] == 2000);
  CHECK(j["log_domain"] == true);
  CHECK(j["seed"] == 42);
}

TEST_CASE("mc csv partials") {
  const auto path = write_spectrum("mcp", "-1\n1\n");
  auto res = run("mc --spectrum " + path +
                 " --mode tilted --theta 0.05 --n 8 --samples 2000 --output csv");
  CHECK(res.exit_code == 0);
  std::istringstream lines(res.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "batch,mean,m2_accumulator,n");
}

TEST_CASE("hciz and schur subcommands") {
  const auto path = write_spectrum("h", "-1\n-0.3\n0.4\n1\n");
  auto res = run("hciz --spectrum " + path + " --theta 0.1 --n 4");
  CHECK(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j.contains("log_value"));
  CHECK(j.contains("method"));
  CHECK(j.contains("precision_used"));

  auto s = run("schur --mu 1,0 --x 2,1");
  CHECK(s.exit_code == 0);
  CHECK(json::parse(s.out)["value"].get<double>() == doctest::Approx(1.5));
}

TEST_CASE("additivity subcommand json verdict") {
  const auto path = write_spectrum("ad", "-1\n1\n");
  auto res = run("additivity --spectrum " + path + " --spectrum-b " + path +
                 " --theta 0.1 --n 6 --samples 20000 --seed 3");
  CHECK(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j["rows"].size() == 1);
  CHECK(j["rows"][0].contains("gap"));
}

TEST_CASE("output files are byte-identical across reruns") {
  const auto path = write_spectrum("det", "-0.8\n-0.1\n0.5\n");
  const std::string out1 = "/tmp/spherint_out1.json";
  const std::string out2 = "/tmp/spherint_out2.json";
  auto a = run("mc --spectrum " + path +
               " --mode tilted --theta 0.05 --samples 3000 --seed 9 --out " + out1);
  auto b = run("mc --spectrum " + path +
               " --mode tilted --theta 0.05 --samples 3000 --seed 9 --out " + out2);
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  CHECK(slurp(out1) == slurp(out2));
  CHECK(!slurp(out1).empty());
}

TEST_CASE("config errors exit with status 2") {
  CHECK(run("expand").exit_code == 2);                      // missing spectrum
  CHECK(run("bogus-subcommand").exit_code == 2);            // parse error
  CHECK(run("expand --spectrum /nonexistent.txt").exit_code == 2);
  const auto path = write_spectrum("bad", "1.0\nnot-a-number\n");
  CHECK(run("expand --spectrum " + path).exit_code == 2);
}

TEST_CASE("spectrum file header sets beta and the flag overrides it") {
  const auto path = write_spectrum("hdr", "# beta=2\n-1\n1\n");
  auto res = run("expand --spectrum " + path + " --theta 0.1");
  CHECK(json::parse(res.out)["beta"] == 2);
  auto forced = run("expand --spectrum " + path + " --theta 0.1 --beta 1");
  CHECK(json::parse(forced.out)["beta"] == 1);
}

TEST_CASE("every subcommand's json validates against its published schema") {
  const auto two = write_spectrum("sc2", "-1\n1\n");
  const auto four = write_spectrum("sc4", "-1\n-0.2\n0.3\n1\n");
  const std::string mc_common = " --samples 1000 --seed 1";

  auto check = [&](const std::string& args, const std::string& schema) {
    auto res = run(args);
    REQUIRE(res.exit_code == 0);
    check_against_schema(json::parse(res.out), load_schema(schema));
  };
  check("expand --spectrum " + two + " --theta 0.05 --n 2", "expand.schema.json");
  check("sweep --spectrum " + two + " --theta-grid 0:0.05:0.1", "sweep.schema.json");
  check("mc --spectrum " + two + " --theta 0.05 --n 8" + mc_common, "mc.schema.json");
  check("mc --mode tilted --spectrum " + two + " --theta 0.05 --n 8" + mc_common,
        "mc.schema.json");
  check("mc --mode gamma --spectrum " + two + " --theta 0.05 --n 8" + mc_common,
        "gamma.schema.json");
  check("hciz --spectrum " + four + " --theta 0.05", "hciz.schema.json");
  check("schur --mu 2,1,0 --x 0.5,1.5,2.5", "schur.schema.json");
  check("freeness --spectrum " + two + " --theta 0.05 --ns 8,16" + mc_common,
        "report.schema.json");
  check("additivity --spectrum " + two + " --spectrum-b " + two +
            " --theta 0.05 --n 4" + mc_common,
        "report.schema.json");
  check("verify --spectrum " + four + " --theta 0.04", "verify.schema.json");
  check("laplace --law rademacher", "laplace.schema.json");
  check("sphere --n 16 --epsilon 0.3" + mc_common, "sphere.schema.json");
}

TEST_CASE("the admissibility override flag") {
  const auto path = write_spectrum("ov", "-1\n1\n");
  auto plain = run("expand --spectrum " + path + " --theta 0.1");
  CHECK(json::parse(plain.out)["admissible"] == false);
  auto forced = run("expand --spectrum " + path + " --theta 0.1 --assume-admissible");
  CHECK(json::parse(forced.out)["admissible"] == true);
}
