#include "doctest.h"

#include <sstream>

#include "cli.hpp"
#include "support.hpp"

using namespace c2ao;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string fixture(const std::string& name) { return testing::fixture_path(name).string(); }

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

/// Writes `text` into the scratch directory and returns the path.
std::string write(const testing::ScratchDir& dir, const std::string& name, const std::string& text) {
  std::filesystem::path p = dir.path / name;
  std::ofstream(p) << text;
  return p.string();
}

/// Drops fields that depend on timing.
json without_timing(json j) {
  if (j.contains("explore")) j["explore"]["stats"].erase("seconds");
  if (j.contains("vcgen")) {
    for (auto& o : j["vcgen"]["obligations"]) o.erase("seconds");
  }
  return j;
}

}  // namespace

TEST_CASE("version and usage") {
  Run v = run({"--version"});
  CHECK(v.code == cli::Ok);
  CHECK(v.out == "c2ao " C2AO_VERSION "\n");
  CHECK(run({}).code == cli::Usage);
  CHECK(run({"frobnicate"}).code == cli::Usage);
  CHECK(run({"explore", fixture("add_side_effect.c"), "--max-states", "many"}).code == cli::Usage);
}

TEST_CASE("missing input file") {
  Run r = run({"extract", "no/such/file.c"});
  CHECK(r.code == cli::Usage);
  CHECK(contains(r.err, "no/such/file.c"));
}

TEST_CASE("diagnostics carry the location") {
  testing::ScratchDir dir("cli_diag");
  std::string path = write(dir, "bad.c", "int f(int* p){ return 0; }\n");
  Run r = run({"extract", path});
  CHECK(r.code == cli::Diagnostics);
  CHECK(contains(r.err, path + ":1:10: error: UnsupportedConstruct:"));
}

TEST_CASE("extract writes the model") {
  testing::ScratchDir dir("cli_extract");
  std::string out = (dir.path / "fib.abs").string();
  Run r = run({"extract", fixture("one_to_fib.c"), "-o", out});
  REQUIRE(r.code == cli::Ok);
  std::string text = testing::read_file(out);
  CHECK(contains(text, "class C_one_to_fib(Global global) implements I_one_to_fib"));
  CHECK(contains(text, "[Spec : Ensures(result >= 1 && result <= fib(n))]"));

  Run spec = run({"extract", fixture("add_side_effect_spec.c")});
  REQUIRE(spec.code == cli::Ok);
  std::size_t iface = spec.out.find("interface I_id_set_x {");
  REQUIRE(iface != std::string::npos);
  std::size_t req = spec.out.find("[Spec : Requires(val == 1)]", iface);
  std::size_t call = spec.out.find("Int call(Int val);", iface);
  CHECK(req != std::string::npos);
  CHECK(req < call);
}

TEST_CASE("explore output and exit codes") {
  Run side = run({"explore", fixture("add_side_effect.c"), "--entry", "main"});
  CHECK(side.code == cli::Ok);
  CHECK(contains(side.out, "values: {1, 2}"));

  Run fib = run({"explore", fixture("one_to_fib.c"), "--entry", "one_to_fib", "--args", "3"});
  CHECK(fib.code == cli::Ok);
  CHECK(contains(fib.out, "values: {1, 2}"));

  Run budget = run({"explore", fixture("one_to_fib.c"), "--entry", "one_to_fib", "--args", "5", "--max-states", "10"});
  CHECK(budget.code == cli::Budget);

  Run pre = run({"explore", fixture("add_side_effect_spec.c"), "--entry", "id_set_x", "--args", "2"});
  CHECK(pre.code == cli::PreconditionUnmet);

  CHECK(run({"explore", fixture("one_to_fib.c"), "--entry", "nope"}).code == cli::Diagnostics);
  CHECK(run({"explore", fixture("one_to_fib.c"), "--entry", "one_to_fib", "--args", "1,2"}).code ==
        cli::Diagnostics);
}

TEST_CASE("a too narrow ensures is reported with a replayable witness") {
  testing::ScratchDir dir("cli_witness");
  std::string src = testing::replace_line(testing::fixture("add_side_effect_spec.c"),
                                          "/*@ ensures \\result == 1 || \\result == 2; @*/ {",
                                          "/*@ ensures \\result == 1; @*/ {");
  std::string path = write(dir, "narrow.c", src);
  std::string witness = (dir.path / "w.json").string();
  Run r = run({"explore", path, "--json", "-", "--save-witness", witness});
  CHECK(r.code == cli::Failed);
  json j = json::parse(r.out);
  REQUIRE(j["explore"]["violations"].size() >= 1);
  CHECK(j["explore"]["violations"][0]["kind"] == "EnsuresFailed");
  CHECK(j["explore"]["violations"][0]["method"] == "call");
  CHECK(j["explore"]["violations"][0]["witness"].is_array());

  Run replay = run({"explore", path, "--replay", witness});
  CHECK(replay.code == cli::Failed);
  CHECK(contains(replay.out, "EnsuresFailed"));
}

TEST_CASE("deadlock command") {
  Run fib = run({"deadlock", fixture("one_to_fib.c")});
  CHECK(fib.code == cli::Ok);
  CHECK(contains(fib.out, "unknown (9):"));
  CHECK(contains(fib.out, "verdict: deadlock-free for every extractable main block"));

  testing::ScratchDir dir("cli_deadlock");
  Run trivial = run({"deadlock", write(dir, "t.c", "int main(void){ return 1; }\n"), "--json"});
  CHECK(trivial.code == cli::Ok);
  CHECK(json::parse(trivial.out)["deadlock"]["unknown_count"] == 0);

  Run cycle = run({"deadlock", fixture("forwarded_future_parameter.abs")});
  CHECK(cycle.code == cli::Failed);
  CHECK(contains(cycle.out, "verdict: unresolved"));
}

TEST_CASE("verify command") {
  testing::ScratchDir dir("cli_verify");
  std::string out = (dir.path / "smt").string();
  REQUIRE(vc::solver_available(vc::default_solver()));

  Run ok = run({"verify", fixture("add_side_effect_spec.c"), "--out", out});
  CHECK(ok.code == cli::Ok);
  CHECK(std::filesystem::exists(out));

  Run missing = run({"verify", fixture("add_side_effect_spec.c"), "--solver", "c2ao-no-such-solver", "--out",
                     (dir.path / "smt2").string()});
  CHECK(missing.code == cli::SolverMissing);
  CHECK_FALSE(std::filesystem::is_empty(dir.path / "smt2"));

  Run zero = run({"verify", fixture("add_side_effect_spec.c"), "--timeout", "0"});
  CHECK(zero.code == cli::Failed);

  std::string src = testing::replace_line(testing::fixture("one_to_fib.c"), "\\result >= 1 && \\result <= fib(n)",
                                          "//@ ensures \\result >= 1 && \\result <= fib(n) - 1;");
  Run bad = run({"verify", write(dir, "bad.c", src), "--json"});
  CHECK(bad.code == cli::Failed);
  CHECK(json::parse(bad.out)["vcgen"]["summary"]["invalid"].get<int>() >= 1);
}

TEST_CASE("report schema") {
  Run r = run({"explore", fixture("add_side_effect.c"), "--json"});
  REQUIRE(r.code == cli::Ok);
  json j = json::parse(r.out);
  CHECK(j["schema_version"] == cli::kSchemaVersion);
  CHECK(j["tool_version"] == C2AO_VERSION);
  CHECK(j["input"] == fixture("add_side_effect.c"));
  CHECK(j["input_digest"] == cli::digest(testing::fixture("add_side_effect.c")));
  for (const char* key : {"entry", "args", "values", "violations", "deadlocks", "budget", "stats"}) {
    CAPTURE(key);
    CHECK(j["explore"].contains(key));
  }
  CHECK(j["explore"]["values"] == json::array({1, 2}));
  for (const char* key : {"classes", "class_count", "method_count", "helper_count"}) {
    CAPTURE(key);
    CHECK(j["extraction"].contains(key));
  }

  json d = json::parse(run({"deadlock", fixture("one_to_fib.c"), "--json"}).out);
  CHECK(d["deadlock"]["unknown_count"] == 9);
  CHECK(d["deadlock"]["verdict"] == "deadlock-free");

  json v = json::parse(run({"verify", fixture("add_side_effect_spec.c"), "--json"}).out);
  REQUIRE(v["vcgen"]["obligations"].is_array());
  for (const auto& o : v["vcgen"]["obligations"]) {
    CHECK(o.contains("name"));
    CHECK(o["status"] == "valid");
  }
}

TEST_CASE("reports are deterministic apart from timing") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"explore", fixture("one_to_fib.c"), "--entry", "one_to_fib", "--args", "4", "--json"},
           {"deadlock", fixture("one_to_fib.c"), "--json"},
           {"verify", fixture("add_side_effect_spec.c"), "--json"},
           {"extract", fixture("one_to_fib.c"), "--json"}}) {
    CAPTURE(args[0]);
    Run a = run(args), b = run(args);
    CHECK(a.code == b.code);
    CHECK(without_timing(json::parse(a.out)) == without_timing(json::parse(b.out)));
  }
}

TEST_CASE("json to a file keeps the text output") {
  testing::ScratchDir dir("cli_json_file");
  std::string path = (dir.path / "r.json").string();
  Run r = run({"explore", fixture("add_side_effect.c"), "--json", path});
  CHECK(r.code == cli::Ok);
  CHECK(contains(r.out, "values: {1, 2}"));
  CHECK(json::parse(testing::read_file(path))["explore"]["values"] == json::array({1, 2}));
}

TEST_CASE("helpers") {
  CHECK(cli::format_values({}) == "{}");
  CHECK(cli::format_values({2, -1}) == "{-1, 2}");
  CHECK(cli::parse_witness("[0, 2, 1]") == std::vector<int>{0, 2, 1});
  CHECK_THROWS(cli::parse_witness("[-1]"));
  CHECK_THROWS(cli::parse_witness("{}"));
  CHECK(cli::digest("") == "fnv1a64:cbf29ce484222325");
}
