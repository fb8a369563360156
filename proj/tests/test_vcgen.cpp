#include "doctest.h"

#include <filesystem>

#include "c2ao/vcgen/vcgen.hpp"
#include "support.hpp"

using namespace c2ao;
using namespace c2ao::vc;

namespace fs = std::filesystem;

namespace {

const char* kReturnOne = R"(
interface I {
  [Spec : Ensures(result == 1)]
  Int m();
}

class C implements I {
  Int m() {
    return 1;
  }
}

{ }
)";

DischargeOptions solver_options() {
  DischargeOptions o;
  o.solver = default_solver();
  o.timeout_seconds = 30;
  return o;
}

std::map<Status::Kind, std::size_t> verify(const model::Model& m) {
  Generation g = generate(m);
  REQUIRE(g.unverifiable.empty());
  std::map<Status::Kind, std::size_t> out;
  for (const auto& s : discharge(m, g.obligations, solver_options())) ++out[s.kind];
  return out;
}

std::string fib_with_ensures(const std::string& clause) {
  return testing::replace_line(testing::fixture("one_to_fib.c"), "\\result >= 1 && \\result <= fib(n)",
                               "//@ ensures " + clause + ";");
}

}  // namespace

TEST_CASE("a constant return gives one obligation") {
  model::Model m = model::read_abs(kReturnOne);
  Generation g = generate(m);
  REQUIRE(g.obligations.size() == 1);
  const Obligation& o = g.obligations[0];
  CHECK(o.kind == "ensures");
  CHECK(o.cls == "C");
  CHECK(o.method == "m");
  // Only the receiver's non-nullness is assumed.
  REQUIRE(o.hypotheses.size() == 1);
  CHECK(print(o.hypotheses[0]) == "this != null");
  CHECK(print(o.goal) == "1 == 1");
}

TEST_CASE("script shape") {
  model::Model m = model::read_abs(kReturnOne);
  std::string script = emit_smtlib(m, generate(m).obligations.at(0));
  CHECK(script.find("(assert (not (=> ") != std::string::npos);
  CHECK(script.find("(check-sat)") != std::string::npos);

  model::Model fib = testing::extract_fixture("one_to_fib.c");
  bool saw_rec = false;
  for (const auto& o : generate(fib).obligations) {
    if (emit_smtlib(fib, o).find("(define-funs-rec") != std::string::npos) saw_rec = true;
  }
  CHECK(saw_rec);
}

TEST_CASE("terms") {
  CHECK(smt_term(ex::int_lit(-3)) == "(- 3)");
  CHECK(smt_term(ex::binary(BinOp::Ne, ex::var("a"), ex::null())) == "(not (= |a| |null|))");
  CHECK(smt_term(ex::binary(BinOp::Implies, ex::var("p"), ex::var("q"))) == "(=> |p| |q|)");
  CHECK(smt_term(ex::value_of("fut_arg1")) == "|valueOf(fut_arg1)|");
  CHECK(smt_term(ex::field("x")) == "|this.x|");
}

TEST_CASE("solver answers for hand-built obligations") {
  REQUIRE(solver_available(default_solver()));
  model::Model empty;
  Obligation trivial;
  trivial.name = "trivial";
  trivial.goal = ex::bool_lit(true);
  Obligation wrong;
  wrong.name = "wrong";
  wrong.goal = ex::binary(BinOp::Eq, ex::var("x"), ex::int_lit(1));
  wrong.symbols["x"] = Sort::Int;
  auto st = discharge(empty, {trivial, wrong}, solver_options());
  REQUIRE(st.size() == 2);
  CHECK(st[0].kind == Status::Kind::Valid);
  CHECK(st[1].kind == Status::Kind::Invalid);
  CHECK(st[1].detail.find("x") != std::string::npos);
}

TEST_CASE("fib program verifies, its mutants do not") {
  REQUIRE(solver_available(default_solver()));
  auto good = verify(testing::extract_fixture("one_to_fib.c"));
  CHECK(good.size() == 1);
  CHECK(good[Status::Kind::Valid] > 0);

  for (const char* clause : {"\\result == fib(n)", "\\result >= 1 && \\result <= fib(n) - 1"}) {
    CAPTURE(clause);
    auto bad = verify(testing::extract_source(fib_with_ensures(clause)));
    CHECK(bad[Status::Kind::Invalid] >= 1);
  }
}

TEST_CASE("global-write program verifies, its mutants do not") {
  REQUIRE(solver_available(default_solver()));
  for (const char* name : {"add_side_effect_spec.c", "global_future_write.c"}) {
    CAPTURE(name);
    auto st = verify(testing::extract_fixture(name));
    CHECK(st.size() == 1);
    CHECK(st[Status::Kind::Valid] > 0);
  }
  // Main may also return 2.
  std::string narrow = testing::replace_line(testing::fixture("global_future_write.c"),
                                             "/*@ ensures \\result == 1 || \\result == 2; @*/ {",
                                             "/*@ ensures \\result == 1; @*/ {");
  CHECK(verify(testing::extract_source(narrow))[Status::Kind::Invalid] >= 1);
  // A weaker precondition no longer pins the returned value.
  std::string weak = testing::replace_line(testing::fixture("add_side_effect_spec.c"),
                                           "/*@ requires val == 1; ensures \\result == 1; @*/ {",
                                           "/*@ requires val >= 1; ensures \\result == 1; @*/ {");
  CHECK(verify(testing::extract_source(weak))[Status::Kind::Invalid] >= 1);
}

TEST_CASE("a loop without an invariant makes the method unverifiable") {
  model::Model m = testing::extract_source("int f(int n){ while (n > 0) { n = n - 1; } return n; }");
  Generation g = generate(m);
  REQUIRE(g.unverifiable.size() == 1);
  CHECK(g.unverifiable[0].method == "C_f.call");
  for (const auto& o : g.obligations) CHECK(o.cls + "." + o.method != "C_f.call");
}

TEST_CASE("a loop with an invariant yields loop obligations") {
  // Mutable locals live in fields and every await havocs fields, so only
  // invariants over constants survive an iteration.
  model::Model m = testing::extract_source(
      "int f(const int n)\n/*@ requires n >= 0; ensures \\result >= 0; @*/ {\n"
      "  int i = 0;\n  /*@ loop invariant n >= 0; */\n  while (i < n) { i = i + 1; }\n  return n; }");
  Generation g = generate(m);
  CHECK(g.unverifiable.empty());
  std::set<std::string> kinds;
  for (const auto& o : g.obligations) kinds.insert(o.kind);
  CHECK(kinds.count("loopinit") == 1);
  CHECK(kinds.count("loopinv") == 1);
  REQUIRE(solver_available(default_solver()));
  auto st = discharge(m, g.obligations, solver_options());
  for (std::size_t i = 0; i < st.size(); ++i) {
    CAPTURE(g.obligations[i].name);
    CHECK(st[i].kind == Status::Kind::Valid);
  }
}

TEST_CASE("an invariant over a mutable local is lost at await") {
  model::Model m = testing::extract_source(
      "int f(int n)\n/*@ requires n >= 0; ensures \\result == 0; @*/ {\n"
      "  /*@ loop invariant n >= 0; */\n  while (n > 0) { n = n - 1; }\n  return n; }");
  REQUIRE(solver_available(default_solver()));
  auto st = verify(m);
  CHECK(st[Status::Kind::Invalid] >= 1);
}

TEST_CASE("missing solver and zero timeout") {
  model::Model m = testing::extract_fixture("one_to_fib.c");
  Generation g = generate(m);
  REQUIRE_FALSE(g.obligations.empty());

  testing::ScratchDir dir("vcgen_missing_solver");
  DischargeOptions missing;
  missing.solver = "c2ao-no-such-solver";
  missing.out_dir = dir.path.string();
  CHECK_FALSE(solver_available(missing.solver));
  for (const auto& s : discharge(m, g.obligations, missing)) CHECK(s.kind == Status::Kind::SolverMissing);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir.path)) files += e.path().extension() == ".smt2";
  CHECK(files == g.obligations.size());

  DischargeOptions zero = solver_options();
  zero.timeout_seconds = 0;
  for (const auto& s : discharge(m, g.obligations, zero)) CHECK(s.kind == Status::Kind::Timeout);
}

TEST_CASE("generation is deterministic") {
  model::Model m = testing::extract_fixture("one_to_fib.c");
  Generation a = generate(m), b = generate(m);
  REQUIRE(a.obligations.size() == b.obligations.size());
  std::set<std::string> names;
  for (std::size_t i = 0; i < a.obligations.size(); ++i) {
    CHECK(a.obligations[i].name == b.obligations[i].name);
    CHECK(emit_smtlib(m, a.obligations[i]) == emit_smtlib(m, b.obligations[i]));
    names.insert(a.obligations[i].name);
  }
  CHECK(names.size() == a.obligations.size());
}

TEST_CASE("status names") {
  CHECK(std::string(to_string(Status::Kind::Valid)) == "valid");
  CHECK(std::string(to_string(Status::Kind::Invalid)) == "invalid");
  CHECK(std::string(to_string(Status::Kind::Timeout)) == "timeout");
  CHECK(std::string(to_string(Status::Kind::SolverMissing)) == "solver_missing");
}
