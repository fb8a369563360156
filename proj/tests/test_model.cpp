#include "doctest.h"

#include "c2ao/model/model.hpp"
#include "support.hpp"

using namespace c2ao;
using namespace c2ao::model;

namespace {

Model golden_model(const std::string& name) { return read_abs(testing::golden(name)); }

MethodSig* sig(Model& m, const std::string& iface, const std::string& method) {
  for (auto& i : m.interfaces) {
    if (i.name != iface) continue;
    for (auto& s : i.methods) {
      if (s.name == method) return &s;
    }
  }
  return nullptr;
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("the side-effect model is well formed") {
  Model m = golden_model("add_side_effect.abs");
  CHECK(well_formed(m).empty());
  REQUIRE(m.main_block);
  CHECK(m.find_class("Global"));
  CHECK(m.find_class("C_main"));
  CHECK(m.find_class("C_id_set_x"));
  CHECK(m.implementor("I_main") == m.find_class("C_main"));
  const MethodSig* op = m.contract(*m.find_class("C_main"), "op_plus_fut_fut");
  REQUIRE(op);
  REQUIRE(op->ensures_clause);
  CHECK(print(op->ensures_clause) == "valueOf(fut_arg1) + valueOf(fut_arg2) == result");
}

TEST_CASE("valueOf of a non-future parameter is rejected") {
  Model m = golden_model("add_side_effect.abs");
  MethodSig* s = sig(m, "I_id_set_x", "call");
  REQUIRE(s);
  s->requires_clause = ex::binary(BinOp::Eq, ex::value_of("val"), ex::int_lit(1));
  auto diags = well_formed(m);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].kind == DiagKind::WellFormedness);
  CHECK(contains(diags[0].message, "val"));
}

TEST_CASE("a call to an undeclared method is rejected") {
  Model m = golden_model("add_side_effect.abs");
  ModelClass* c = m.find_class("C_main");
  REQUIRE(c);
  REQUIRE(c->methods[0].body[0].kind == Stmt::Kind::AsyncCall);
  c->methods[0].body[0].method = "nope";
  auto diags = well_formed(m);
  REQUIRE(diags.size() == 1);
  CHECK(contains(diags[0].message, "nope"));
}

TEST_CASE("emitted text of operator helpers") {
  std::string text = emit_abs(golden_model("add_side_effect.abs"));
  CHECK(contains(text, "Int op_plus_fut_fut(Fut<Int> fut_arg1, Fut<Int> fut_arg2)"));
  CHECK(contains(text, "await fut_arg1? & fut_arg2?;"));
  CHECK(contains(text, "[Spec : ObjInv(global != null)]"));
}

TEST_CASE("empty model") {
  Model empty;
  CHECK(well_formed(empty).empty());
  CHECK(emit_abs(empty) == "{ }\n");
  Model with_main;
  with_main.main_block = std::vector<Stmt>{};
  CHECK(emit_abs(with_main) == "{ }\n");
}

TEST_CASE("strong invariant annotations are emitted") {
  std::string text = emit_abs(testing::extract_fixture("one_to_fib.c"));
  CHECK(contains(text, "[Spec : ObjInv(this.x == 0 || this.x == 1)]"));
  CHECK(contains(text, "def Int fib(Int n)"));
}

TEST_CASE("emission is deterministic and reads back") {
  for (const char* name : {"add_side_effect.c", "add_side_effect_spec.c", "one_to_fib.c", "global_future_write.c"}) {
    CAPTURE(name);
    Model m = testing::extract_fixture(name);
    std::string a = emit_abs(m);
    CHECK(a == emit_abs(testing::extract_fixture(name)));
    Model back = read_abs(a);
    CHECK(same(m, back));
    CHECK(emit_abs(back) == a);
    CHECK(well_formed(back).empty());
  }
}

TEST_CASE("golden files are a fixed point of read and emit") {
  for (const char* name : {"add_side_effect.abs", "global_future_write.abs"}) {
    CAPTURE(name);
    std::string text = testing::golden(name);
    CHECK(emit_abs(read_abs(text)) == text);
  }
}

TEST_CASE("malformed model text is a syntax error") {
  try {
    read_abs("class C { Int m() { return 1 } }");
    FAIL("expected a syntax error");
  } catch (const DiagnosticError& e) {
    CHECK(e.kind() == DiagKind::SyntaxError);
  }
}

TEST_CASE("statement traversal visits nested bodies") {
  Model m = testing::extract_source(
      "int g; int f(const int n){ if (n > 0) { g = 1; } else { g = 2; } return g; }");
  const ModelClass* c = m.find_class("C_f");
  REQUIRE(c);
  std::size_t assigns_or_calls = 0, ifs = 0;
  for_each_stmt(c->find("call")->body, [&](const Stmt& s) {
    if (s.kind == Stmt::Kind::If) ++ifs;
    if (s.kind == Stmt::Kind::AsyncCall) ++assigns_or_calls;
  });
  CHECK(ifs == 1);
  CHECK(assigns_or_calls >= 3);
}

TEST_CASE("type rendering") {
  CHECK(Type::int_().str() == "Int");
  CHECK(Type::fut().str() == "Fut<Int>");
  CHECK(Type::fut(Type::Kind::Unit).str() == "Fut<Unit>");
  CHECK(Type::ref_to("I_main").str() == "I_main");
  CHECK(Type::fut() == Type::fut(Type::Kind::Int));
  CHECK_FALSE(Type::fut() == Type::int_());
}
