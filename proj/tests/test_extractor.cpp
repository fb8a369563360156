#include "doctest.h"

#include <algorithm>

#include "c2ao/extract/extractor.hpp"
#include "support.hpp"

using namespace c2ao;
using model::Model;
using model::Stmt;

namespace {

std::vector<std::string> method_names(const model::ModelClass& c) {
  std::vector<std::string> out;
  for (const auto& m : c.methods) out.push_back(m.name);
  return out;
}

const model::MethodSig* sig(const Model& m, const std::string& cls, const std::string& method) {
  const model::ModelClass* c = m.find_class(cls);
  return c ? m.contract(*c, method) : nullptr;
}

std::string printed(const ExprPtr& e) { return e ? print(e) : std::string("<none>"); }

bool is_async(const Stmt& s) { return s.kind == Stmt::Kind::AsyncCall; }

}  // namespace

TEST_CASE("side-effect program: method inventory") {
  Model m = testing::extract_fixture("add_side_effect.c");
  std::vector<std::string> classes;
  for (const auto& c : m.classes) classes.push_back(c.name);
  CHECK(classes == std::vector<std::string>{"Global", "C_id_set_x", "C_main"});
  std::vector<std::string> main_methods = method_names(*m.find_class("C_main"));
  for (const char* name : {"call", "get_global_x", "call_id_set_x_val_0", "op_plus_fut_fut"}) {
    CAPTURE(name);
    CHECK(std::count(main_methods.begin(), main_methods.end(), name) == 1);
  }
  CHECK(main_methods.front() == "call");
  REQUIRE(m.main_block);
  CHECK_FALSE(m.main_block->empty());
  CHECK(m.find_interface("I_main"));
  CHECK(m.find_interface("Global"));
}

TEST_CASE("constant-returning main has no helpers") {
  Model m = testing::extract_source("int main(void){return 1;}");
  const model::ModelClass* c = m.find_class("C_main");
  REQUIRE(c);
  REQUIRE(c->methods.size() == 1);
  REQUIRE(c->methods[0].body.size() == 1);
  const Stmt& r = c->methods[0].body[0];
  CHECK(r.kind == Stmt::Kind::Return);
  CHECK(printed(r.expr) == "1");
}

TEST_CASE("literal arithmetic folds") {
  Model m = testing::extract_source("int main(void){return 1 + 2;}");
  const auto& body = m.find_class("C_main")->methods[0].body;
  REQUIRE(body.size() == 1);
  CHECK(printed(body[0].expr) == "3");
  CHECK(m.find_class("C_main")->methods.size() == 1);
}

TEST_CASE("annotated fib program: classes and empty main block") {
  Model m = testing::extract_fixture("one_to_fib.c");
  std::vector<std::string> classes;
  for (const auto& c : m.classes) classes.push_back(c.name);
  CHECK(classes == std::vector<std::string>{"Global", "C_id_set_x", "C_one_or_two", "C_pred_or_id", "C_one_to_fib"});
  // No main function: nothing to run, rendered as an empty block.
  CHECK((!m.main_block || m.main_block->empty()));
  std::string text = model::emit_abs(m);
  CHECK(text.substr(text.size() - 4) == "{ }\n");
  REQUIRE(m.logic_functions.size() == 1);
  CHECK(m.logic_functions[0].name == "fib");
}

TEST_CASE("unsequenced operands become one batch of self-calls") {
  frontend::CAst ast = frontend::parse(testing::fixture("add_side_effect.c"));
  extract::ExtractionContext ctx(ast, *ast.find_function("main"));
  ctx.translate_statement(ast.find_function("main")->body[0]);
  std::size_t after_write = ctx.statements().size();
  CHECK(ctx.statements().back().kind == Stmt::Kind::Await);
  ctx.translate_statement(ast.find_function("main")->body[1]);
  const auto& st = ctx.statements();
  REQUIRE(st.size() == after_write + 5);
  CHECK(st[after_write].method == "get_global_x");
  CHECK(st[after_write + 1].method == "call_id_set_x_val_0");
  CHECK(st[after_write + 2].method == "op_plus_fut_fut");
  for (std::size_t i = after_write; i < after_write + 3; ++i) {
    CHECK(is_async(st[i]));
    CHECK(st[i].callee == "this");
  }
  const Stmt& aw = st[after_write + 3];
  REQUIRE(aw.kind == Stmt::Kind::Await);
  CHECK(aw.guard == std::vector<std::string>{st[after_write].target, st[after_write + 1].target,
                                             st[after_write + 2].target});
  const Stmt& ret = st[after_write + 4];
  CHECK(ret.kind == Stmt::Kind::Return);
  CHECK(ret.future == st[after_write + 2].target);
}

TEST_CASE("expression translation reports operand shapes") {
  frontend::CAst ast = frontend::parse("int g; int f(const int a){ return a + g + 4 * 5; }");
  const frontend::FunctionDef& f = *ast.find_function("f");
  extract::ExtractionContext ctx(ast, f);
  std::vector<std::string> effects;
  const auto& ret = f.body[0];
  extract::Operand op = ctx.translate_expression(ret.expr->args[0], effects);  // a + g
  CHECK(op.shape == extract::Operand::Shape::Fut);
  CHECK(extract::shape_name(op) == "fut");
  CHECK(effects.empty());
  extract::Operand lit = ctx.translate_expression(ret.expr->args[1], effects);  // 4 * 5
  CHECK(lit.shape == extract::Operand::Shape::Const);
  CHECK(lit.value == 20);
  CHECK(extract::shape_name(lit) == "val");
  CHECK(ctx.outstanding().size() == 2);
}

TEST_CASE("pred_or_id matches the hand-derived translation") {
  // Derived row by row: the write and its await, then the global read, the
  // val-fut minus, the call helper and the fut-fut plus, then one await.
  const std::string expected = R"(
class C_pred_or_id(Global global) implements I_pred_or_id {
  Int call(Int val) {
    Fut<Unit> tmp_1 = this!set_global_x_val(0);
    await tmp_1?;
    Fut<Int> tmp_2 = this!get_global_x();
    Fut<Int> tmp_3 = this!op_minus_val_fut(val, tmp_2);
    Fut<Int> tmp_4 = this!call_id_set_x_val_0(0);
    Fut<Int> tmp_5 = this!op_plus_fut_fut(tmp_3, tmp_4);
    await tmp_2? & tmp_3? & tmp_4? & tmp_5?;
    return tmp_5.get;
  }
}
{ }
)";
  Model hand = model::read_abs(expected);
  Model m = testing::extract_fixture("one_to_fib.c");
  const model::ModelClass* c = m.find_class("C_pred_or_id");
  REQUIRE(c);
  CHECK(model::same(c->find("call")->body, hand.classes.at(0).methods.at(0).body));
  std::vector<std::string> names = method_names(*c);
  CHECK(std::count(names.begin(), names.end(), "op_minus_val_fut") == 1);
  CHECK(std::count(names.begin(), names.end(), "op_plus_fut_fut") == 1);
}

TEST_CASE("while loop carries its invariant") {
  Model m = testing::extract_source(
      "int f(int n)\n/*@ requires n >= 0; ensures \\result == 0; @*/ {\n"
      "  /*@ loop invariant n >= 0; */\n  while (n > 0) { n = n - 1; }\n  return n; }");
  const auto& body = m.find_class("C_f")->find("call")->body;
  const Stmt* loop = nullptr;
  for (const auto& s : body) {
    if (s.kind == Stmt::Kind::While) loop = &s;
  }
  REQUIRE(loop);
  CHECK(printed(loop->invariant) == "this.n >= 0");
  // The condition is re-evaluated and awaited at the end of each iteration.
  REQUIRE_FALSE(loop->body.empty());
  CHECK(loop->body.back().kind == Stmt::Kind::Get);
  REQUIRE(loop->expr);
  CHECK(loop->body.back().target == printed(loop->expr));
}

TEST_CASE("short-circuit operators sequence through a helper") {
  Model m = testing::extract_source(
      "int g; int t(void){ g = 1; return 1; } int main(void){ if (t() == 1 && g == 1) { return 1; } return 0; }");
  const model::ModelClass* c = m.find_class("C_main");
  const model::Method* helper = c->find("op_and_1");
  REQUIRE(helper);
  // The right operand only runs inside the branch on the left result.
  bool has_if = std::any_of(helper->body.begin(), helper->body.end(),
                            [](const Stmt& s) { return s.kind == Stmt::Kind::If; });
  CHECK(has_if);
}

TEST_CASE("helper names decode") {
  frontend::CAst ast = frontend::parse(testing::fixture("add_side_effect.c"));
  auto h = extract::parse_helper_name("op_plus_fut_fut", ast);
  CHECK(h.kind == extract::HelperInfo::Kind::Operator);
  CHECK(h.op == "plus");
  CHECK(h.shapes == std::vector<std::string>{"fut", "fut"});
  h = extract::parse_helper_name("call_id_set_x_val_0", ast);
  CHECK(h.kind == extract::HelperInfo::Kind::CallHelper);
  CHECK(h.target == "id_set_x");
  CHECK(h.shapes == std::vector<std::string>{"val"});
  CHECK(h.side_effects == 0);
  h = extract::parse_helper_name("get_global_x", ast);
  CHECK(h.kind == extract::HelperInfo::Kind::GetGlobal);
  CHECK(h.target == "x");
  h = extract::parse_helper_name("set_global_x_fut", ast);
  CHECK(h.kind == extract::HelperInfo::Kind::SetGlobal);
  CHECK(h.shapes == std::vector<std::string>{"fut"});
  CHECK(extract::parse_helper_name("call", ast).kind == extract::HelperInfo::Kind::Call);
  CHECK(std::string(extract::op_name(BinOp::Lt)) == "lt");
}

TEST_CASE("synthesis: global reference conditions on every function class") {
  Model m = testing::extract_fixture("add_side_effect.c");
  for (const auto& c : m.classes) {
    if (c.name == "Global") continue;
    CAPTURE(c.name);
    CHECK(printed(c.creation_condition) == "global != null");
    CHECK(printed(c.obj_invariant) == "global != null");
  }
}

TEST_CASE("synthesis: without specifications only the structural rules fire") {
  Model m = testing::extract_fixture("add_side_effect.c");
  for (const auto& i : m.interfaces) {
    for (const auto& s : i.methods) {
      CAPTURE(i.name + "." + s.name);
      if (s.name.rfind("op_", 0) == 0) {
        CHECK(s.ensures_clause);
      } else {
        CHECK_FALSE(s.ensures_clause);
        CHECK_FALSE(s.requires_clause);
      }
    }
  }
  CHECK_FALSE(m.find_class("Global")->obj_invariant);
}

TEST_CASE("synthesis: function contracts reach call and call helpers") {
  Model m = testing::extract_fixture("add_side_effect_spec.c");
  for (auto [cls, method] : {std::pair{"C_id_set_x", "call"}, std::pair{"C_main", "call_id_set_x_val_0"}}) {
    CAPTURE(method);
    const model::MethodSig* s = sig(m, cls, method);
    REQUIRE(s);
    CHECK(printed(s->ensures_clause) == "result == 1");
  }
  CHECK(printed(sig(m, "C_id_set_x", "call")->requires_clause) == "val == 1");
  CHECK(printed(sig(m, "C_main", "call_id_set_x_val_0")->requires_clause) == "arg1 == 1");
}

TEST_CASE("synthesis: future-shaped arguments go through valueOf") {
  Model m = testing::extract_fixture("one_to_fib.c");
  const model::MethodSig* s = sig(m, "C_one_to_fib", "call_pred_or_id_fut_0");
  REQUIRE(s);
  CHECK(printed(s->ensures_clause) == "result == valueOf(fut_arg1) - 1 || result == valueOf(fut_arg1)");
}

TEST_CASE("synthesis: strong invariant on the global object and its accessors") {
  Model m = testing::extract_fixture("global_future_write.c");
  CHECK(printed(m.find_class("Global")->obj_invariant) == "this.x == 0 || this.x == 1");
  CHECK(printed(sig(m, "Global", "get_x")->ensures_clause) == "result == 0 || result == 1");
  CHECK(printed(sig(m, "Global", "set_x")->requires_clause) == "arg == 0 || arg == 1");
  CHECK(printed(sig(m, "C_main", "get_global_x")->ensures_clause) == "result == 0 || result == 1");
  CHECK(printed(sig(m, "C_main", "set_global_x_fut")->requires_clause) ==
        "valueOf(fut_arg) == 0 || valueOf(fut_arg) == 1");
  CHECK(printed(sig(m, "C_id_set_x", "set_global_x_val")->requires_clause) == "arg == 0 || arg == 1");
}

TEST_CASE("synthesis: a weak invariant over a global cannot be placed on a contract") {
  try {
    testing::extract_source("int g; //@ weak global invariant g >= 0;\nint main(void){ g = 1; return g; }");
    FAIL("expected a specification error");
  } catch (const DiagnosticError& e) {
    CHECK(e.kind() == DiagKind::SpecError);
  }
}

TEST_CASE("synthesis can be applied to a bare translation") {
  frontend::CAst ast = frontend::parse(testing::fixture("one_to_fib.c"));
  Model bare = extract::translate(ast);
  CHECK_FALSE(bare.find_class("Global")->obj_invariant);
  extract::synthesize_specs(bare, ast);
  CHECK(model::same(bare, extract::extract(ast)));
}

TEST_CASE("between awaits a call body only dispatches") {
  std::vector<std::string> sources = {testing::fixture("add_side_effect.c"), testing::fixture("one_to_fib.c"),
                                      testing::fixture("global_future_write.c")};
  for (const auto& p : testing::corpus()) sources.push_back(p.source);
  for (const auto& src : sources) {
    Model m = testing::extract_source(src);
    for (const auto& c : m.classes) {
      const model::Method* call = c.find("call");
      if (!call) continue;
      CAPTURE(c.name);
      model::for_each_stmt(call->body, [&](const Stmt& s) {
        // A blocking get only ever reads a future that an earlier await resolved.
        CHECK(s.kind != Stmt::Kind::New);
        if (s.kind == Stmt::Kind::AsyncCall) CHECK(s.callee == "this");
      });
      // Every future read with .get was awaited before.
      std::set<std::string> resolved;
      model::for_each_stmt(call->body, [&](const Stmt& s) {
        if (s.kind == Stmt::Kind::Await) resolved.insert(s.guard.begin(), s.guard.end());
        if (s.kind == Stmt::Kind::Get || (s.kind == Stmt::Kind::Return && !s.future.empty())) {
          CHECK(resolved.count(s.future) == 1);
        }
      });
    }
  }
}

TEST_CASE("call helpers create, call and read in one step") {
  std::vector<std::string> sources = {testing::fixture("one_to_fib.c")};
  for (const auto& p : testing::corpus()) sources.push_back(p.source);
  std::size_t seen = 0;
  for (const auto& src : sources) {
    frontend::CAst ast = frontend::parse(src);
    Model m = extract::extract(ast);
    for (const auto& c : m.classes) {
      for (const auto& meth : c.methods) {
        if (extract::parse_helper_name(meth.name, ast).kind != extract::HelperInfo::Kind::CallHelper) continue;
        CAPTURE(meth.name);
        ++seen;
        const auto& b = meth.body;
        REQUIRE(b.size() >= 3);
        const Stmt& create = b[b.size() - 3];
        const Stmt& call = b[b.size() - 2];
        const Stmt& ret = b[b.size() - 1];
        CHECK(create.kind == Stmt::Kind::New);
        CHECK(call.kind == Stmt::Kind::AsyncCall);
        CHECK(call.callee == create.target);
        CHECK(call.method == "call");
        CHECK(ret.kind == Stmt::Kind::Return);
        CHECK(ret.future == call.target);
        for (std::size_t i = 0; i + 3 < b.size(); ++i) CHECK(b[i].kind != Stmt::Kind::AsyncCall);
      }
    }
  }
  CHECK(seen > 10);
}

TEST_CASE("goldens") {
  for (auto [src, gold] : {std::pair{"add_side_effect.c", "add_side_effect.abs"},
                           std::pair{"global_future_write.c", "global_future_write.abs"}}) {
    CAPTURE(src);
    Model m = testing::extract_fixture(src);
    CHECK(model::same(m, model::read_abs(testing::golden(gold))));
    CHECK(model::emit_abs(m) == testing::golden(gold));
  }
}

TEST_CASE("extraction is deterministic") {
  for (const auto& p : testing::corpus()) {
    CAPTURE(p.name);
    CHECK(model::emit_abs(testing::extract_source(p.source)) == model::emit_abs(testing::extract_source(p.source)));
  }
}
