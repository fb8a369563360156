#include "doctest.h"

#include <functional>

#include "c2ao/frontend/parser.hpp"
#include "support.hpp"

using namespace c2ao;
using namespace c2ao::frontend;

namespace {

DiagKind kind_of(const std::string& src) {
  try {
    parse(src);
  } catch (const DiagnosticError& e) {
    return e.kind();
  }
  FAIL("expected a diagnostic for: " << src);
  return DiagKind::Warning;
}

SourceLoc loc_of(const std::string& src) {
  try {
    parse(src);
  } catch (const DiagnosticError& e) {
    return e.diagnostics().front().loc;
  }
  return {};
}

void walk(const CExpr& e, const std::function<void(const SourceLoc&)>& f) {
  f(e.loc);
  for (const auto& a : e.args) walk(*a, f);
}

void walk(const CStmt& s, const std::function<void(const SourceLoc&)>& f) {
  f(s.loc);
  if (s.expr) walk(*s.expr, f);
  for (const auto& b : s.body) walk(b, f);
  for (const auto& b : s.else_body) walk(b, f);
}

}  // namespace

TEST_CASE("the side-effect program has one global and two functions") {
  CAst ast = parse(testing::fixture("add_side_effect.c"));
  REQUIRE(ast.globals.size() == 1);
  CHECK(ast.globals[0].name == "x");
  CHECK(ast.globals[0].initializer == 0);
  REQUIRE(ast.functions.size() == 2);
  CHECK(ast.functions[0].name == "id_set_x");
  CHECK(ast.functions[1].name == "main");
  CHECK(ast.functions[0].contract.empty());
  CHECK(ast.logic_functions.empty());
  CHECK(ast.warnings.empty());
  // `val` is never written but is not declared const.
  CHECK_FALSE(ast.functions[0].params[0].is_const);
}

TEST_CASE("minimal function") {
  CAst ast = parse("int f(void){return 0;}");
  REQUIRE(ast.functions.size() == 1);
  const FunctionDef& f = ast.functions[0];
  CHECK(f.params.empty());
  CHECK(f.return_type == CType::Int);
  CHECK(f.contract.empty());
  REQUIRE(f.body.size() == 1);
  CHECK(f.body[0].kind == CStmt::Kind::Return);
  CHECK(f.body[0].expr->value == 0);
}

TEST_CASE("annotated fib program") {
  CAst ast = parse(testing::fixture("one_to_fib.c"));
  REQUIRE(ast.logic_functions.size() == 1);
  const LogicFunctionDef& fib = ast.logic_functions[0];
  CHECK(fib.name == "fib");
  CHECK(fib.return_type == LogicType::Int);
  REQUIRE(fib.params.size() == 1);
  CHECK(fib.params[0].first == "n");
  CHECK(fib.body->kind == Expr::Kind::Ite);

  REQUIRE(ast.globals.size() == 1);
  REQUIRE(ast.globals[0].strong_invariant);
  CHECK_FALSE(ast.globals[0].weak_invariant);
  CHECK(print(ast.globals[0].strong_invariant) == "x == 0 || x == 1");

  REQUIRE(ast.functions.size() == 4);
  for (const auto& f : ast.functions) {
    CAPTURE(f.name);
    CHECK(f.contract.ensures_clause);
    CHECK_FALSE(f.contract.requires_clause);
  }
  const FunctionDef* top = ast.find_function("one_to_fib");
  REQUIRE(top);
  CHECK(top->params[0].is_const);
}

TEST_CASE("acsl clause classification") {
  SUBCASE("contract") {
    auto c = parse_acsl_clause(" requires val == 1; ensures \\result == 1;");
    REQUIRE(std::holds_alternative<AcslContract>(c));
    const auto& k = std::get<AcslContract>(c);
    CHECK(print(k.requires_clause) == "val == 1");
    CHECK(print(k.ensures_clause) == "result == 1");
  }
  SUBCASE("strong global invariant") {
    auto c = parse_acsl_clause(" strong global invariant x == 0 || x == 1;");
    REQUIRE(std::holds_alternative<GlobalInvariant>(c));
    CHECK(std::get<GlobalInvariant>(c).strong);
  }
  SUBCASE("weak global invariant") {
    auto c = parse_acsl_clause(" weak global invariant x >= 0;");
    REQUIRE(std::holds_alternative<GlobalInvariant>(c));
    CHECK_FALSE(std::get<GlobalInvariant>(c).strong);
  }
  SUBCASE("logic definition") {
    auto c = parse_acsl_clause(" ABS def Int twice(Int n) = 2 * n;");
    REQUIRE(std::holds_alternative<LogicFunctionDef>(c));
    CHECK(std::get<LogicFunctionDef>(c).name == "twice");
  }
  SUBCASE("loop invariant") {
    auto c = parse_acsl_clause(" loop invariant i >= 0;");
    REQUIRE(std::holds_alternative<LoopInvariant>(c));
  }
  SUBCASE("unknown clause") {
    CHECK_THROWS_AS(parse_acsl_clause(" frobnicate x;"), DiagnosticError);
  }
}

TEST_CASE("formula parsing and printing") {
  ExprPtr f = parse_formula("a + b * 2 <= c && !(d == 1)");
  CHECK(print(f) == "a + b * 2 <= c && !(d == 1)");
  CHECK(same(parse_formula(print(f)), f));
  CHECK(parse_formula("-3")->kind == Expr::Kind::IntLit);
  CHECK(parse_formula("-3")->value == -3);
}

TEST_CASE("printing and reparsing gives the same tree") {
  std::vector<std::string> sources = {testing::fixture("add_side_effect.c"), testing::fixture("add_side_effect_spec.c"),
                                      testing::fixture("one_to_fib.c"), testing::fixture("global_future_write.c")};
  for (const auto& p : testing::corpus()) sources.push_back(p.source);
  for (const auto& src : sources) {
    CAst a = parse(src);
    std::string printed = print_c(a);
    CAPTURE(printed);
    CAst b = parse(printed);
    CHECK(same(a, b));
    CHECK(print_c(b) == printed);
  }
}

TEST_CASE("constructs outside the subset are rejected") {
  const char* cases[] = {
      "int f(int* p){ return 0; }",
      "int a[3]; int f(void){ return 0; }",
      "float f(void){ return 0; }",
      "int f(const int n){ switch (n) { default: return 0; } }",
      "int f(void){ for (;;) {} return 0; }",
      "int f(void){ return 1 ? 2 : 3; }",
      "int f(void){ int i = 0; i++; return i; }",
      "int f(void){ int i = 0; i += 2; return i; }",
      "struct s { int a; }; int f(void){ return 0; }",
      "int f(void){ return 'a'; }",
      "#include <stdio.h>\nint f(void){ return 0; }",
  };
  for (const char* src : cases) {
    CAPTURE(src);
    CHECK(kind_of(src) == DiagKind::UnsupportedConstruct);
  }
  CHECK(loc_of("int f(int* p){ return 0; }") == SourceLoc{1, 10});
}

TEST_CASE("syntax errors carry a position") {
  CHECK(kind_of("int f(void){ return 0 }") == DiagKind::SyntaxError);
  CHECK(loc_of("int f(void){ return 0 }") == SourceLoc{1, 23});
}

TEST_CASE("type errors") {
  CHECK(kind_of("int f(void){ return y; }") == DiagKind::TypeError);
  CHECK(kind_of("int f(void){ return 1 < 2; }") == DiagKind::TypeError);
  CHECK(kind_of("int f(const int n){ return (n < 2) + 1; }") == DiagKind::TypeError);
  CHECK(kind_of("int f(void){ return 0; } int f(void){ return 1; }") == DiagKind::TypeError);
  CHECK(kind_of("int f(const int n){ n = 2; return n; }") == DiagKind::TypeError);
  CHECK(kind_of("int f(void){ int a = 1; { int a = 2; } return a; }") == DiagKind::TypeError);
  CHECK(kind_of("int f(const int n){ if (n > 0) { return 1; } }") == DiagKind::TypeError);
}

TEST_CASE("specification errors") {
  CHECK(kind_of("//@ requires \\result == 1;\nint f(void){ return 0; }") == DiagKind::SpecError);
  CHECK(kind_of("//@ frobnicate x;\nint f(void){ return 0; }") == DiagKind::SpecError);
  CHECK(kind_of("int x; //@ strong global invariant x == 0 && y == 1;\nint f(void){ return 0; }") ==
        DiagKind::SpecError);
}

TEST_CASE("a global with both invariant kinds warns") {
  CAst ast = parse(
      "int x;\n/*@ strong global invariant x >= 0; */\n/*@ weak global invariant x <= 5; */\n"
      "int f(void){ return 0; }");
  REQUIRE(ast.warnings.size() == 1);
  CHECK(ast.warnings[0].kind == DiagKind::Warning);
  CHECK(ast.warnings[0].severity == Severity::Warning);
}

TEST_CASE("integer condition without comparison is accepted") {
  CHECK_NOTHROW(parse("int f(const int n){ if (n) { return 1; } return 0; }"));
}

TEST_CASE("every node has a source location") {
  CAst ast = parse(testing::fixture("one_to_fib.c"));
  std::size_t seen = 0;
  auto check = [&](const SourceLoc& l) {
    ++seen;
    CHECK(l.known());
  };
  for (const auto& g : ast.globals) check(g.loc);
  for (const auto& l : ast.logic_functions) check(l.loc);
  for (const auto& f : ast.functions) {
    check(f.loc);
    check(f.contract.loc);
    for (const auto& s : f.body) walk(s, check);
  }
  CHECK(seen > 30);
}

TEST_CASE("name resolution records scope and constness") {
  CAst ast = parse("int g; int f(const int p, int q){ int l = q; return g + p + l; }");
  const CStmt& ret = ast.functions[0].body[1];
  std::vector<const CExpr*> vars;
  std::function<void(const CExpr&)> collect = [&](const CExpr& e) {
    if (e.kind == CExpr::Kind::Var) vars.push_back(&e);
    for (const auto& a : e.args) collect(*a);
  };
  collect(*ret.expr);
  REQUIRE(vars.size() == 3);
  CHECK(vars[0]->scope == Scope::Global);
  CHECK(vars[1]->scope == Scope::Param);
  CHECK(vars[1]->is_const);
  CHECK(vars[2]->scope == Scope::Local);
  CHECK_FALSE(vars[2]->is_const);
}
