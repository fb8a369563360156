// The explorer against the evaluation-order enumerator, on every corpus
// program and entry call.

#include "doctest.h"

#include "c2ao/explore/explore.hpp"
#include "c_oracle.hpp"
#include "support.hpp"

using namespace c2ao;

namespace {

std::string show(const std::set<std::int64_t>& s) {
  std::string out = "{";
  for (auto v : s) out += (out.size() > 1 ? ", " : "") + std::to_string(v);
  return out + "}";
}

}  // namespace

TEST_CASE("oracle values of hand-checked programs") {
  auto vals = [](const std::string& src, const std::string& entry, std::vector<std::int64_t> args = {}) {
    return oracle::values(frontend::parse(src), entry, args);
  };
  const std::string fig = testing::fixture("add_side_effect.c");
  CHECK(vals(fig, "main") == std::set<std::int64_t>{1, 2});
  CHECK(vals("int f(void){return 0;}", "f") == std::set<std::int64_t>{0});
  // Last writer wins; the read sees any prefix of the writes.
  CHECK(vals("int g; int put(const int v){ g = v; return 0; }"
             "int main(void){ g = 0; return put(1) + put(2) + g; }",
             "main") == std::set<std::int64_t>{0, 1, 2});
  // Calls are atomic: the two increments never interleave.
  CHECK(vals("int c; int inc(void){ c = c + 1; return c; } int main(void){ c = 0; return inc() - inc(); }", "main") ==
        std::set<std::int64_t>{-1, 1});
  // && sequences its operands.
  CHECK(vals("int g; int t(void){ g = 5; return 1; }"
             "int main(void){ g = 0; if (t() == 1 && g == 5) { return 1; } return 0; }",
             "main") == std::set<std::int64_t>{1});
  CHECK(vals("int f(const int a, const int b){ return a / b * 10 + a % b; }", "f", {-7, 2}) ==
        std::set<std::int64_t>{-31});
}

TEST_CASE("oracle fib-style range for small inputs") {
  auto ast = frontend::parse(testing::fixture("one_to_fib.c"));
  const std::vector<std::set<std::int64_t>> expected = {{1}, {1}, {1, 2}, {1, 2, 3}, {1, 2, 3, 4, 5}};
  for (int n = 1; n <= 5; ++n) {
    CAPTURE(n);
    CHECK(oracle::values(ast, "one_to_fib", {n}) == expected[static_cast<size_t>(n - 1)]);
  }
}

TEST_CASE("oracle rejects division by zero") {
  auto ast = frontend::parse("int f(const int a){ return 1 / a; }");
  CHECK_THROWS_AS(oracle::values(ast, "f", {0}), std::runtime_error);
}

TEST_CASE("explorer value sets equal the oracle on the corpus") {
  auto programs = testing::corpus();
  REQUIRE(programs.size() >= 20);
  std::size_t checked = 0;
  for (const auto& p : programs) {
    CAPTURE(p.name);
    REQUIRE_FALSE(p.entries.empty());
    auto ast = frontend::parse(p.source);
    auto model = extract::extract(ast);
    explore::Explorer ex(model);
    for (const auto& e : p.entries) {
      CAPTURE(e.function);
      auto expected = oracle::values(ast, e.function, e.args);
      auto r = ex.explore(e.function, e.args);
      REQUIRE_FALSE(r.budget_exceeded);
      INFO("explorer " << show(r.values) << " oracle " << show(expected));
      CHECK(r.values == expected);
      CHECK(r.violations.empty());
      ++checked;
    }
  }
  CHECK(checked >= 30);
}
