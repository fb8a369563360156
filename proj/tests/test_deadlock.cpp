#include "doctest.h"

#include <algorithm>

#include "c2ao/deadlock/deadlock.hpp"
#include "c2ao/explore/explore.hpp"
#include "support.hpp"

using namespace c2ao;
using namespace c2ao::deadlock;

namespace {

model::Model abs_fixture(const std::string& name) {
  model::Model m = model::read_abs(testing::fixture(name));
  REQUIRE(model::well_formed(m).empty());
  return m;
}

}  // namespace

TEST_CASE("fib program: nine unknown methods, deadlock-free") {
  model::Model m = testing::extract_fixture("one_to_fib.c");
  Classification c = classify(m);
  CHECK(c.unknown.size() == 9);
  // Hand derivation. Waiting on a future parameter: the operator helpers and
  // call_pred_or_id_fut_0. Waiting on one of those: each call method but
  // id_set_x's. Waiting on a helper that itself synchronizes (the setter
  // helper blocks on Global): id_set_x's call.
  const std::set<MethodId> expected = {"C_id_set_x.call",
                                       "C_one_or_two.call",
                                       "C_one_or_two.op_plus_fut_fut",
                                       "C_one_to_fib.call",
                                       "C_one_to_fib.call_pred_or_id_fut_0",
                                       "C_one_to_fib.op_plus_fut_fut",
                                       "C_pred_or_id.call",
                                       "C_pred_or_id.op_minus_val_fut",
                                       "C_pred_or_id.op_plus_fut_fut"};
  CHECK(c.unknown == expected);
  for (const auto& id : c.unknown) {
    CAPTURE(id);
    CHECK(id.rfind("Global.", 0) != 0);
  }
  Justification j = justify(m, c);
  CHECK(j.verdict == Verdict::DeadlockFree);
  CHECK(j.unresolved.empty());
  CHECK(j.justified.size() == c.free.size() + c.unknown.size());
  CHECK(std::string(to_string(j.verdict)) == "deadlock-free for every extractable main block");
}

TEST_CASE("methods returning literals are all free") {
  model::Model m = testing::extract_source("int f(void){ return 1; } int main(void){ return 2; }");
  Classification c = classify(m);
  CHECK(c.unknown.empty());
  CHECK(c.free.count("C_main.call") == 1);
  CHECK(c.free.count("C_f.call") == 1);
  CHECK(justify(m, c).verdict == Verdict::DeadlockFree);
}

TEST_CASE("fold over a separate operation object") {
  model::Model m = abs_fixture("fold_two_objects.abs");
  Classification c = classify(m);
  CHECK(c.free == std::set<MethodId>{"CompC.op", "FoldC.fold"});
  CHECK(c.unknown.empty());
  CHECK(justify(m, c).verdict == Verdict::DeadlockFree);
  explore::Report r = explore::Explorer(m).explore("", {});
  CHECK(r.violations.empty());
}

TEST_CASE("a future parameter passed onward stays unresolved") {
  model::Model m = abs_fixture("forwarded_future_parameter.abs");
  Classification c = classify(m);
  CHECK(c.free == std::set<MethodId>{"C.k"});
  CHECK(c.unknown == std::set<MethodId>{"C.a", "C.b"});
  Justification j = justify(m, c);
  CHECK(j.verdict == Verdict::Unresolved);
  CHECK(j.unresolved.count("C.b") == 1);
  bool from_param = false;
  for (const auto& [id, srcs] : j.sources) {
    for (const auto& s : srcs) from_param = from_param || (id == "C.b" && s.origin == "parameter x");
  }
  CHECK(from_param);
}

TEST_CASE("a callback into an object held by a get is not free") {
  model::Model m = abs_fixture("callback_into_blocked_object.abs");
  Classification c = classify(m);
  CHECK(c.unknown.count("A.m") == 1);
  CHECK(c.unknown.count("B.n") == 1);
  CHECK(justify(m, c).verdict == Verdict::Unresolved);
  // The explorer agrees that the schedule really deadlocks.
  CHECK(explore::Explorer(m).explore("", {}).has(explore::ViolationKind::Deadlock));
}

TEST_CASE("side-effect program is deadlock-free, confirmed by exploration") {
  model::Model m = testing::extract_fixture("add_side_effect.c");
  Classification c = classify(m);
  CHECK(justify(m, c).verdict == Verdict::DeadlockFree);
  explore::Report r = explore::Explorer(m).explore("main", {});
  CHECK_FALSE(r.budget_exceeded);
  CHECK(r.count(explore::ViolationKind::Deadlock) == 0);
  explore::Report mb = explore::Explorer(m).explore("", {});
  CHECK(mb.count(explore::ViolationKind::Deadlock) == 0);
}

TEST_CASE("synchronization graph") {
  model::Model m = testing::extract_fixture("add_side_effect.c");
  SyncGraph g = build_sync_graph(m);
  CHECK(g.has_sync.count("C_main.call") == 1);
  CHECK(g.has_sync.count("Global.get_x") == 0);
  CHECK(g.takes_future_params == std::set<MethodId>{"C_main.op_plus_fut_fut"});
  auto has_edge = [&](const std::string& a, const std::string& b) {
    for (const auto& e : g.edges) {
      if (e.from == a && e.to == b) return true;
    }
    return false;
  };
  CHECK(has_edge("C_main.call", "C_main.op_plus_fut_fut"));
  CHECK(has_edge("C_main.get_global_x", "Global.get_x"));
  CHECK(has_edge("C_main.call_id_set_x_val_0", "C_id_set_x.call"));
  for (const auto& e : g.edges) {
    CAPTURE(e.from + " -> " + e.to);
    CHECK(std::find(g.nodes.begin(), g.nodes.end(), e.from) != g.nodes.end());
    CHECK(std::find(g.nodes.begin(), g.nodes.end(), e.to) != g.nodes.end());
  }
}

TEST_CASE("analysis is deterministic") {
  model::Model m = testing::extract_fixture("one_to_fib.c");
  Classification a = classify(m), b = classify(m);
  CHECK(a.free == b.free);
  CHECK(a.unknown == b.unknown);
  CHECK(justify(m, a).text == justify(m, b).text);
}
