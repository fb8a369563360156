#pragma once

// Explicit-state exploration of an Active Object model: every interleaving of
// run-to-release process segments, with runtime contract monitoring.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "c2ao/model/model.hpp"

namespace c2ao::explore {

struct Value {
  enum class Kind : std::uint8_t { Int, Bool, Unit, Null, Ref, Fut };
  Kind kind = Kind::Unit;
  std::int64_t v = 0;  // Int value, Bool 0/1, object id, or future id

  static Value integer(std::int64_t i) { return {Kind::Int, i}; }
  static Value boolean(bool b) { return {Kind::Bool, b ? 1 : 0}; }
  static Value unit() { return {Kind::Unit, 0}; }
  static Value null() { return {Kind::Null, 0}; }
  static Value ref(std::int64_t id) { return {Kind::Ref, id}; }
  static Value fut(std::int64_t id) { return {Kind::Fut, id}; }

  friend bool operator==(const Value&, const Value&) = default;
  std::string str() const;
};

struct Future {
  bool resolved = false;
  Value value;
};

struct Process {
  enum class Status : std::uint8_t {
    Queued,     // not started
    Suspended,  // released at an await
    Blocked,    // holds its object while waiting on a get
  };
  int object = 0;
  int method = 0;  // index into the compiled class's methods
  int pc = 0;
  int future = 0;  // the future this process resolves
  Status status = Status::Queued;
  bool requires_pending = false;  // precondition waits on unresolved valueOf
  std::vector<Value> locals;
};

struct Object {
  int cls = 0;  // index into the compiled classes
  std::vector<Value> fields;
  int busy_with = -1;  // future id of the process blocked on a get, or -1
};

/// A global state. Ids are creation-ordered indices into `objects` and
/// `futures`; `processes` holds only live processes, ordered by future id.
struct Configuration {
  std::vector<Object> objects;
  std::vector<Future> futures;
  std::vector<Process> processes;
};

enum class ViolationKind {
  RequiresFailed,
  EnsuresFailed,
  ObjInvFailed,
  CreationFailed,
  StrongInvariantFailed,
  LoopInvFailed,
  DivisionByZero,
  Deadlock,
};
const char* to_string(ViolationKind k);

/// One scheduling decision of a witness, for display.
struct TraceStep {
  int choice = 0;
  int object = 0;
  std::string cls;
  std::string method;
};

struct Violation {
  ViolationKind kind = ViolationKind::RequiresFailed;
  std::string cls;
  std::string method;
  std::string message;
  SourceLoc loc;             // originating C location when known
  std::vector<int> witness;  // choice indices from the initial configuration
  std::vector<TraceStep> trace;
};

struct Budget {
  std::size_t max_states = 1'000'000;
  std::size_t max_depth = 10'000;            // macro-steps along one schedule
  std::size_t max_segment_steps = 1'000'000; // statements inside one macro-step
};

struct Stats {
  std::size_t states = 0;        // distinct canonical configurations stored
  std::size_t deduplicated = 0;  // transitions into an already-stored state
  std::size_t transitions = 0;
  std::size_t max_frontier = 0;  // deepest DFS stack
};

struct Report {
  std::string entry;
  std::vector<std::int64_t> args;
  std::set<std::int64_t> values;  // values returnable by the entry call
  bool returned_unit = false;     // a void entry completed
  std::vector<Violation> violations;
  Stats stats;
  bool budget_exceeded = false;
  bool nontermination = false;  // depth or segment limit hit on some schedule
  bool precondition_unmet = false;
  std::string precondition_message;

  bool has(ViolationKind k) const;
  std::size_t count(ViolationKind k) const;
};

/// Outcome of one macro-step.
struct StepResult {
  std::optional<Violation> violation;  // witness left empty
  bool segment_limit = false;
};

struct ReplayResult {
  Configuration final_config;
  std::optional<Violation> violation;  // raised by the last replayed step
  std::optional<Value> result;         // entry result if resolved
  bool terminal = false;               // nothing enabled afterwards
};

struct Compiled;

/// Holds a compiled model. `entry` names a C function (class C_<entry>); an
/// empty entry runs the model's own main block.
class Explorer {
 public:
  explicit Explorer(const model::Model& model, Budget budget = {});
  ~Explorer();
  Explorer(const Explorer&) = delete;
  Explorer& operator=(const Explorer&) = delete;

  /// Throws DiagnosticError when the entry is missing or the arity is wrong.
  Configuration initial(const std::string& entry, const std::vector<std::int64_t>& args) const;

  /// Indices of processes that may run next, in a deterministic order.
  std::vector<int> enabled(const Configuration& c) const;

  /// Runs process `processes[proc]` until it returns, suspends, or blocks.
  StepResult macro_step(Configuration& c, int proc) const;

  /// Isomorphism-invariant key: unreachable objects and futures are dropped
  /// and ids renumbered in discovery order from the root process.
  std::string canonical_key(const Configuration& c) const;

  Report explore(const std::string& entry, const std::vector<std::int64_t>& args) const;

  ReplayResult replay(const std::string& entry, const std::vector<std::int64_t>& args,
                      const std::vector<int>& witness) const;

  /// Class and method names for a process, for display.
  std::pair<std::string, std::string> describe(const Configuration& c, int proc) const;

  /// Field value of an object by name (tests and diagnostics).
  std::optional<Value> field(const Configuration& c, int object, const std::string& name) const;

  /// Class name of an object.
  std::string class_of(const Configuration& c, int object) const;

 private:
  std::unique_ptr<Compiled> compiled_;
  Budget budget_;
};

/// Environment for evaluating a specification formula outside exploration.
struct FormulaEnv {
  std::map<std::string, Value> vars;    // parameters, locals, and fields by name
  std::map<std::string, Value> fields;  // `this.f`
  std::optional<Value> result;
  std::map<std::string, std::optional<Value>> futures;  // valueOf(name)
};

/// Evaluates a formula. Logic functions come from `model`. Throws
/// InternalError on an unresolved valueOf and DiagnosticError(SpecError) on
/// division or an unbound name.
Value evaluate_formula(const model::Model& model, const ExprPtr& f, const FormulaEnv& env);
bool check_formula(const model::Model& model, const ExprPtr& f, const FormulaEnv& env);

}  // namespace c2ao::explore
