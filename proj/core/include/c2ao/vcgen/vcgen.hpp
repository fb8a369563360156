#pragma once

// Verification conditions for cooperative method contracts: symbolic
// execution per method, SMT-LIB emission, and discharge by an external solver.

#include <map>
#include <string>
#include <vector>

#include "c2ao/model/model.hpp"

namespace c2ao::vc {

enum class Sort { Int, Bool, Ref };

struct Obligation {
  std::string name;  // Class.method#branch:kind:k
  std::string cls;
  std::string method;
  std::string kind;  // requires, creation, objinv, ensures, loopinit, loopinv, division, classinit
  std::vector<ExprPtr> hypotheses;
  ExprPtr goal;
  std::map<std::string, Sort> symbols;
  std::string description;
  SourceLoc loc;
};

struct Unverifiable {
  std::string method;  // Class.method
  std::string reason;
};

struct Generation {
  std::vector<Obligation> obligations;
  std::vector<Unverifiable> unverifiable;
};

/// Symbolic execution of every method of every class, plus one
/// initialization obligation per class with an object invariant.
Generation generate(const model::Model& model);

/// Self-contained SMT-LIB 2.6 script; `unsat` means the obligation is valid.
/// Logic functions become define-funs-rec, and every logic-function
/// application in the obligation is unfolded to depth 2 as extra facts.
std::string emit_smtlib(const model::Model& model, const Obligation& o);

struct Status {
  enum class Kind { Valid, Invalid, Timeout, Unknown, SolverMissing, Error };
  Kind kind = Kind::Unknown;
  std::string detail;  // counterexample model, or captured solver output
  double seconds = 0;
};
const char* to_string(Status::Kind k);

struct DischargeOptions {
  std::string solver = "z3";  // executable name or path; receives the script path
  double timeout_seconds = 10;
  unsigned jobs = 0;          // 0: hardware concurrency
  std::string out_dir;        // where scripts are written; empty: a temporary directory
};

/// Runs the solver once per obligation, concurrently. A missing solver makes
/// every status SolverMissing (scripts are still written when out_dir is set).
std::vector<Status> discharge(const model::Model& model, const std::vector<Obligation>& obligations,
                              const DischargeOptions& options);

/// Solver resolution: `C2AO_SOLVER` overrides the default name.
std::string default_solver();

/// Locates an executable on PATH (or checks an explicit path).
bool solver_available(const std::string& solver);

/// Renders an expression as an SMT-LIB term (exposed for tests).
std::string smt_term(const ExprPtr& e);

}  // namespace c2ao::vc
