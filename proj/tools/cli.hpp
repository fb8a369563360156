#pragma once

// Command-line driver and the JSON report. Everything here is also used
// directly by the tests, so no function touches the process environment
// except through its arguments (and the solver lookup).

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "c2ao/deadlock/deadlock.hpp"
#include "c2ao/explore/explore.hpp"
#include "c2ao/frontend/c_ast.hpp"
#include "c2ao/model/model.hpp"
#include "c2ao/vcgen/vcgen.hpp"

namespace c2ao::cli {

/// Process exit codes. Stable; documented in the README.
enum Exit : int {
  Ok = 0,
  Diagnostics = 1,      // syntax, unsupported construct, spec or model errors
  Usage = 2,            // bad flags, unreadable input
  Failed = 3,           // violations, invalid obligations, unresolved verdict
  Budget = 4,           // exploration budget exhausted before completion
  SolverMissing = 5,    // verify could not find the solver (scripts still written)
  PreconditionUnmet = 6 // entry arguments violate the entry's Requires
};

inline constexpr int kSchemaVersion = 1;

/// An input program: C source with ACSL, or an `.abs` model.
struct Input {
  std::string path;
  std::string text;
  std::optional<frontend::CAst> ast;  // absent for .abs inputs
  model::Model model;
};

/// Reads and translates. Throws DiagnosticError; an unreadable file throws
/// std::runtime_error.
Input load(const std::string& path);
Input load_text(const std::string& path, std::string text);

/// 64-bit FNV-1a of the input bytes, as "fnv1a64:<16 hex digits>".
std::string digest(std::string_view bytes);

nlohmann::json report_header(const Input& in);
nlohmann::json extraction_section(const model::Model& m);
nlohmann::json explore_section(const explore::Report& r, const explore::Budget& b);
nlohmann::json deadlock_section(const deadlock::Classification& c, const deadlock::Justification& j);
nlohmann::json vcgen_section(const vc::Generation& g, const std::vector<vc::Status>& statuses,
                             const vc::DischargeOptions& o);

/// Parses a replay file: a JSON list of non-negative integers.
std::vector<int> parse_witness(const std::string& text);

/// "{1, 2}".
std::string format_values(const std::set<std::int64_t>& values);

/// Runs one command line (argv[0] excluded) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace c2ao::cli
