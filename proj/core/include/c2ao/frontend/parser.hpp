#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "c2ao/frontend/c_ast.hpp"

namespace c2ao::frontend {

struct GlobalInvariant {
  bool strong = true;
  ExprPtr formula;
  SourceLoc loc;
};

struct LoopInvariant {
  ExprPtr formula;
  SourceLoc loc;
};

using AcslClause = std::variant<AcslContract, GlobalInvariant, LogicFunctionDef, LoopInvariant>;

/// Parses and type-checks a translation unit. Throws DiagnosticError with
/// kind SyntaxError, UnsupportedConstruct, SpecError or TypeError.
CAst parse(std::string_view source);

/// Classifies and parses the body of one ACSL comment (the text after the
/// leading `@`). Formulas are parsed but names are not resolved here.
AcslClause parse_acsl_clause(std::string_view comment, SourceLoc origin = {1, 1});

/// Parses a standalone ACSL/ABS-style formula.
ExprPtr parse_formula(std::string_view text, SourceLoc origin = {1, 1});

/// Prints a CAst back to C source with its annotations; `parse(print_c(a))`
/// yields an AST structurally equal to `a`.
std::string print_c(const CAst& ast);

}  // namespace c2ao::frontend
