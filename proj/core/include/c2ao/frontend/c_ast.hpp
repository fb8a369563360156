#pragma once

// Typed AST for the supported C subset, with ACSL annotations attached.
// Integers are mathematical integers; C `int` overflow is not modeled.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "c2ao/common.hpp"
#include "c2ao/expr.hpp"

namespace c2ao::frontend {

enum class CType { Int, Bool, Void };
const char* to_string(CType t);

/// Where a name was declared. Filled in by the type checker.
enum class Scope { Unresolved, Global, Param, Local };

struct CExpr;
using CExprPtr = std::shared_ptr<const CExpr>;

struct CExpr {
  enum class Kind { IntLit, Var, Unary, Binary, Assign, Call };
  Kind kind = Kind::IntLit;
  std::int64_t value = 0;
  std::string name;  // Var, Assign target, Call callee
  UnOp unop = UnOp::Neg;
  BinOp binop = BinOp::Add;
  std::vector<CExprPtr> args;  // Unary 1, Binary 2, Assign 1 (rhs), Call n
  CType type = CType::Int;
  Scope scope = Scope::Unresolved;  // Var / Assign target
  bool is_const = false;            // Var: reads a const parameter or local
  SourceLoc loc;
};

struct CStmt;

struct CStmt {
  enum class Kind { Expr, Decl, If, While, Return, Block };
  Kind kind = Kind::Expr;
  CExprPtr expr;            // Expr, Decl initializer (optional), If/While cond, Return value (optional)
  std::string name;         // Decl
  bool is_const = false;    // Decl
  std::vector<CStmt> body;  // Block, If-then, While body
  std::vector<CStmt> else_body;
  bool has_else = false;
  ExprPtr loop_invariant;   // While
  SourceLoc loc;
};

struct AcslContract {
  ExprPtr requires_clause;
  ExprPtr ensures_clause;
  SourceLoc loc;

  bool empty() const { return !requires_clause && !ensures_clause; }
};

struct Param {
  std::string name;
  bool is_const = false;
};

struct FunctionDef {
  std::string name;
  CType return_type = CType::Int;
  std::vector<Param> params;
  std::vector<CStmt> body;
  AcslContract contract;
  SourceLoc loc;
};

struct GlobalVarDecl {
  std::string name;
  std::int64_t initializer = 0;
  ExprPtr strong_invariant;
  ExprPtr weak_invariant;
  SourceLoc loc;
};

enum class LogicType { Int, Bool };

struct LogicFunctionDef {
  std::string name;
  LogicType return_type = LogicType::Int;
  std::vector<std::pair<std::string, LogicType>> params;
  ExprPtr body;
  SourceLoc loc;
};

struct CAst {
  std::vector<LogicFunctionDef> logic_functions;
  std::vector<GlobalVarDecl> globals;
  std::vector<FunctionDef> functions;
  std::vector<Diagnostic> warnings;

  const FunctionDef* find_function(const std::string& name) const;
  const GlobalVarDecl* find_global(const std::string& name) const;
  const LogicFunctionDef* find_logic_function(const std::string& name) const;
};

/// Structural equality ignoring source locations and warnings.
bool same(const CExprPtr& a, const CExprPtr& b);
bool same(const CStmt& a, const CStmt& b);
bool same(const CAst& a, const CAst& b);

}  // namespace c2ao::frontend
