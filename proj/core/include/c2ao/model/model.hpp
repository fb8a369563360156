#pragma once

// The Active Object IR: interfaces, classes with fields and methods,
// cooperative method contracts, and a main block.

#include <optional>
#include <string>
#include <vector>

#include "c2ao/common.hpp"
#include "c2ao/expr.hpp"

namespace c2ao::model {

struct Type {
  enum class Kind { Int, Bool, Unit, Fut, Ref };
  Kind kind = Kind::Int;
  Kind inner = Kind::Int;  // Fut only
  std::string ref;         // Ref: interface (or class) name

  static Type int_() { return {}; }
  static Type bool_() { return {Kind::Bool, Kind::Int, {}}; }
  static Type unit() { return {Kind::Unit, Kind::Int, {}}; }
  static Type fut(Kind inner = Kind::Int) { return {Kind::Fut, inner, {}}; }
  static Type ref_to(std::string name) { return {Kind::Ref, Kind::Int, std::move(name)}; }

  bool is_fut() const { return kind == Kind::Fut; }
  std::string str() const;
  friend bool operator==(const Type& a, const Type& b) {
    return a.kind == b.kind && (a.kind != Kind::Fut || a.inner == b.inner) &&
           (a.kind != Kind::Ref || a.ref == b.ref);
  }
};

struct Param {
  std::string name;
  Type type;
  friend bool operator==(const Param&, const Param&) = default;
};

/// Interface-level method declaration with its parameter contract.
struct MethodSig {
  std::string name;
  Type ret;
  std::vector<Param> params;
  ExprPtr requires_clause;  // parameter precondition
  ExprPtr ensures_clause;   // parameter postcondition (may use result, valueOf)
};

struct ModelInterface {
  std::string name;
  std::vector<MethodSig> methods;

  const MethodSig* find(const std::string& method) const;
};

struct Stmt {
  enum class Kind {
    Assign,     // [T] target = expr
    AsyncCall,  // [Fut<T>] target = callee!method(args)
    New,        // [I] target = new cls(args)
    Await,      // await f1? & f2? ...
    Get,        // [T] target = future.get
    Return,     // return expr | return future.get
    If,
    While,
    Skip,
  };

  Kind kind = Kind::Skip;
  std::string target;              // Assign/AsyncCall/New/Get
  bool target_is_field = false;    // `this.target`
  std::optional<Type> decl_type;   // set when the statement declares a local
  ExprPtr expr;                    // Assign rhs, Return value, If/While condition
  std::string callee;              // AsyncCall: "this" or a variable/field holding a reference
  std::string method;              // AsyncCall
  std::string cls;                 // New
  std::vector<ExprPtr> args;       // AsyncCall/New
  std::vector<std::string> guard;  // Await: futures tested with `?`
  std::string future;              // Get; Return when it reads a future
  std::vector<Stmt> body;          // If-then, While
  std::vector<Stmt> else_body;
  ExprPtr invariant;               // While
  SourceLoc loc;                   // originating C location, if any
};

struct Method {
  std::string name;
  Type ret;
  std::vector<Param> params;
  std::vector<Stmt> body;
  SourceLoc loc;
};

struct Field {
  std::string name;
  Type type;
  ExprPtr init;  // nullptr: type default
};

struct ModelClass {
  std::string name;
  std::string implements;
  std::vector<Param> params;  // class parameters are fields too
  std::vector<Field> fields;
  std::vector<Method> methods;
  ExprPtr obj_invariant;
  ExprPtr creation_condition;
  SourceLoc loc;

  const Method* find(const std::string& method) const;
  bool has_field(const std::string& name) const;
  std::optional<Type> field_type(const std::string& name) const;
};

struct LogicFunction {
  std::string name;
  Type ret;
  std::vector<Param> params;
  ExprPtr body;
};

struct Model {
  std::vector<LogicFunction> logic_functions;
  std::vector<ModelInterface> interfaces;
  std::vector<ModelClass> classes;
  std::optional<std::vector<Stmt>> main_block;  // absent when the program has no main

  const ModelInterface* find_interface(const std::string& name) const;
  const ModelClass* find_class(const std::string& name) const;
  ModelClass* find_class(const std::string& name);
  const LogicFunction* find_logic_function(const std::string& name) const;
  /// Contract of cls.method: the signature declared on the implemented interface.
  const MethodSig* contract(const ModelClass& cls, const std::string& method) const;
  /// Class implementing the given interface (exactly one in extracted models).
  const ModelClass* implementor(const std::string& interface_name) const;
};

/// Checks the IR's structural invariants; empty result means well formed.
std::vector<Diagnostic> well_formed(const Model& model);

/// Deterministic `.abs`-style rendering with `[Spec : Kind(e)]` annotations.
std::string emit_abs(const Model& model);

/// Reads text in the format produced by emit_abs (plus hand-written models in
/// the same subset). Throws DiagnosticError(SyntaxError) on malformed input.
Model read_abs(std::string_view text);

/// Structural equality ignoring source locations.
bool same(const Stmt& a, const Stmt& b);
bool same(const std::vector<Stmt>& a, const std::vector<Stmt>& b);
bool same(const Model& a, const Model& b);

/// Visits every statement (pre-order, including nested bodies).
template <typename Fn>
void for_each_stmt(const std::vector<Stmt>& body, Fn&& fn) {
  for (const auto& s : body) {
    fn(s);
    for_each_stmt(s.body, fn);
    for_each_stmt(s.else_body, fn);
  }
}

}  // namespace c2ao::model
