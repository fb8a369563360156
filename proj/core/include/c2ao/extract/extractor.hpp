#pragma once

// C -> Active Object translation and specification synthesis.

#include <optional>
#include <string>
#include <vector>

#include "c2ao/frontend/c_ast.hpp"
#include "c2ao/model/model.hpp"

namespace c2ao::extract {

/// Translation plus synthesis plus a well-formedness check. Throws
/// DiagnosticError (UnsupportedConstruct, SpecError, WellFormedness).
model::Model extract(const frontend::CAst& ast);

/// The translation alone: no specifications are attached.
model::Model translate(const frontend::CAst& ast);

/// Attaches the synthesized contracts and invariants to a translated model.
void synthesize_specs(model::Model& model, const frontend::CAst& ast);

/// How a translated (sub)expression's value is available to the statement
/// being built: folded constant, direct expression over method locals, or a
/// future produced by an asynchronous self-call.
struct Operand {
  enum class Shape { None, Const, Val, Fut };
  Shape shape = Shape::None;
  bool is_bool = false;
  std::int64_t value = 0;  // Const
  ExprPtr expr;            // Const/Val: the expression to use
  std::string future;      // Fut

  bool direct() const { return shape == Shape::Const || shape == Shape::Val; }
};

/// Shape suffix used in helper names: `val` for Const/Val, `fut` for Fut;
/// boolean operands of == and != use `bval`/`bfut`.
std::string shape_name(const Operand& o, bool mark_bool = false);

/// Builds one function-modelling class. Exposed so tests can drive the
/// expression and statement translation of a single function directly.
class ExtractionContext {
 public:
  ExtractionContext(const frontend::CAst& ast, const frontend::FunctionDef& fn);
  ~ExtractionContext();
  ExtractionContext(const ExtractionContext&) = delete;
  ExtractionContext& operator=(const ExtractionContext&) = delete;

  /// Translates `e` into the statement list of the method being built.
  /// Futures created are appended to `outstanding()`; side-effect futures not
  /// covered by the returned operand are appended to `side_effects`.
  Operand translate_expression(const frontend::CExprPtr& e, std::vector<std::string>& side_effects);

  /// Translates a statement, including its closing await.
  void translate_statement(const frontend::CStmt& s);

  const std::vector<model::Stmt>& statements() const;
  const std::vector<std::string>& outstanding() const;

  /// Finishes the class (call method first, then helpers in creation order).
  model::ModelClass finish();
  /// Interface listing every method of the finished class.
  static model::ModelInterface interface_of(const model::ModelClass& cls);

 private:
  struct Impl;
  Impl* impl_;
};

/// Decoded helper-method name.
struct HelperInfo {
  enum class Kind {
    Call,         // the function-modelling `call`
    Operator,     // op_<op>_<shapes>
    Logical,      // op_and_N / op_or_N
    GetGlobal,    // get_global_<x>
    SetGlobal,    // set_global_<x>_<val|fut>
    GetLocal,     // get_local_<v>
    SetLocal,     // set_local_<v>_<val|fut>
    CallHelper,   // call_<f>_<shapes>_<n>
    Other,
  };
  Kind kind = Kind::Other;
  std::string op;                   // Operator: plus, minus, ..., neg, not
  std::vector<std::string> shapes;  // operand / argument shapes
  std::string target;               // global, local, or called function name
  int side_effects = 0;             // CallHelper
};

/// Decodes a helper name. Global and function names may contain
/// underscores, so the candidates are disambiguated against `ast`.
HelperInfo parse_helper_name(const std::string& method, const frontend::CAst& ast);

/// Operator spelling used in helper names (`plus`, `lt`, ...).
const char* op_name(BinOp op);

}  // namespace c2ao::extract
