#pragma once

// Side-effect-free expressions. One representation serves ACSL clauses,
// model annotations, model statement operands and symbolic terms.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace c2ao {

enum class UnOp { Neg, Not };
enum class BinOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or, Implies };

const char* spelling(UnOp op);
const char* spelling(BinOp op);
bool is_arithmetic(BinOp op);
bool is_comparison(BinOp op);
bool is_logical(BinOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind {
    IntLit,
    BoolLit,
    Null,
    UnitLit,
    Var,      // local, parameter, or (in the model) a field named without `this.`
    Field,    // `this.name`
    This,
    Result,
    ValueOf,  // valueOf(name): resolved value of a future-typed parameter
    Unary,
    Binary,
    Call,     // logic function application
    Ite,      // if c then a else b
  };

  Kind kind = Kind::IntLit;
  std::int64_t value = 0;  // IntLit; BoolLit stores 0/1
  std::string name;        // Var, Field, ValueOf, Call
  UnOp unop = UnOp::Neg;
  BinOp binop = BinOp::Add;
  std::vector<ExprPtr> args;
};

/// Builders. `neg` on a literal folds into a negative literal so that the
/// printed form re-parses to the same tree.
namespace ex {
ExprPtr int_lit(std::int64_t v);
ExprPtr bool_lit(bool b);
ExprPtr null();
ExprPtr unit();
ExprPtr this_ref();
ExprPtr var(std::string name);
ExprPtr field(std::string name);
ExprPtr result();
ExprPtr value_of(std::string name);
ExprPtr unary(UnOp op, ExprPtr e);
ExprPtr neg(ExprPtr e);
ExprPtr lnot(ExprPtr e);
ExprPtr binary(BinOp op, ExprPtr a, ExprPtr b);
ExprPtr call(std::string fn, std::vector<ExprPtr> args);
ExprPtr ite(ExprPtr c, ExprPtr a, ExprPtr b);
/// Conjunction treating nullptr as `true`.
ExprPtr conj(ExprPtr a, ExprPtr b);
ExprPtr conj(const std::vector<ExprPtr>& parts);
}  // namespace ex

bool same(const ExprPtr& a, const ExprPtr& b);
bool same(const Expr& a, const Expr& b);

enum class Syntax { Abs, Acsl };
std::string print(const Expr& e, Syntax syntax = Syntax::Abs);
std::string print(const ExprPtr& e, Syntax syntax = Syntax::Abs);

/// Bottom-up rewrite: `fn` is offered every node first; a non-null return
/// replaces the node (without recursing into the replacement).
using Rewriter = std::function<ExprPtr(const Expr&)>;
ExprPtr rewrite(const ExprPtr& e, const Rewriter& fn);

ExprPtr substitute_vars(const ExprPtr& e, const std::map<std::string, ExprPtr>& map);

struct Names {
  std::set<std::string> vars;
  std::set<std::string> fields;
  std::set<std::string> value_ofs;
  std::set<std::string> calls;
  bool result = false;
  bool this_ref = false;
  bool division = false;
};
Names collect_names(const ExprPtr& e);

/// Replaces `a ==> b` by `!a || b` everywhere.
ExprPtr lower_implies(const ExprPtr& e);

}  // namespace c2ao
