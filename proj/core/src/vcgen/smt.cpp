#include <map>
#include <set>

#include "c2ao/vcgen/vcgen.hpp"

namespace c2ao::vc {

namespace {

std::string sym(const std::string& n) { return "|" + n + "|"; }

const char* sort_name(Sort s) {
  switch (s) {
    case Sort::Int: return "Int";
    case Sort::Bool: return "Bool";
    case Sort::Ref: return "Ref";
  }
  return "Int";
}

const char* sort_name(const model::Type& t) {
  if (t.kind == model::Type::Kind::Bool) return "Bool";
  if (t.kind == model::Type::Kind::Ref) return "Ref";
  return "Int";
}

void collect_calls(const ExprPtr& e, std::map<std::string, ExprPtr>& out) {
  if (!e) return;
  if (e->kind == Expr::Kind::Call) out.emplace(smt_term(e), e);
  for (const auto& a : e->args) collect_calls(a, out);
}

}  // namespace

std::string smt_term(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::IntLit:
      if (e->value < 0) return "(- " + std::to_string(0ULL - static_cast<unsigned long long>(e->value)) + ")";
      return std::to_string(e->value);
    case Expr::Kind::BoolLit: return e->value ? "true" : "false";
    case Expr::Kind::Null: return sym("null");
    case Expr::Kind::UnitLit: return "0";
    case Expr::Kind::Var: return sym(e->name);
    case Expr::Kind::Field: return sym("this." + e->name);
    case Expr::Kind::This: return sym("this");
    case Expr::Kind::Result: return sym("result");
    case Expr::Kind::ValueOf: return sym("valueOf(" + e->name + ")");
    case Expr::Kind::Unary:
      return std::string(e->unop == UnOp::Neg ? "(- " : "(not ") + smt_term(e->args[0]) + ")";
    case Expr::Kind::Binary: {
      std::string a = smt_term(e->args[0]);
      std::string b = smt_term(e->args[1]);
      auto app = [&](const char* op) { return std::string("(") + op + " " + a + " " + b + ")"; };
      switch (e->binop) {
        case BinOp::Add: return app("+");
        case BinOp::Sub: return app("-");
        case BinOp::Mul: return app("*");
        case BinOp::Div: return app("|c.div|");
        case BinOp::Mod: return app("|c.mod|");
        case BinOp::Lt: return app("<");
        case BinOp::Le: return app("<=");
        case BinOp::Gt: return app(">");
        case BinOp::Ge: return app(">=");
        case BinOp::Eq: return app("=");
        case BinOp::Ne: return "(not " + app("=") + ")";
        case BinOp::And: return app("and");
        case BinOp::Or: return app("or");
        case BinOp::Implies: return app("=>");
      }
      break;
    }
    case Expr::Kind::Call: {
      if (e->args.empty()) return sym(e->name);
      std::string s = "(" + sym(e->name);
      for (const auto& a : e->args) s += " " + smt_term(a);
      return s + ")";
    }
    case Expr::Kind::Ite:
      return "(ite " + smt_term(e->args[0]) + " " + smt_term(e->args[1]) + " " + smt_term(e->args[2]) + ")";
  }
  throw InternalError("unprintable term");
}

std::string emit_smtlib(const model::Model& model, const Obligation& o) {
  std::string s;
  s += "; " + o.name + "\n";
  if (!o.description.empty()) s += "; " + o.description + "\n";
  s += "(set-option :produce-models true)\n";
  s += "(declare-sort Ref 0)\n";
  s += "(declare-const |null| Ref)\n";
  s += "(define-fun |c.div| ((a Int) (b Int)) Int\n"
       "  (ite (= (< a 0) (< b 0)) (div (abs a) (abs b)) (- (div (abs a) (abs b)))))\n";
  s += "(define-fun |c.mod| ((a Int) (b Int)) Int (- a (* b (|c.div| a b))))\n";
  if (!model.logic_functions.empty()) {
    std::string decls, bodies;
    for (const auto& lf : model.logic_functions) {
      decls += "(" + sym(lf.name) + " (";
      for (size_t i = 0; i < lf.params.size(); ++i) {
        if (i) decls += " ";
        decls += "(" + sym(lf.params[i].name) + " " + sort_name(lf.params[i].type) + ")";
      }
      decls += ") " + std::string(sort_name(lf.ret)) + ")";
      bodies += " " + smt_term(lower_implies(lf.body));
    }
    s += "(define-funs-rec (" + decls + ") (" + bodies.substr(1) + "))\n";
  }
  for (const auto& [n, sort] : o.symbols) s += "(declare-const " + sym(n) + " " + sort_name(sort) + ")\n";

  // Defining equations of every logic-function application, two levels deep.
  std::map<std::string, ExprPtr> pending;
  for (const auto& h : o.hypotheses) collect_calls(h, pending);
  collect_calls(o.goal, pending);
  std::set<std::string> done;
  for (int depth = 0; depth < 2 && !pending.empty(); ++depth) {
    std::map<std::string, ExprPtr> next;
    for (const auto& [key, call] : pending) {
      if (!done.insert(key).second) continue;
      const model::LogicFunction* lf = model.find_logic_function(call->name);
      if (!lf || lf->params.size() != call->args.size()) continue;
      std::map<std::string, ExprPtr> sub;
      for (size_t i = 0; i < lf->params.size(); ++i) sub[lf->params[i].name] = call->args[i];
      ExprPtr body = substitute_vars(lower_implies(lf->body), sub);
      s += "(assert (= " + key + " " + smt_term(body) + "))\n";
      collect_calls(body, next);
    }
    pending = std::move(next);
  }

  std::string goal = smt_term(o.goal);
  if (o.hypotheses.empty()) {
    s += "(assert (not " + goal + "))\n";
  } else {
    std::string h = o.hypotheses.size() == 1 ? smt_term(o.hypotheses[0]) : "(and";
    if (o.hypotheses.size() > 1) {
      for (const auto& x : o.hypotheses) h += "\n    " + smt_term(x);
      h += ")";
    }
    s += "(assert (not (=> " + h + "\n  " + goal + ")))\n";
  }
  s += "(check-sat)\n(get-model)\n";
  return s;
}

}  // namespace c2ao::vc
