#include "c2ao/expr.hpp"

#include "c2ao/common.hpp"

namespace c2ao {

const char* spelling(UnOp op) { return op == UnOp::Neg ? "-" : "!"; }

const char* spelling(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
    case BinOp::Implies: return "==>";
  }
  return "?";
}

bool is_arithmetic(BinOp op) {
  return op == BinOp::Add || op == BinOp::Sub || op == BinOp::Mul || op == BinOp::Div ||
         op == BinOp::Mod;
}

bool is_comparison(BinOp op) {
  return op == BinOp::Lt || op == BinOp::Le || op == BinOp::Gt || op == BinOp::Ge ||
         op == BinOp::Eq || op == BinOp::Ne;
}

bool is_logical(BinOp op) { return op == BinOp::And || op == BinOp::Or || op == BinOp::Implies; }

namespace ex {

namespace {
ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }
}  // namespace

ExprPtr int_lit(std::int64_t v) {
  Expr e;
  e.kind = Expr::Kind::IntLit;
  e.value = v;
  return make(std::move(e));
}

ExprPtr bool_lit(bool b) {
  Expr e;
  e.kind = Expr::Kind::BoolLit;
  e.value = b ? 1 : 0;
  return make(std::move(e));
}

ExprPtr null() {
  Expr e;
  e.kind = Expr::Kind::Null;
  return make(std::move(e));
}

ExprPtr unit() {
  Expr e;
  e.kind = Expr::Kind::UnitLit;
  return make(std::move(e));
}

ExprPtr this_ref() {
  Expr e;
  e.kind = Expr::Kind::This;
  return make(std::move(e));
}

ExprPtr var(std::string name) {
  Expr e;
  e.kind = Expr::Kind::Var;
  e.name = std::move(name);
  return make(std::move(e));
}

ExprPtr field(std::string name) {
  Expr e;
  e.kind = Expr::Kind::Field;
  e.name = std::move(name);
  return make(std::move(e));
}

ExprPtr result() {
  Expr e;
  e.kind = Expr::Kind::Result;
  return make(std::move(e));
}

ExprPtr value_of(std::string name) {
  Expr e;
  e.kind = Expr::Kind::ValueOf;
  e.name = std::move(name);
  return make(std::move(e));
}

ExprPtr unary(UnOp op, ExprPtr a) {
  if (op == UnOp::Neg && a->kind == Expr::Kind::IntLit) return int_lit(-a->value);
  Expr e;
  e.kind = Expr::Kind::Unary;
  e.unop = op;
  e.args.push_back(std::move(a));
  return make(std::move(e));
}

ExprPtr neg(ExprPtr e) { return unary(UnOp::Neg, std::move(e)); }
ExprPtr lnot(ExprPtr e) { return unary(UnOp::Not, std::move(e)); }

ExprPtr binary(BinOp op, ExprPtr a, ExprPtr b) {
  Expr e;
  e.kind = Expr::Kind::Binary;
  e.binop = op;
  e.args.push_back(std::move(a));
  e.args.push_back(std::move(b));
  return make(std::move(e));
}

ExprPtr call(std::string fn, std::vector<ExprPtr> args) {
  Expr e;
  e.kind = Expr::Kind::Call;
  e.name = std::move(fn);
  e.args = std::move(args);
  return make(std::move(e));
}

ExprPtr ite(ExprPtr c, ExprPtr a, ExprPtr b) {
  Expr e;
  e.kind = Expr::Kind::Ite;
  e.args = {std::move(c), std::move(a), std::move(b)};
  return make(std::move(e));
}

ExprPtr conj(ExprPtr a, ExprPtr b) {
  if (!a) return b;
  if (!b) return a;
  return binary(BinOp::And, std::move(a), std::move(b));
}

ExprPtr conj(const std::vector<ExprPtr>& parts) {
  ExprPtr out;
  for (const auto& p : parts) out = conj(out, p);
  return out;
}

}  // namespace ex

bool same(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::IntLit:
    case Expr::Kind::BoolLit:
      return a.value == b.value;
    case Expr::Kind::Null:
    case Expr::Kind::UnitLit:
    case Expr::Kind::This:
    case Expr::Kind::Result:
      return true;
    case Expr::Kind::Var:
    case Expr::Kind::Field:
    case Expr::Kind::ValueOf:
      return a.name == b.name;
    case Expr::Kind::Unary:
      if (a.unop != b.unop) return false;
      break;
    case Expr::Kind::Binary:
      if (a.binop != b.binop) return false;
      break;
    case Expr::Kind::Call:
      if (a.name != b.name) return false;
      break;
    case Expr::Kind::Ite:
      break;
  }
  if (a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (!same(a.args[i], b.args[i])) return false;
  }
  return true;
}

bool same(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return a == b || same(*a, *b);
}

namespace {

// Higher binds tighter.
int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Ite: return 0;
    case Expr::Kind::Binary:
      switch (e.binop) {
        case BinOp::Implies: return 1;
        case BinOp::Or: return 2;
        case BinOp::And: return 3;
        case BinOp::Eq:
        case BinOp::Ne: return 4;
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge: return 5;
        case BinOp::Add:
        case BinOp::Sub: return 6;
        case BinOp::Mul:
        case BinOp::Div:
        case BinOp::Mod: return 7;
      }
      return 7;
    case Expr::Kind::Unary: return 8;
    case Expr::Kind::IntLit: return e.value < 0 ? 8 : 9;
    default: return 9;
  }
}

void print_to(std::string& out, const Expr& e, Syntax syntax);

void print_child(std::string& out, const Expr& child, bool parens, Syntax syntax) {
  if (parens) out += '(';
  print_to(out, child, syntax);
  if (parens) out += ')';
}

void print_to(std::string& out, const Expr& e, Syntax syntax) {
  switch (e.kind) {
    case Expr::Kind::IntLit: out += std::to_string(e.value); return;
    case Expr::Kind::BoolLit:
      if (syntax == Syntax::Abs) out += e.value ? "True" : "False";
      else out += e.value ? "\\true" : "\\false";
      return;
    case Expr::Kind::Null: out += "null"; return;
    case Expr::Kind::UnitLit: out += "unit"; return;
    case Expr::Kind::This: out += "this"; return;
    case Expr::Kind::Var: out += e.name; return;
    case Expr::Kind::Field: out += "this." + e.name; return;
    case Expr::Kind::Result: out += syntax == Syntax::Abs ? "result" : "\\result"; return;
    case Expr::Kind::ValueOf: out += "valueOf(" + e.name + ")"; return;
    case Expr::Kind::Unary: {
      out += spelling(e.unop);
      const Expr& a = *e.args[0];
      bool parens = precedence(a) < 8 || (a.kind == Expr::Kind::IntLit && a.value < 0) ||
                    (a.kind == Expr::Kind::Unary);
      print_child(out, a, parens, syntax);
      return;
    }
    case Expr::Kind::Binary: {
      int p = precedence(e);
      const Expr& l = *e.args[0];
      const Expr& r = *e.args[1];
      bool right_assoc = e.binop == BinOp::Implies;
      bool lp = right_assoc ? precedence(l) <= p : precedence(l) < p;
      bool rp = right_assoc ? precedence(r) < p : precedence(r) <= p;
      print_child(out, l, lp, syntax);
      out += ' ';
      out += spelling(e.binop);
      out += ' ';
      print_child(out, r, rp, syntax);
      return;
    }
    case Expr::Kind::Call:
      out += e.name;
      out += '(';
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        print_to(out, *e.args[i], syntax);
      }
      out += ')';
      return;
    case Expr::Kind::Ite:
      out += "if ";
      print_child(out, *e.args[0], precedence(*e.args[0]) == 0, syntax);
      out += " then ";
      print_child(out, *e.args[1], precedence(*e.args[1]) == 0, syntax);
      out += " else ";
      print_to(out, *e.args[2], syntax);
      return;
  }
}

}  // namespace

std::string print(const Expr& e, Syntax syntax) {
  std::string out;
  print_to(out, e, syntax);
  return out;
}

std::string print(const ExprPtr& e, Syntax syntax) {
  if (!e) return "<none>";
  return print(*e, syntax);
}

ExprPtr rewrite(const ExprPtr& e, const Rewriter& fn) {
  if (!e) return e;
  if (auto r = fn(*e)) return r;
  if (e->args.empty()) return e;
  bool changed = false;
  std::vector<ExprPtr> args;
  args.reserve(e->args.size());
  for (const auto& a : e->args) {
    args.push_back(rewrite(a, fn));
    changed = changed || args.back() != a;
  }
  if (!changed) return e;
  Expr copy = *e;
  copy.args = std::move(args);
  if (copy.kind == Expr::Kind::Unary) return ex::unary(copy.unop, copy.args[0]);
  return std::make_shared<const Expr>(std::move(copy));
}

ExprPtr substitute_vars(const ExprPtr& e, const std::map<std::string, ExprPtr>& map) {
  return rewrite(e, [&](const Expr& n) -> ExprPtr {
    if (n.kind != Expr::Kind::Var) return nullptr;
    auto it = map.find(n.name);
    return it == map.end() ? nullptr : it->second;
  });
}

namespace {
void collect(const Expr& e, Names& out) {
  switch (e.kind) {
    case Expr::Kind::Var: out.vars.insert(e.name); break;
    case Expr::Kind::Field: out.fields.insert(e.name); break;
    case Expr::Kind::ValueOf: out.value_ofs.insert(e.name); break;
    case Expr::Kind::Call: out.calls.insert(e.name); break;
    case Expr::Kind::Result: out.result = true; break;
    case Expr::Kind::This: out.this_ref = true; break;
    case Expr::Kind::Binary:
      if (e.binop == BinOp::Div || e.binop == BinOp::Mod) out.division = true;
      break;
    default: break;
  }
  for (const auto& a : e.args) collect(*a, out);
}
}  // namespace

Names collect_names(const ExprPtr& e) {
  Names out;
  if (e) collect(*e, out);
  return out;
}

ExprPtr lower_implies(const ExprPtr& e) {
  return rewrite(e, [](const Expr& n) -> ExprPtr {
    if (n.kind != Expr::Kind::Binary || n.binop != BinOp::Implies) return nullptr;
    return ex::binary(BinOp::Or, ex::lnot(lower_implies(n.args[0])), lower_implies(n.args[1]));
  });
}

}  // namespace c2ao
