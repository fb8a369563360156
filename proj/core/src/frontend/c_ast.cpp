#include "c2ao/frontend/c_ast.hpp"

#include "c2ao/frontend/parser.hpp"

namespace c2ao::frontend {

const char* to_string(CType t) {
  switch (t) {
    case CType::Int: return "int";
    case CType::Bool: return "bool";
    case CType::Void: return "void";
  }
  return "?";
}

const FunctionDef* CAst::find_function(const std::string& name) const {
  for (const auto& f : functions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

const GlobalVarDecl* CAst::find_global(const std::string& name) const {
  for (const auto& g : globals) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

const LogicFunctionDef* CAst::find_logic_function(const std::string& name) const {
  for (const auto& l : logic_functions) {
    if (l.name == name) return &l;
  }
  return nullptr;
}

bool same(const CExprPtr& a, const CExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind || a->value != b->value || a->name != b->name || a->type != b->type ||
      a->scope != b->scope || a->is_const != b->is_const || a->args.size() != b->args.size()) {
    return false;
  }
  if (a->kind == CExpr::Kind::Unary && a->unop != b->unop) return false;
  if (a->kind == CExpr::Kind::Binary && a->binop != b->binop) return false;
  for (size_t i = 0; i < a->args.size(); ++i) {
    if (!same(a->args[i], b->args[i])) return false;
  }
  return true;
}

namespace {

bool same_body(const std::vector<CStmt>& a, const std::vector<CStmt>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!same(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace

bool same(const CStmt& a, const CStmt& b) {
  return a.kind == b.kind && same(a.expr, b.expr) && a.name == b.name && a.is_const == b.is_const &&
         a.has_else == b.has_else && same(a.loop_invariant, b.loop_invariant) &&
         same_body(a.body, b.body) && same_body(a.else_body, b.else_body);
}

bool same(const CAst& a, const CAst& b) {
  if (a.logic_functions.size() != b.logic_functions.size() || a.globals.size() != b.globals.size() ||
      a.functions.size() != b.functions.size()) {
    return false;
  }
  for (size_t i = 0; i < a.logic_functions.size(); ++i) {
    const auto& x = a.logic_functions[i];
    const auto& y = b.logic_functions[i];
    if (x.name != y.name || x.return_type != y.return_type || x.params != y.params ||
        !same(x.body, y.body)) {
      return false;
    }
  }
  for (size_t i = 0; i < a.globals.size(); ++i) {
    const auto& x = a.globals[i];
    const auto& y = b.globals[i];
    if (x.name != y.name || x.initializer != y.initializer ||
        !same(x.strong_invariant, y.strong_invariant) || !same(x.weak_invariant, y.weak_invariant)) {
      return false;
    }
  }
  for (size_t i = 0; i < a.functions.size(); ++i) {
    const auto& x = a.functions[i];
    const auto& y = b.functions[i];
    if (x.name != y.name || x.return_type != y.return_type || x.params.size() != y.params.size() ||
        !same(x.contract.requires_clause, y.contract.requires_clause) ||
        !same(x.contract.ensures_clause, y.contract.ensures_clause) || !same_body(x.body, y.body)) {
      return false;
    }
    for (size_t k = 0; k < x.params.size(); ++k) {
      if (x.params[k].name != y.params[k].name || x.params[k].is_const != y.params[k].is_const) {
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int c_precedence(const CExpr& e) {
  switch (e.kind) {
    case CExpr::Kind::Assign: return 1;
    case CExpr::Kind::Binary:
      switch (e.binop) {
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
        default: return 7;
      }
    case CExpr::Kind::Unary: return 8;
    case CExpr::Kind::IntLit: return e.value < 0 ? 8 : 9;
    default: return 9;
  }
}

void print_expr(std::string& out, const CExpr& e);

void print_operand(std::string& out, const CExpr& e, bool parens) {
  if (parens) out += '(';
  print_expr(out, e);
  if (parens) out += ')';
}

void print_expr(std::string& out, const CExpr& e) {
  switch (e.kind) {
    case CExpr::Kind::IntLit: out += std::to_string(e.value); return;
    case CExpr::Kind::Var: out += e.name; return;
    case CExpr::Kind::Assign:
      out += e.name + " = ";
      print_operand(out, *e.args[0], c_precedence(*e.args[0]) < 1);
      return;
    case CExpr::Kind::Unary: {
      out += spelling(e.unop);
      const CExpr& a = *e.args[0];
      print_operand(out, a, c_precedence(a) < 9);
      return;
    }
    case CExpr::Kind::Binary: {
      int p = c_precedence(e);
      print_operand(out, *e.args[0], c_precedence(*e.args[0]) < p);
      out += ' ';
      out += spelling(e.binop);
      out += ' ';
      print_operand(out, *e.args[1], c_precedence(*e.args[1]) <= p);
      return;
    }
    case CExpr::Kind::Call:
      out += e.name + "(";
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        print_operand(out, *e.args[i], c_precedence(*e.args[i]) <= 1);
      }
      out += ')';
      return;
  }
}

void indent(std::string& out, int depth) { out.append(static_cast<size_t>(depth) * 2, ' '); }

void print_stmts(std::string& out, const std::vector<CStmt>& body, int depth);

void print_stmt(std::string& out, const CStmt& s, int depth) {
  switch (s.kind) {
    case CStmt::Kind::Expr:
      indent(out, depth);
      print_expr(out, *s.expr);
      out += ";\n";
      return;
    case CStmt::Kind::Decl:
      indent(out, depth);
      out += s.is_const ? "const int " : "int ";
      out += s.name;
      if (s.expr) {
        out += " = ";
        print_expr(out, *s.expr);
      }
      out += ";\n";
      return;
    case CStmt::Kind::Return:
      indent(out, depth);
      out += "return";
      if (s.expr) {
        out += ' ';
        print_expr(out, *s.expr);
      }
      out += ";\n";
      return;
    case CStmt::Kind::Block:
      indent(out, depth);
      out += "{\n";
      print_stmts(out, s.body, depth + 1);
      indent(out, depth);
      out += "}\n";
      return;
    case CStmt::Kind::If:
      indent(out, depth);
      out += "if (";
      print_expr(out, *s.expr);
      out += ") {\n";
      print_stmts(out, s.body, depth + 1);
      indent(out, depth);
      out += "}";
      if (s.has_else) {
        out += " else {\n";
        print_stmts(out, s.else_body, depth + 1);
        indent(out, depth);
        out += "}";
      }
      out += '\n';
      return;
    case CStmt::Kind::While:
      if (s.loop_invariant) {
        indent(out, depth);
        out += "/*@ loop invariant " + print(s.loop_invariant, Syntax::Acsl) + "; @*/\n";
      }
      indent(out, depth);
      out += "while (";
      print_expr(out, *s.expr);
      out += ") {\n";
      print_stmts(out, s.body, depth + 1);
      indent(out, depth);
      out += "}\n";
      return;
  }
}

void print_stmts(std::string& out, const std::vector<CStmt>& body, int depth) {
  for (const auto& s : body) print_stmt(out, s, depth);
}

const char* logic_type_name(LogicType t) { return t == LogicType::Int ? "Int" : "Bool"; }

}  // namespace

std::string print_c(const CAst& ast) {
  std::string out;
  for (const auto& lf : ast.logic_functions) {
    out += "/*@ ABS def ";
    out += logic_type_name(lf.return_type);
    out += ' ' + lf.name + '(';
    for (size_t i = 0; i < lf.params.size(); ++i) {
      if (i) out += ", ";
      out += logic_type_name(lf.params[i].second);
      out += ' ' + lf.params[i].first;
    }
    out += ") = " + print(lf.body, Syntax::Acsl) + "; @*/\n";
  }
  for (const auto& g : ast.globals) {
    out += "int " + g.name;
    if (g.initializer != 0) out += " = " + std::to_string(g.initializer);
    out += ";\n";
    if (g.strong_invariant) {
      out += "/*@ strong global invariant " + print(g.strong_invariant, Syntax::Acsl) + "; @*/\n";
    }
    if (g.weak_invariant) {
      out += "/*@ weak global invariant " + print(g.weak_invariant, Syntax::Acsl) + "; @*/\n";
    }
  }
  for (const auto& f : ast.functions) {
    out += '\n';
    if (!f.contract.empty()) {
      out += "/*@";
      if (f.contract.requires_clause) {
        out += " requires " + print(f.contract.requires_clause, Syntax::Acsl) + ";";
      }
      if (f.contract.ensures_clause) {
        out += " ensures " + print(f.contract.ensures_clause, Syntax::Acsl) + ";";
      }
      out += " @*/\n";
    }
    out += f.return_type == CType::Void ? "void " : "int ";
    out += f.name + "(";
    if (f.params.empty()) out += "void";
    for (size_t i = 0; i < f.params.size(); ++i) {
      if (i) out += ", ";
      out += f.params[i].is_const ? "const int " : "int ";
      out += f.params[i].name;
    }
    out += ") {\n";
    print_stmts(out, f.body, 1);
    out += "}\n";
  }
  return out;
}

}  // namespace c2ao::frontend
