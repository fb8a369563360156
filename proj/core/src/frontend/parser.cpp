// Recursive-descent parser for the C subset, followed by a resolver/type
// checker that fills in scopes, types and int-to-bool coercions.

#include "c2ao/frontend/parser.hpp"

#include <charconv>
#include <map>
#include <set>
#include <unordered_set>

#include "c2ao/lexer.hpp"

namespace c2ao::frontend {

namespace {

[[noreturn]] void unsupported(const Token& tok, const std::string& what) {
  throw DiagnosticError(DiagKind::UnsupportedConstruct, what + " is not supported", tok.loc);
}

[[noreturn]] void type_error(SourceLoc loc, const std::string& msg) {
  throw DiagnosticError(DiagKind::TypeError, msg, loc);
}

[[noreturn]] void spec_error(SourceLoc loc, const std::string& msg) {
  throw DiagnosticError(DiagKind::SpecError, msg, loc);
}

const std::map<std::string, std::string, std::less<>>& unsupported_keywords() {
  static const std::map<std::string, std::string, std::less<>> kw = {
      {"float", "floating-point type"},   {"double", "floating-point type"},
      {"char", "type 'char'"},            {"long", "type 'long'"},
      {"short", "type 'short'"},          {"unsigned", "unsigned type"},
      {"signed", "type modifier 'signed'"},
      {"struct", "struct"},               {"union", "union"},
      {"enum", "enum"},                   {"typedef", "typedef"},
      {"static", "storage class 'static'"}, {"extern", "storage class 'extern'"},
      {"volatile", "qualifier 'volatile'"}, {"register", "storage class 'register'"},
      {"inline", "inline function"},      {"auto", "storage class 'auto'"},
      {"switch", "switch statement"},     {"case", "switch statement"},
      {"default", "switch statement"},    {"for", "for loop"},
      {"do", "do-while loop"},            {"goto", "goto"},
      {"break", "break"},                 {"continue", "continue"},
      {"sizeof", "sizeof"},               {"_Bool", "type '_Bool'"},
  };
  return kw;
}

void reject_keyword(const Token& tok) {
  if (tok.kind != Token::Kind::Ident) return;
  const auto& kw = unsupported_keywords();
  if (auto it = kw.find(tok.text); it != kw.end()) unsupported(tok, it->second);
}

void reject_token(const Token& tok) {
  switch (tok.kind) {
    case Token::Kind::Float: unsupported(tok, "floating-point literal");
    case Token::Kind::String:
      if (!tok.text.empty() && tok.text.front() == '\'') unsupported(tok, "character literal");
      if (!tok.text.empty() && tok.text.front() == '"') unsupported(tok, "string literal");
      unsupported(tok, "non-decimal integer literal '" + tok.text + "'");
    case Token::Kind::Ident: reject_keyword(tok); return;
    case Token::Kind::Punct: {
      static const std::map<std::string, std::string, std::less<>> punct = {
          {"#", "preprocessor directive"}, {"[", "array"},
          {"&", "address-of / bitwise operator"}, {"|", "bitwise operator"},
          {"^", "bitwise operator"},       {"~", "bitwise operator"},
          {"<<", "shift operator"},        {">>", "shift operator"},
          {"++", "increment operator"},    {"--", "decrement operator"},
          {"+=", "compound assignment"},   {"-=", "compound assignment"},
          {"*=", "compound assignment"},   {"/=", "compound assignment"},
          {"%=", "compound assignment"},   {"&=", "compound assignment"},
          {"|=", "compound assignment"},   {"^=", "compound assignment"},
          {"?", "conditional operator"},   {"->", "member access"},
          {".", "member access"},
      };
      if (auto it = punct.find(tok.text); it != punct.end()) unsupported(tok, it->second);
      return;
    }
    default: return;
  }
}

std::int64_t parse_int(const Token& tok) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
  if (ec != std::errc() || p != tok.text.data() + tok.text.size()) {
    throw DiagnosticError(DiagKind::SyntaxError, "integer literal out of range: " + tok.text,
                          tok.loc);
  }
  if (tok.text.size() > 1 && tok.text.front() == '0') {
    unsupported(tok, "octal integer literal '" + tok.text + "'");
  }
  return v;
}

CExprPtr make(CExpr e) { return std::make_shared<const CExpr>(std::move(e)); }

// ---------------------------------------------------------------------------
// Syntax

class CParser {
 public:
  explicit CParser(std::string_view src) : cur_(tokenize(src, LexMode::C)) {}

  CAst run(std::vector<GlobalInvariant>& invariants) {
    std::optional<AcslContract> pending;
    while (!cur_.at_end()) {
      const Token& tok = cur_.peek();
      if (tok.kind == Token::Kind::Annotation) {
        cur_.next();
        AcslClause clause = parse_acsl_clause(tok.text, tok.loc);
        if (auto* c = std::get_if<AcslContract>(&clause)) {
          if (pending) spec_error(tok.loc, "two contracts precede the same function");
          pending = *c;
        } else if (auto* g = std::get_if<GlobalInvariant>(&clause)) {
          invariants.push_back(*g);
        } else if (auto* l = std::get_if<LogicFunctionDef>(&clause)) {
          ast_.logic_functions.push_back(*l);
        } else {
          spec_error(tok.loc, "loop invariant outside of a function body");
        }
        continue;
      }
      top_level(pending);
    }
    if (pending) spec_error(pending->loc, "function contract is not followed by a function");
    return std::move(ast_);
  }

 private:
  // [const] int|void [const]
  struct DeclSpec {
    bool is_const = false;
    CType type = CType::Int;
    SourceLoc loc;
  };

  bool at_type_start() const {
    const Token& t = cur_.peek();
    return t.is("int") || t.is("void") || t.is("const");
  }

  DeclSpec decl_spec() {
    DeclSpec ds;
    ds.loc = cur_.peek().loc;
    bool saw_type = false;
    while (true) {
      const Token& t = cur_.peek();
      reject_keyword(t);
      if (t.is("const")) {
        ds.is_const = true;
        cur_.next();
      } else if (!saw_type && (t.is("int") || t.is("void"))) {
        ds.type = t.is("int") ? CType::Int : CType::Void;
        saw_type = true;
        cur_.next();
      } else {
        break;
      }
    }
    if (!saw_type) cur_.fail("expected type specifier, found " + describe(cur_.peek()));
    if (cur_.peek().is("*")) unsupported(cur_.peek(), "pointer");
    return ds;
  }

  void top_level(std::optional<AcslContract>& pending) {
    reject_token(cur_.peek());
    DeclSpec ds = decl_spec();
    const Token name_tok = cur_.peek();
    std::string name = cur_.expect_ident("in declaration");
    if (cur_.peek().is("(")) {
      function(ds, name_tok, pending);
      return;
    }
    if (pending) spec_error(pending->loc, "function contract is followed by a variable declaration");
    if (ds.type != CType::Int) type_error(name_tok.loc, "variable '" + name + "' declared void");
    if (ds.is_const) unsupported(name_tok, "const global variable");
    SourceLoc name_loc = name_tok.loc;
    while (true) {
      if (cur_.peek().is("[")) unsupported(cur_.peek(), "array");
      GlobalVarDecl g;
      g.name = name;
      g.loc = name_loc;
      if (cur_.accept("=")) {
        bool neg = cur_.accept("-");
        const Token& lit = cur_.peek();
        reject_token(lit);
        if (lit.kind != Token::Kind::Int) {
          unsupported(lit, "non-constant global initializer");
        }
        cur_.next();
        g.initializer = neg ? -parse_int(lit) : parse_int(lit);
      }
      ast_.globals.push_back(std::move(g));
      if (!cur_.accept(",")) break;
      if (cur_.peek().is("*")) unsupported(cur_.peek(), "pointer");
      name_loc = cur_.peek().loc;
      name = cur_.expect_ident("in declaration");
    }
    reject_token(cur_.peek());
    cur_.expect(";", "after global declaration");
  }

  void function(const DeclSpec& ds, const Token& name_tok, std::optional<AcslContract>& pending) {
    FunctionDef f;
    f.name = name_tok.text;
    f.loc = name_tok.loc;
    f.return_type = ds.type;
    if (ds.is_const) unsupported(name_tok, "const-qualified return type");
    cur_.expect("(", "after function name");
    if (cur_.peek().is("void") && cur_.peek(1).is(")")) {
      cur_.next();
    } else if (!cur_.peek().is(")")) {
      do {
        reject_token(cur_.peek());
        DeclSpec p = decl_spec();
        if (p.type != CType::Int) type_error(p.loc, "parameter of type void");
        Param param;
        param.is_const = p.is_const;
        param.name = cur_.expect_ident("as parameter name");
        if (cur_.peek().is("[")) unsupported(cur_.peek(), "array");
        f.params.push_back(std::move(param));
      } while (cur_.accept(","));
    }
    reject_token(cur_.peek());
    cur_.expect(")", "to close parameter list");
    if (cur_.peek().is(";")) {
      // Prototype: no body, nothing to record.
      cur_.next();
      if (pending) spec_error(pending->loc, "contracts on prototypes are not supported; attach it to the definition");
      prototypes_.insert(f.name);
      return;
    }
    while (cur_.peek().kind == Token::Kind::Annotation) {
      const Token& tok = cur_.next();
      AcslClause clause = parse_acsl_clause(tok.text, tok.loc);
      auto* c = std::get_if<AcslContract>(&clause);
      if (!c) spec_error(tok.loc, "only a function contract may appear between the signature and the body");
      if (pending) spec_error(tok.loc, "two contracts given for function '" + f.name + "'");
      pending = *c;
    }
    if (pending) {
      f.contract = *pending;
      pending.reset();
    }
    if (!cur_.peek().is("{")) {
      reject_token(cur_.peek());
      cur_.fail("expected '{' to start function body, found " + describe(cur_.peek()));
    }
    f.body = block_body();
    ast_.functions.push_back(std::move(f));
  }

  std::vector<CStmt> block_body() {
    cur_.expect("{", "to open block");
    std::vector<CStmt> out;
    while (!cur_.peek().is("}")) {
      if (cur_.at_end()) cur_.fail("unterminated block: expected '}'");
      statement(out);
    }
    cur_.next();
    return out;
  }

  // Parses a statement used as an if/while body into a statement list.
  std::vector<CStmt> sub_statement() {
    if (cur_.peek().is("{")) return block_body();
    std::vector<CStmt> out;
    if (at_type_start()) cur_.fail("a declaration is not allowed as an unbraced sub-statement");
    statement(out);
    return out;
  }

  void statement(std::vector<CStmt>& out) {
    const Token& tok = cur_.peek();
    reject_token(tok);
    if (tok.kind == Token::Kind::Annotation) {
      cur_.next();
      AcslClause clause = parse_acsl_clause(tok.text, tok.loc);
      auto* li = std::get_if<LoopInvariant>(&clause);
      if (!li) spec_error(tok.loc, "only loop invariants may appear inside a function body");
      if (!cur_.peek().is("while")) spec_error(tok.loc, "loop invariant must be followed by a while loop");
      out.push_back(while_stmt(li->formula));
      return;
    }
    if (tok.is("{")) {
      CStmt s;
      s.kind = CStmt::Kind::Block;
      s.loc = tok.loc;
      s.body = block_body();
      out.push_back(std::move(s));
      return;
    }
    if (tok.is(";")) {
      cur_.next();
      CStmt s;
      s.kind = CStmt::Kind::Block;
      s.loc = tok.loc;
      out.push_back(std::move(s));
      return;
    }
    if (tok.is("if")) {
      CStmt s;
      s.kind = CStmt::Kind::If;
      s.loc = tok.loc;
      cur_.next();
      cur_.expect("(", "after 'if'");
      s.expr = expression();
      cur_.expect(")", "to close if condition");
      s.body = sub_statement();
      if (cur_.accept("else")) {
        s.has_else = true;
        s.else_body = sub_statement();
      }
      out.push_back(std::move(s));
      return;
    }
    if (tok.is("while")) {
      out.push_back(while_stmt(nullptr));
      return;
    }
    if (tok.is("return")) {
      CStmt s;
      s.kind = CStmt::Kind::Return;
      s.loc = tok.loc;
      cur_.next();
      if (!cur_.peek().is(";")) s.expr = expression();
      expect_semicolon();
      out.push_back(std::move(s));
      return;
    }
    if (at_type_start()) {
      DeclSpec ds = decl_spec();
      if (ds.type != CType::Int) type_error(ds.loc, "local variable declared void");
      do {
        CStmt s;
        s.kind = CStmt::Kind::Decl;
        s.loc = cur_.peek().loc;
        s.is_const = ds.is_const;
        if (cur_.peek().is("*")) unsupported(cur_.peek(), "pointer");
        s.name = cur_.expect_ident("in declaration");
        if (cur_.peek().is("[")) unsupported(cur_.peek(), "array");
        if (cur_.accept("=")) s.expr = assignment();
        out.push_back(std::move(s));
      } while (cur_.accept(","));
      expect_semicolon();
      return;
    }
    CStmt s;
    s.kind = CStmt::Kind::Expr;
    s.loc = tok.loc;
    s.expr = expression();
    expect_semicolon();
    out.push_back(std::move(s));
  }

  CStmt while_stmt(ExprPtr inv) {
    CStmt s;
    s.kind = CStmt::Kind::While;
    s.loc = cur_.peek().loc;
    s.loop_invariant = std::move(inv);
    cur_.expect("while", "");
    cur_.expect("(", "after 'while'");
    s.expr = expression();
    cur_.expect(")", "to close while condition");
    s.body = sub_statement();
    return s;
  }

  void expect_semicolon() {
    reject_token(cur_.peek());
    if (cur_.peek().is(",")) unsupported(cur_.peek(), "comma operator");
    cur_.expect(";", "at end of statement");
  }

  CExprPtr expression() {
    CExprPtr e = assignment();
    if (cur_.peek().is(",")) unsupported(cur_.peek(), "comma operator");
    return e;
  }

  CExprPtr assignment() {
    const Token& start = cur_.peek();
    if (start.kind == Token::Kind::Ident && cur_.peek(1).is("=")) {
      reject_keyword(start);
      cur_.next();
      cur_.next();
      CExpr e;
      e.kind = CExpr::Kind::Assign;
      e.name = start.text;
      e.loc = start.loc;
      e.args.push_back(assignment());
      return make(std::move(e));
    }
    CExprPtr lhs = logical_or();
    if (cur_.peek().is("=")) {
      throw DiagnosticError(DiagKind::UnsupportedConstruct,
                            "assignment target must be a plain variable", cur_.peek().loc);
    }
    reject_token(cur_.peek());
    return lhs;
  }

  CExprPtr binary(BinOp op, CExprPtr a, CExprPtr b, SourceLoc loc) {
    CExpr e;
    e.kind = CExpr::Kind::Binary;
    e.binop = op;
    e.loc = loc;
    e.args = {std::move(a), std::move(b)};
    return make(std::move(e));
  }

  CExprPtr logical_or() {
    CExprPtr e = logical_and();
    while (cur_.peek().is("||")) {
      SourceLoc loc = cur_.next().loc;
      e = binary(BinOp::Or, e, logical_and(), loc);
    }
    return e;
  }

  CExprPtr logical_and() {
    CExprPtr e = equality();
    while (cur_.peek().is("&&")) {
      SourceLoc loc = cur_.next().loc;
      e = binary(BinOp::And, e, equality(), loc);
    }
    return e;
  }

  CExprPtr equality() {
    CExprPtr e = relational();
    while (true) {
      const Token& t = cur_.peek();
      BinOp op;
      if (t.is("==")) op = BinOp::Eq;
      else if (t.is("!=")) op = BinOp::Ne;
      else return e;
      cur_.next();
      e = binary(op, e, relational(), t.loc);
    }
  }

  CExprPtr relational() {
    CExprPtr e = additive();
    while (true) {
      const Token& t = cur_.peek();
      BinOp op;
      if (t.is("<")) op = BinOp::Lt;
      else if (t.is("<=")) op = BinOp::Le;
      else if (t.is(">")) op = BinOp::Gt;
      else if (t.is(">=")) op = BinOp::Ge;
      else return e;
      cur_.next();
      e = binary(op, e, additive(), t.loc);
    }
  }

  CExprPtr additive() {
    CExprPtr e = multiplicative();
    while (true) {
      const Token& t = cur_.peek();
      BinOp op;
      if (t.is("+")) op = BinOp::Add;
      else if (t.is("-")) op = BinOp::Sub;
      else return e;
      cur_.next();
      e = binary(op, e, multiplicative(), t.loc);
    }
  }

  CExprPtr multiplicative() {
    CExprPtr e = unary();
    while (true) {
      const Token& t = cur_.peek();
      BinOp op;
      if (t.is("*")) op = BinOp::Mul;
      else if (t.is("/")) op = BinOp::Div;
      else if (t.is("%")) op = BinOp::Mod;
      else return e;
      cur_.next();
      e = binary(op, e, unary(), t.loc);
    }
  }

  CExprPtr unary() {
    const Token& t = cur_.peek();
    reject_token(t);
    if (t.is("*")) unsupported(t, "pointer dereference");
    if (t.is("+")) {
      cur_.next();
      return unary();
    }
    if (t.is("-") || t.is("!")) {
      cur_.next();
      CExprPtr operand = unary();
      if (t.is("-") && operand->kind == CExpr::Kind::IntLit) {
        // Fold so that printing and re-parsing agree.
        CExpr lit = *operand;
        lit.value = -lit.value;
        lit.loc = t.loc;
        return make(std::move(lit));
      }
      CExpr e;
      e.kind = CExpr::Kind::Unary;
      e.unop = t.is("-") ? UnOp::Neg : UnOp::Not;
      e.loc = t.loc;
      e.args.push_back(std::move(operand));
      return make(std::move(e));
    }
    return postfix();
  }

  CExprPtr postfix() {
    const Token& t = cur_.peek();
    CExprPtr e;
    if (t.kind == Token::Kind::Int) {
      cur_.next();
      CExpr lit;
      lit.kind = CExpr::Kind::IntLit;
      lit.value = parse_int(t);
      lit.loc = t.loc;
      e = make(std::move(lit));
    } else if (t.is("(")) {
      cur_.next();
      if (at_type_start()) unsupported(t, "cast");
      reject_keyword(cur_.peek());
      e = expression();
      cur_.expect(")", "to close parenthesized expression");
    } else if (t.kind == Token::Kind::Ident) {
      reject_keyword(t);
      if (t.is("int") || t.is("void") || t.is("const") || t.is("if") || t.is("while") ||
          t.is("return") || t.is("else")) {
        cur_.fail("unexpected keyword '" + t.text + "' in expression");
      }
      cur_.next();
      if (cur_.peek().is("(")) {
        cur_.next();
        CExpr call;
        call.kind = CExpr::Kind::Call;
        call.name = t.text;
        call.loc = t.loc;
        if (!cur_.peek().is(")")) {
          do {
            call.args.push_back(assignment());
          } while (cur_.accept(","));
        }
        cur_.expect(")", "to close argument list");
        e = make(std::move(call));
      } else {
        CExpr var;
        var.kind = CExpr::Kind::Var;
        var.name = t.text;
        var.loc = t.loc;
        e = make(std::move(var));
      }
    } else if (t.kind == Token::Kind::Annotation) {
      spec_error(t.loc, "annotation inside an expression");
    } else {
      cur_.fail("expected expression, found " + describe(t));
    }
    const Token& after = cur_.peek();
    if (after.is("++") || after.is("--") || after.is("[") || after.is(".") || after.is("->")) {
      reject_token(after);
    }
    if (after.is("(")) unsupported(after, "call through a non-identifier");
    return e;
  }

  TokenCursor cur_;
  CAst ast_;

 public:
  std::set<std::string> prototypes_;
};

// ---------------------------------------------------------------------------
// Resolution and type checking

struct VarInfo {
  Scope scope;
  bool is_const;
};

class Checker {
 public:
  explicit Checker(CAst& ast) : ast_(ast) {}

  void run(const std::vector<GlobalInvariant>& invariants, const std::set<std::string>& prototypes) {
    check_unique();
    for (const auto& p : prototypes) {
      if (!ast_.find_function(p)) {
        throw DiagnosticError(DiagKind::TypeError, "function '" + p + "' is declared but never defined");
      }
    }
    for (auto& lf : ast_.logic_functions) check_logic_function(lf);
    attach_invariants(invariants);
    for (auto& f : ast_.functions) check_function(f);
  }

 private:
  void check_unique() {
    std::map<std::string, SourceLoc> seen;
    auto claim = [&](const std::string& name, SourceLoc loc, const char* what) {
      auto [it, fresh] = seen.emplace(name, loc);
      if (!fresh) {
        type_error(loc, std::string("redefinition of ") + what + " '" + name + "' (first defined at " +
                            to_string(it->second) + ")");
      }
    };
    for (const auto& g : ast_.globals) claim(g.name, g.loc, "global");
    for (const auto& f : ast_.functions) claim(f.name, f.loc, "function");
    for (const auto& l : ast_.logic_functions) claim(l.name, l.loc, "logic function");
  }

  // --- formulas ---------------------------------------------------------

  enum class FType { Int, Bool };

  struct FormulaScope {
    std::map<std::string, FType> vars;
    bool allow_result = false;
    SourceLoc loc;
  };

  static FType to_ftype(LogicType t) { return t == LogicType::Int ? FType::Int : FType::Bool; }

  FType infer(const ExprPtr& e, const FormulaScope& sc) {
    switch (e->kind) {
      case Expr::Kind::IntLit: return FType::Int;
      case Expr::Kind::BoolLit: return FType::Bool;
      case Expr::Kind::Result:
        if (!sc.allow_result) spec_error(sc.loc, "\\result is only allowed in ensures clauses of non-void functions");
        return FType::Int;
      case Expr::Kind::Var: {
        auto it = sc.vars.find(e->name);
        if (it == sc.vars.end()) spec_error(sc.loc, "unknown name '" + e->name + "' in specification");
        return it->second;
      }
      case Expr::Kind::Unary: {
        FType t = infer(e->args[0], sc);
        FType want = e->unop == UnOp::Neg ? FType::Int : FType::Bool;
        if (t != want) spec_error(sc.loc, "ill-typed operand of '" + std::string(spelling(e->unop)) + "'");
        return want;
      }
      case Expr::Kind::Binary: {
        FType a = infer(e->args[0], sc);
        FType b = infer(e->args[1], sc);
        BinOp op = e->binop;
        if (is_arithmetic(op)) {
          if (a != FType::Int || b != FType::Int) spec_error(sc.loc, "arithmetic on non-integer operands in '" + print(e, Syntax::Acsl) + "'");
          return FType::Int;
        }
        if (op == BinOp::Eq || op == BinOp::Ne) {
          if (a != b) spec_error(sc.loc, "comparison of mismatched types in '" + print(e, Syntax::Acsl) + "'");
          return FType::Bool;
        }
        if (is_comparison(op)) {
          if (a != FType::Int || b != FType::Int) spec_error(sc.loc, "ordering on non-integer operands in '" + print(e, Syntax::Acsl) + "'");
          return FType::Bool;
        }
        if (a != FType::Bool || b != FType::Bool) spec_error(sc.loc, "logical operator on non-boolean operands in '" + print(e, Syntax::Acsl) + "'");
        return FType::Bool;
      }
      case Expr::Kind::Call: {
        const LogicFunctionDef* lf = ast_.find_logic_function(e->name);
        if (!lf) {
          if (ast_.find_function(e->name)) {
            spec_error(sc.loc, "C function '" + e->name + "' cannot be called in a specification");
          }
          spec_error(sc.loc, "unknown logic function '" + e->name + "'");
        }
        if (lf->params.size() != e->args.size()) {
          spec_error(sc.loc, "logic function '" + e->name + "' expects " +
                                 std::to_string(lf->params.size()) + " arguments");
        }
        for (size_t i = 0; i < e->args.size(); ++i) {
          if (infer(e->args[i], sc) != to_ftype(lf->params[i].second)) {
            spec_error(sc.loc, "argument " + std::to_string(i + 1) + " of '" + e->name + "' has the wrong type");
          }
        }
        return to_ftype(lf->return_type);
      }
      case Expr::Kind::Ite: {
        if (infer(e->args[0], sc) != FType::Bool) spec_error(sc.loc, "condition of if-then-else must be boolean");
        FType a = infer(e->args[1], sc);
        if (a != infer(e->args[2], sc)) spec_error(sc.loc, "branches of if-then-else have different types");
        return a;
      }
      default: spec_error(sc.loc, "construct not allowed in C specifications: " + print(e, Syntax::Acsl));
    }
  }

  void expect_bool_formula(const ExprPtr& f, const FormulaScope& sc) {
    if (infer(f, sc) != FType::Bool) spec_error(sc.loc, "specification '" + print(f, Syntax::Acsl) + "' is not boolean");
  }

  void check_logic_function(const LogicFunctionDef& lf) {
    FormulaScope sc;
    sc.loc = lf.loc;
    for (const auto& [name, t] : lf.params) {
      if (!sc.vars.emplace(name, to_ftype(t)).second) spec_error(lf.loc, "duplicate parameter '" + name + "' of '" + lf.name + "'");
    }
    if (infer(lf.body, sc) != to_ftype(lf.return_type)) {
      spec_error(lf.loc, "body of logic function '" + lf.name + "' does not match its declared type");
    }
  }

  std::map<std::string, FType> globals_scope() const {
    std::map<std::string, FType> m;
    for (const auto& g : ast_.globals) m.emplace(g.name, FType::Int);
    return m;
  }

  void attach_invariants(const std::vector<GlobalInvariant>& invariants) {
    for (const auto& inv : invariants) {
      FormulaScope sc;
      sc.loc = inv.loc;
      sc.vars = globals_scope();
      expect_bool_formula(inv.formula, sc);
      Names names = collect_names(inv.formula);
      if (names.vars.empty()) spec_error(inv.loc, "global invariant mentions no global variable");
      if (inv.strong && names.vars.size() > 1) {
        spec_error(inv.loc, "strong global invariants may mention a single variable only");
      }
      GlobalVarDecl* target = nullptr;
      for (auto& g : ast_.globals) {
        if (g.name == *names.vars.begin()) target = &g;
      }
      ExprPtr& slot = inv.strong ? target->strong_invariant : target->weak_invariant;
      slot = ex::conj(slot, inv.formula);
      if (target->strong_invariant && target->weak_invariant) {
        ast_.warnings.push_back({DiagKind::Warning, Severity::Warning,
                                 "global '" + target->name +
                                     "' has both a strong and a weak invariant; they are treated independently",
                                 inv.loc});
      }
    }
  }

  // --- C code -----------------------------------------------------------

  void check_function(FunctionDef& f) {
    fn_ = &f;
    scopes_.clear();
    scopes_.emplace_back();
    for (const auto& g : ast_.globals) scopes_.front()[g.name] = {Scope::Global, false};
    scopes_.emplace_back();
    for (const auto& p : f.params) {
      if (scopes_.back().count(p.name)) type_error(f.loc, "duplicate parameter '" + p.name + "'");
      scopes_.back()[p.name] = {Scope::Param, p.is_const};
    }

    FormulaScope sc;
    sc.loc = f.contract.loc.known() ? f.contract.loc : f.loc;
    sc.vars = globals_scope();
    for (const auto& p : f.params) sc.vars[p.name] = FType::Int;
    if (f.contract.requires_clause) expect_bool_formula(f.contract.requires_clause, sc);
    sc.allow_result = f.return_type == CType::Int;
    if (f.contract.ensures_clause) expect_bool_formula(f.contract.ensures_clause, sc);

    check_block(f.body, /*new_scope=*/false);
    if (f.return_type == CType::Int && !always_returns(f.body)) {
      type_error(f.loc, "control may reach the end of non-void function '" + f.name + "'");
    }
  }

  static bool always_returns(const std::vector<CStmt>& body) {
    for (const auto& s : body) {
      if (s.kind == CStmt::Kind::Return) return true;
      if (s.kind == CStmt::Kind::Block && always_returns(s.body)) return true;
      if (s.kind == CStmt::Kind::If && s.has_else && always_returns(s.body) &&
          always_returns(s.else_body)) {
        return true;
      }
    }
    return false;
  }

  const VarInfo* lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      if (auto f = it->find(name); f != it->end()) return &f->second;
    }
    return nullptr;
  }

  void check_block(std::vector<CStmt>& body, bool new_scope) {
    if (new_scope) scopes_.emplace_back();
    for (auto& s : body) check_stmt(s);
    if (new_scope) scopes_.pop_back();
  }

  void check_stmt(CStmt& s) {
    switch (s.kind) {
      case CStmt::Kind::Expr:
        s.expr = check_expr(s.expr, /*value_needed=*/false);
        break;
      case CStmt::Kind::Decl: {
        if (s.expr) s.expr = want_int(check_expr(s.expr, true));
        if (const VarInfo* prev = lookup(s.name); prev && prev->scope != Scope::Global) {
          type_error(s.loc, "declaration of '" + s.name +
                                "' shadows or repeats an earlier parameter or local; not supported");
        }
        if (ast_.find_function(s.name)) type_error(s.loc, "local '" + s.name + "' shadows a function");
        scopes_.back()[s.name] = {Scope::Local, s.is_const};
        if (s.is_const && !s.expr) type_error(s.loc, "const local '" + s.name + "' must be initialized");
        break;
      }
      case CStmt::Kind::If:
        s.expr = want_bool(check_expr(s.expr, true));
        check_block(s.body, true);
        if (s.has_else) check_block(s.else_body, true);
        break;
      case CStmt::Kind::While:
        s.expr = want_bool(check_expr(s.expr, true));
        if (s.loop_invariant) {
          FormulaScope sc;
          sc.loc = s.loc;
          for (const auto& scope : scopes_) {
            for (const auto& [name, info] : scope) sc.vars[name] = FType::Int;
          }
          expect_bool_formula(s.loop_invariant, sc);
        }
        check_block(s.body, true);
        break;
      case CStmt::Kind::Return:
        if (fn_->return_type == CType::Void) {
          if (s.expr) type_error(s.loc, "void function '" + fn_->name + "' returns a value");
        } else {
          if (!s.expr) type_error(s.loc, "non-void function '" + fn_->name + "' returns no value");
          s.expr = want_int(check_expr(s.expr, true));
        }
        break;
      case CStmt::Kind::Block:
        check_block(s.body, true);
        break;
    }
  }

  CExprPtr want_int(CExprPtr e) {
    if (e->type == CType::Bool) {
      type_error(e->loc, "boolean expression used where an int is required; write the "
                         "comparison result into an if-statement instead");
    }
    if (e->type == CType::Void) type_error(e->loc, "void value used in an expression");
    return e;
  }

  CExprPtr want_bool(CExprPtr e) {
    if (e->type == CType::Void) type_error(e->loc, "void value used as a condition");
    if (e->type == CType::Bool) return e;
    CExpr zero;
    zero.kind = CExpr::Kind::IntLit;
    zero.loc = e->loc;
    CExpr ne;
    ne.kind = CExpr::Kind::Binary;
    ne.binop = BinOp::Ne;
    ne.type = CType::Bool;
    ne.loc = e->loc;
    ne.args = {std::move(e), make(std::move(zero))};
    return make(std::move(ne));
  }

  CExprPtr check_expr(const CExprPtr& in, bool value_needed) {
    CExpr e = *in;
    switch (e.kind) {
      case CExpr::Kind::IntLit: e.type = CType::Int; break;
      case CExpr::Kind::Var: {
        const VarInfo* v = lookup(e.name);
        if (!v) {
          if (ast_.find_function(e.name)) type_error(e.loc, "function '" + e.name + "' used as a value");
          type_error(e.loc, "use of undeclared identifier '" + e.name + "'");
        }
        e.scope = v->scope;
        e.is_const = v->is_const;
        e.type = CType::Int;
        break;
      }
      case CExpr::Kind::Assign: {
        const VarInfo* v = lookup(e.name);
        if (!v) type_error(e.loc, "assignment to undeclared identifier '" + e.name + "'");
        if (v->is_const) type_error(e.loc, "assignment to const variable '" + e.name + "'");
        e.scope = v->scope;
        e.args[0] = want_int(check_expr(e.args[0], true));
        e.type = CType::Int;
        break;
      }
      case CExpr::Kind::Unary:
        if (e.unop == UnOp::Neg) {
          e.args[0] = want_int(check_expr(e.args[0], true));
          e.type = CType::Int;
        } else {
          e.args[0] = want_bool(check_expr(e.args[0], true));
          e.type = CType::Bool;
        }
        break;
      case CExpr::Kind::Binary: {
        if (is_logical(e.binop)) {
          e.args[0] = want_bool(check_expr(e.args[0], true));
          e.args[1] = want_bool(check_expr(e.args[1], true));
          e.type = CType::Bool;
        } else if ((e.binop == BinOp::Eq || e.binop == BinOp::Ne)) {
          CExprPtr a = check_expr(e.args[0], true);
          CExprPtr b = check_expr(e.args[1], true);
          if (a->type == CType::Bool && b->type == CType::Bool) {
            e.args = {a, b};
          } else {
            e.args = {want_int(a), want_int(b)};
          }
          e.type = CType::Bool;
        } else {
          e.args[0] = want_int(check_expr(e.args[0], true));
          e.args[1] = want_int(check_expr(e.args[1], true));
          e.type = is_comparison(e.binop) ? CType::Bool : CType::Int;
        }
        break;
      }
      case CExpr::Kind::Call: {
        const FunctionDef* callee = ast_.find_function(e.name);
        if (!callee) {
          if (ast_.find_logic_function(e.name)) {
            type_error(e.loc, "logic function '" + e.name + "' cannot be called from C code");
          }
          type_error(e.loc, "call to undeclared function '" + e.name + "'");
        }
        if (callee->params.size() != e.args.size()) {
          type_error(e.loc, "function '" + e.name + "' expects " + std::to_string(callee->params.size()) +
                                " arguments, got " + std::to_string(e.args.size()));
        }
        for (auto& a : e.args) a = want_int(check_expr(a, true));
        e.type = callee->return_type;
        if (value_needed && e.type == CType::Void) {
          type_error(e.loc, "value of void function '" + e.name + "' is used");
        }
        break;
      }
    }
    return make(std::move(e));
  }

  CAst& ast_;
  const FunctionDef* fn_ = nullptr;
  std::vector<std::map<std::string, VarInfo>> scopes_;
};

}  // namespace

CAst parse(std::string_view source) {
  CParser p(source);
  std::vector<GlobalInvariant> invariants;
  CAst ast = p.run(invariants);
  Checker(ast).run(invariants, p.prototypes_);
  return ast;
}

}  // namespace c2ao::frontend
