// Reader for the `.abs` subset produced by emit_abs. Used for golden files
// and hand-written models.

#include <charconv>
#include <set>

#include "c2ao/lexer.hpp"
#include "c2ao/model/model.hpp"

namespace c2ao::model {

namespace {

struct Annotations {
  ExprPtr requires_clause;
  ExprPtr ensures_clause;
  ExprPtr obj_inv;
  ExprPtr while_inv;
  SourceLoc loc;
  bool any() const { return requires_clause || ensures_clause || obj_inv || while_inv; }
};

class Reader {
 public:
  explicit Reader(std::string_view text) : cur_(tokenize(text, LexMode::Plain)) {}

  Model run() {
    while (!cur_.at_end()) {
      Annotations ann = annotations();
      const Token& t = cur_.peek();
      if (t.is("def")) {
        no_annotations(ann, "function definition");
        logic_function();
      } else if (t.is("interface")) {
        no_annotations(ann, "interface");
        interface_decl();
      } else if (t.is("class")) {
        class_decl(ann);
      } else if (t.is("{")) {
        no_annotations(ann, "main block");
        cur_.next();
        std::vector<Stmt> main = block_until_close();
        if (!main.empty()) model_.main_block = std::move(main);
      } else {
        cur_.fail("expected 'def', 'interface', 'class' or main block, found " + describe(t));
      }
    }
    return std::move(model_);
  }

 private:
  void no_annotations(const Annotations& a, const char* what) {
    if (a.any()) throw DiagnosticError(DiagKind::SyntaxError, std::string("annotation not allowed on ") + what, a.loc);
  }

  Annotations annotations() {
    Annotations a;
    a.loc = cur_.peek().loc;
    while (cur_.peek().is("[")) {
      cur_.next();
      cur_.expect("Spec", "in annotation");
      cur_.expect(":", "after 'Spec'");
      const Token kind = cur_.next();
      cur_.expect("(", "after annotation kind");
      ExprPtr e = expr();
      cur_.expect(")", "to close annotation");
      cur_.expect("]", "to close annotation");
      ExprPtr* slot = nullptr;
      if (kind.is("Requires")) slot = &a.requires_clause;
      else if (kind.is("Ensures")) slot = &a.ensures_clause;
      else if (kind.is("ObjInv")) slot = &a.obj_inv;
      else if (kind.is("WhileInv")) slot = &a.while_inv;
      else cur_.fail_at(kind, "unknown annotation kind '" + kind.text + "'");
      *slot = ex::conj(*slot, e);
    }
    return a;
  }

  Type type() {
    const Token& t = cur_.peek();
    if (t.kind != Token::Kind::Ident) cur_.fail("expected type, found " + describe(t));
    cur_.next();
    if (t.is("Int")) return Type::int_();
    if (t.is("Bool")) return Type::bool_();
    if (t.is("Unit")) return Type::unit();
    if (t.is("Fut")) {
      cur_.expect("<", "after 'Fut'");
      Type inner = type();
      if (inner.kind == Type::Kind::Fut || inner.kind == Type::Kind::Ref) {
        cur_.fail("only Fut<Int>, Fut<Bool> and Fut<Unit> are supported");
      }
      cur_.expect(">", "to close future type");
      return Type::fut(inner.kind);
    }
    return Type::ref_to(t.text);
  }

  bool at_type() const {
    const Token& t = cur_.peek();
    if (t.kind != Token::Kind::Ident) return false;
    if (t.is("Fut")) return cur_.peek(1).is("<");
    // `T name` where T is a simple type or interface name.
    return cur_.peek(1).kind == Token::Kind::Ident && !t.is("return") && !t.is("await") &&
           !t.is("if") && !t.is("while") && !t.is("skip");
  }

  std::vector<Param> params(const char* close_ctx) {
    std::vector<Param> ps;
    cur_.expect("(", close_ctx);
    if (!cur_.peek().is(")")) {
      do {
        Param p;
        p.type = type();
        p.name = cur_.expect_ident("as parameter name");
        ps.push_back(std::move(p));
      } while (cur_.accept(","));
    }
    cur_.expect(")", "to close parameter list");
    return ps;
  }

  void logic_function() {
    cur_.expect("def", "");
    LogicFunction lf;
    lf.ret = type();
    lf.name = cur_.expect_ident("as function name");
    lf.params = params("after function name");
    cur_.expect("=", "before function body");
    lf.body = expr();
    cur_.expect(";", "after function body");
    model_.logic_functions.push_back(std::move(lf));
  }

  void interface_decl() {
    cur_.expect("interface", "");
    ModelInterface i;
    i.name = cur_.expect_ident("as interface name");
    cur_.expect("{", "to open interface");
    while (!cur_.accept("}")) {
      Annotations a = annotations();
      if (a.obj_inv || a.while_inv) cur_.fail("only Requires/Ensures may annotate method declarations");
      MethodSig sig;
      sig.ret = type();
      sig.name = cur_.expect_ident("as method name");
      sig.params = params("after method name");
      sig.requires_clause = a.requires_clause;
      sig.ensures_clause = a.ensures_clause;
      cur_.expect(";", "after method declaration");
      i.methods.push_back(std::move(sig));
    }
    model_.interfaces.push_back(std::move(i));
  }

  void class_decl(const Annotations& ann) {
    if (ann.ensures_clause || ann.while_inv) {
      throw DiagnosticError(DiagKind::SyntaxError, "classes take only Requires and ObjInv annotations", ann.loc);
    }
    ModelClass c;
    c.loc = cur_.peek().loc;
    c.creation_condition = ann.requires_clause;
    c.obj_invariant = ann.obj_inv;
    cur_.expect("class", "");
    c.name = cur_.expect_ident("as class name");
    if (cur_.peek().is("(")) c.params = params("after class name");
    cur_.expect("implements", "after class header");
    c.implements = cur_.expect_ident("as interface name");
    cur_.expect("{", "to open class body");
    cls_ = &c;
    while (!cur_.accept("}")) {
      Annotations a = annotations();
      SourceLoc loc = cur_.peek().loc;
      Type t = type();
      std::string name = cur_.expect_ident("as member name");
      if (cur_.peek().is("(")) {
        Method m;
        m.loc = loc;
        m.ret = t;
        m.name = name;
        m.params = params("after method name");
        cur_.expect("{", "to open method body");
        locals_.clear();
        for (const auto& p : m.params) locals_.insert(p.name);
        m.body = block_until_close();
        if (a.requires_clause || a.ensures_clause) pending_specs_.push_back({c.implements, m.name, a});
        c.methods.push_back(std::move(m));
      } else {
        if (a.any()) cur_.fail("fields cannot be annotated");
        Field f;
        f.name = name;
        f.type = t;
        if (cur_.accept("=")) f.init = expr();
        cur_.expect(";", "after field declaration");
        c.fields.push_back(std::move(f));
      }
    }
    cls_ = nullptr;
    model_.classes.push_back(std::move(c));
    apply_pending_specs();
  }

  // Contracts written on class methods are moved onto the interface.
  void apply_pending_specs() {
    for (const auto& p : pending_specs_) {
      for (auto& i : model_.interfaces) {
        if (i.name != p.iface) continue;
        for (auto& sig : i.methods) {
          if (sig.name != p.method) continue;
          if (!sig.requires_clause) sig.requires_clause = p.ann.requires_clause;
          if (!sig.ensures_clause) sig.ensures_clause = p.ann.ensures_clause;
        }
      }
    }
    pending_specs_.clear();
  }

  std::vector<Stmt> block_until_close() {
    std::vector<Stmt> out;
    while (!cur_.accept("}")) {
      if (cur_.at_end()) cur_.fail("unterminated block");
      out.push_back(statement());
    }
    return out;
  }

  std::vector<Stmt> braced() {
    cur_.expect("{", "to open block");
    return block_until_close();
  }

  Stmt statement() {
    Annotations ann = annotations();
    Stmt s;
    s.loc = cur_.peek().loc;
    if (ann.requires_clause || ann.ensures_clause || ann.obj_inv) cur_.fail("only WhileInv may annotate statements");
    if (ann.while_inv && !cur_.peek().is("while")) cur_.fail("WhileInv must precede a while loop");
    if (cur_.accept("skip")) {
      s.kind = Stmt::Kind::Skip;
      cur_.expect(";", "after skip");
      return s;
    }
    if (cur_.accept("await")) {
      s.kind = Stmt::Kind::Await;
      do {
        s.guard.push_back(cur_.expect_ident("in await guard"));
        cur_.accept("?");
      } while (cur_.accept("&"));
      cur_.expect(";", "after await");
      return s;
    }
    if (cur_.accept("return")) {
      s.kind = Stmt::Kind::Return;
      if (cur_.peek().kind == Token::Kind::Ident && cur_.peek(1).is(".") && cur_.peek(2).is("get")) {
        s.future = cur_.next().text;
        cur_.next();
        cur_.next();
      } else {
        s.expr = expr();
      }
      cur_.expect(";", "after return");
      return s;
    }
    if (cur_.accept("if")) {
      s.kind = Stmt::Kind::If;
      cur_.expect("(", "after 'if'");
      s.expr = expr();
      cur_.expect(")", "after condition");
      s.body = braced();
      if (cur_.accept("else")) {
        if (cur_.peek().is("if")) s.else_body.push_back(statement());
        else s.else_body = braced();
      }
      return s;
    }
    if (cur_.accept("while")) {
      s.kind = Stmt::Kind::While;
      s.invariant = ann.while_inv;
      cur_.expect("(", "after 'while'");
      s.expr = expr();
      cur_.expect(")", "after condition");
      s.body = braced();
      return s;
    }
    // Bindings: [T] target = rhs;
    if (at_type()) {
      s.decl_type = type();
      s.target = cur_.expect_ident("as variable name");
      locals_.insert(s.target);
    } else if (cur_.peek().is("this") && cur_.peek(1).is(".")) {
      cur_.next();
      cur_.next();
      s.target = cur_.expect_ident("as field name");
      s.target_is_field = true;
    } else {
      s.target = cur_.expect_ident("at start of statement");
      s.target_is_field = !locals_.count(s.target) && cls_ && cls_->has_field(s.target);
    }
    cur_.expect("=", "in assignment");
    binding_rhs(s);
    cur_.expect(";", "at end of statement");
    return s;
  }

  std::vector<ExprPtr> call_args() {
    std::vector<ExprPtr> as;
    cur_.expect("(", "before arguments");
    if (!cur_.peek().is(")")) {
      do {
        as.push_back(expr());
      } while (cur_.accept(","));
    }
    cur_.expect(")", "after arguments");
    return as;
  }

  void binding_rhs(Stmt& s) {
    if (cur_.accept("new")) {
      s.kind = Stmt::Kind::New;
      cur_.accept("local");
      s.cls = cur_.expect_ident("as class name");
      s.args = call_args();
      return;
    }
    const Token& t = cur_.peek();
    if ((t.kind == Token::Kind::Ident) && cur_.peek(1).is("!")) {
      s.kind = Stmt::Kind::AsyncCall;
      s.callee = cur_.next().text;
      cur_.next();
      s.method = cur_.expect_ident("as method name");
      s.args = call_args();
      return;
    }
    if (t.kind == Token::Kind::Ident && cur_.peek(1).is(".") && cur_.peek(2).is("get")) {
      s.kind = Stmt::Kind::Get;
      s.future = cur_.next().text;
      cur_.next();
      cur_.next();
      return;
    }
    s.kind = Stmt::Kind::Assign;
    s.expr = expr();
  }

  // --- expressions ----------------------------------------------------------

  ExprPtr expr() {
    if (cur_.accept("if")) {
      ExprPtr c = expr();
      cur_.expect("then", "in conditional expression");
      ExprPtr a = expr();
      cur_.expect("else", "in conditional expression");
      return ex::ite(c, a, expr());
    }
    ExprPtr lhs = disjunction();
    if (cur_.accept("==>")) return ex::binary(BinOp::Implies, lhs, expr());
    return lhs;
  }

  ExprPtr disjunction() {
    ExprPtr e = conjunction();
    while (cur_.accept("||")) e = ex::binary(BinOp::Or, e, conjunction());
    return e;
  }

  ExprPtr conjunction() {
    ExprPtr e = equality();
    while (cur_.accept("&&")) e = ex::binary(BinOp::And, e, equality());
    return e;
  }

  ExprPtr equality() {
    ExprPtr e = relational();
    while (true) {
      if (cur_.accept("==")) e = ex::binary(BinOp::Eq, e, relational());
      else if (cur_.accept("!=")) e = ex::binary(BinOp::Ne, e, relational());
      else return e;
    }
  }

  ExprPtr relational() {
    ExprPtr e = additive();
    while (true) {
      if (cur_.accept("<")) e = ex::binary(BinOp::Lt, e, additive());
      else if (cur_.accept("<=")) e = ex::binary(BinOp::Le, e, additive());
      else if (cur_.accept(">")) e = ex::binary(BinOp::Gt, e, additive());
      else if (cur_.accept(">=")) e = ex::binary(BinOp::Ge, e, additive());
      else return e;
    }
  }

  ExprPtr additive() {
    ExprPtr e = multiplicative();
    while (true) {
      if (cur_.accept("+")) e = ex::binary(BinOp::Add, e, multiplicative());
      else if (cur_.accept("-")) e = ex::binary(BinOp::Sub, e, multiplicative());
      else return e;
    }
  }

  ExprPtr multiplicative() {
    ExprPtr e = unary();
    while (true) {
      if (cur_.accept("*")) e = ex::binary(BinOp::Mul, e, unary());
      else if (cur_.accept("/")) e = ex::binary(BinOp::Div, e, unary());
      else if (cur_.accept("%")) e = ex::binary(BinOp::Mod, e, unary());
      else return e;
    }
  }

  ExprPtr unary() {
    if (cur_.accept("!") || cur_.accept("~")) return ex::lnot(unary());
    if (cur_.accept("-")) return ex::neg(unary());
    return primary();
  }

  ExprPtr primary() {
    const Token& t = cur_.peek();
    if (t.kind == Token::Kind::Int) {
      cur_.next();
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (ec != std::errc()) cur_.fail_at(t, "integer literal out of range");
      return ex::int_lit(v);
    }
    if (cur_.accept("(")) {
      ExprPtr e = expr();
      cur_.expect(")", "to close parenthesis");
      return e;
    }
    if (t.is("if")) return expr();
    if (t.kind != Token::Kind::Ident) cur_.fail("expected expression, found " + describe(t));
    cur_.next();
    if (t.is("True")) return ex::bool_lit(true);
    if (t.is("False")) return ex::bool_lit(false);
    if (t.is("null")) return ex::null();
    if (t.is("unit")) return ex::unit();
    if (t.is("result")) return ex::result();
    if (t.is("this")) {
      if (cur_.accept(".")) return ex::field(cur_.expect_ident("as field name"));
      return ex::this_ref();
    }
    if ((t.is("valueOf") || t.is("valueof")) && cur_.peek().is("(")) {
      cur_.next();
      std::string name = cur_.expect_ident("inside valueOf");
      cur_.expect(")", "to close valueOf");
      return ex::value_of(name);
    }
    if (cur_.peek().is("(")) return ex::call(t.text, call_args());
    return ex::var(t.text);
  }

  struct PendingSpec {
    std::string iface;
    std::string method;
    Annotations ann;
  };

  TokenCursor cur_;
  Model model_;
  const ModelClass* cls_ = nullptr;
  std::set<std::string> locals_;
  std::vector<PendingSpec> pending_specs_;
};

}  // namespace

Model read_abs(std::string_view text) { return Reader(text).run(); }

}  // namespace c2ao::model
