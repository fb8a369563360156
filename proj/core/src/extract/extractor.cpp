#include "c2ao/extract/extractor.hpp"

#include <functional>
#include <map>
#include <regex>
#include <set>

namespace c2ao::extract {

using frontend::CAst;
using frontend::CExpr;
using frontend::CExprPtr;
using frontend::CStmt;
using frontend::CType;
using frontend::FunctionDef;
using frontend::Scope;
using model::Method;
using model::Param;
using model::Stmt;
using model::Type;

const char* op_name(BinOp op) {
  switch (op) {
    case BinOp::Add: return "plus";
    case BinOp::Sub: return "minus";
    case BinOp::Mul: return "times";
    case BinOp::Div: return "div";
    case BinOp::Mod: return "mod";
    case BinOp::Lt: return "lt";
    case BinOp::Le: return "le";
    case BinOp::Gt: return "gt";
    case BinOp::Ge: return "ge";
    case BinOp::Eq: return "eq";
    case BinOp::Ne: return "neq";
    case BinOp::And: return "and";
    case BinOp::Or: return "or";
    case BinOp::Implies: return "implies";
  }
  return "?";
}

std::string shape_name(const Operand& o, bool mark_bool) {
  std::string base = o.shape == Operand::Shape::Fut ? "fut" : "val";
  return mark_bool && o.is_bool ? "b" + base : base;
}

namespace {

std::string class_name(const std::string& fn) { return "C_" + fn; }
std::string interface_name(const std::string& fn) { return "I_" + fn; }

bool is_reserved(const std::string& n) {
  static const std::set<std::string> words = {
      "global", "this",   "result", "null",      "unit",  "True",  "False", "valueOf", "valueof",
      "new",    "await",  "return", "if",        "while", "skip",  "get",   "class",   "interface",
      "def",    "then",   "else",   "implements", "local", "Int",  "Bool",  "Unit",    "Fut",
      "o",      "f",      "m",      "r",         "arg",   "call"};
  static const std::regex generated("(tmp|fut_arg|se|arg)_?[0-9]+");
  return words.count(n) || std::regex_match(n, generated);
}

// Model names for a function's parameters and locals: C names unless they
// clash with names the translation generates.
std::map<std::string, std::string> model_names(const FunctionDef& fn) {
  std::map<std::string, std::string> out;
  std::set<std::string> used;
  auto assign = [&](const std::string& c) {
    if (out.count(c)) return;
    std::string n = c;
    for (int k = 1; is_reserved(n) || used.count(n); ++k) n = c + "_" + std::to_string(k);
    used.insert(n);
    out[c] = n;
  };
  for (const auto& p : fn.params) assign(p.name);
  std::function<void(const std::vector<CStmt>&)> walk = [&](const std::vector<CStmt>& body) {
    for (const auto& s : body) {
      if (s.kind == CStmt::Kind::Decl) assign(s.name);
      walk(s.body);
      walk(s.else_body);
    }
  };
  walk(fn.body);
  return out;
}

ExprPtr var(const std::string& n) { return ex::var(n); }

Stmt make_await(std::vector<std::string> guard) {
  Stmt s;
  s.kind = Stmt::Kind::Await;
  s.guard = std::move(guard);
  return s;
}

Stmt make_get(std::string target, std::string future, std::optional<Type> decl) {
  Stmt s;
  s.kind = Stmt::Kind::Get;
  s.target = std::move(target);
  s.future = std::move(future);
  s.decl_type = std::move(decl);
  return s;
}

Stmt make_assign(std::string target, ExprPtr e, std::optional<Type> decl, bool field = false) {
  Stmt s;
  s.kind = Stmt::Kind::Assign;
  s.target = std::move(target);
  s.expr = std::move(e);
  s.decl_type = std::move(decl);
  s.target_is_field = field;
  return s;
}

Stmt make_async(std::string target, Type fut, std::string callee, std::string method,
                std::vector<ExprPtr> args) {
  Stmt s;
  s.kind = Stmt::Kind::AsyncCall;
  s.target = std::move(target);
  s.decl_type = fut;
  s.callee = std::move(callee);
  s.method = std::move(method);
  s.args = std::move(args);
  return s;
}

Stmt make_return(ExprPtr e) {
  Stmt s;
  s.kind = Stmt::Kind::Return;
  s.expr = std::move(e);
  return s;
}

Stmt make_return_get(std::string future) {
  Stmt s;
  s.kind = Stmt::Kind::Return;
  s.future = std::move(future);
  return s;
}

Stmt make_new(std::string target, Type t, std::string cls, std::vector<ExprPtr> args) {
  Stmt s;
  s.kind = Stmt::Kind::New;
  s.target = std::move(target);
  s.decl_type = std::move(t);
  s.cls = std::move(cls);
  s.args = std::move(args);
  return s;
}

bool always_returns(const std::vector<CStmt>& body) {
  for (const auto& s : body) {
    if (s.kind == CStmt::Kind::Return) return true;
    if (s.kind == CStmt::Kind::Block && always_returns(s.body)) return true;
    if (s.kind == CStmt::Kind::If && s.has_else && always_returns(s.body) && always_returns(s.else_body)) {
      return true;
    }
  }
  return false;
}

// Expressions whose translation emits no statement and yields a direct value.
bool is_direct(const CExpr& e) {
  switch (e.kind) {
    case CExpr::Kind::IntLit: return true;
    case CExpr::Kind::Var: return e.scope != Scope::Global && e.is_const;
    case CExpr::Kind::Unary: return is_direct(*e.args[0]);
    case CExpr::Kind::Binary:
      if (e.binop == BinOp::Div || e.binop == BinOp::Mod) {
        return e.args[0]->kind == CExpr::Kind::IntLit && e.args[1]->kind == CExpr::Kind::IntLit &&
               e.args[1]->value != 0;
      }
      return is_direct(*e.args[0]) && is_direct(*e.args[1]);
    default: return false;
  }
}

std::optional<std::int64_t> fold(BinOp op, std::int64_t a, std::int64_t b, bool& is_bool) {
  is_bool = is_comparison(op);
  switch (op) {
    case BinOp::Add: return a + b;
    case BinOp::Sub: return a - b;
    case BinOp::Mul: return a * b;
    case BinOp::Div: return b == 0 ? std::nullopt : std::optional<std::int64_t>(a / b);
    case BinOp::Mod: return b == 0 ? std::nullopt : std::optional<std::int64_t>(a % b);
    case BinOp::Lt: return a < b;
    case BinOp::Le: return a <= b;
    case BinOp::Gt: return a > b;
    case BinOp::Ge: return a >= b;
    case BinOp::Eq: return a == b;
    case BinOp::Ne: return a != b;
    default: return std::nullopt;
  }
}

Operand const_int(std::int64_t v) {
  Operand o;
  o.shape = Operand::Shape::Const;
  o.value = v;
  o.expr = ex::int_lit(v);
  return o;
}

Operand val(ExprPtr e, bool is_bool) {
  Operand o;
  o.shape = Operand::Shape::Val;
  o.is_bool = is_bool;
  o.expr = std::move(e);
  return o;
}

Operand fut(std::string name, bool is_bool) {
  Operand o;
  o.shape = Operand::Shape::Fut;
  o.is_bool = is_bool;
  o.future = std::move(name);
  o.expr = ex::var(o.future);
  return o;
}

Type value_type(bool is_bool) { return is_bool ? Type::bool_() : Type::int_(); }
Type fut_type(bool is_bool) { return Type::fut(is_bool ? Type::Kind::Bool : Type::Kind::Int); }

}  // namespace

// ---------------------------------------------------------------------------

struct MethodCtx {
  std::vector<Stmt>* out = nullptr;
  std::map<std::string, Operand> consts;  // C const name -> operand
  std::vector<std::string> outstanding;   // futures not yet awaited
};

struct ExtractionContext::Impl {
  Impl(const CAst& a, const FunctionDef& f) : ast(a), fn(f), names(model_names(f)) {
    cls.name = class_name(fn.name);
    cls.implements = interface_name(fn.name);
    cls.params.push_back({"global", Type::ref_to("Global")});
    cls.loc = fn.loc;
    call.name = "call";
    call.ret = fn.return_type == CType::Void ? Type::unit() : Type::int_();
    call.loc = fn.loc;
    main.out = &call.body;
    ctx = &main;
  }

  const CAst& ast;
  const FunctionDef& fn;
  std::map<std::string, std::string> names;
  model::ModelClass cls;
  Method call;
  std::vector<Method> helpers;
  std::set<std::string> helper_names;
  std::set<std::string> fields;
  int tmp = 0;
  int logical_count = 0;
  MethodCtx main;
  MethodCtx* ctx;

  std::string new_tmp() { return "tmp_" + std::to_string(++tmp); }

  void emit(Stmt s) { ctx->out->push_back(std::move(s)); }

  const std::string& model_name(const std::string& c) const {
    auto it = names.find(c);
    if (it == names.end()) throw InternalError("no model name for '" + c + "'");
    return it->second;
  }

  std::string field_for(const std::string& c) {
    const std::string& n = model_name(c);
    if (fields.insert(n).second) cls.fields.push_back({n, Type::int_(), ex::int_lit(0)});
    return n;
  }

  std::string async_self(const std::string& method, std::vector<ExprPtr> args, Type fut_t, SourceLoc loc) {
    std::string t = new_tmp();
    Stmt s = make_async(t, fut_t, "this", method, std::move(args));
    s.loc = loc;
    emit(std::move(s));
    ctx->outstanding.push_back(t);
    return t;
  }

  void await_all(SourceLoc loc) {
    if (ctx->outstanding.empty()) return;
    Stmt s = make_await(ctx->outstanding);
    s.loc = loc;
    emit(std::move(s));
    ctx->outstanding.clear();
  }

  // Registers a helper once; `build` fills in params and body.
  template <typename Build>
  void helper(const std::string& name, Type ret, Build&& build) {
    if (!helper_names.insert(name).second) return;
    Method m;
    m.name = name;
    m.ret = ret;
    size_t idx = helpers.size();
    helpers.push_back(m);
    build(m);
    helpers[idx] = std::move(m);
  }

  // Params and body prefix shared by helpers taking operands: declares
  // `Int argi` / `Fut<T> fut_argi`, awaits the futures and reads them.
  static std::vector<ExprPtr> operand_params(Method& m, const std::vector<Operand>& ops,
                                             const std::vector<std::string>& extra_awaits = {}) {
    std::vector<std::string> futs;
    std::vector<ExprPtr> values;
    for (size_t i = 0; i < ops.size(); ++i) {
      std::string idx = std::to_string(i + 1);
      if (ops[i].shape == Operand::Shape::Fut) {
        m.params.push_back({"fut_arg" + idx, fut_type(ops[i].is_bool)});
        futs.push_back("fut_arg" + idx);
      } else {
        m.params.push_back({"arg" + idx, value_type(ops[i].is_bool)});
      }
      values.push_back(ex::var("arg" + idx));
    }
    std::vector<std::string> guard = futs;
    guard.insert(guard.end(), extra_awaits.begin(), extra_awaits.end());
    if (!guard.empty()) m.body.push_back(make_await(guard));
    for (size_t i = 0; i < ops.size(); ++i) {
      if (ops[i].shape != Operand::Shape::Fut) continue;
      std::string idx = std::to_string(i + 1);
      m.body.push_back(make_get("arg" + idx, "fut_arg" + idx, value_type(ops[i].is_bool)));
    }
    return values;
  }

  static ExprPtr arg_expr(const Operand& o) { return o.expr; }

  // --- expressions ---------------------------------------------------------

  Operand translate(const CExprPtr& e, std::vector<std::string>& se) {
    switch (e->kind) {
      case CExpr::Kind::IntLit: return const_int(e->value);
      case CExpr::Kind::Var: return read_var(*e);
      case CExpr::Kind::Assign: return assign(*e, se);
      case CExpr::Kind::Unary: return unary(*e, se);
      case CExpr::Kind::Binary:
        if (e->binop == BinOp::And || e->binop == BinOp::Or) return logical(*e, se);
        return binary(*e, se);
      case CExpr::Kind::Call: return call_fn(*e, se);
    }
    throw InternalError("unknown expression kind");
  }

  Operand read_var(const CExpr& e) {
    if (e.scope == Scope::Global) {
      std::string h = "get_global_" + e.name;
      helper(h, Type::int_(), [&](Method& m) {
        m.body.push_back(make_async("f", Type::fut(), "global", "get_" + e.name, {}));
        m.body.push_back(make_return_get("f"));
      });
      return fut(async_self(h, {}, Type::fut(), e.loc), false);
    }
    if (e.is_const) {
      auto it = ctx->consts.find(e.name);
      if (it == ctx->consts.end()) throw InternalError("const '" + e.name + "' not bound");
      return it->second;
    }
    std::string field = field_for(e.name);
    std::string h = "get_local_" + field;
    helper(h, Type::int_(), [&](Method& m) { m.body.push_back(make_return(ex::field(field))); });
    return fut(async_self(h, {}, Type::fut(), e.loc), false);
  }

  // Setter call for a global or non-const local; returns the side-effect future.
  std::string setter(const CExpr& target, const Operand& value) {
    std::string shape = shape_name(value);
    std::string h;
    if (target.scope == Scope::Global) {
      h = "set_global_" + target.name + "_" + shape;
      helper(h, Type::unit(), [&](Method& m) {
        if (value.shape == Operand::Shape::Fut) {
          m.params.push_back({"fut_arg", Type::fut()});
          m.body.push_back(make_await({"fut_arg"}));
          m.body.push_back(make_get("arg", "fut_arg", Type::int_()));
        } else {
          m.params.push_back({"arg", Type::int_()});
        }
        m.body.push_back(make_async("f", Type::fut(Type::Kind::Unit), "global", "set_" + target.name, {var("arg")}));
        m.body.push_back(make_return_get("f"));
      });
    } else {
      std::string field = field_for(target.name);
      h = "set_local_" + field + "_" + shape;
      helper(h, Type::unit(), [&](Method& m) {
        if (value.shape == Operand::Shape::Fut) {
          m.params.push_back({"fut_arg", Type::fut()});
          m.body.push_back(make_await({"fut_arg"}));
          m.body.push_back(make_get("arg", "fut_arg", Type::int_()));
        } else {
          m.params.push_back({"arg", Type::int_()});
        }
        m.body.push_back(make_assign(field, var("arg"), std::nullopt, true));
        m.body.push_back(make_return(ex::unit()));
      });
    }
    return async_self(h, {arg_expr(value)}, Type::fut(Type::Kind::Unit), target.loc);
  }

  Operand assign(const CExpr& e, std::vector<std::string>& se) {
    Operand v = translate(e.args[0], se);
    se.push_back(setter(e, v));
    return v;
  }

  Operand unary(const CExpr& e, std::vector<std::string>& se) {
    Operand a = translate(e.args[0], se);
    bool neg = e.unop == UnOp::Neg;
    if (a.shape == Operand::Shape::Const && neg) return const_int(-a.value);
    if (a.direct()) return val(ex::unary(e.unop, a.expr), !neg);
    std::string h = neg ? "op_neg_fut" : "op_not_fut";
    helper(h, value_type(!neg), [&](Method& m) {
      auto vals = operand_params(m, {a});
      m.body.push_back(make_return(ex::unary(e.unop, vals[0])));
    });
    return fut(async_self(h, {a.expr}, fut_type(!neg), e.loc), !neg);
  }

  Operand binary(const CExpr& e, std::vector<std::string>& se) {
    Operand a = translate(e.args[0], se);
    Operand b = translate(e.args[1], se);
    BinOp op = e.binop;
    bool result_bool = is_comparison(op);
    if (a.shape == Operand::Shape::Const && b.shape == Operand::Shape::Const) {
      bool is_bool = false;
      if (auto v = fold(op, a.value, b.value, is_bool)) {
        return is_bool ? val(ex::bool_lit(*v != 0), true) : const_int(*v);
      }
    }
    bool division = op == BinOp::Div || op == BinOp::Mod;
    if (a.direct() && b.direct() && !division) return val(ex::binary(op, a.expr, b.expr), result_bool);
    bool mark = a.is_bool || b.is_bool;
    std::string h = std::string("op_") + op_name(op) + "_" + shape_name(a, mark) + "_" + shape_name(b, mark);
    helper(h, value_type(result_bool), [&](Method& m) {
      auto vals = operand_params(m, {a, b});
      m.body.push_back(make_return(ex::binary(op, vals[0], vals[1])));
    });
    return fut(async_self(h, {a.expr, b.expr}, fut_type(result_bool), e.loc), result_bool);
  }

  Operand call_fn(const CExpr& e, std::vector<std::string>& se) {
    std::vector<Operand> ops;
    std::vector<std::string> arg_se;
    for (const auto& a : e.args) ops.push_back(translate(a, arg_se));
    std::string h = "call_" + e.name;
    for (const auto& o : ops) h += "_" + shape_name(o);
    h += "_" + std::to_string(arg_se.size());
    bool is_void = e.type == CType::Void;
    Type ret = is_void ? Type::unit() : Type::int_();
    helper(h, ret, [&](Method& m) {
      std::vector<std::string> se_params;
      for (size_t k = 0; k < arg_se.size(); ++k) se_params.push_back("se_" + std::to_string(k + 1));
      auto vals = operand_params(m, ops, se_params);
      for (const auto& p : se_params) m.params.push_back({p, Type::fut(Type::Kind::Unit)});
      m.body.push_back(make_new("o", Type::ref_to(interface_name(e.name)), class_name(e.name), {var("global")}));
      m.body.push_back(make_async("f", Type::fut(ret.kind), "o", "call", vals));
      m.body.push_back(make_return_get("f"));
    });
    std::vector<ExprPtr> args;
    for (const auto& o : ops) args.push_back(o.expr);
    for (const auto& s : arg_se) args.push_back(var(s));
    std::string t = async_self(h, std::move(args), Type::fut(ret.kind), e.loc);
    if (is_void) {
      se.push_back(t);
      Operand none;
      none.future = t;
      return none;
    }
    return fut(t, false);
  }

  static void collect_consts(const CExpr& e, std::set<std::string>& out) {
    if (e.kind == CExpr::Kind::Var && e.scope != Scope::Global && e.is_const) out.insert(e.name);
    for (const auto& a : e.args) collect_consts(*a, out);
  }

  Operand logical(const CExpr& e, std::vector<std::string>& se) {
    if (is_direct(e)) {
      std::vector<std::string> none;
      Operand a = translate(e.args[0], none);
      Operand b = translate(e.args[1], none);
      return val(ex::binary(e.binop, a.expr, b.expr), true);
    }
    std::string h = std::string("op_") + op_name(e.binop) + "_" + std::to_string(++logical_count);
    std::set<std::string> free;
    collect_consts(e, free);
    MethodCtx hctx;
    std::vector<ExprPtr> call_args;
    std::vector<Param> params;
    for (const auto& c : free) {
      const Operand& o = ctx->consts.at(c);
      if (o.shape == Operand::Shape::Const) {
        hctx.consts[c] = o;
      } else {
        const std::string& n = o.expr->name;
        params.push_back({n, Type::int_()});
        call_args.push_back(o.expr);
        hctx.consts[c] = o;
      }
    }
    helper(h, Type::bool_(), [&](Method& m) {
      m.params = params;
      MethodCtx* saved = ctx;
      hctx.out = &m.body;
      ctx = &hctx;
      std::string res = new_tmp();
      std::vector<std::string> inner;
      Operand l = translate(e.args[0], inner);
      await_all(e.loc);
      if (l.direct()) emit(make_assign(res, l.expr, Type::bool_()));
      else emit(make_get(res, l.future, Type::bool_()));
      Stmt branch;
      branch.kind = Stmt::Kind::If;
      branch.loc = e.loc;
      branch.expr = e.binop == BinOp::And ? var(res) : ex::lnot(var(res));
      hctx.out = &branch.body;
      Operand r = translate(e.args[1], inner);
      await_all(e.loc);
      if (r.direct()) emit(make_assign(res, r.expr, std::nullopt));
      else emit(make_get(res, r.future, std::nullopt));
      m.body.push_back(std::move(branch));
      m.body.push_back(make_return(var(res)));
      ctx = saved;
    });
    (void)se;
    return fut(async_self(h, std::move(call_args), Type::fut(Type::Kind::Bool), e.loc), true);
  }

  // --- statements ----------------------------------------------------------

  // Binds a condition operand to an expression usable in if/while.
  ExprPtr condition(const Operand& c, SourceLoc loc, std::string* bound_var) {
    await_all(loc);
    if (c.direct()) return c.expr;
    std::string v = bound_var && !bound_var->empty() ? *bound_var : new_tmp();
    Stmt g = make_get(v, c.future, bound_var && !bound_var->empty() ? std::nullopt : std::optional<Type>(Type::bool_()));
    g.loc = loc;
    emit(std::move(g));
    if (bound_var) *bound_var = v;
    return var(v);
  }

  ExprPtr translate_formula(const ExprPtr& f, SourceLoc loc) {
    return lower_implies(rewrite(f, [&](const Expr& x) -> ExprPtr {
      if (x.kind != Expr::Kind::Var) return nullptr;
      if (ast.find_global(x.name)) {
        throw DiagnosticError(DiagKind::SpecError,
                              "loop invariant mentions global '" + x.name +
                                  "', which is not visible inside a function-modelling class",
                              loc);
      }
      if (auto it = ctx->consts.find(x.name); it != ctx->consts.end()) return it->second.expr;
      return ex::field(field_for(x.name));
    }));
  }

  void body(const std::vector<CStmt>& stmts) {
    for (const auto& s : stmts) statement(s);
  }

  void nested(std::vector<Stmt>& target, const std::vector<CStmt>& stmts) {
    std::vector<Stmt>* saved = ctx->out;
    ctx->out = &target;
    body(stmts);
    ctx->out = saved;
  }

  void statement(const CStmt& s) {
    std::vector<std::string> se;
    switch (s.kind) {
      case CStmt::Kind::Expr: {
        const CExpr& e = *s.expr;
        if (e.kind == CExpr::Kind::Assign && e.scope != Scope::Global) {
          Operand v = translate(e.args[0], se);
          if (ctx->outstanding.empty() && v.direct()) {
            Stmt a = make_assign(field_for(e.name), v.expr, std::nullopt, true);
            a.loc = s.loc;
            emit(std::move(a));
            return;
          }
          setter(e, v);
        } else {
          translate(s.expr, se);
        }
        await_all(s.loc);
        return;
      }
      case CStmt::Kind::Decl: {
        if (!s.expr) {
          if (!s.is_const) field_for(s.name);
          return;
        }
        if (!s.is_const) {
          CExpr as;
          as.kind = CExpr::Kind::Assign;
          as.name = s.name;
          as.scope = Scope::Local;
          as.loc = s.loc;
          as.args.push_back(s.expr);
          CStmt st;
          st.kind = CStmt::Kind::Expr;
          st.loc = s.loc;
          st.expr = std::make_shared<const CExpr>(std::move(as));
          statement(st);
          return;
        }
        Operand v = translate(s.expr, se);
        await_all(s.loc);
        if (v.shape == Operand::Shape::Const) {
          ctx->consts[s.name] = v;
          return;
        }
        const std::string& n = model_name(s.name);
        Stmt d = v.direct() ? make_assign(n, v.expr, Type::int_()) : make_get(n, v.future, Type::int_());
        d.loc = s.loc;
        emit(std::move(d));
        ctx->consts[s.name] = val(var(n), false);
        return;
      }
      case CStmt::Kind::If: {
        Operand c = translate(s.expr, se);
        Stmt st;
        st.kind = Stmt::Kind::If;
        st.loc = s.loc;
        st.expr = condition(c, s.loc, nullptr);
        nested(st.body, s.body);
        nested(st.else_body, s.else_body);
        emit(std::move(st));
        return;
      }
      case CStmt::Kind::While: {
        Stmt st;
        st.kind = Stmt::Kind::While;
        st.loc = s.loc;
        if (s.loop_invariant) st.invariant = translate_formula(s.loop_invariant, s.loc);
        std::string bound;
        Operand c = translate(s.expr, se);
        st.expr = condition(c, s.loc, &bound);
        nested(st.body, s.body);
        if (!bound.empty()) {
          std::vector<Stmt>* saved = ctx->out;
          ctx->out = &st.body;
          std::vector<std::string> se2;
          Operand again = translate(s.expr, se2);
          condition(again, s.loc, &bound);
          ctx->out = saved;
        }
        emit(std::move(st));
        return;
      }
      case CStmt::Kind::Return: {
        Stmt r;
        r.kind = Stmt::Kind::Return;
        r.loc = s.loc;
        if (!s.expr) {
          r.expr = ex::unit();
        } else {
          Operand v = translate(s.expr, se);
          await_all(s.loc);
          if (v.direct()) r.expr = v.expr;
          else r.future = v.future;
        }
        emit(std::move(r));
        return;
      }
      case CStmt::Kind::Block:
        body(s.body);
        return;
    }
  }

  void prologue() {
    for (const auto& p : fn.params) {
      const std::string& n = model_name(p.name);
      call.params.push_back({n, Type::int_()});
      if (p.is_const) {
        main.consts[p.name] = val(var(n), false);
      } else {
        field_for(p.name);
        call.body.push_back(make_assign(n, var(n), std::nullopt, true));
      }
    }
  }

  model::ModelClass finish() {
    if (fn.return_type == CType::Void && !always_returns(fn.body)) call.body.push_back(make_return(ex::unit()));
    model::ModelClass out = cls;
    out.methods.push_back(call);
    for (auto& h : helpers) out.methods.push_back(std::move(h));
    helpers.clear();
    return out;
  }
};

ExtractionContext::ExtractionContext(const CAst& ast, const FunctionDef& fn) : impl_(new Impl(ast, fn)) {
  impl_->prologue();
}

ExtractionContext::~ExtractionContext() { delete impl_; }

Operand ExtractionContext::translate_expression(const CExprPtr& e, std::vector<std::string>& side_effects) {
  return impl_->translate(e, side_effects);
}

void ExtractionContext::translate_statement(const CStmt& s) { impl_->statement(s); }

const std::vector<Stmt>& ExtractionContext::statements() const { return *impl_->ctx->out; }

const std::vector<std::string>& ExtractionContext::outstanding() const { return impl_->ctx->outstanding; }

model::ModelClass ExtractionContext::finish() { return impl_->finish(); }

model::ModelInterface ExtractionContext::interface_of(const model::ModelClass& cls) {
  model::ModelInterface i;
  i.name = cls.implements;
  for (const auto& m : cls.methods) i.methods.push_back({m.name, m.ret, m.params, nullptr, nullptr});
  return i;
}

// ---------------------------------------------------------------------------

namespace {

void add_global(model::Model& m, const CAst& ast) {
  model::ModelInterface iface;
  iface.name = "Global";
  model::ModelClass cls;
  cls.name = "Global";
  cls.implements = "Global";
  for (const auto& g : ast.globals) {
    cls.fields.push_back({g.name, Type::int_(), ex::int_lit(g.initializer)});
    Method get;
    get.name = "get_" + g.name;
    get.ret = Type::int_();
    get.body.push_back(make_return(ex::field(g.name)));
    Method set;
    set.name = "set_" + g.name;
    set.ret = Type::unit();
    set.params.push_back({"arg", Type::int_()});
    set.body.push_back(make_assign(g.name, var("arg"), std::nullopt, true));
    set.body.push_back(make_return(ex::unit()));
    iface.methods.push_back({get.name, get.ret, get.params, nullptr, nullptr});
    iface.methods.push_back({set.name, set.ret, set.params, nullptr, nullptr});
    cls.methods.push_back(std::move(get));
    cls.methods.push_back(std::move(set));
  }
  m.interfaces.push_back(std::move(iface));
  m.classes.push_back(std::move(cls));
}

// A parameter never assigned, or a local never assigned after its
// initializing declaration, is read like a const: directly, without a
// field and without a read helper.
void collect_assigned(const CExpr& e, std::set<std::string>& out) {
  if (e.kind == CExpr::Kind::Assign && e.scope != Scope::Global) out.insert(e.name);
  for (const auto& a : e.args) collect_assigned(*a, out);
}

void collect_assigned(const std::vector<CStmt>& body, std::set<std::string>& out, std::set<std::string>& bare) {
  for (const auto& s : body) {
    if (s.expr) collect_assigned(*s.expr, out);
    if (s.kind == CStmt::Kind::Decl && !s.expr) bare.insert(s.name);
    collect_assigned(s.body, out, bare);
    collect_assigned(s.else_body, out, bare);
  }
}

CExprPtr mark_const(const CExprPtr& e, const std::set<std::string>& names) {
  CExpr c = *e;
  if (c.kind == CExpr::Kind::Var && c.scope != Scope::Global && names.count(c.name)) c.is_const = true;
  for (auto& a : c.args) a = mark_const(a, names);
  return std::make_shared<const CExpr>(std::move(c));
}

void mark_const(std::vector<CStmt>& body, const std::set<std::string>& names) {
  for (auto& s : body) {
    if (s.expr) s.expr = mark_const(s.expr, names);
    if (s.kind == CStmt::Kind::Decl && names.count(s.name)) s.is_const = true;
    mark_const(s.body, names);
    mark_const(s.else_body, names);
  }
}

FunctionDef effective_constness(const FunctionDef& fn) {
  std::set<std::string> assigned, bare;
  collect_assigned(fn.body, assigned, bare);
  std::set<std::string> names;
  FunctionDef out = fn;
  for (auto& p : out.params) {
    if (!assigned.count(p.name)) {
      p.is_const = true;
      names.insert(p.name);
    }
  }
  std::function<void(const std::vector<CStmt>&)> decls = [&](const std::vector<CStmt>& b) {
    for (const auto& s : b) {
      if (s.kind == CStmt::Kind::Decl && s.expr && !assigned.count(s.name) && !bare.count(s.name)) names.insert(s.name);
      decls(s.body);
      decls(s.else_body);
    }
  };
  decls(fn.body);
  mark_const(out.body, names);
  return out;
}

}  // namespace

model::Model translate(const CAst& ast) {
  model::Model m;
  for (const auto& lf : ast.logic_functions) {
    model::LogicFunction out;
    out.name = lf.name;
    auto t = [](frontend::LogicType lt) { return lt == frontend::LogicType::Int ? Type::int_() : Type::bool_(); };
    out.ret = t(lf.return_type);
    for (const auto& [n, pt] : lf.params) out.params.push_back({n, t(pt)});
    out.body = lower_implies(lf.body);
    m.logic_functions.push_back(std::move(out));
  }
  add_global(m, ast);
  for (const auto& fn : ast.functions) {
    const FunctionDef effective = effective_constness(fn);
    ExtractionContext ctx(ast, effective);
    for (const auto& s : effective.body) ctx.translate_statement(s);
    model::ModelClass cls = ctx.finish();
    m.interfaces.push_back(ExtractionContext::interface_of(cls));
    m.classes.push_back(std::move(cls));
  }
  if (const FunctionDef* main = ast.find_function("main"); main && main->params.empty()) {
    std::vector<Stmt> block;
    block.push_back(make_new("global", Type::ref_to("Global"), "Global", {}));
    block.push_back(make_new("m", Type::ref_to(interface_name("main")), class_name("main"), {var("global")}));
    Type rt = main->return_type == CType::Void ? Type::fut(Type::Kind::Unit) : Type::fut();
    block.push_back(make_async("r", rt, "m", "call", {}));
    block.push_back(make_await({"r"}));
    m.main_block = std::move(block);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Helper names

HelperInfo parse_helper_name(const std::string& method, const CAst& ast) {
  HelperInfo info;
  auto starts = [&](const std::string& p) { return method.rfind(p, 0) == 0; };
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    size_t start = 0;
    while (true) {
      size_t u = s.find('_', start);
      parts.push_back(s.substr(start, u == std::string::npos ? std::string::npos : u - start));
      if (u == std::string::npos) break;
      start = u + 1;
    }
    return parts;
  };
  auto is_shape = [](const std::string& s) { return s == "val" || s == "fut" || s == "bval" || s == "bfut"; };
  if (method == "call") {
    info.kind = HelperInfo::Kind::Call;
    return info;
  }
  if (starts("op_")) {
    auto parts = split(method.substr(3));
    if (parts.size() == 2 && (parts[0] == "and" || parts[0] == "or") &&
        std::all_of(parts[1].begin(), parts[1].end(), ::isdigit) && !parts[1].empty()) {
      info.kind = HelperInfo::Kind::Logical;
      info.op = parts[0];
      return info;
    }
    if (parts.size() >= 2 && std::all_of(parts.begin() + 1, parts.end(), is_shape)) {
      info.kind = HelperInfo::Kind::Operator;
      info.op = parts[0];
      info.shapes.assign(parts.begin() + 1, parts.end());
      return info;
    }
    return info;
  }
  for (const auto& g : ast.globals) {
    if (method == "get_global_" + g.name) {
      info.kind = HelperInfo::Kind::GetGlobal;
      info.target = g.name;
      return info;
    }
    for (const char* sh : {"val", "fut"}) {
      if (method == "set_global_" + g.name + "_" + sh) {
        info.kind = HelperInfo::Kind::SetGlobal;
        info.target = g.name;
        info.shapes = {sh};
        return info;
      }
    }
  }
  if (starts("get_local_")) {
    info.kind = HelperInfo::Kind::GetLocal;
    info.target = method.substr(10);
    return info;
  }
  if (starts("set_local_")) {
    std::string rest = method.substr(10);
    for (const char* sh : {"_val", "_fut"}) {
      std::string suffix = sh;
      if (rest.size() > suffix.size() && rest.compare(rest.size() - suffix.size(), suffix.size(), suffix) == 0) {
        info.kind = HelperInfo::Kind::SetLocal;
        info.target = rest.substr(0, rest.size() - suffix.size());
        info.shapes = {suffix.substr(1)};
        return info;
      }
    }
  }
  if (starts("call_")) {
    for (const auto& fn : ast.functions) {
      std::string prefix = "call_" + fn.name + "_";
      if (!starts(prefix)) continue;
      auto parts = split(method.substr(prefix.size()));
      if (parts.size() != fn.params.size() + 1) continue;
      if (!std::all_of(parts.begin(), parts.end() - 1, is_shape)) continue;
      const std::string& n = parts.back();
      if (n.empty() || !std::all_of(n.begin(), n.end(), ::isdigit)) continue;
      info.kind = HelperInfo::Kind::CallHelper;
      info.target = fn.name;
      info.shapes.assign(parts.begin(), parts.end() - 1);
      info.side_effects = std::stoi(n);
      return info;
    }
  }
  return info;
}

// ---------------------------------------------------------------------------
// Specification synthesis

namespace {

BinOp binop_from_name(const std::string& op, bool& ok) {
  static const std::map<std::string, BinOp> ops = {
      {"plus", BinOp::Add}, {"minus", BinOp::Sub}, {"times", BinOp::Mul}, {"div", BinOp::Div},
      {"mod", BinOp::Mod},  {"lt", BinOp::Lt},     {"le", BinOp::Le},     {"gt", BinOp::Gt},
      {"ge", BinOp::Ge},    {"eq", BinOp::Eq},     {"neq", BinOp::Ne}};
  auto it = ops.find(op);
  ok = it != ops.end();
  return ok ? it->second : BinOp::Add;
}

ExprPtr operand_term(const std::string& shape, size_t i) {
  std::string idx = std::to_string(i + 1);
  if (shape == "fut" || shape == "bfut") return ex::value_of("fut_arg" + idx);
  return ex::var("arg" + idx);
}

// Substitutes parameter names; any other free variable is out of scope.
ExprPtr bind_contract(const ExprPtr& f, const std::map<std::string, ExprPtr>& params,
                      const std::string& where, SourceLoc loc) {
  if (!f) return nullptr;
  ExprPtr out = rewrite(f, [&](const Expr& x) -> ExprPtr {
    if (x.kind != Expr::Kind::Var) return nullptr;
    auto it = params.find(x.name);
    if (it == params.end()) {
      throw DiagnosticError(DiagKind::SpecError,
                            "contract of " + where + " mentions '" + x.name +
                                "', which is not a parameter and is out of scope in the model",
                            loc);
    }
    return it->second;
  });
  return lower_implies(out);
}

}  // namespace

void synthesize_specs(model::Model& model, const CAst& ast) {
  ExprPtr weak;
  for (const auto& g : ast.globals) weak = ex::conj(weak, g.weak_invariant);

  auto contract_of = [&](const FunctionDef& fn) {
    std::pair<ExprPtr, ExprPtr> c{ex::conj(fn.contract.requires_clause, weak),
                                  ex::conj(fn.contract.ensures_clause, weak)};
    return c;
  };

  // Global: object invariant, getter postconditions, setter preconditions.
  std::map<std::string, ExprPtr> strong;
  for (const auto& g : ast.globals) {
    if (g.strong_invariant) strong[g.name] = g.strong_invariant;
  }
  auto inv_with = [&](const std::string& g, ExprPtr term) {
    return lower_implies(substitute_vars(strong.at(g), {{g, std::move(term)}}));
  };
  if (model::ModelClass* global = model.find_class("Global")) {
    ExprPtr inv;
    for (const auto& g : ast.globals) {
      if (strong.count(g.name)) inv = ex::conj(inv, inv_with(g.name, ex::field(g.name)));
    }
    global->obj_invariant = inv;
  }
  for (auto& iface : model.interfaces) {
    if (iface.name == "Global") {
      for (auto& sig : iface.methods) {
        for (const auto& [g, f] : strong) {
          if (sig.name == "get_" + g) sig.ensures_clause = inv_with(g, ex::result());
          if (sig.name == "set_" + g) sig.requires_clause = inv_with(g, ex::var("arg"));
        }
      }
    }
  }

  for (const auto& fn : ast.functions) {
    model::ModelClass* cls = model.find_class(class_name(fn.name));
    if (!cls) continue;
    ExprPtr not_null = ex::binary(BinOp::Ne, ex::var("global"), ex::null());
    cls->creation_condition = not_null;
    cls->obj_invariant = not_null;
  }

  for (auto& iface : model.interfaces) {
    if (iface.name.rfind("I_", 0) != 0) continue;
    std::string owner = iface.name.substr(2);
    const FunctionDef* self = ast.find_function(owner);
    if (!self) continue;
    for (auto& sig : iface.methods) {
      HelperInfo h = parse_helper_name(sig.name, ast);
      switch (h.kind) {
        case HelperInfo::Kind::Call: {
          auto names = model_names(*self);
          std::map<std::string, ExprPtr> params;
          for (const auto& p : self->params) params[p.name] = ex::var(names.at(p.name));
          auto [req, ens] = contract_of(*self);
          sig.requires_clause = bind_contract(req, params, self->name, self->contract.loc);
          sig.ensures_clause = bind_contract(ens, params, self->name, self->contract.loc);
          break;
        }
        case HelperInfo::Kind::CallHelper: {
          const FunctionDef* callee = ast.find_function(h.target);
          std::map<std::string, ExprPtr> params;
          for (size_t i = 0; i < callee->params.size(); ++i) {
            params[callee->params[i].name] = operand_term(h.shapes[i], i);
          }
          auto [req, ens] = contract_of(*callee);
          sig.requires_clause = bind_contract(req, params, callee->name, callee->contract.loc);
          sig.ensures_clause = bind_contract(ens, params, callee->name, callee->contract.loc);
          break;
        }
        case HelperInfo::Kind::Operator: {
          if (h.op == "neg" || h.op == "not") {
            ExprPtr t = operand_term(h.shapes[0], 0);
            sig.ensures_clause = ex::binary(BinOp::Eq, ex::unary(h.op == "neg" ? UnOp::Neg : UnOp::Not, t), ex::result());
            break;
          }
          bool ok = false;
          BinOp op = binop_from_name(h.op, ok);
          if (!ok || h.shapes.size() != 2) break;
          ExprPtr a = operand_term(h.shapes[0], 0);
          ExprPtr b = operand_term(h.shapes[1], 1);
          if (op == BinOp::Div || op == BinOp::Mod) {
            // The quotient itself is left unspecified: specifications are division-free.
            sig.requires_clause = ex::binary(BinOp::Ne, b, ex::int_lit(0));
          } else {
            sig.ensures_clause = ex::binary(BinOp::Eq, ex::binary(op, a, b), ex::result());
          }
          break;
        }
        case HelperInfo::Kind::GetGlobal:
          if (strong.count(h.target)) sig.ensures_clause = inv_with(h.target, ex::result());
          break;
        case HelperInfo::Kind::SetGlobal:
          if (strong.count(h.target)) {
            sig.requires_clause =
                inv_with(h.target, h.shapes[0] == "fut" ? ex::value_of("fut_arg") : ex::var("arg"));
          }
          break;
        default: break;
      }
    }
  }
}

model::Model extract(const CAst& ast) {
  model::Model m = translate(ast);
  synthesize_specs(m, ast);
  auto diags = model::well_formed(m);
  if (!diags.empty()) throw DiagnosticError(std::move(diags));
  return m;
}

}  // namespace c2ao::extract
