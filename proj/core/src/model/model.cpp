#include "c2ao/model/model.hpp"

#include <functional>
#include <map>
#include <set>

namespace c2ao::model {

namespace {

const char* kind_name(Type::Kind k) {
  switch (k) {
    case Type::Kind::Int: return "Int";
    case Type::Kind::Bool: return "Bool";
    case Type::Kind::Unit: return "Unit";
    case Type::Kind::Fut: return "Fut";
    case Type::Kind::Ref: return "Ref";
  }
  return "?";
}

}  // namespace

std::string Type::str() const {
  if (kind == Kind::Fut) return std::string("Fut<") + kind_name(inner) + ">";
  if (kind == Kind::Ref) return ref;
  return kind_name(kind);
}

const MethodSig* ModelInterface::find(const std::string& method) const {
  for (const auto& m : methods) {
    if (m.name == method) return &m;
  }
  return nullptr;
}

const Method* ModelClass::find(const std::string& method) const {
  for (const auto& m : methods) {
    if (m.name == method) return &m;
  }
  return nullptr;
}

bool ModelClass::has_field(const std::string& name) const { return field_type(name).has_value(); }

std::optional<Type> ModelClass::field_type(const std::string& name) const {
  for (const auto& p : params) {
    if (p.name == name) return p.type;
  }
  for (const auto& f : fields) {
    if (f.name == name) return f.type;
  }
  return std::nullopt;
}

const ModelInterface* Model::find_interface(const std::string& name) const {
  for (const auto& i : interfaces) {
    if (i.name == name) return &i;
  }
  return nullptr;
}

const ModelClass* Model::find_class(const std::string& name) const {
  for (const auto& c : classes) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

ModelClass* Model::find_class(const std::string& name) {
  for (auto& c : classes) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const LogicFunction* Model::find_logic_function(const std::string& name) const {
  for (const auto& l : logic_functions) {
    if (l.name == name) return &l;
  }
  return nullptr;
}

const MethodSig* Model::contract(const ModelClass& cls, const std::string& method) const {
  const ModelInterface* iface = find_interface(cls.implements);
  return iface ? iface->find(method) : nullptr;
}

const ModelClass* Model::implementor(const std::string& interface_name) const {
  for (const auto& c : classes) {
    if (c.implements == interface_name) return &c;
  }
  return find_class(interface_name);
}

// ---------------------------------------------------------------------------
// Equality

namespace {

bool same_exprs(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!c2ao::same(a[i], b[i])) return false;
  }
  return true;
}

bool same_sig(const MethodSig& a, const MethodSig& b) {
  return a.name == b.name && a.ret == b.ret && a.params == b.params &&
         c2ao::same(a.requires_clause, b.requires_clause) &&
         c2ao::same(a.ensures_clause, b.ensures_clause);
}

}  // namespace

bool same(const Stmt& a, const Stmt& b) {
  return a.kind == b.kind && a.target == b.target && a.target_is_field == b.target_is_field &&
         a.decl_type == b.decl_type && c2ao::same(a.expr, b.expr) && a.callee == b.callee &&
         a.method == b.method && a.cls == b.cls && same_exprs(a.args, b.args) &&
         a.guard == b.guard && a.future == b.future && same(a.body, b.body) &&
         same(a.else_body, b.else_body) && c2ao::same(a.invariant, b.invariant);
}

bool same(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!same(a[i], b[i])) return false;
  }
  return true;
}

bool same(const Model& a, const Model& b) {
  if (a.logic_functions.size() != b.logic_functions.size() ||
      a.interfaces.size() != b.interfaces.size() || a.classes.size() != b.classes.size() ||
      a.main_block.has_value() != b.main_block.has_value()) {
    return false;
  }
  for (size_t i = 0; i < a.logic_functions.size(); ++i) {
    const auto& x = a.logic_functions[i];
    const auto& y = b.logic_functions[i];
    if (x.name != y.name || !(x.ret == y.ret) || x.params != y.params || !c2ao::same(x.body, y.body)) {
      return false;
    }
  }
  for (size_t i = 0; i < a.interfaces.size(); ++i) {
    const auto& x = a.interfaces[i];
    const auto& y = b.interfaces[i];
    if (x.name != y.name || x.methods.size() != y.methods.size()) return false;
    for (size_t k = 0; k < x.methods.size(); ++k) {
      if (!same_sig(x.methods[k], y.methods[k])) return false;
    }
  }
  for (size_t i = 0; i < a.classes.size(); ++i) {
    const auto& x = a.classes[i];
    const auto& y = b.classes[i];
    if (x.name != y.name || x.implements != y.implements || x.params != y.params ||
        x.fields.size() != y.fields.size() || x.methods.size() != y.methods.size() ||
        !c2ao::same(x.obj_invariant, y.obj_invariant) ||
        !c2ao::same(x.creation_condition, y.creation_condition)) {
      return false;
    }
    for (size_t k = 0; k < x.fields.size(); ++k) {
      if (x.fields[k].name != y.fields[k].name || !(x.fields[k].type == y.fields[k].type) ||
          !c2ao::same(x.fields[k].init, y.fields[k].init)) {
        return false;
      }
    }
    for (size_t k = 0; k < x.methods.size(); ++k) {
      const auto& m = x.methods[k];
      const auto& n = y.methods[k];
      if (m.name != n.name || !(m.ret == n.ret) || m.params != n.params || !same(m.body, n.body)) {
        return false;
      }
    }
  }
  return !a.main_block || same(*a.main_block, *b.main_block);
}

// ---------------------------------------------------------------------------
// Well-formedness

namespace {

class Checker {
 public:
  explicit Checker(const Model& m) : m_(m) {}

  std::vector<Diagnostic> run() {
    std::set<std::string> names;
    for (const auto& i : m_.interfaces) {
      if (!names.insert(i.name).second) report("duplicate interface '" + i.name + "'");
      std::set<std::string> seen;
      for (const auto& sig : i.methods) {
        if (!seen.insert(sig.name).second) report("interface " + i.name + " declares '" + sig.name + "' twice");
        check_sig(i, sig);
      }
    }
    std::set<std::string> class_names;
    for (const auto& c : m_.classes) {
      if (!class_names.insert(c.name).second) report("duplicate class '" + c.name + "'");
      check_class(c);
    }
    for (const auto& lf : m_.logic_functions) {
      std::set<std::string> params;
      for (const auto& p : lf.params) params.insert(p.name);
      check_spec_names(lf.body, "logic function " + lf.name, [&](const Expr& e) {
        if (e.kind == Expr::Kind::Var) return params.count(e.name) > 0;
        return false;
      });
    }
    if (m_.main_block) {
      Scope sc;
      sc.where = "main block";
      check_body(*m_.main_block, sc);
    }
    return std::move(diags_);
  }

 private:
  struct Scope {
    const ModelClass* cls = nullptr;
    const Method* method = nullptr;
    std::map<std::string, Type> locals;
    std::string where;
  };

  void report(std::string msg, SourceLoc loc = {}) {
    diags_.push_back({DiagKind::WellFormedness, Severity::Error, std::move(msg), loc});
  }

  template <typename Allowed>
  void check_spec_names(const ExprPtr& e, const std::string& where, Allowed&& allowed) {
    if (!e) return;
    bool division = false;
    std::function<void(const Expr&)> walk = [&](const Expr& x) {
      switch (x.kind) {
        case Expr::Kind::Var:
        case Expr::Kind::Field:
        case Expr::Kind::ValueOf:
        case Expr::Kind::Result:
          if (!allowed(x)) {
            std::string what = x.kind == Expr::Kind::ValueOf ? "valueOf(" + x.name + ")"
                               : x.kind == Expr::Kind::Result ? std::string("result")
                               : x.kind == Expr::Kind::Field  ? "this." + x.name
                                                              : x.name;
            report(where + ": '" + what + "' is not allowed here");
          }
          break;
        case Expr::Kind::Call:
          if (!m_.find_logic_function(x.name)) report(where + ": unknown function '" + x.name + "'");
          break;
        case Expr::Kind::Binary:
          if (x.binop == BinOp::Div || x.binop == BinOp::Mod) division = true;
          break;
        default: break;
      }
      for (const auto& a : x.args) walk(*a);
    };
    walk(*e);
    if (division) report(where + ": division is not allowed in specifications");
  }

  void check_sig(const ModelInterface& iface, const MethodSig& sig) {
    std::string where = iface.name + "." + sig.name;
    auto param_ok = [&](const Expr& e, bool allow_result) {
      if (e.kind == Expr::Kind::Result) return allow_result;
      for (const auto& p : sig.params) {
        if (p.name != e.name) continue;
        if (e.kind == Expr::Kind::Var) return true;
        if (e.kind == Expr::Kind::ValueOf) return p.type.is_fut();
      }
      return false;
    };
    check_spec_names(sig.requires_clause, where + " Requires",
                     [&](const Expr& e) { return param_ok(e, false); });
    check_spec_names(sig.ensures_clause, where + " Ensures",
                     [&](const Expr& e) { return param_ok(e, true); });
  }

  void check_class(const ModelClass& c) {
    const ModelInterface* iface = m_.find_interface(c.implements);
    if (!iface) {
      report("class " + c.name + " implements undeclared interface '" + c.implements + "'", c.loc);
    } else {
      for (const auto& sig : iface->methods) {
        const Method* m = c.find(sig.name);
        if (!m) {
          report("class " + c.name + " does not implement " + iface->name + "." + sig.name, c.loc);
          continue;
        }
        if (!(m->ret == sig.ret) || m->params != sig.params) {
          report("signature of " + c.name + "." + sig.name + " differs from its interface declaration", m->loc);
        }
      }
    }
    check_spec_names(c.obj_invariant, c.name + " ObjInv", [&](const Expr& e) {
      return (e.kind == Expr::Kind::Field || e.kind == Expr::Kind::Var) && c.has_field(e.name);
    });
    check_spec_names(c.creation_condition, c.name + " creation condition", [&](const Expr& e) {
      if (e.kind != Expr::Kind::Var && e.kind != Expr::Kind::Field) return false;
      for (const auto& p : c.params) {
        if (p.name == e.name) return true;
      }
      return false;
    });
    std::set<std::string> seen;
    for (const auto& m : c.methods) {
      if (!seen.insert(m.name).second) report("class " + c.name + " defines '" + m.name + "' twice", m.loc);
      Scope sc;
      sc.cls = &c;
      sc.method = &m;
      sc.where = c.name + "." + m.name;
      for (const auto& p : m.params) sc.locals[p.name] = p.type;
      check_body(m.body, sc);
      check_await_before_get(m);
    }
  }

  std::optional<Type> var_type(const Scope& sc, const std::string& name) const {
    if (auto it = sc.locals.find(name); it != sc.locals.end()) return it->second;
    if (sc.cls) return sc.cls->field_type(name);
    return std::nullopt;
  }

  void check_expr(const ExprPtr& e, const Scope& sc, SourceLoc loc) {
    if (!e) return;
    switch (e->kind) {
      case Expr::Kind::Var:
        if (!var_type(sc, e->name)) report(sc.where + ": unknown variable '" + e->name + "'", loc);
        break;
      case Expr::Kind::Field:
        if (!sc.cls || !sc.cls->has_field(e->name)) {
          report(sc.where + ": unknown field '" + e->name + "'", loc);
        }
        break;
      case Expr::Kind::ValueOf:
      case Expr::Kind::Result:
        report(sc.where + ": specification-only term in a statement", loc);
        break;
      case Expr::Kind::Call:
        report(sc.where + ": function application '" + e->name + "' in a statement", loc);
        break;
      default: break;
    }
    for (const auto& a : e->args) check_expr(a, sc, loc);
  }

  void declare(const Stmt& s, Scope& sc) {
    if (s.decl_type) {
      sc.locals[s.target] = *s.decl_type;
      return;
    }
    if (s.target_is_field) {
      if (!sc.cls || !sc.cls->has_field(s.target)) {
        report(sc.where + ": assignment to unknown field '" + s.target + "'", s.loc);
      }
      return;
    }
    if (!var_type(sc, s.target)) report(sc.where + ": assignment to undeclared '" + s.target + "'", s.loc);
  }

  void check_future(const std::string& name, const Scope& sc, SourceLoc loc) {
    auto t = var_type(sc, name);
    if (!t) {
      report(sc.where + ": unknown future '" + name + "'", loc);
    } else if (!t->is_fut()) {
      report(sc.where + ": '" + name + "' is not a future", loc);
    }
  }

  // Finds the declared signature for `callee!method` from the given scope.
  void check_call(const Stmt& s, const Scope& sc) {
    std::vector<Param> params;
    bool found = false;
    if (s.callee == "this") {
      if (!sc.cls) {
        report(sc.where + ": 'this' used outside a class", s.loc);
        return;
      }
      if (const Method* m = sc.cls->find(s.method)) {
        params = m->params;
        found = true;
      }
    } else {
      auto t = var_type(sc, s.callee);
      if (!t || t->kind != Type::Kind::Ref) {
        report(sc.where + ": call target '" + s.callee + "' is not an object reference", s.loc);
        return;
      }
      if (const ModelInterface* i = m_.find_interface(t->ref)) {
        if (const MethodSig* sig = i->find(s.method)) {
          params = sig->params;
          found = true;
        }
      } else if (const ModelClass* c = m_.find_class(t->ref)) {
        if (const Method* m = c->find(s.method)) {
          params = m->params;
          found = true;
        }
      }
    }
    if (!found) {
      report(sc.where + ": call to undeclared method '" + s.method + "' on '" + s.callee + "'", s.loc);
      return;
    }
    if (params.size() != s.args.size()) {
      report(sc.where + ": '" + s.method + "' called with " + std::to_string(s.args.size()) +
                 " arguments, expects " + std::to_string(params.size()),
             s.loc);
    }
  }

  void check_body(const std::vector<Stmt>& body, Scope& sc) {
    for (const auto& s : body) {
      switch (s.kind) {
        case Stmt::Kind::Assign:
          check_expr(s.expr, sc, s.loc);
          declare(s, sc);
          break;
        case Stmt::Kind::AsyncCall:
          for (const auto& a : s.args) check_expr(a, sc, s.loc);
          check_call(s, sc);
          declare(s, sc);
          break;
        case Stmt::Kind::New: {
          const ModelClass* c = m_.find_class(s.cls);
          if (!c) {
            report(sc.where + ": new of unknown class '" + s.cls + "'", s.loc);
          } else if (c->params.size() != s.args.size()) {
            report(sc.where + ": new " + s.cls + " with wrong number of arguments", s.loc);
          }
          for (const auto& a : s.args) check_expr(a, sc, s.loc);
          declare(s, sc);
          break;
        }
        case Stmt::Kind::Await:
          if (s.guard.empty()) report(sc.where + ": empty await guard", s.loc);
          for (const auto& g : s.guard) check_future(g, sc, s.loc);
          break;
        case Stmt::Kind::Get:
          check_future(s.future, sc, s.loc);
          declare(s, sc);
          break;
        case Stmt::Kind::Return:
          if (!s.future.empty()) check_future(s.future, sc, s.loc);
          else check_expr(s.expr, sc, s.loc);
          break;
        case Stmt::Kind::If:
          check_expr(s.expr, sc, s.loc);
          check_body(s.body, sc);
          check_body(s.else_body, sc);
          break;
        case Stmt::Kind::While:
          check_expr(s.expr, sc, s.loc);
          check_body(s.body, sc);
          break;
        case Stmt::Kind::Skip: break;
      }
    }
  }

  // A `get` on a future produced by a call on `this` must be preceded by an
  // await covering it on every path.
  void check_await_before_get(const Method& m) {
    std::set<std::string> pending;  // self-call futures not yet awaited
    walk_await(m.body, pending, m);
  }

  void walk_await(const std::vector<Stmt>& body, std::set<std::string>& pending, const Method& m) {
    for (const auto& s : body) {
      switch (s.kind) {
        case Stmt::Kind::AsyncCall:
          if (s.callee == "this") pending.insert(s.target);
          else pending.erase(s.target);
          break;
        case Stmt::Kind::Await:
          for (const auto& g : s.guard) pending.erase(g);
          break;
        case Stmt::Kind::Get:
        case Stmt::Kind::Return:
          if (!s.future.empty() && pending.count(s.future)) {
            report("method " + m.name + " reads self-call future '" + s.future + "' without awaiting it", s.loc);
          }
          break;
        case Stmt::Kind::If: {
          std::set<std::string> a = pending;
          std::set<std::string> b = pending;
          walk_await(s.body, a, m);
          walk_await(s.else_body, b, m);
          a.insert(b.begin(), b.end());
          pending = std::move(a);
          break;
        }
        case Stmt::Kind::While: {
          std::set<std::string> a = pending;
          walk_await(s.body, a, m);
          // A second pass catches futures left pending by the previous iteration.
          walk_await(s.body, a, m);
          pending.insert(a.begin(), a.end());
          break;
        }
        default: break;
      }
    }
  }

  const Model& m_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> well_formed(const Model& model) {
  std::vector<Diagnostic> d = Checker(model).run();
  // The second while-pass may repeat a report; keep the list free of duplicates.
  std::vector<Diagnostic> out;
  std::set<std::string> seen;
  for (auto& x : d) {
    if (seen.insert(x.format()).second) out.push_back(std::move(x));
  }
  return out;
}

}  // namespace c2ao::model
