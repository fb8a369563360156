#include "c2ao/vcgen/vcgen.hpp"

#include <functional>
#include <optional>
#include <set>

namespace c2ao::vc {

using model::MethodSig;
using model::ModelClass;
using model::Stmt;
using model::Type;

namespace {

Sort sort_of(const Type& t) {
  switch (t.kind) {
    case Type::Kind::Bool: return Sort::Bool;
    case Type::Kind::Ref: return Sort::Ref;
    default: return Sort::Int;
  }
}

Sort sort_of_inner(Type::Kind k) {
  if (k == Type::Kind::Bool) return Sort::Bool;
  if (k == Type::Kind::Ref) return Sort::Ref;
  return Sort::Int;
}

struct FutRec {
  const MethodSig* sig = nullptr;  // null: nothing known about the callee
  std::map<std::string, ExprPtr> args;  // value parameters
  std::map<std::string, int> fut_args;  // future parameters
  ExprPtr value;
  bool assumed = false;
};

struct Binding {
  ExprPtr term;
  int fut = -1;
};

struct State {
  std::vector<ExprPtr> hyps;
  std::map<std::string, Binding> locals;
  std::map<std::string, ExprPtr> fields;
  std::vector<FutRec> futs;
  std::map<std::string, Sort> symbols;
  std::string branch;
  std::map<std::string, int> counters;
};

struct Cont {
  const std::vector<Stmt>* list = nullptr;
  size_t idx = 0;
  ExprPtr loop_end;  // set: reaching this frame closes a loop body
  SourceLoc loc;
};

struct MissingInvariant {
  SourceLoc loc;
};

class MethodVC {
 public:
  MethodVC(const model::Model& m, const ModelClass& cls, const model::Method& meth, std::vector<Obligation>& out)
      : m_(m), cls_(cls), meth_(meth), out_(out) {
    sig_ = m.contract(cls, meth.name);
    for (const auto& p : cls.params) field_types_[p.name] = p.type;
    for (const auto& f : cls.fields) field_types_[f.name] = f.type;
    for (const auto& p : meth.params) local_types_[p.name] = p.type;
    model::for_each_stmt(meth.body, [&](const Stmt& s) {
      if (s.decl_type && !s.target_is_field) local_types_[s.target] = *s.decl_type;
    });
  }

  void run() {
    State st;
    declare(st, "this", Sort::Ref);
    st.hyps.push_back(ex::binary(BinOp::Ne, ex::var("this"), ex::null()));
    fresh_fields(st, false);
    std::map<std::string, ExprPtr> params;
    std::map<std::string, ExprPtr> futvals;
    for (const auto& p : meth_.params) {
      if (p.type.is_fut()) {
        FutRec r;
        r.value = ex::var("valueOf(" + p.name + ")");
        declare(st, r.value->name, sort_of_inner(p.type.inner));
        futvals[p.name] = r.value;
        st.locals[p.name] = {nullptr, static_cast<int>(st.futs.size())};
        st.futs.push_back(std::move(r));
      } else {
        declare(st, p.name, sort_of(p.type));
        params[p.name] = ex::var(p.name);
        st.locals[p.name] = {ex::var(p.name), -1};
      }
    }
    params_ = params;
    futvals_ = futvals;
    if (sig_ && sig_->requires_clause) st.hyps.push_back(spec(sig_->requires_clause, params, futvals, nullptr, &st));
    if (cls_.obj_invariant) st.hyps.push_back(spec(cls_.obj_invariant, {}, {}, nullptr, &st));
    exec(std::move(st), {Cont{&meth_.body, 0, nullptr, {}}});
  }

 private:
  std::string id() const { return cls_.name + "." + meth_.name; }

  static void declare(State& st, const std::string& n, Sort s) { st.symbols[n] = s; }

  std::string fresh_name(const std::string& base) { return base + "@" + std::to_string(++counter_); }

  void fresh_fields(State& st, bool havoc) {
    for (const auto& [name, t] : field_types_) {
      if (t.is_fut()) continue;
      std::string n = havoc ? fresh_name("this." + name) : "this." + name;
      declare(st, n, sort_of(t));
      st.fields[name] = ex::var(n);
    }
  }

  /// Instantiates a specification: parameters, valueOf, result, fields.
  ExprPtr spec(const ExprPtr& f, const std::map<std::string, ExprPtr>& params,
               const std::map<std::string, ExprPtr>& futvals, const ExprPtr& result, const State* st) const {
    return lower_implies(rewrite(f, [&](const Expr& x) -> ExprPtr {
      switch (x.kind) {
        case Expr::Kind::Var: {
          if (auto it = params.find(x.name); it != params.end()) return it->second;
          if (st) {
            if (auto it = st->fields.find(x.name); it != st->fields.end()) return it->second;
          }
          throw DiagnosticError(DiagKind::SpecError, "specification name '" + x.name + "' is not in scope in " + id());
        }
        case Expr::Kind::Field: {
          if (st) {
            if (auto it = st->fields.find(x.name); it != st->fields.end()) return it->second;
          }
          throw DiagnosticError(DiagKind::SpecError, "field '" + x.name + "' is not in scope in " + id());
        }
        case Expr::Kind::ValueOf: {
          auto it = futvals.find(x.name);
          if (it == futvals.end()) throw DiagnosticError(DiagKind::SpecError, "valueOf(" + x.name + ") is not in scope");
          return it->second;
        }
        case Expr::Kind::Result:
          if (!result) throw DiagnosticError(DiagKind::SpecError, "result outside a postcondition");
          return result;
        case Expr::Kind::This: return ex::var("this");
        default: return nullptr;
      }
    }));
  }

  void oblige(State& st, const std::string& kind, ExprPtr goal, std::string desc, SourceLoc loc) {
    // Postconditions of futures the goal talks about: their values are only
    // observable once resolved, when those postconditions hold.
    std::vector<ExprPtr> extra;
    std::vector<bool> assumed(st.futs.size());
    for (size_t i = 0; i < st.futs.size(); ++i) assumed[i] = st.futs[i].assumed;
    std::set<std::string> mentioned = collect_names(goal).vars;
    for (bool grew = true; grew;) {
      grew = false;
      for (size_t i = 0; i < st.futs.size(); ++i) {
        if (assumed[i] || !st.futs[i].value || !mentioned.count(st.futs[i].value->name)) continue;
        assumed[i] = true;
        if (ExprPtr p = post(st, st.futs[i])) {
          for (const auto& v : collect_names(p).vars) mentioned.insert(v);
          extra.push_back(p);
          grew = true;
        }
      }
    }
    Obligation o;
    int k = st.counters[kind]++;
    o.name = id() + "#" + (st.branch.empty() ? "0" : st.branch) + ":" + kind + ":" + std::to_string(k);
    o.cls = cls_.name;
    o.method = meth_.name;
    o.kind = kind;
    o.hypotheses = st.hyps;
    o.hypotheses.insert(o.hypotheses.end(), extra.begin(), extra.end());
    o.goal = std::move(goal);
    o.symbols = st.symbols;
    o.description = std::move(desc);
    o.loc = loc.known() ? loc : meth_.loc;
    out_.push_back(std::move(o));
  }

  ExprPtr post(const State& st, const FutRec& r) const {
    if (!r.sig || !r.sig->ensures_clause) return nullptr;
    std::map<std::string, ExprPtr> futvals;
    for (const auto& [p, idx] : r.fut_args) futvals[p] = st.futs[static_cast<size_t>(idx)].value;
    return spec(r.sig->ensures_clause, r.args, futvals, r.value, nullptr);
  }

  void assume_post(State& st, int idx) {
    FutRec& r = st.futs[static_cast<size_t>(idx)];
    if (r.assumed) return;
    r.assumed = true;
    ExprPtr p = post(st, r);
    if (!p) return;
    st.hyps.push_back(p);
    // Futures whose values the postcondition mentions were resolved by the callee.
    Names n = collect_names(r.sig->ensures_clause);
    for (const auto& [param, fidx] : std::map<std::string, int>(r.fut_args)) {
      if (n.value_ofs.count(param)) assume_post(st, fidx);
    }
  }

  // --- program expressions ---

  ExprPtr term(const ExprPtr& e, State& st, SourceLoc loc) {
    return rewrite(e, [&](const Expr& x) -> ExprPtr {
      switch (x.kind) {
        case Expr::Kind::Var: {
          if (auto it = st.locals.find(x.name); it != st.locals.end()) {
            if (it->second.fut >= 0) throw InternalError("future '" + x.name + "' used as a value");
            return it->second.term;
          }
          if (auto it = st.fields.find(x.name); it != st.fields.end()) return it->second;
          throw DiagnosticError(DiagKind::WellFormedness, "name '" + x.name + "' is not bound in " + id());
        }
        case Expr::Kind::Field: {
          auto it = st.fields.find(x.name);
          if (it == st.fields.end()) throw DiagnosticError(DiagKind::WellFormedness, "no field '" + x.name + "'");
          return it->second;
        }
        case Expr::Kind::This: return ex::var("this");
        case Expr::Kind::Binary:
          if (x.binop == BinOp::Div || x.binop == BinOp::Mod) {
            ExprPtr a = term(x.args[0], st, loc);
            ExprPtr b = term(x.args[1], st, loc);
            oblige(st, "division", ex::binary(BinOp::Ne, b, ex::int_lit(0)), "divisor is nonzero", loc);
            return ex::binary(x.binop, a, b);
          }
          return nullptr;
        default: return nullptr;
      }
    });
  }

  int future_of(State& st, const std::string& name) {
    if (auto it = st.locals.find(name); it != st.locals.end() && it->second.fut >= 0) return it->second.fut;
    // A future held in a field or otherwise unknown: nothing is known about it.
    FutRec r;
    Type t = field_types_.count(name) ? field_types_.at(name) : Type::fut();
    r.value = ex::var(fresh_name(name + ".value"));
    declare(st, r.value->name, sort_of_inner(t.inner));
    st.futs.push_back(std::move(r));
    return static_cast<int>(st.futs.size()) - 1;
  }

  void bind(State& st, const Stmt& s, Binding b) {
    if (!s.target_is_field && local_types_.count(s.target)) {
      st.locals[s.target] = std::move(b);
    } else if (b.term) {
      st.fields[s.target] = std::move(b.term);
    }
  }

  const MethodSig* callee_sig(const Stmt& s) const {
    if (s.callee == "this") return m_.contract(cls_, s.method);
    std::optional<Type> t;
    if (auto it = local_types_.find(s.callee); it != local_types_.end()) t = it->second;
    else if (auto f = field_types_.find(s.callee); f != field_types_.end()) t = f->second;
    if (!t || t->kind != Type::Kind::Ref) return nullptr;
    if (const ModelClass* c = m_.find_class(t->ref)) return m_.contract(*c, s.method);
    if (const model::ModelInterface* i = m_.find_interface(t->ref)) return i->find(s.method);
    return nullptr;
  }

  void objinv_check(State& st, const char* where, SourceLoc loc) {
    if (!cls_.obj_invariant) return;
    oblige(st, "objinv", spec(cls_.obj_invariant, {}, {}, nullptr, &st),
           std::string("ObjInv of ") + cls_.name + " " + where, loc);
  }

  void havoc(State& st, const std::set<std::string>& locals) {
    fresh_fields(st, true);
    if (cls_.obj_invariant) st.hyps.push_back(spec(cls_.obj_invariant, {}, {}, nullptr, &st));
    for (const auto& l : locals) {
      auto t = local_types_.find(l);
      if (t == local_types_.end()) continue;
      if (t->second.is_fut()) {
        FutRec r;
        r.value = ex::var(fresh_name(l + ".value"));
        declare(st, r.value->name, sort_of_inner(t->second.inner));
        st.locals[l] = {nullptr, static_cast<int>(st.futs.size())};
        st.futs.push_back(std::move(r));
      } else {
        std::string n = fresh_name(l);
        declare(st, n, sort_of(t->second));
        st.locals[l] = {ex::var(n), -1};
      }
    }
  }

  void do_return(State& st, ExprPtr result, SourceLoc loc) {
    if (sig_ && sig_->ensures_clause) {
      oblige(st, "ensures", spec(sig_->ensures_clause, params_, futvals_, result, &st),
             "postcondition of " + id(), loc);
    }
    objinv_check(st, "at method exit", loc);
  }

  void exec(State st, std::vector<Cont> k) {
    while (!k.empty()) {
      Cont& fr = k.back();
      if (fr.idx == fr.list->size()) {
        if (fr.loop_end) {
          oblige(st, "loopinv", spec(fr.loop_end, locals_terms(st), {}, nullptr, &st), "loop invariant is preserved",
                 fr.loc);
          return;
        }
        k.pop_back();
        continue;
      }
      const Stmt& s = (*fr.list)[fr.idx++];
      switch (s.kind) {
        case Stmt::Kind::Assign:
          bind(st, s, {term(s.expr, st, s.loc), -1});
          break;
        case Stmt::Kind::AsyncCall: {
          const MethodSig* sig = callee_sig(s);
          FutRec r;
          r.sig = sig;
          std::map<std::string, ExprPtr> futvals;
          for (size_t i = 0; i < s.args.size(); ++i) {
            const ExprPtr& a = s.args[i];
            bool fut_param = sig && i < sig->params.size() && sig->params[i].type.is_fut();
            std::string pname = sig && i < sig->params.size() ? sig->params[i].name : "arg" + std::to_string(i);
            if (fut_param) {
              int idx = future_of(st, a->kind == Expr::Kind::Var ? a->name : "?");
              r.fut_args[pname] = idx;
              futvals[pname] = st.futs[static_cast<size_t>(idx)].value;
            } else {
              r.args[pname] = term(a, st, s.loc);
            }
          }
          if (sig && sig->requires_clause) {
            oblige(st, "requires", spec(sig->requires_clause, r.args, futvals, nullptr, nullptr),
                   "precondition of " + s.callee + "!" + s.method, s.loc);
          }
          Type ret = sig ? sig->ret : Type::int_();
          if (ret.kind == Type::Kind::Unit) {
            r.value = ex::int_lit(0);
          } else {
            r.value = ex::var(fresh_name(s.target + ".value"));
            declare(st, r.value->name, sort_of(ret));
          }
          st.futs.push_back(std::move(r));
          bind(st, s, {nullptr, static_cast<int>(st.futs.size()) - 1});
          break;
        }
        case Stmt::Kind::New: {
          const ModelClass* c = m_.find_class(s.cls);
          if (!c) throw DiagnosticError(DiagKind::WellFormedness, "unknown class " + s.cls);
          std::map<std::string, ExprPtr> cparams;
          for (size_t i = 0; i < c->params.size() && i < s.args.size(); ++i) {
            cparams[c->params[i].name] = term(s.args[i], st, s.loc);
          }
          if (c->creation_condition) {
            oblige(st, "creation", spec(c->creation_condition, cparams, {}, nullptr, nullptr),
                   "creation condition of " + c->name, s.loc);
          }
          std::string n = fresh_name("new " + c->name);
          declare(st, n, Sort::Ref);
          st.hyps.push_back(ex::binary(BinOp::Ne, ex::var(n), ex::null()));
          bind(st, s, {ex::var(n), -1});
          break;
        }
        case Stmt::Kind::Await: {
          objinv_check(st, "at suspension", s.loc);
          havoc(st, {});
          for (const auto& g : s.guard) assume_post(st, future_of(st, g));
          break;
        }
        case Stmt::Kind::Get: {
          int f = future_of(st, s.future);
          assume_post(st, f);
          bind(st, s, {st.futs[static_cast<size_t>(f)].value, -1});
          break;
        }
        case Stmt::Kind::Return: {
          ExprPtr result;
          if (!s.future.empty()) {
            int f = future_of(st, s.future);
            assume_post(st, f);
            result = st.futs[static_cast<size_t>(f)].value;
          } else {
            result = s.expr ? term(s.expr, st, s.loc) : ex::int_lit(0);
          }
          do_return(st, result, s.loc);
          return;
        }
        case Stmt::Kind::If: {
          ExprPtr c = term(s.expr, st, s.loc);
          State a = st;
          a.hyps.push_back(c);
          a.branch += "t";
          auto ka = k;
          ka.push_back({&s.body, 0, nullptr, {}});
          exec(std::move(a), std::move(ka));
          st.hyps.push_back(ex::lnot(c));
          st.branch += "e";
          k.push_back({&s.else_body, 0, nullptr, {}});
          break;
        }
        case Stmt::Kind::While: {
          if (!s.invariant) throw MissingInvariant{s.loc};
          oblige(st, "loopinit", spec(s.invariant, locals_terms(st), {}, nullptr, &st), "loop invariant holds initially",
                 s.loc);
          std::set<std::string> assigned;
          model::for_each_stmt(s.body, [&](const Stmt& b) {
            if (!b.target.empty() && !b.target_is_field && local_types_.count(b.target)) assigned.insert(b.target);
          });
          State body = st;
          havoc(body, assigned);
          body.hyps.push_back(spec(s.invariant, locals_terms(body), {}, nullptr, &body));
          body.hyps.push_back(term(s.expr, body, s.loc));
          body.branch += "b";
          std::vector<Cont> kb;
          kb.push_back({&empty_, 0, s.invariant, s.loc});
          kb.push_back({&s.body, 0, nullptr, {}});
          exec(std::move(body), std::move(kb));
          havoc(st, assigned);
          st.hyps.push_back(spec(s.invariant, locals_terms(st), {}, nullptr, &st));
          st.hyps.push_back(ex::lnot(term(s.expr, st, s.loc)));
          st.branch += "x";
          break;
        }
        case Stmt::Kind::Skip: break;
      }
    }
    do_return(st, ex::int_lit(0), meth_.loc);
  }

  std::map<std::string, ExprPtr> locals_terms(const State& st) const {
    std::map<std::string, ExprPtr> out;
    for (const auto& [n, b] : st.locals) {
      if (b.term) out[n] = b.term;
    }
    return out;
  }

  const model::Model& m_;
  const ModelClass& cls_;
  const model::Method& meth_;
  std::vector<Obligation>& out_;
  const MethodSig* sig_ = nullptr;
  std::map<std::string, Type> field_types_;
  std::map<std::string, Type> local_types_;
  std::map<std::string, ExprPtr> params_;
  std::map<std::string, ExprPtr> futvals_;
  int counter_ = 0;
  std::vector<Stmt> empty_;
};

}  // namespace

Generation generate(const model::Model& model) {
  Generation g;
  for (const auto& c : model.classes) {
    if (c.obj_invariant) {
      // Field initializers and the creation condition establish the invariant.
      Obligation o;
      o.name = c.name + "#init:classinit:0";
      o.cls = c.name;
      o.method = "<init>";
      o.kind = "classinit";
      o.loc = c.loc;
      o.description = "initial state of " + c.name + " satisfies its ObjInv";
      std::map<std::string, ExprPtr> fields;
      for (const auto& p : c.params) {
        fields[p.name] = ex::var("this." + p.name);
        o.symbols["this." + p.name] = sort_of(p.type);
      }
      for (const auto& f : c.fields) fields[f.name] = f.init ? f.init : ex::int_lit(0);
      auto inst = [&](const ExprPtr& e) {
        return lower_implies(rewrite(e, [&](const Expr& x) -> ExprPtr {
          if (x.kind == Expr::Kind::Var || x.kind == Expr::Kind::Field) {
            auto it = fields.find(x.name);
            if (it == fields.end()) throw DiagnosticError(DiagKind::SpecError, "'" + x.name + "' is not a field of " + c.name);
            return it->second;
          }
          return nullptr;
        }));
      };
      if (c.creation_condition) o.hypotheses.push_back(inst(c.creation_condition));
      o.goal = inst(c.obj_invariant);
      g.obligations.push_back(std::move(o));
    }
    for (const auto& m : c.methods) {
      std::vector<Obligation> obs;
      try {
        MethodVC(model, c, m, obs).run();
      } catch (const MissingInvariant& mi) {
        g.unverifiable.push_back({c.name + "." + m.name, "while loop at " + to_string(mi.loc) + " has no WhileInv"});
        continue;
      }
      for (auto& o : obs) g.obligations.push_back(std::move(o));
    }
  }
  return g;
}

}  // namespace c2ao::vc
