#include "c2ao/explore/explore.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

namespace c2ao::explore {

std::string Value::str() const {
  switch (kind) {
    case Kind::Int: return std::to_string(v);
    case Kind::Bool: return v ? "True" : "False";
    case Kind::Unit: return "unit";
    case Kind::Null: return "null";
    case Kind::Ref: return "obj#" + std::to_string(v);
    case Kind::Fut: return "fut#" + std::to_string(v);
  }
  return "?";
}

const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::RequiresFailed: return "RequiresFailed";
    case ViolationKind::EnsuresFailed: return "EnsuresFailed";
    case ViolationKind::ObjInvFailed: return "ObjInvFailed";
    case ViolationKind::CreationFailed: return "CreationFailed";
    case ViolationKind::StrongInvariantFailed: return "StrongInvariantFailed";
    case ViolationKind::LoopInvFailed: return "LoopInvFailed";
    case ViolationKind::DivisionByZero: return "DivisionByZero";
    case ViolationKind::Deadlock: return "Deadlock";
  }
  return "?";
}

bool Report::has(ViolationKind k) const { return count(k) > 0; }

std::size_t Report::count(ViolationKind k) const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == k; }));
}

// ---------------------------------------------------------------------------
// Compiled form

namespace {

/// Expression with names resolved to local or field slots.
struct CE {
  enum class K : std::uint8_t { Lit, Local, Field, This, Result, ValueOf, Unary, Binary, Call, Ite };
  K k = K::Lit;
  Value lit;
  int slot = -1;
  UnOp u = UnOp::Neg;
  BinOp b = BinOp::Add;
  int fn = -1;
  std::vector<CE> kids;
};

enum class Op : std::uint8_t { Assign, Async, New, Await, Get, Return, ReturnGet, JumpIfNot, Jump, LoopInv };

struct Instr {
  Op op = Op::Return;
  int target = -1;
  bool field = false;
  CE e;       // Assign rhs, Return value, JumpIfNot condition, LoopInv formula
  CE callee;  // Async
  std::string method;
  int cls = -1;
  std::vector<CE> args;
  std::vector<CE> guard;
  CE fut;  // Get, ReturnGet
  int jump = -1;
  std::string text;  // printed formula for messages
  SourceLoc loc;
};

struct CompiledMethod {
  std::string name;
  int nparams = 0;
  int nlocals = 0;
  std::vector<std::string> local_names;
  std::vector<Instr> code;
  std::optional<CE> req, ens;
  std::string req_text, ens_text;
  ViolationKind req_kind = ViolationKind::RequiresFailed;
  SourceLoc loc;
};

struct CompiledClass {
  std::string name;
  std::map<std::string, int> field_slots;
  std::vector<std::string> field_names;
  int nparams = 0;
  std::vector<std::optional<CE>> field_inits;
  std::optional<CE> obj_inv, creation;
  std::string inv_text, creation_text;
  bool is_global = false;
  std::vector<CompiledMethod> methods;
  std::map<std::string, int> method_index;
};

struct CompiledLogic {
  std::string name;
  int nparams = 0;
  CE body;
};

struct Unresolved {};
struct DivZero {};

}  // namespace

struct Compiled {
  std::vector<CompiledClass> classes;
  std::map<std::string, int> class_index;
  std::vector<CompiledLogic> logic;
  std::map<std::string, int> logic_index;
  int main_cls = -1;
  std::map<std::string, int> entries;         // entry -> method of the pseudo main class
  std::map<std::string, int> entry_class;     // entry -> class C_<entry>
};

namespace {

struct NameScope {
  const std::map<std::string, int>* locals = nullptr;
  const std::map<std::string, int>* fields = nullptr;
  const std::map<std::string, int>* logic = nullptr;
};

[[noreturn]] void unbound(const std::string& what, const std::string& name) {
  throw DiagnosticError(DiagKind::WellFormedness, what + " '" + name + "' is not bound");
}

CE compile_expr(const ExprPtr& e, const NameScope& s) {
  CE c;
  switch (e->kind) {
    case Expr::Kind::IntLit: c.lit = Value::integer(e->value); break;
    case Expr::Kind::BoolLit: c.lit = Value::boolean(e->value != 0); break;
    case Expr::Kind::Null: c.lit = Value::null(); break;
    case Expr::Kind::UnitLit: c.lit = Value::unit(); break;
    case Expr::Kind::Var:
      if (s.locals) {
        if (auto it = s.locals->find(e->name); it != s.locals->end()) {
          c.k = CE::K::Local;
          c.slot = it->second;
          break;
        }
      }
      if (s.fields) {
        if (auto it = s.fields->find(e->name); it != s.fields->end()) {
          c.k = CE::K::Field;
          c.slot = it->second;
          break;
        }
      }
      unbound("variable", e->name);
    case Expr::Kind::Field: {
      if (!s.fields) unbound("field", e->name);
      auto it = s.fields->find(e->name);
      if (it == s.fields->end()) unbound("field", e->name);
      c.k = CE::K::Field;
      c.slot = it->second;
      break;
    }
    case Expr::Kind::This: c.k = CE::K::This; break;
    case Expr::Kind::Result: c.k = CE::K::Result; break;
    case Expr::Kind::ValueOf: {
      if (!s.locals) unbound("future", e->name);
      auto it = s.locals->find(e->name);
      if (it == s.locals->end()) unbound("future", e->name);
      c.k = CE::K::ValueOf;
      c.slot = it->second;
      break;
    }
    case Expr::Kind::Unary:
      c.k = CE::K::Unary;
      c.u = e->unop;
      c.kids.push_back(compile_expr(e->args[0], s));
      break;
    case Expr::Kind::Binary:
      c.k = CE::K::Binary;
      c.b = e->binop;
      c.kids.push_back(compile_expr(e->args[0], s));
      c.kids.push_back(compile_expr(e->args[1], s));
      break;
    case Expr::Kind::Call: {
      if (!s.logic) unbound("function", e->name);
      auto it = s.logic->find(e->name);
      if (it == s.logic->end()) unbound("function", e->name);
      c.k = CE::K::Call;
      c.fn = it->second;
      for (const auto& a : e->args) c.kids.push_back(compile_expr(a, s));
      break;
    }
    case Expr::Kind::Ite:
      c.k = CE::K::Ite;
      for (const auto& a : e->args) c.kids.push_back(compile_expr(a, s));
      break;
  }
  return c;
}

CE local_ref(int slot) {
  CE c;
  c.k = CE::K::Local;
  c.slot = slot;
  return c;
}

/// Evaluation frame: the data an expression may read.
struct Frame {
  const Configuration* c = nullptr;
  const std::vector<Value>* locals = nullptr;
  const std::vector<Value>* fields = nullptr;
  int self = -1;
  const Value* result = nullptr;
  bool spec = false;
};

class Evaluator {
 public:
  explicit Evaluator(const Compiled& cp) : cp_(cp) {}

  Value eval(const CE& e, const Frame& f, int depth = 0) const {
    switch (e.k) {
      case CE::K::Lit: return e.lit;
      case CE::K::Local: return (*f.locals)[static_cast<size_t>(e.slot)];
      case CE::K::Field: return (*f.fields)[static_cast<size_t>(e.slot)];
      case CE::K::This: return Value::ref(f.self);
      case CE::K::Result:
        if (!f.result) throw InternalError("result used outside a postcondition");
        return *f.result;
      case CE::K::ValueOf: {
        Value fut = (*f.locals)[static_cast<size_t>(e.slot)];
        if (fut.kind != Value::Kind::Fut) throw InternalError("valueOf on a non-future");
        const Future& fu = f.c->futures[static_cast<size_t>(fut.v)];
        if (!fu.resolved) throw Unresolved{};
        return fu.value;
      }
      case CE::K::Unary: {
        Value a = eval(e.kids[0], f, depth);
        if (e.u == UnOp::Neg) return Value::integer(static_cast<std::int64_t>(0 - static_cast<std::uint64_t>(a.v)));
        return Value::boolean(a.v == 0);
      }
      case CE::K::Binary: return binary(e, f, depth);
      case CE::K::Call: {
        if (depth > 20000) throw DiagnosticError(DiagKind::SpecError, "logic function recursion too deep");
        const CompiledLogic& lf = cp_.logic[static_cast<size_t>(e.fn)];
        std::vector<Value> params;
        params.reserve(e.kids.size());
        for (const auto& k : e.kids) params.push_back(eval(k, f, depth + 1));
        Frame inner;
        inner.c = f.c;
        inner.locals = &params;
        inner.spec = true;
        return eval(lf.body, inner, depth + 1);
      }
      case CE::K::Ite: return eval(e.kids[0], f, depth).v ? eval(e.kids[1], f, depth) : eval(e.kids[2], f, depth);
    }
    throw InternalError("bad compiled expression");
  }

  bool holds(const CE& e, const Frame& f) const { return eval(e, f).v != 0; }

 private:
  Value binary(const CE& e, const Frame& f, int depth) const {
    if (e.b == BinOp::And) {
      return eval(e.kids[0], f, depth).v ? Value::boolean(eval(e.kids[1], f, depth).v != 0) : Value::boolean(false);
    }
    if (e.b == BinOp::Or) {
      return eval(e.kids[0], f, depth).v ? Value::boolean(true) : Value::boolean(eval(e.kids[1], f, depth).v != 0);
    }
    if (e.b == BinOp::Implies) {
      return !eval(e.kids[0], f, depth).v ? Value::boolean(true) : Value::boolean(eval(e.kids[1], f, depth).v != 0);
    }
    Value a = eval(e.kids[0], f, depth);
    Value b = eval(e.kids[1], f, depth);
    auto u = [](std::int64_t x) { return static_cast<std::uint64_t>(x); };
    auto s = [](std::uint64_t x) { return static_cast<std::int64_t>(x); };
    switch (e.b) {
      case BinOp::Add: return Value::integer(s(u(a.v) + u(b.v)));
      case BinOp::Sub: return Value::integer(s(u(a.v) - u(b.v)));
      case BinOp::Mul: return Value::integer(s(u(a.v) * u(b.v)));
      case BinOp::Div:
      case BinOp::Mod:
        if (f.spec) throw DiagnosticError(DiagKind::SpecError, "division is not allowed in specifications");
        if (b.v == 0) throw DivZero{};
        if (a.v == INT64_MIN && b.v == -1) return Value::integer(e.b == BinOp::Div ? a.v : 0);
        return Value::integer(e.b == BinOp::Div ? a.v / b.v : a.v % b.v);
      case BinOp::Lt: return Value::boolean(a.v < b.v);
      case BinOp::Le: return Value::boolean(a.v <= b.v);
      case BinOp::Gt: return Value::boolean(a.v > b.v);
      case BinOp::Ge: return Value::boolean(a.v >= b.v);
      case BinOp::Eq: return Value::boolean(a == b);
      case BinOp::Ne: return Value::boolean(!(a == b));
      default: break;
    }
    throw InternalError("bad binary operator");
  }

  const Compiled& cp_;
};

// --- compilation -------------------------------------------------------------

class Compiler {
 public:
  explicit Compiler(const model::Model& m) : m_(m) {}

  std::unique_ptr<Compiled> run() {
    auto cp = std::make_unique<Compiled>();
    cp_ = cp.get();
    for (size_t i = 0; i < m_.logic_functions.size(); ++i) cp->logic_index[m_.logic_functions[i].name] = static_cast<int>(i);
    for (const auto& lf : m_.logic_functions) {
      std::map<std::string, int> params;
      for (size_t i = 0; i < lf.params.size(); ++i) params[lf.params[i].name] = static_cast<int>(i);
      NameScope s{&params, nullptr, &cp->logic_index};
      cp->logic.push_back({lf.name, static_cast<int>(lf.params.size()), compile_expr(lf.body, s)});
    }
    for (size_t i = 0; i < m_.classes.size(); ++i) cp->class_index[m_.classes[i].name] = static_cast<int>(i);
    for (const auto& c : m_.classes) cp->classes.push_back(compile_class(c));
    build_main();
    return cp;
  }

 private:
  CompiledClass compile_class(const model::ModelClass& c) {
    CompiledClass out;
    out.name = c.name;
    out.is_global = c.name == "Global";
    for (const auto& p : c.params) add_field(out, p.name);
    out.nparams = static_cast<int>(c.params.size());
    out.field_inits.resize(c.params.size());
    NameScope fs{nullptr, &out.field_slots, &cp_->logic_index};
    for (const auto& f : c.fields) {
      add_field(out, f.name);
      out.field_inits.push_back(f.init ? std::optional<CE>(compile_expr(f.init, fs)) : std::nullopt);
    }
    if (c.obj_invariant) {
      out.obj_inv = compile_expr(c.obj_invariant, fs);
      out.inv_text = print(c.obj_invariant);
    }
    if (c.creation_condition) {
      out.creation = compile_expr(c.creation_condition, fs);
      out.creation_text = print(c.creation_condition);
    }
    for (size_t i = 0; i < c.methods.size(); ++i) {
      out.method_index[c.methods[i].name] = static_cast<int>(i);
      const model::MethodSig* sig = m_.contract(c, c.methods[i].name);
      out.methods.push_back(compile_method(c.methods[i], sig, out));
    }
    return out;
  }

  static void add_field(CompiledClass& c, const std::string& n) {
    c.field_slots[n] = static_cast<int>(c.field_names.size());
    c.field_names.push_back(n);
  }

  static ViolationKind requires_kind(const std::string& cls, const std::string& method) {
    if (cls == "Global" || method.rfind("set_global_", 0) == 0) return ViolationKind::StrongInvariantFailed;
    if (method.rfind("op_div_", 0) == 0 || method.rfind("op_mod_", 0) == 0) return ViolationKind::DivisionByZero;
    return ViolationKind::RequiresFailed;
  }

  CompiledMethod compile_method(const model::Method& m, const model::MethodSig* sig, const CompiledClass& cls) {
    CompiledMethod out;
    out.name = m.name;
    out.loc = m.loc;
    std::map<std::string, int> locals;
    auto add_local = [&](const std::string& n) {
      if (locals.count(n)) return;
      locals[n] = static_cast<int>(out.local_names.size());
      out.local_names.push_back(n);
    };
    for (const auto& p : m.params) add_local(p.name);
    out.nparams = static_cast<int>(m.params.size());
    model::for_each_stmt(m.body, [&](const Stmt& s) {
      if (s.decl_type && !s.target_is_field) add_local(s.target);
    });
    out.nlocals = static_cast<int>(out.local_names.size());
    NameScope scope{&locals, &cls.field_slots, &cp_->logic_index};
    compile_body(m.body, out.code, scope, cls);
    Instr implicit;
    implicit.op = Op::Return;
    implicit.e.lit = Value::unit();
    out.code.push_back(std::move(implicit));
    if (sig && sig->requires_clause) {
      out.req = compile_expr(sig->requires_clause, scope);
      out.req_text = print(sig->requires_clause);
    }
    if (sig && sig->ensures_clause) {
      out.ens = compile_expr(sig->ensures_clause, scope);
      out.ens_text = print(sig->ensures_clause);
    }
    out.req_kind = requires_kind(cls.name, m.name);
    return out;
  }

  using Stmt = model::Stmt;

  void target(Instr& in, const Stmt& s, const NameScope& scope) {
    if (!s.target_is_field) {
      if (auto it = scope.locals->find(s.target); it != scope.locals->end()) {
        in.target = it->second;
        return;
      }
    }
    auto it = scope.fields->find(s.target);
    if (it == scope.fields->end()) unbound("assignment target", s.target);
    in.target = it->second;
    in.field = true;
  }

  void compile_body(const std::vector<Stmt>& body, std::vector<Instr>& code, const NameScope& scope,
                    const CompiledClass& cls) {
    for (const auto& s : body) {
      Instr in;
      in.loc = s.loc;
      switch (s.kind) {
        case Stmt::Kind::Assign:
          in.op = Op::Assign;
          target(in, s, scope);
          in.e = compile_expr(s.expr, scope);
          code.push_back(std::move(in));
          break;
        case Stmt::Kind::AsyncCall:
          in.op = Op::Async;
          target(in, s, scope);
          if (s.callee == "this") {
            in.callee.k = CE::K::This;
          } else {
            in.callee = compile_expr(ex::var(s.callee), scope);
          }
          in.method = s.method;
          for (const auto& a : s.args) in.args.push_back(compile_expr(a, scope));
          code.push_back(std::move(in));
          break;
        case Stmt::Kind::New: {
          in.op = Op::New;
          target(in, s, scope);
          auto it = cp_->class_index.find(s.cls);
          if (it == cp_->class_index.end()) unbound("class", s.cls);
          in.cls = it->second;
          for (const auto& a : s.args) in.args.push_back(compile_expr(a, scope));
          code.push_back(std::move(in));
          break;
        }
        case Stmt::Kind::Await:
          in.op = Op::Await;
          for (const auto& g : s.guard) in.guard.push_back(compile_expr(ex::var(g), scope));
          code.push_back(std::move(in));
          break;
        case Stmt::Kind::Get:
          in.op = Op::Get;
          target(in, s, scope);
          in.fut = compile_expr(ex::var(s.future), scope);
          code.push_back(std::move(in));
          break;
        case Stmt::Kind::Return:
          if (!s.future.empty()) {
            in.op = Op::ReturnGet;
            in.fut = compile_expr(ex::var(s.future), scope);
          } else {
            in.op = Op::Return;
            in.e = s.expr ? compile_expr(s.expr, scope) : CE{};
          }
          code.push_back(std::move(in));
          break;
        case Stmt::Kind::If: {
          in.op = Op::JumpIfNot;
          in.e = compile_expr(s.expr, scope);
          size_t branch = code.size();
          code.push_back(std::move(in));
          compile_body(s.body, code, scope, cls);
          if (s.else_body.empty()) {
            code[branch].jump = static_cast<int>(code.size());
          } else {
            Instr j;
            j.op = Op::Jump;
            size_t skip = code.size();
            code.push_back(std::move(j));
            code[branch].jump = static_cast<int>(code.size());
            compile_body(s.else_body, code, scope, cls);
            code[skip].jump = static_cast<int>(code.size());
          }
          break;
        }
        case Stmt::Kind::While: {
          size_t head = code.size();
          if (s.invariant) {
            Instr inv;
            inv.op = Op::LoopInv;
            inv.loc = s.loc;
            inv.e = compile_expr(s.invariant, scope);
            inv.text = print(s.invariant);
            code.push_back(std::move(inv));
          }
          in.op = Op::JumpIfNot;
          in.e = compile_expr(s.expr, scope);
          size_t branch = code.size();
          code.push_back(std::move(in));
          compile_body(s.body, code, scope, cls);
          Instr back;
          back.op = Op::Jump;
          back.jump = static_cast<int>(head);
          code.push_back(std::move(back));
          code[branch].jump = static_cast<int>(code.size());
          break;
        }
        case Stmt::Kind::Skip: break;
      }
    }
  }

  // The pseudo class whose methods start an entry call or the model's main block.
  void build_main() {
    CompiledClass main;
    main.name = "$main";
    for (size_t ci = 0; ci < m_.classes.size(); ++ci) {
      const auto& c = m_.classes[ci];
      if (c.name.rfind("C_", 0) != 0) continue;
      const model::Method* call = c.find("call");
      if (!call) continue;
      bool takes_global = c.params.size() == 1 && c.params[0].type.kind == model::Type::Kind::Ref &&
                          cp_->class_index.count("Global");
      if (!c.params.empty() && !takes_global) continue;
      CompiledMethod m;
      m.name = "entry_" + c.name.substr(2);
      int n = static_cast<int>(call->params.size());
      for (int i = 0; i < n; ++i) m.local_names.push_back(call->params[static_cast<size_t>(i)].name);
      m.nparams = n;
      int g = n, o = n + 1, r = n + 2;
      m.local_names.insert(m.local_names.end(), {"global", "o", "r"});
      m.nlocals = n + 3;
      if (takes_global) {
        Instr ng;
        ng.op = Op::New;
        ng.target = g;
        ng.cls = cp_->class_index.at("Global");
        m.code.push_back(std::move(ng));
      }
      Instr no;
      no.op = Op::New;
      no.target = o;
      no.cls = static_cast<int>(ci);
      if (takes_global) no.args.push_back(local_ref(g));
      m.code.push_back(std::move(no));
      Instr call_in;
      call_in.op = Op::Async;
      call_in.target = r;
      call_in.callee = local_ref(o);
      call_in.method = "call";
      for (int i = 0; i < n; ++i) call_in.args.push_back(local_ref(i));
      m.code.push_back(std::move(call_in));
      Instr aw;
      aw.op = Op::Await;
      aw.guard.push_back(local_ref(r));
      m.code.push_back(std::move(aw));
      Instr ret;
      ret.op = Op::ReturnGet;
      ret.fut = local_ref(r);
      m.code.push_back(std::move(ret));
      cp_->entries[c.name.substr(2)] = static_cast<int>(main.methods.size());
      cp_->entry_class[c.name.substr(2)] = static_cast<int>(ci);
      main.methods.push_back(std::move(m));
    }
    if (m_.main_block) {
      model::Method mb;
      mb.name = "main_block";
      mb.ret = model::Type::unit();
      mb.body = *m_.main_block;
      cp_->entries[""] = static_cast<int>(main.methods.size());
      main.methods.push_back(compile_method(mb, nullptr, main));
    }
    cp_->main_cls = static_cast<int>(cp_->classes.size());
    cp_->classes.push_back(std::move(main));
  }

  const model::Model& m_;
  Compiled* cp_ = nullptr;
};

// --- hashing -------------------------------------------------------------------

struct Key {
  std::uint64_t a = 0, b = 0;
  friend bool operator==(const Key&, const Key&) = default;
};

struct KeyHash {
  std::size_t operator()(const Key& k) const { return static_cast<std::size_t>(k.a ^ (k.b * 0x9e3779b97f4a7c15ULL)); }
};

Key hash_key(const std::string& s) {
  std::uint64_t h1 = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h1 ^= ch;
    h1 *= 1099511628211ULL;
  }
  std::uint64_t h2 = std::hash<std::string>{}(s);
  return {h1, h2};
}

}  // namespace

// ---------------------------------------------------------------------------
// Explorer

Explorer::Explorer(const model::Model& model, Budget budget)
    : compiled_(Compiler(model).run()), budget_(budget) {}

Explorer::~Explorer() = default;

Configuration Explorer::initial(const std::string& entry, const std::vector<std::int64_t>& args) const {
  auto it = compiled_->entries.find(entry);
  if (it == compiled_->entries.end()) {
    throw DiagnosticError(DiagKind::WellFormedness,
                          entry.empty() ? "the model has no main block"
                                        : "no function-modelling class for entry '" + entry + "'");
  }
  const CompiledMethod& m = compiled_->classes[static_cast<size_t>(compiled_->main_cls)].methods[static_cast<size_t>(it->second)];
  if (static_cast<int>(args.size()) != m.nparams) {
    throw DiagnosticError(DiagKind::WellFormedness, "entry '" + entry + "' takes " + std::to_string(m.nparams) +
                                                        " argument(s), got " + std::to_string(args.size()));
  }
  Configuration c;
  c.objects.push_back({compiled_->main_cls, {}, -1});
  c.futures.push_back({});
  Process p;
  p.object = 0;
  p.method = it->second;
  p.future = 0;
  p.locals.assign(static_cast<size_t>(m.nlocals), Value::unit());
  for (size_t i = 0; i < args.size(); ++i) p.locals[i] = Value::integer(args[i]);
  c.processes.push_back(std::move(p));
  return c;
}

namespace {

bool guard_ready(const Evaluator& ev, const Instr& in, const Configuration& c, const Process& p,
                 const Object& o) {
  Frame f{&c, &p.locals, &o.fields, p.object, nullptr, false};
  for (const auto& g : in.guard) {
    Value v = ev.eval(g, f);
    if (v.kind != Value::Kind::Fut) throw InternalError("await on a non-future");
    if (!c.futures[static_cast<size_t>(v.v)].resolved) return false;
  }
  return true;
}

}  // namespace

std::vector<int> Explorer::enabled(const Configuration& c) const {
  Evaluator ev(*compiled_);
  std::vector<int> out;
  for (size_t i = 0; i < c.processes.size(); ++i) {
    const Process& p = c.processes[i];
    const Object& o = c.objects[static_cast<size_t>(p.object)];
    const CompiledMethod& m = compiled_->classes[static_cast<size_t>(o.cls)].methods[static_cast<size_t>(p.method)];
    switch (p.status) {
      case Process::Status::Queued:
        if (o.busy_with < 0) out.push_back(static_cast<int>(i));
        break;
      case Process::Status::Suspended:
        if (o.busy_with < 0 && guard_ready(ev, m.code[static_cast<size_t>(p.pc)], c, p, o)) {
          out.push_back(static_cast<int>(i));
        }
        break;
      case Process::Status::Blocked: {
        Frame f{&c, &p.locals, &o.fields, p.object, nullptr, false};
        Value fut = ev.eval(m.code[static_cast<size_t>(p.pc)].fut, f);
        if (c.futures[static_cast<size_t>(fut.v)].resolved) out.push_back(static_cast<int>(i));
        break;
      }
    }
  }
  return out;
}

std::pair<std::string, std::string> Explorer::describe(const Configuration& c, int proc) const {
  const Process& p = c.processes[static_cast<size_t>(proc)];
  const CompiledClass& cls = compiled_->classes[static_cast<size_t>(c.objects[static_cast<size_t>(p.object)].cls)];
  return {cls.name, cls.methods[static_cast<size_t>(p.method)].name};
}

std::optional<Value> Explorer::field(const Configuration& c, int object, const std::string& name) const {
  const Object& o = c.objects.at(static_cast<size_t>(object));
  const CompiledClass& cls = compiled_->classes[static_cast<size_t>(o.cls)];
  auto it = cls.field_slots.find(name);
  if (it == cls.field_slots.end()) return std::nullopt;
  return o.fields[static_cast<size_t>(it->second)];
}

std::string Explorer::class_of(const Configuration& c, int object) const {
  return compiled_->classes[static_cast<size_t>(c.objects.at(static_cast<size_t>(object)).cls)].name;
}

namespace {

struct Segment {
  const Compiled& cp;
  const Evaluator& ev;
  Configuration& c;
  Process p;
  size_t index;
  std::size_t fuel;

  const CompiledClass& cls() const { return cp.classes[static_cast<size_t>(c.objects[static_cast<size_t>(p.object)].cls)]; }
  const CompiledMethod& method() const { return cls().methods[static_cast<size_t>(p.method)]; }
  Object& obj() { return c.objects[static_cast<size_t>(p.object)]; }

  Frame frame(const Value* result = nullptr, bool spec = false) {
    return Frame{&c, &p.locals, &obj().fields, p.object, result, spec};
  }

  Violation violation(ViolationKind k, std::string msg, SourceLoc loc) const {
    Violation v;
    v.kind = k;
    v.cls = cls().name;
    v.method = method().name;
    v.message = std::move(msg);
    v.loc = loc.known() ? loc : method().loc;
    return v;
  }

  std::string locals_text() const {
    std::string s;
    const CompiledMethod& m = method();
    for (int i = 0; i < m.nparams; ++i) {
      Value v = p.locals[static_cast<size_t>(i)];
      if (!s.empty()) s += ", ";
      s += m.local_names[static_cast<size_t>(i)] + " = ";
      if (v.kind == Value::Kind::Fut && c.futures[static_cast<size_t>(v.v)].resolved) {
        s += "valueOf " + c.futures[static_cast<size_t>(v.v)].value.str();
      } else {
        s += v.str();
      }
    }
    return s;
  }

  std::optional<Violation> check_requires() {
    const CompiledMethod& m = method();
    if (!m.req) {
      p.requires_pending = false;
      return std::nullopt;
    }
    try {
      bool ok = ev.holds(*m.req, frame(nullptr, true));
      p.requires_pending = false;
      if (!ok) {
        return violation(m.req_kind, "Requires(" + m.req_text + ") failed with " + locals_text(), m.loc);
      }
    } catch (const Unresolved&) {
      p.requires_pending = true;
    }
    return std::nullopt;
  }

  std::optional<Violation> check_inv(int object, const char* when, SourceLoc loc) {
    const Object& o = c.objects[static_cast<size_t>(object)];
    const CompiledClass& k = cp.classes[static_cast<size_t>(o.cls)];
    if (!k.obj_inv) return std::nullopt;
    Frame f{&c, nullptr, &o.fields, object, nullptr, true};
    if (ev.holds(*k.obj_inv, f)) return std::nullopt;
    std::string vals;
    for (size_t i = 0; i < k.field_names.size(); ++i) {
      if (!vals.empty()) vals += ", ";
      vals += k.field_names[i] + " = " + o.fields[i].str();
    }
    return violation(k.is_global ? ViolationKind::StrongInvariantFailed : ViolationKind::ObjInvFailed,
                     "ObjInv(" + k.inv_text + ") of " + k.name + " fails " + when + " (" + vals + ")", loc);
  }

  void store(const Instr& in, Value v) {
    if (in.field) obj().fields[static_cast<size_t>(in.target)] = v;
    else p.locals[static_cast<size_t>(in.target)] = v;
  }

  void write_back() { c.processes[index] = std::move(p); }

  void finish() { c.processes.erase(c.processes.begin() + static_cast<std::ptrdiff_t>(index)); }

  StepResult run() {
    StepResult r;
    try {
      r.violation = run_inner(r);
    } catch (const DivZero&) {
      const Instr& in = method().code[static_cast<size_t>(p.pc)];
      r.violation = violation(ViolationKind::DivisionByZero, "division by zero", in.loc);
    }
    return r;
  }

  std::optional<Violation> run_inner(StepResult& r) {
    const CompiledMethod& m = method();
    switch (p.status) {
      case Process::Status::Queued:
        if (auto v = check_requires()) return v;
        if (auto v = check_inv(p.object, "on method entry", m.loc)) return v;
        break;
      case Process::Status::Suspended: ++p.pc; break;
      case Process::Status::Blocked: break;
    }
    if (p.requires_pending) {
      if (auto v = check_requires()) return v;
    }
    obj().busy_with = p.future;
    for (std::size_t steps = 0;; ++steps) {
      if (steps >= fuel) {
        r.segment_limit = true;
        write_back();
        return std::nullopt;
      }
      const Instr& in = m.code[static_cast<size_t>(p.pc)];
      switch (in.op) {
        case Op::Assign: {
          store(in, ev.eval(in.e, frame()));
          if (in.field && cls().is_global) {
            if (auto v = check_inv(p.object, "after a field write", in.loc)) return v;
          }
          ++p.pc;
          break;
        }
        case Op::Async: {
          Value callee = ev.eval(in.callee, frame());
          if (callee.kind != Value::Kind::Ref) throw InternalError("asynchronous call on " + callee.str());
          const CompiledClass& target = cp.classes[static_cast<size_t>(c.objects[static_cast<size_t>(callee.v)].cls)];
          auto mi = target.method_index.find(in.method);
          if (mi == target.method_index.end()) throw InternalError(target.name + " has no method " + in.method);
          const CompiledMethod& tm = target.methods[static_cast<size_t>(mi->second)];
          Process np;
          np.object = static_cast<int>(callee.v);
          np.method = mi->second;
          np.future = static_cast<int>(c.futures.size());
          np.locals.assign(static_cast<size_t>(tm.nlocals), Value::unit());
          Frame f = frame();
          for (size_t i = 0; i < in.args.size(); ++i) np.locals[i] = ev.eval(in.args[i], f);
          c.futures.push_back({});
          store(in, Value::fut(np.future));
          c.processes.push_back(std::move(np));
          ++p.pc;
          break;
        }
        case Op::New: {
          const CompiledClass& k = cp.classes[static_cast<size_t>(in.cls)];
          Object o;
          o.cls = in.cls;
          o.fields.assign(k.field_names.size(), Value::unit());
          Frame f = frame();
          for (size_t i = 0; i < in.args.size(); ++i) o.fields[i] = ev.eval(in.args[i], f);
          for (size_t i = static_cast<size_t>(k.nparams); i < k.field_names.size(); ++i) {
            Frame of{&c, nullptr, &o.fields, -1, nullptr, false};
            o.fields[i] = k.field_inits[i] ? ev.eval(*k.field_inits[i], of) : Value::integer(0);
          }
          if (k.creation) {
            Frame of{&c, nullptr, &o.fields, -1, nullptr, true};
            if (!ev.holds(*k.creation, of)) {
              return violation(ViolationKind::CreationFailed,
                               "creation condition " + k.creation_text + " of " + k.name + " fails", in.loc);
            }
          }
          int id = static_cast<int>(c.objects.size());
          c.objects.push_back(std::move(o));
          store(in, Value::ref(id));
          ++p.pc;
          break;
        }
        case Op::Await: {
          if (auto v = check_inv(p.object, "at a suspension", in.loc)) return v;
          p.status = Process::Status::Suspended;
          obj().busy_with = -1;
          write_back();
          return std::nullopt;
        }
        case Op::Get: {
          Value fv = ev.eval(in.fut, frame());
          const Future& fu = c.futures[static_cast<size_t>(fv.v)];
          if (!fu.resolved) {
            p.status = Process::Status::Blocked;
            write_back();
            return std::nullopt;
          }
          store(in, fu.value);
          ++p.pc;
          break;
        }
        case Op::Return:
        case Op::ReturnGet: {
          Value result;
          if (in.op == Op::ReturnGet) {
            Value fv = ev.eval(in.fut, frame());
            const Future& fu = c.futures[static_cast<size_t>(fv.v)];
            if (!fu.resolved) {
              p.status = Process::Status::Blocked;
              write_back();
              return std::nullopt;
            }
            result = fu.value;
          } else {
            result = ev.eval(in.e, frame());
          }
          if (p.requires_pending) {
            if (auto v = check_requires()) return v;
            if (p.requires_pending) throw InternalError("precondition of " + m.name + " still unresolved at return");
          }
          if (m.ens) {
            bool ok = false;
            try {
              ok = ev.holds(*m.ens, frame(&result, true));
            } catch (const Unresolved&) {
              throw InternalError("postcondition of " + cls().name + "." + m.name + " reads an unresolved future");
            }
            if (!ok) {
              return violation(ViolationKind::EnsuresFailed,
                               "Ensures(" + m.ens_text + ") failed with result = " + result.str() +
                                   (m.nparams ? ", " + locals_text() : ""),
                               in.loc);
            }
          }
          if (auto v = check_inv(p.object, "at method exit", in.loc)) return v;
          c.futures[static_cast<size_t>(p.future)] = {true, result};
          obj().busy_with = -1;
          finish();
          return std::nullopt;
        }
        case Op::JumpIfNot:
          p.pc = ev.eval(in.e, frame()).v ? p.pc + 1 : in.jump;
          break;
        case Op::Jump: p.pc = in.jump; break;
        case Op::LoopInv:
          if (!ev.holds(in.e, frame(nullptr, true))) {
            return violation(ViolationKind::LoopInvFailed, "WhileInv(" + in.text + ") fails", in.loc);
          }
          ++p.pc;
          break;
      }
    }
  }
};

}  // namespace

StepResult Explorer::macro_step(Configuration& c, int proc) const {
  Evaluator ev(*compiled_);
  Segment seg{*compiled_, ev, c, c.processes.at(static_cast<size_t>(proc)), static_cast<size_t>(proc),
              budget_.max_segment_steps};
  return seg.run();
}

std::string Explorer::canonical_key(const Configuration& c) const {
  std::vector<int> omap(c.objects.size(), -1), fmap(c.futures.size(), -1);
  std::vector<int> proc_of(c.futures.size(), -1);
  for (size_t i = 0; i < c.processes.size(); ++i) proc_of[static_cast<size_t>(c.processes[i].future)] = static_cast<int>(i);
  std::deque<std::pair<bool, int>> queue;  // (is object, original id)
  int next_o = 0, next_f = 0;
  std::string out;
  auto put = [&](std::int64_t v) { out.append(reinterpret_cast<const char*>(&v), sizeof v); };
  auto obj = [&](int id) {
    if (omap[static_cast<size_t>(id)] < 0) {
      omap[static_cast<size_t>(id)] = next_o++;
      queue.emplace_back(true, id);
    }
    return omap[static_cast<size_t>(id)];
  };
  auto fut = [&](int id) {
    if (fmap[static_cast<size_t>(id)] < 0) {
      fmap[static_cast<size_t>(id)] = next_f++;
      queue.emplace_back(false, id);
    }
    return fmap[static_cast<size_t>(id)];
  };
  auto value = [&](const Value& v) {
    out.push_back(static_cast<char>(v.kind));
    if (v.kind == Value::Kind::Ref) put(obj(static_cast<int>(v.v)));
    else if (v.kind == Value::Kind::Fut) put(fut(static_cast<int>(v.v)));
    else put(v.v);
  };
  auto drain = [&] {
    while (!queue.empty()) {
      auto [is_obj, id] = queue.front();
      queue.pop_front();
      if (is_obj) {
        const Object& o = c.objects[static_cast<size_t>(id)];
        out.push_back('O');
        put(o.cls);
        put(o.busy_with < 0 ? -1 : fut(o.busy_with));
        for (const auto& f : o.fields) value(f);
      } else {
        const Future& f = c.futures[static_cast<size_t>(id)];
        out.push_back(f.resolved ? 'R' : 'U');
        if (f.resolved) value(f.value);
        int pi = proc_of[static_cast<size_t>(id)];
        if (pi >= 0) {
          const Process& p = c.processes[static_cast<size_t>(pi)];
          out.push_back('P');
          put(obj(p.object));
          put(p.method);
          put(p.pc);
          put(static_cast<int>(p.status) * 2 + (p.requires_pending ? 1 : 0));
          for (const auto& v : p.locals) value(v);
        }
      }
      out.push_back(';');
    }
  };
  fut(0);
  drain();
  for (const auto& p : c.processes) {
    if (fmap[static_cast<size_t>(p.future)] < 0) {
      out.push_back('#');
      fut(p.future);
      drain();
    }
  }
  return out;
}

namespace {

/// Exploration with memoization; single-threaded depth-first search.
class Search {
 public:
  Search(const Explorer& ex, const Budget& b, Report& r) : ex_(ex), budget_(b), report_(r) {}

  void run(Configuration init) {
    seen_.insert(hash_key(ex_.canonical_key(init)));
    struct FrameS {
      Configuration c;
      std::vector<int> choices;
      size_t next = 0;
    };
    std::vector<FrameS> stack;
    std::vector<int> path;
    auto expand = [&](Configuration&& c) -> bool {
      std::vector<int> ch = ex_.enabled(c);
      if (ch.empty()) {
        terminal(c, path);
        return false;
      }
      stack.push_back({std::move(c), std::move(ch), 0});
      report_.stats.max_frontier = std::max(report_.stats.max_frontier, stack.size());
      return true;
    };
    if (!expand(std::move(init))) return;
    while (!stack.empty()) {
      FrameS& top = stack.back();
      if (top.next == top.choices.size()) {
        stack.pop_back();
        if (!path.empty()) path.pop_back();
        continue;
      }
      int choice_index = static_cast<int>(top.next);
      int proc = top.choices[top.next++];
      Configuration next = top.c;
      path.push_back(choice_index);
      ++report_.stats.transitions;
      StepResult sr = ex_.macro_step(next, proc);
      if (sr.violation) {
        record(std::move(*sr.violation), path);
        path.pop_back();
        continue;
      }
      if (sr.segment_limit || path.size() > budget_.max_depth) {
        report_.nontermination = true;
        path.pop_back();
        continue;
      }
      if (!seen_.insert(hash_key(ex_.canonical_key(next))).second) {
        ++report_.stats.deduplicated;
        path.pop_back();
        continue;
      }
      if (seen_.size() > budget_.max_states) {
        report_.budget_exceeded = true;
        break;
      }
      if (!expand(std::move(next))) path.pop_back();
    }
    report_.stats.states = seen_.size();
  }

 private:
  void terminal(const Configuration& c, const std::vector<int>& path) {
    const Future& main = c.futures[0];
    if (main.resolved) {
      if (main.value.kind == Value::Kind::Int) report_.values.insert(main.value.v);
      else if (main.value.kind == Value::Kind::Unit) report_.returned_unit = true;
    }
    if (!c.processes.empty()) {
      Violation v;
      v.kind = ViolationKind::Deadlock;
      std::string blocked;
      for (size_t i = 0; i < c.processes.size(); ++i) {
        auto [cls, m] = ex_.describe(c, static_cast<int>(i));
        if (!blocked.empty()) blocked += ", ";
        blocked += cls + "." + m;
        if (i == 0) {
          v.cls = cls;
          v.method = m;
        }
      }
      v.message = "no process can proceed: " + blocked;
      record(std::move(v), path);
    }
  }

  void record(Violation v, const std::vector<int>& path) {
    std::string key = std::string(to_string(v.kind)) + "|" + v.cls + "|" + v.method + "|" +
                      std::to_string(v.loc.line) + ":" + std::to_string(v.loc.column);
    if (!reported_.insert(key).second) return;
    v.witness = path;
    report_.violations.push_back(std::move(v));
  }

  const Explorer& ex_;
  const Budget& budget_;
  Report& report_;
  std::unordered_set<Key, KeyHash> seen_;
  std::set<std::string> reported_;
};

}  // namespace

Report Explorer::explore(const std::string& entry, const std::vector<std::int64_t>& args) const {
  Report r;
  r.entry = entry;
  r.args = args;
  Configuration init = initial(entry, args);
  if (!entry.empty()) {
    // The caller's obligation: an entry precondition that does not hold
    // stops exploration of this input.
    const CompiledClass& cls = compiled_->classes[static_cast<size_t>(compiled_->entry_class.at(entry))];
    const CompiledMethod& call = cls.methods[static_cast<size_t>(cls.method_index.at("call"))];
    if (call.req) {
      std::vector<Value> locals(static_cast<size_t>(call.nlocals), Value::unit());
      for (size_t i = 0; i < args.size(); ++i) locals[i] = Value::integer(args[i]);
      std::vector<Value> no_fields(cls.field_names.size(), Value::unit());
      Evaluator ev(*compiled_);
      Frame f{&init, &locals, &no_fields, -1, nullptr, true};
      if (!ev.holds(*call.req, f)) {
        r.precondition_unmet = true;
        r.precondition_message = "Requires(" + call.req_text + ") of " + entry + " does not hold for the given arguments";
        return r;
      }
    }
  }
  Search(*this, budget_, r).run(std::move(init));
  for (auto& v : r.violations) {
    Configuration c = initial(entry, args);
    for (int idx : v.witness) {
      std::vector<int> en = enabled(c);
      if (idx < 0 || static_cast<size_t>(idx) >= en.size()) break;
      int proc = en[static_cast<size_t>(idx)];
      auto [cls, m] = describe(c, proc);
      v.trace.push_back({idx, c.processes[static_cast<size_t>(proc)].object, cls, m});
      if (macro_step(c, proc).violation) break;
    }
  }
  return r;
}

ReplayResult Explorer::replay(const std::string& entry, const std::vector<std::int64_t>& args,
                              const std::vector<int>& witness) const {
  ReplayResult out;
  out.final_config = initial(entry, args);
  Configuration& c = out.final_config;
  for (size_t i = 0; i < witness.size(); ++i) {
    std::vector<int> en = enabled(c);
    int idx = witness[i];
    if (idx < 0 || static_cast<size_t>(idx) >= en.size()) {
      throw DiagnosticError(DiagKind::WellFormedness,
                            "witness step " + std::to_string(i) + " chooses " + std::to_string(idx) + " of " +
                                std::to_string(en.size()) + " enabled processes");
    }
    StepResult sr = macro_step(c, en[static_cast<size_t>(idx)]);
    if (sr.violation) {
      out.violation = std::move(sr.violation);
      out.violation->witness.assign(witness.begin(), witness.begin() + static_cast<std::ptrdiff_t>(i) + 1);
      break;
    }
  }
  if (c.futures[0].resolved) out.result = c.futures[0].value;
  if (!out.violation) {
    out.terminal = enabled(c).empty();
    if (out.terminal && !c.processes.empty()) {
      Violation v;
      v.kind = ViolationKind::Deadlock;
      auto [cls, m] = describe(c, 0);
      v.cls = cls;
      v.method = m;
      v.message = "no process can proceed";
      v.witness = witness;
      out.violation = std::move(v);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Value evaluate_formula(const model::Model& model, const ExprPtr& f, const FormulaEnv& env) {
  model::Model logic_only;
  logic_only.logic_functions = model.logic_functions;
  std::unique_ptr<Compiled> cp = Compiler(logic_only).run();
  std::map<std::string, int> locals, fields;
  std::vector<Value> lv, fv;
  Configuration c;
  for (const auto& [n, v] : env.vars) {
    locals[n] = static_cast<int>(lv.size());
    lv.push_back(v);
  }
  for (const auto& [n, v] : env.futures) {
    locals[n] = static_cast<int>(lv.size());
    lv.push_back(Value::fut(static_cast<std::int64_t>(c.futures.size())));
    c.futures.push_back(v ? Future{true, *v} : Future{});
  }
  for (const auto& [n, v] : env.fields) {
    fields[n] = static_cast<int>(fv.size());
    fv.push_back(v);
  }
  NameScope s{&locals, &fields, &cp->logic_index};
  CE e = compile_expr(f, s);
  Evaluator ev(*cp);
  Frame fr{&c, &lv, &fv, -1, env.result ? &*env.result : nullptr, true};
  try {
    return ev.eval(e, fr);
  } catch (const Unresolved&) {
    throw InternalError("valueOf on an unresolved future");
  }
}

bool check_formula(const model::Model& model, const ExprPtr& f, const FormulaEnv& env) {
  return evaluate_formula(model, f, env).v != 0;
}

}  // namespace c2ao::explore
