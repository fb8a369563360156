#include "c_oracle.hpp"

#include <map>
#include <tuple>
#include <stdexcept>

namespace c2ao::oracle {

using frontend::CAst;
using frontend::CExpr;
using frontend::CStmt;
using frontend::Scope;

namespace {

using Vars = std::map<std::string, std::int64_t>;

struct Frame {
  Vars locals;
  Vars globals;
  friend bool operator<(const Frame& a, const Frame& b) {
    return std::tie(a.locals, a.globals) < std::tie(b.locals, b.globals);
  }
};

using Outcomes = std::set<std::pair<std::int64_t, Frame>>;

// Partially evaluated expression.
struct Node {
  const CExpr* e = nullptr;
  bool done = false;
  std::int64_t v = 0;
  std::vector<Node> kids;
};

Node build(const CExpr& e) {
  Node n;
  n.e = &e;
  for (const auto& a : e.args) n.kids.push_back(build(*a));
  if (e.kind == CExpr::Kind::IntLit) {
    n.done = true;
    n.v = e.value;
  }
  return n;
}

bool logical(const CExpr& e) {
  return e.kind == CExpr::Kind::Binary && (e.binop == BinOp::And || e.binop == BinOp::Or);
}

std::int64_t apply(BinOp op, std::int64_t a, std::int64_t b) {
  switch (op) {
    case BinOp::Add: return a + b;
    case BinOp::Sub: return a - b;
    case BinOp::Mul: return a * b;
    case BinOp::Div:
    case BinOp::Mod:
      if (b == 0) throw std::runtime_error("division by zero");
      return op == BinOp::Div ? a / b : a % b;
    case BinOp::Lt: return a < b;
    case BinOp::Le: return a <= b;
    case BinOp::Gt: return a > b;
    case BinOp::Ge: return a >= b;
    case BinOp::Eq: return a == b;
    case BinOp::Ne: return a != b;
    default: break;
  }
  throw std::logic_error("unexpected operator");
}

class Interp {
 public:
  Interp(const CAst& ast, Limits l) : ast_(ast), limits_(l) {}

  std::set<std::pair<std::int64_t, Vars>> call(const std::string& name, const std::vector<std::int64_t>& args,
                                               const Vars& globals) {
    const frontend::FunctionDef* f = ast_.find_function(name);
    if (!f) throw std::runtime_error("no function " + name);
    if (f->params.size() != args.size()) throw std::runtime_error("arity mismatch calling " + name);
    if (++depth_ > limits_.max_call_depth) throw std::runtime_error("call depth limit");
    Frame fr;
    fr.globals = globals;
    for (size_t i = 0; i < args.size(); ++i) fr.locals[f->params[i].name] = args[i];
    Flow flow = exec_list(f->body, {fr});
    for (const auto& n : flow.normal) flow.returned.insert({0, n.globals});
    --depth_;
    return flow.returned;
  }

 private:
  struct Flow {
    std::set<Frame> normal;
    std::set<std::pair<std::int64_t, Vars>> returned;
  };

  // Pure reductions: they commute with everything, so they happen eagerly.
  void simplify(Node& n, const Frame& f) {
    if (n.done) return;
    const CExpr& e = *n.e;
    if (logical(e)) {
      simplify(n.kids[0], f);
      if (!n.kids[0].done) return;
      bool left = n.kids[0].v != 0;
      if (e.binop == BinOp::And ? !left : left) {
        n.done = true;
        n.v = left ? 1 : 0;
        return;
      }
      Node right = std::move(n.kids[1]);
      n = std::move(right);
      simplify(n, f);
      if (n.done) n.v = n.v != 0;
      return;
    }
    for (auto& k : n.kids) simplify(k, f);
    switch (e.kind) {
      case CExpr::Kind::Var:
        if (e.is_const) {
          n.done = true;
          n.v = f.locals.at(e.name);
        }
        break;
      case CExpr::Kind::Unary:
        if (n.kids[0].done) {
          n.done = true;
          n.v = e.unop == UnOp::Neg ? -n.kids[0].v : !n.kids[0].v;
        }
        break;
      case CExpr::Kind::Binary:
        if (n.kids[0].done && n.kids[1].done) {
          n.done = true;
          n.v = apply(e.binop, n.kids[0].v, n.kids[1].v);
        }
        break;
      default: break;
    }
  }

  static void ready(Node& n, std::vector<Node*>& out) {
    if (n.done) return;
    const CExpr& e = *n.e;
    if (logical(e)) {
      ready(n.kids[0], out);
      return;
    }
    bool kids_done = true;
    for (auto& k : n.kids) {
      ready(k, out);
      kids_done = kids_done && k.done;
    }
    if (kids_done && (e.kind == CExpr::Kind::Var || e.kind == CExpr::Kind::Assign || e.kind == CExpr::Kind::Call)) {
      out.push_back(&n);
    }
  }

  static Vars& vars_of(Frame& f, const CExpr& e) { return e.scope == Scope::Global ? f.globals : f.locals; }

  void run(Node root, const Frame& f, Outcomes& out) {
    simplify(root, f);
    if (root.done) {
      out.insert({root.v, f});
      return;
    }
    std::vector<Node*> rs;
    ready(root, rs);
    for (size_t i = 0; i < rs.size(); ++i) {
      const CExpr& e = *rs[i]->e;
      // Possible results of this action, each with its successor frame.
      Outcomes results;
      Frame g = f;
      switch (e.kind) {
        case CExpr::Kind::Var: results.insert({vars_of(g, e).at(e.name), g}); break;
        case CExpr::Kind::Assign: {
          std::int64_t v = rs[i]->kids[0].v;
          vars_of(g, e)[e.name] = v;
          results.insert({v, g});
          break;
        }
        case CExpr::Kind::Call: {
          std::vector<std::int64_t> args;
          for (const auto& k : rs[i]->kids) args.push_back(k.v);
          for (auto& [v, globals] : call(e.name, args, f.globals)) {
            Frame h = f;
            h.globals = globals;
            results.insert({v, h});
          }
          break;
        }
        default: throw std::logic_error("not an action");
      }
      for (const auto& [v, h] : results) {
        Node copy = root;
        std::vector<Node*> rc;
        ready(copy, rc);
        rc[i]->done = true;
        rc[i]->v = v;
        rc[i]->kids.clear();
        run(std::move(copy), h, out);
      }
    }
  }

  Outcomes eval(const CExpr& e, const Frame& f) {
    Outcomes out;
    run(build(e), f, out);
    return out;
  }

  Flow exec_list(const std::vector<CStmt>& body, std::set<Frame> frames) {
    Flow flow;
    for (const auto& s : body) {
      if (frames.empty()) break;
      Flow r = exec(s, frames);
      flow.returned.insert(r.returned.begin(), r.returned.end());
      frames = std::move(r.normal);
    }
    flow.normal = std::move(frames);
    return flow;
  }

  Flow exec(const CStmt& s, const std::set<Frame>& frames) {
    Flow flow;
    switch (s.kind) {
      case CStmt::Kind::Expr:
        for (const auto& f : frames) {
          for (const auto& [v, g] : eval(*s.expr, f)) flow.normal.insert(g);
        }
        break;
      case CStmt::Kind::Decl:
        for (const auto& f : frames) {
          if (!s.expr) {
            Frame g = f;
            g.locals[s.name] = 0;
            flow.normal.insert(g);
            continue;
          }
          for (auto [v, g] : eval(*s.expr, f)) {
            g.locals[s.name] = v;
            flow.normal.insert(g);
          }
        }
        break;
      case CStmt::Kind::If: {
        std::set<Frame> then_in, else_in;
        for (const auto& f : frames) {
          for (const auto& [v, g] : eval(*s.expr, f)) (v ? then_in : else_in).insert(g);
        }
        for (const Flow& r : {exec_list(s.body, then_in), exec_list(s.else_body, else_in)}) {
          flow.normal.insert(r.normal.begin(), r.normal.end());
          flow.returned.insert(r.returned.begin(), r.returned.end());
        }
        break;
      }
      case CStmt::Kind::While: {
        std::set<Frame> current = frames;
        for (std::size_t it = 0; !current.empty(); ++it) {
          if (it > limits_.max_loop_iterations) throw std::runtime_error("loop iteration limit");
          std::set<Frame> body_in;
          for (const auto& f : current) {
            for (const auto& [v, g] : eval(*s.expr, f)) (v ? body_in : flow.normal).insert(g);
          }
          Flow r = exec_list(s.body, body_in);
          flow.returned.insert(r.returned.begin(), r.returned.end());
          current = std::move(r.normal);
        }
        break;
      }
      case CStmt::Kind::Return:
        for (const auto& f : frames) {
          if (!s.expr) {
            flow.returned.insert({0, f.globals});
            continue;
          }
          for (const auto& [v, g] : eval(*s.expr, f)) flow.returned.insert({v, g.globals});
        }
        break;
      case CStmt::Kind::Block: return exec_list(s.body, frames);
    }
    return flow;
  }

  const CAst& ast_;
  Limits limits_;
  std::size_t depth_ = 0;
};

}  // namespace

std::set<std::int64_t> values(const CAst& ast, const std::string& entry, const std::vector<std::int64_t>& args,
                              Limits limits) {
  Vars globals;
  for (const auto& g : ast.globals) globals[g.name] = g.initializer;
  Interp in(ast, limits);
  std::set<std::int64_t> out;
  for (const auto& [v, g] : in.call(entry, args, globals)) out.insert(v);
  return out;
}

}  // namespace c2ao::oracle
