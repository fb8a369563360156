#include "c2ao/model/model.hpp"

namespace c2ao::model {

namespace {

class Emitter {
 public:
  std::string run(const Model& m) {
    for (const auto& lf : m.logic_functions) {
      out_ += "def " + lf.ret.str() + " " + lf.name + "(" + params(lf.params) + ") = " +
              print(lf.body) + ";\n\n";
    }
    for (const auto& i : m.interfaces) {
      out_ += "interface " + i.name + " {\n";
      for (const auto& sig : i.methods) {
        annotation(1, "Requires", sig.requires_clause);
        annotation(1, "Ensures", sig.ensures_clause);
        line(1, sig.ret.str() + " " + sig.name + "(" + params(sig.params) + ");");
      }
      out_ += "}\n\n";
    }
    for (const auto& c : m.classes) {
      annotation(0, "Requires", c.creation_condition);
      annotation(0, "ObjInv", c.obj_invariant);
      std::string head = "class " + c.name;
      if (!c.params.empty()) head += "(" + params(c.params) + ")";
      out_ += head + " implements " + c.implements + " {\n";
      for (const auto& f : c.fields) {
        std::string decl = f.type.str() + " " + f.name;
        if (f.init) decl += " = " + print(f.init);
        line(1, decl + ";");
      }
      for (const auto& meth : c.methods) {
        if (!c.fields.empty() || &meth != &c.methods.front()) out_ += '\n';
        line(1, meth.ret.str() + " " + meth.name + "(" + params(meth.params) + ") {");
        body(meth.body, 2);
        line(1, "}");
      }
      out_ += "}\n\n";
    }
    if (m.main_block && !m.main_block->empty()) {
      out_ += "{\n";
      body(*m.main_block, 1);
      out_ += "}\n";
    } else {
      out_ += "{ }\n";
    }
    return std::move(out_);
  }

 private:
  static std::string params(const std::vector<Param>& ps) {
    std::string s;
    for (size_t i = 0; i < ps.size(); ++i) {
      if (i) s += ", ";
      s += ps[i].type.str() + " " + ps[i].name;
    }
    return s;
  }

  static std::string args(const std::vector<ExprPtr>& as) {
    std::string s;
    for (size_t i = 0; i < as.size(); ++i) {
      if (i) s += ", ";
      s += print(as[i]);
    }
    return s;
  }

  void line(int depth, const std::string& text) {
    out_.append(static_cast<size_t>(depth) * 2, ' ');
    out_ += text;
    out_ += '\n';
  }

  void annotation(int depth, const char* kind, const ExprPtr& e) {
    if (e) line(depth, std::string("[Spec : ") + kind + "(" + print(e) + ")]");
  }

  static std::string lhs(const Stmt& s) {
    std::string t;
    if (s.decl_type) t = s.decl_type->str() + " ";
    t += s.target_is_field ? "this." + s.target : s.target;
    return t + " = ";
  }

  void body(const std::vector<Stmt>& stmts, int depth) {
    for (const auto& s : stmts) stmt(s, depth);
  }

  void stmt(const Stmt& s, int depth) {
    switch (s.kind) {
      case Stmt::Kind::Assign: line(depth, lhs(s) + print(s.expr) + ";"); return;
      case Stmt::Kind::AsyncCall:
        line(depth, lhs(s) + s.callee + "!" + s.method + "(" + args(s.args) + ");");
        return;
      case Stmt::Kind::New: line(depth, lhs(s) + "new " + s.cls + "(" + args(s.args) + ");"); return;
      case Stmt::Kind::Await: {
        std::string g;
        for (size_t i = 0; i < s.guard.size(); ++i) {
          if (i) g += " & ";
          g += s.guard[i] + "?";
        }
        line(depth, "await " + g + ";");
        return;
      }
      case Stmt::Kind::Get: line(depth, lhs(s) + s.future + ".get;"); return;
      case Stmt::Kind::Return:
        if (!s.future.empty()) line(depth, "return " + s.future + ".get;");
        else line(depth, "return " + print(s.expr) + ";");
        return;
      case Stmt::Kind::If:
        line(depth, "if (" + print(s.expr) + ") {");
        body(s.body, depth + 1);
        if (!s.else_body.empty()) {
          line(depth, "} else {");
          body(s.else_body, depth + 1);
        }
        line(depth, "}");
        return;
      case Stmt::Kind::While:
        annotation(depth, "WhileInv", s.invariant);
        line(depth, "while (" + print(s.expr) + ") {");
        body(s.body, depth + 1);
        line(depth, "}");
        return;
      case Stmt::Kind::Skip: line(depth, "skip;"); return;
    }
  }

  std::string out_;
};

}  // namespace

std::string emit_abs(const Model& model) { return Emitter().run(model); }

}  // namespace c2ao::model
