// ACSL annotation bodies and the formula language shared with logic
// function definitions (`ABS def ...`).

#include <charconv>

#include "c2ao/frontend/parser.hpp"
#include "c2ao/lexer.hpp"

namespace c2ao::frontend {

namespace {

[[noreturn]] void spec_fail(const Token& tok, const std::string& msg) {
  throw DiagnosticError(DiagKind::SpecError, msg, tok.loc);
}

class FormulaParser {
 public:
  explicit FormulaParser(TokenCursor& cur) : cur_(cur) {}

  ExprPtr formula() {
    if (cur_.peek().is("if")) {
      cur_.next();
      ExprPtr c = formula();
      cur_.expect("then", "in conditional formula");
      ExprPtr a = formula();
      cur_.expect("else", "in conditional formula");
      ExprPtr b = formula();
      return ex::ite(c, a, b);
    }
    ExprPtr lhs = disjunction();
    if (cur_.accept("==>")) return ex::binary(BinOp::Implies, lhs, formula());
    if (cur_.peek().is("<==>")) spec_fail(cur_.peek(), "'<==>' is not supported; use '=='");
    return lhs;
  }

 private:
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
    if (cur_.accept("!")) return ex::lnot(unary());
    if (cur_.accept("-")) return ex::neg(unary());
    return primary();
  }

  ExprPtr primary() {
    const Token& tok = cur_.peek();
    if (tok.kind == Token::Kind::Int) {
      cur_.next();
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
      if (ec != std::errc()) spec_fail(tok, "integer literal out of range: " + tok.text);
      return ex::int_lit(v);
    }
    if (tok.is("(")) {
      cur_.next();
      ExprPtr e = formula();
      cur_.expect(")", "to close parenthesized formula");
      return e;
    }
    if (tok.is("if")) return formula();
    if (tok.kind != Token::Kind::Ident) {
      spec_fail(tok, "unexpected " + describe(tok) + " in formula");
    }
    cur_.next();
    if (tok.text == "\\result" || tok.text == "result") return ex::result();
    if (tok.text == "\\true" || tok.text == "True" || tok.text == "true") return ex::bool_lit(true);
    if (tok.text == "\\false" || tok.text == "False" || tok.text == "false") return ex::bool_lit(false);
    if (tok.text.front() == '\\') spec_fail(tok, "unsupported ACSL built-in " + tok.text);
    if (cur_.accept("(")) {
      std::vector<ExprPtr> args;
      if (!cur_.peek().is(")")) {
        do {
          args.push_back(formula());
        } while (cur_.accept(","));
      }
      cur_.expect(")", "to close function application");
      return ex::call(tok.text, std::move(args));
    }
    return ex::var(tok.text);
  }

  TokenCursor& cur_;
};

ExprPtr parse_terminated_formula(TokenCursor& cur) {
  FormulaParser fp(cur);
  ExprPtr f = fp.formula();
  if (!cur.peek().is(";")) {
    spec_fail(cur.peek(), "expected ';' after clause formula, found " + describe(cur.peek()));
  }
  cur.next();
  return f;
}

LogicType parse_logic_type(TokenCursor& cur) {
  const Token& t = cur.peek();
  if (t.is("Int")) {
    cur.next();
    return LogicType::Int;
  }
  if (t.is("Bool")) {
    cur.next();
    return LogicType::Bool;
  }
  spec_fail(t, "logic functions support types Int and Bool, found " + describe(t));
}

}  // namespace

ExprPtr parse_formula(std::string_view text, SourceLoc origin) {
  TokenCursor cur(tokenize(text, LexMode::Plain, origin));
  try {
    FormulaParser fp(cur);
    ExprPtr f = fp.formula();
    if (!cur.at_end()) spec_fail(cur.peek(), "trailing input after formula: " + describe(cur.peek()));
    return f;
  } catch (const DiagnosticError& e) {
    if (e.kind() == DiagKind::SyntaxError) {
      throw DiagnosticError(DiagKind::SpecError, e.diagnostics().front().message,
                            e.diagnostics().front().loc);
    }
    throw;
  }
}

AcslClause parse_acsl_clause(std::string_view comment, SourceLoc origin) {
  TokenCursor cur(tokenize(comment, LexMode::Plain, origin));
  enum class Cls { None, Contract, Global, Logic, Loop } cls = Cls::None;
  AcslContract contract;
  contract.loc = origin;
  GlobalInvariant ginv;
  LoopInvariant linv;
  LogicFunctionDef logic;

  auto classify = [&](Cls c, const Token& at) {
    if (cls != Cls::None && cls != c) {
      spec_fail(at, "annotation mixes clause kinds; put contracts, invariants and logic "
                    "definitions in separate comments");
    }
    if ((c == Cls::Global || c == Cls::Logic) && cls == c) {
      spec_fail(at, "only one global invariant or logic definition per annotation");
    }
    cls = c;
  };

  try {
    while (!cur.at_end()) {
      const Token& kw = cur.peek();
      if (kw.is("requires") || kw.is("ensures")) {
        classify(Cls::Contract, kw);
        bool req = kw.is("requires");
        cur.next();
        ExprPtr f = parse_terminated_formula(cur);
        if (req) {
          contract.requires_clause = ex::conj(contract.requires_clause, f);
        } else {
          contract.ensures_clause = ex::conj(contract.ensures_clause, f);
        }
      } else if (kw.is("assigns")) {
        // Frame clauses are accepted and ignored.
        classify(Cls::Contract, kw);
        while (!cur.at_end() && !cur.peek().is(";")) cur.next();
        cur.expect(";", "after assigns clause");
      } else if (kw.is("strong") || kw.is("weak") || kw.is("global")) {
        classify(Cls::Global, kw);
        ginv.loc = kw.loc;
        ginv.strong = !kw.is("weak");
        if (!kw.is("global")) cur.next();
        cur.expect("global", "in global invariant");
        cur.expect("invariant", "in global invariant");
        // Optional ACSL label `name:`.
        if (cur.peek().kind == Token::Kind::Ident && cur.peek(1).is(":")) {
          cur.next();
          cur.next();
        }
        ginv.formula = parse_terminated_formula(cur);
        if (kw.is("global")) ginv.strong = false;
      } else if (kw.is("loop")) {
        classify(Cls::Loop, kw);
        linv.loc = kw.loc;
        cur.next();
        if (cur.peek().is("assigns") || cur.peek().is("variant")) {
          cur.next();
          while (!cur.at_end() && !cur.peek().is(";")) cur.next();
          cur.expect(";", "after loop clause");
          continue;
        }
        cur.expect("invariant", "in loop invariant");
        linv.formula = ex::conj(linv.formula, parse_terminated_formula(cur));
      } else if (kw.is("ABS")) {
        classify(Cls::Logic, kw);
        logic.loc = kw.loc;
        cur.next();
        cur.expect("def", "after 'ABS'");
        logic.return_type = parse_logic_type(cur);
        logic.name = cur.expect_ident("as logic function name");
        cur.expect("(", "after logic function name");
        if (!cur.peek().is(")")) {
          do {
            LogicType t = parse_logic_type(cur);
            logic.params.emplace_back(cur.expect_ident("as logic function parameter"), t);
          } while (cur.accept(","));
        }
        cur.expect(")", "to close logic function parameters");
        cur.expect("=", "before logic function body");
        logic.body = parse_terminated_formula(cur);
      } else {
        spec_fail(kw, "unknown ACSL clause starting with " + describe(kw));
      }
    }
  } catch (const DiagnosticError& e) {
    if (e.kind() == DiagKind::SyntaxError) {
      throw DiagnosticError(DiagKind::SpecError, e.diagnostics().front().message,
                            e.diagnostics().front().loc);
    }
    throw;
  }

  switch (cls) {
    case Cls::Contract: return contract;
    case Cls::Global: return ginv;
    case Cls::Logic: return logic;
    case Cls::Loop:
      if (!linv.formula) {
        throw DiagnosticError(DiagKind::SpecError, "loop annotation without invariant", origin);
      }
      return linv;
    case Cls::None: break;
  }
  throw DiagnosticError(DiagKind::SpecError, "empty ACSL annotation", origin);
}

}  // namespace c2ao::frontend
