#include "c2ao/lexer.hpp"

#include <array>
#include <cctype>

namespace c2ao {

namespace {

constexpr std::array<std::string_view, 22> kMultiPunct = {
    "<==>", "==>", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=",
    "-=",   "*=",  "/=", "%=", "->", "<<", ">>", "&=", "|=", "^=", "::"};

class Lexer {
 public:
  Lexer(std::string_view src, LexMode mode, SourceLoc origin)
      : src_(src), mode_(mode), line_(origin.line), col_(origin.column) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= src_.size()) break;
      SourceLoc loc{line_, col_};
      if (starts_with("//")) {
        if (mode_ == LexMode::C && starts_with("//@")) {
          out.push_back(line_annotation(loc));
        } else {
          skip_line();
        }
        continue;
      }
      if (starts_with("/*")) {
        if (mode_ == LexMode::C && starts_with("/*@")) {
          out.push_back(block_annotation(loc));
        } else {
          skip_block();
        }
        continue;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
          (c == '\\' && pos_ + 1 < src_.size() &&
           std::isalpha(static_cast<unsigned char>(src_[pos_ + 1])))) {
        size_t start = pos_;
        advance();
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          advance();
        }
        out.push_back({Token::Kind::Ident, std::string(src_.substr(start, pos_ - start)), loc});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        size_t start = pos_;
        bool is_float = false;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
          if (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E' || src_[pos_] == 'x' ||
              src_[pos_] == 'X') {
            is_float = is_float || src_[pos_] != 'x';
          }
          advance();
        }
        std::string text(src_.substr(start, pos_ - start));
        bool digits_only = true;
        for (char d : text) digits_only = digits_only && std::isdigit(static_cast<unsigned char>(d));
        Token::Kind kind = digits_only ? Token::Kind::Int
                           : is_float  ? Token::Kind::Float
                                       : Token::Kind::String;  // hex / suffixed literals
        out.push_back({kind, std::move(text), loc});
        continue;
      }
      if (c == '"' || c == '\'') {
        size_t start = pos_;
        advance();
        while (pos_ < src_.size() && src_[pos_] != c && src_[pos_] != '\n') {
          if (src_[pos_] == '\\') advance();
          advance();
        }
        if (pos_ < src_.size()) advance();
        out.push_back({Token::Kind::String, std::string(src_.substr(start, pos_ - start)), loc});
        continue;
      }
      bool matched = false;
      for (auto p : kMultiPunct) {
        if (starts_with(p)) {
          for (size_t i = 0; i < p.size(); ++i) advance();
          out.push_back({Token::Kind::Punct, std::string(p), loc});
          matched = true;
          break;
        }
      }
      if (matched) continue;
      advance();
      out.push_back({Token::Kind::Punct, std::string(1, c), loc});
    }
    out.push_back({Token::Kind::End, "", {line_, col_}});
    return out;
  }

 private:
  bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }

  void skip_line() {
    while (pos_ < src_.size() && src_[pos_] != '\n') advance();
  }

  void skip_block() {
    advance();
    advance();
    while (pos_ < src_.size() && !starts_with("*/")) advance();
    if (pos_ < src_.size()) {
      advance();
      advance();
    }
  }

  // Consecutive `//@` lines form a single annotation.
  Token line_annotation(SourceLoc loc) {
    std::string body;
    while (true) {
      for (int i = 0; i < 3; ++i) advance();
      size_t start = pos_;
      skip_line();
      if (!body.empty()) body += '\n';
      body += std::string(src_.substr(start, pos_ - start));
      size_t probe = pos_;
      while (probe < src_.size() && std::isspace(static_cast<unsigned char>(src_[probe]))) ++probe;
      if (src_.substr(probe, 3) != "//@") break;
      // Only join when the next annotation line immediately follows.
      size_t newlines = 0;
      for (size_t i = pos_; i < probe; ++i) newlines += src_[i] == '\n';
      if (newlines > 1) break;
      while (pos_ < probe) advance();
    }
    return {Token::Kind::Annotation, std::move(body), {loc.line, loc.column + 3}};
  }

  Token block_annotation(SourceLoc loc) {
    for (int i = 0; i < 3; ++i) advance();
    size_t start = pos_;
    while (pos_ < src_.size() && !starts_with("*/")) advance();
    std::string body(src_.substr(start, pos_ - start));
    if (pos_ < src_.size()) {
      advance();
      advance();
    }
    // Strip the closing `@` and leading `@` on continuation lines.
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back()))) body.pop_back();
    if (!body.empty() && body.back() == '@') body.pop_back();
    bool line_start = false;
    for (char& ch : body) {
      if (ch == '\n') {
        line_start = true;
      } else if (line_start && ch == '@') {
        ch = ' ';
        line_start = false;
      } else if (!std::isspace(static_cast<unsigned char>(ch))) {
        line_start = false;
      }
    }
    return {Token::Kind::Annotation, std::move(body), {loc.line, loc.column + 3}};
  }

  std::string_view src_;
  LexMode mode_;
  size_t pos_ = 0;
  int line_;
  int col_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source, LexMode mode, SourceLoc origin) {
  return Lexer(source, mode, origin).run();
}

std::string describe(const Token& tok) {
  switch (tok.kind) {
    case Token::Kind::End: return "end of input";
    case Token::Kind::Annotation: return "annotation comment";
    default: return "'" + tok.text + "'";
  }
}

const Token& TokenCursor::peek(size_t ahead) const {
  size_t i = pos_ + ahead;
  return i < toks_.size() ? toks_[i] : toks_.back();
}

const Token& TokenCursor::next() {
  const Token& t = peek();
  if (pos_ < toks_.size() - 1) ++pos_;
  return t;
}

bool TokenCursor::accept(std::string_view text) {
  if (peek().is(text)) {
    next();
    return true;
  }
  return false;
}

const Token& TokenCursor::expect(std::string_view text, std::string_view context) {
  if (!peek().is(text)) {
    fail("expected '" + std::string(text) + "' " + std::string(context) + ", found " +
         describe(peek()));
  }
  return next();
}

std::string TokenCursor::expect_ident(std::string_view context) {
  if (peek().kind != Token::Kind::Ident) {
    fail("expected identifier " + std::string(context) + ", found " + describe(peek()));
  }
  return next().text;
}

void TokenCursor::fail(const std::string& message) const { fail_at(peek(), message); }

void TokenCursor::fail_at(const Token& tok, const std::string& message) const {
  throw DiagnosticError(DiagKind::SyntaxError, message, tok.loc);
}

}  // namespace c2ao
