#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "c2ao/common.hpp"

namespace c2ao {

struct Token {
  enum class Kind { Ident, Int, Float, String, Punct, Annotation, End };
  Kind kind = Kind::End;
  std::string text;  // annotation tokens hold the comment body without the markers
  SourceLoc loc;

  bool is(std::string_view punct_or_ident) const {
    return (kind == Kind::Punct || kind == Kind::Ident) && text == punct_or_ident;
  }
};

enum class LexMode {
  C,     // `//@` and `/*@ @*/` comments become Annotation tokens
  Plain  // all comments skipped (annotation bodies, model text)
};

/// Tokenizes `source`. Lexing never fails: unknown characters are returned
/// as single-character Punct tokens so the parser can report them in context.
/// `origin` shifts reported locations (used when re-lexing annotation bodies).
std::vector<Token> tokenize(std::string_view source, LexMode mode, SourceLoc origin = {1, 1});

/// Stateful cursor over a token vector with the usual expect/accept helpers.
class TokenCursor {
 public:
  explicit TokenCursor(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  const Token& peek(size_t ahead = 0) const;
  const Token& next();
  bool at_end() const { return peek().kind == Token::Kind::End; }
  bool accept(std::string_view text);
  const Token& expect(std::string_view text, std::string_view context);
  std::string expect_ident(std::string_view context);

  [[noreturn]] void fail(const std::string& message) const;
  [[noreturn]] void fail_at(const Token& tok, const std::string& message) const;

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
};

std::string describe(const Token& tok);

}  // namespace c2ao
