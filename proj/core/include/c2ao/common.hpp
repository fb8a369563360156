#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace c2ao {

struct SourceLoc {
  int line = 0;
  int column = 0;

  bool known() const { return line > 0; }
  friend bool operator==(const SourceLoc&, const SourceLoc&) = default;
};

std::string to_string(const SourceLoc& loc);

enum class Severity { Error, Warning, Note };

/// Kinds of problems reported by the frontend, extractor and model checks.
enum class DiagKind {
  SyntaxError,
  UnsupportedConstruct,
  SpecError,
  TypeError,
  WellFormedness,
  Warning,
};

const char* to_string(DiagKind kind);

struct Diagnostic {
  DiagKind kind = DiagKind::SyntaxError;
  Severity severity = Severity::Error;
  std::string message;
  SourceLoc loc;

  std::string format() const;
};

/// Thrown when a pipeline stage cannot produce its result. Carries every
/// diagnostic collected so far; the first one is the primary cause.
class DiagnosticError : public std::runtime_error {
 public:
  explicit DiagnosticError(std::vector<Diagnostic> diags);
  DiagnosticError(DiagKind kind, std::string message, SourceLoc loc = {});

  const std::vector<Diagnostic>& diagnostics() const { return diags_; }
  DiagKind kind() const { return diags_.front().kind; }

 private:
  std::vector<Diagnostic> diags_;
};

/// Internal invariant broken (an extractor or interpreter bug, not user error).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace c2ao
