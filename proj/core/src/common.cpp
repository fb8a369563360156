#include "c2ao/common.hpp"

namespace c2ao {

std::string to_string(const SourceLoc& loc) {
  if (!loc.known()) return "?";
  return std::to_string(loc.line) + ":" + std::to_string(loc.column);
}

const char* to_string(DiagKind kind) {
  switch (kind) {
    case DiagKind::SyntaxError: return "SyntaxError";
    case DiagKind::UnsupportedConstruct: return "UnsupportedConstruct";
    case DiagKind::SpecError: return "SpecError";
    case DiagKind::TypeError: return "TypeError";
    case DiagKind::WellFormedness: return "WellFormedness";
    case DiagKind::Warning: return "Warning";
  }
  return "?";
}

std::string Diagnostic::format() const {
  std::string out;
  if (loc.known()) out += to_string(loc) + ": ";
  out += severity == Severity::Warning ? "warning: " : "error: ";
  out += to_string(kind);
  out += ": ";
  out += message;
  return out;
}

namespace {
std::string summarize(const std::vector<Diagnostic>& diags) {
  if (diags.empty()) return "unknown error";
  return diags.front().format();
}
}  // namespace

DiagnosticError::DiagnosticError(std::vector<Diagnostic> diags)
    : std::runtime_error(summarize(diags)), diags_(std::move(diags)) {
  if (diags_.empty()) diags_.push_back({DiagKind::SyntaxError, Severity::Error, "unknown error", {}});
}

DiagnosticError::DiagnosticError(DiagKind kind, std::string message, SourceLoc loc)
    : DiagnosticError(std::vector<Diagnostic>{{kind, Severity::Error, std::move(message), loc}}) {}

}  // namespace c2ao
