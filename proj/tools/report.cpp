#include <cstdio>
#include <fstream>
#include <sstream>

#include "c2ao/extract/extractor.hpp"
#include "c2ao/frontend/parser.hpp"
#include "cli.hpp"

namespace c2ao::cli {

using nlohmann::json;

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

json loc_json(const SourceLoc& l) {
  if (!l.known()) return nullptr;
  return {{"line", l.line}, {"column", l.column}};
}

}  // namespace

Input load_text(const std::string& path, std::string text) {
  Input in;
  in.path = path;
  in.text = std::move(text);
  if (ends_with(path, ".abs")) {
    in.model = model::read_abs(in.text);
    std::vector<Diagnostic> diags = model::well_formed(in.model);
    if (!diags.empty()) throw DiagnosticError(std::move(diags));
  } else {
    in.ast = frontend::parse(in.text);
    in.model = extract::extract(*in.ast);
  }
  return in;
}

Input load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read input file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return load_text(path, ss.str());
}

std::string digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

json report_header(const Input& in) {
  return {{"schema_version", kSchemaVersion},
          {"tool_version", C2AO_VERSION},
          {"input", in.path},
          {"input_digest", digest(in.text)}};
}

json extraction_section(const model::Model& m) {
  std::size_t methods = 0, helpers = 0;
  json classes = json::array();
  for (const auto& c : m.classes) {
    methods += c.methods.size();
    for (const auto& meth : c.methods) {
      if (meth.name != "call") ++helpers;
    }
    classes.push_back(c.name);
  }
  return {{"classes", classes},
          {"class_count", m.classes.size()},
          {"interface_count", m.interfaces.size()},
          {"method_count", methods},
          {"helper_count", helpers},
          {"logic_function_count", m.logic_functions.size()},
          {"has_main_block", m.main_block.has_value()}};
}

json explore_section(const explore::Report& r, const explore::Budget& b) {
  json violations = json::array();
  for (const auto& v : r.violations) {
    violations.push_back({{"kind", explore::to_string(v.kind)},
                          {"class", v.cls},
                          {"method", v.method},
                          {"message", v.message},
                          {"location", loc_json(v.loc)},
                          {"witness", v.witness}});
  }
  return {{"entry", r.entry.empty() ? "main block" : r.entry},
          {"args", r.args},
          {"values", std::vector<std::int64_t>(r.values.begin(), r.values.end())},
          {"returned_unit", r.returned_unit},
          {"violations", violations},
          {"deadlocks", r.count(explore::ViolationKind::Deadlock)},
          {"precondition_unmet", r.precondition_unmet},
          {"precondition_message", r.precondition_message},
          {"budget",
           {{"max_states", b.max_states},
            {"max_depth", b.max_depth},
            {"exceeded", r.budget_exceeded},
            {"nontermination", r.nontermination}}},
          {"stats",
           {{"states", r.stats.states},
            {"deduplicated", r.stats.deduplicated},
            {"transitions", r.stats.transitions},
            {"max_frontier", r.stats.max_frontier}}}};
}

json deadlock_section(const deadlock::Classification& c, const deadlock::Justification& j) {
  return {{"free", c.free},
          {"unknown", c.unknown},
          {"unknown_count", c.unknown.size()},
          {"justified", j.justified},
          {"unresolved", j.unresolved},
          {"verdict", j.verdict == deadlock::Verdict::DeadlockFree ? "deadlock-free" : "unresolved"},
          {"justification", j.text}};
}

json vcgen_section(const vc::Generation& g, const std::vector<vc::Status>& statuses, const vc::DischargeOptions& o) {
  json obs = json::array();
  std::map<std::string, int> summary;
  for (size_t i = 0; i < g.obligations.size(); ++i) {
    const auto& ob = g.obligations[i];
    const vc::Status& s = statuses.at(i);
    ++summary[vc::to_string(s.kind)];
    obs.push_back({{"name", ob.name},
                   {"class", ob.cls},
                   {"method", ob.method},
                   {"kind", ob.kind},
                   {"description", ob.description},
                   {"location", loc_json(ob.loc)},
                   {"status", vc::to_string(s.kind)},
                   {"detail", s.detail},
                   {"seconds", s.seconds}});
  }
  json unverifiable = json::array();
  for (const auto& u : g.unverifiable) unverifiable.push_back({{"method", u.method}, {"reason", u.reason}});
  return {{"solver", o.solver},
          {"timeout_seconds", o.timeout_seconds},
          {"obligations", obs},
          {"unverifiable", unverifiable},
          {"summary", summary}};
}

std::vector<int> parse_witness(const std::string& text) {
  json j = json::parse(text);
  if (!j.is_array()) throw std::runtime_error("a witness must be a JSON list of integers");
  std::vector<int> w;
  for (const auto& x : j) {
    if (!x.is_number_integer() || x.get<long long>() < 0) {
      throw std::runtime_error("a witness must be a JSON list of non-negative integers");
    }
    w.push_back(x.get<int>());
  }
  return w;
}

std::string format_values(const std::set<std::int64_t>& values) {
  std::string s = "{";
  for (auto it = values.begin(); it != values.end(); ++it) {
    if (it != values.begin()) s += ", ";
    s += std::to_string(*it);
  }
  return s + "}";
}

}  // namespace c2ao::cli
