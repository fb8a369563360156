#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cli.hpp"

namespace c2ao::cli {

using nlohmann::json;

namespace {

struct Common {
  std::string input;
  bool json_flag = false;
  std::string json_path;  // empty with json_flag: JSON replaces the text on stdout
};

void add_json_option(CLI::App* sub, Common& c) {
  sub->add_option_function<std::string>(
         "--json", [&c](const std::string& p) { c.json_flag = true, c.json_path = p == "-" ? "" : p; },
         "Write the JSON report to PATH ('-' or no value: stdout)")
      ->expected(0, 1)
      ->default_str("-")
      ->type_name("PATH");
}

/// Writes the report where requested. With JSON on stdout the human text is
/// suppressed, so callers print text into `text` first.
int finish(const Common& c, const json& report, const std::string& text, int code, std::ostream& out,
           std::ostream& err) {
  if (c.json_flag && c.json_path.empty()) {
    out << report.dump(2) << "\n";
    return code;
  }
  out << text;
  if (c.json_flag) {
    std::ofstream f(c.json_path);
    if (!f) {
      err << "error: cannot write '" << c.json_path << "'\n";
      return Exit::Usage;
    }
    f << report.dump(2) << "\n";
  }
  return code;
}

std::string located(const std::string& path, const Diagnostic& d) {
  return path + (d.loc.known() ? ":" : ": ") + d.format();
}

void print_warnings(const Input& in, std::ostream& err) {
  if (!in.ast) return;
  for (const auto& w : in.ast->warnings) err << located(in.path, w) << "\n";
}

std::string describe_violation(const explore::Violation& v) {
  std::ostringstream s;
  s << explore::to_string(v.kind) << " in " << v.cls << "." << v.method;
  if (v.loc.known()) s << " (source " << to_string(v.loc) << ")";
  s << ": " << v.message << "\n  witness: " << json(v.witness).dump() << "\n";
  return s.str();
}

// --- extract -------------------------------------------------------------

int cmd_extract(const Common& c, const std::string& output, std::ostream& out, std::ostream& err) {
  Input in = load(c.input);
  print_warnings(in, err);
  std::string abs = model::emit_abs(in.model);
  std::string text;
  if (output.empty() || output == "-") {
    text = abs;
  } else {
    std::ofstream f(output);
    if (!f) {
      err << "error: cannot write '" << output << "'\n";
      return Exit::Usage;
    }
    f << abs;
    text = "wrote " + output + "\n";
  }
  json report = report_header(in);
  report["extraction"] = extraction_section(in.model);
  return finish(c, report, text, Exit::Ok, out, err);
}

// --- explore -------------------------------------------------------------

struct ExploreFlags {
  std::string entry = "main";
  std::vector<std::int64_t> args;
  std::size_t max_states = explore::Budget{}.max_states;
  std::size_t max_depth = explore::Budget{}.max_depth;
  std::string replay;
  std::string save_witness;
};

int cmd_replay(const Common& c, const ExploreFlags& f, const Input& in, const explore::Explorer& ex,
               std::ostream& out, std::ostream& err) {
  std::ifstream wf(f.replay);
  if (!wf) {
    err << "error: cannot read witness '" << f.replay << "'\n";
    return Exit::Usage;
  }
  std::stringstream ss;
  ss << wf.rdbuf();
  std::vector<int> witness;
  try {
    witness = parse_witness(ss.str());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return Exit::Usage;
  }

  std::ostringstream text;
  json steps = json::array();
  explore::Configuration cfg = ex.initial(f.entry, f.args);
  for (size_t i = 0; i < witness.size(); ++i) {
    std::vector<int> en = ex.enabled(cfg);
    if (witness[i] >= static_cast<int>(en.size())) break;  // reported by replay() below
    int proc = en[static_cast<size_t>(witness[i])];
    auto [cls, meth] = ex.describe(cfg, proc);
    int obj = cfg.processes[static_cast<size_t>(proc)].object;
    text << "step " << i << ": choice " << witness[i] << " runs " << cls << "." << meth << " on object " << obj
         << "\n";
    steps.push_back({{"choice", witness[i]}, {"object", obj}, {"class", cls}, {"method", meth}});
    if (ex.macro_step(cfg, proc).violation) break;
  }

  explore::ReplayResult r = ex.replay(f.entry, f.args, witness);
  json rj = {{"witness", witness}, {"steps", steps}, {"terminal", r.terminal}};
  if (r.result) {
    text << "result: " << r.result->str() << "\n";
    rj["result"] = r.result->str();
  }
  if (r.violation) {
    text << describe_violation(*r.violation);
    rj["violation"] = {{"kind", explore::to_string(r.violation->kind)},
                       {"class", r.violation->cls},
                       {"method", r.violation->method},
                       {"message", r.violation->message}};
  } else if (!r.terminal) {
    text << "schedule incomplete: processes remain enabled\n";
  }
  json report = report_header(in);
  report["replay"] = rj;
  return finish(c, report, text.str(), r.violation ? Exit::Failed : Exit::Ok, out, err);
}

int cmd_explore(const Common& c, const ExploreFlags& f, std::ostream& out, std::ostream& err) {
  Input in = load(c.input);
  print_warnings(in, err);
  explore::Budget budget;
  budget.max_states = f.max_states;
  budget.max_depth = f.max_depth;
  explore::Explorer ex(in.model, budget);
  if (!f.replay.empty()) return cmd_replay(c, f, in, ex, out, err);

  auto t0 = std::chrono::steady_clock::now();
  explore::Report r = ex.explore(f.entry, f.args);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ostringstream text;
  text << "entry " << f.entry << "(";
  for (size_t i = 0; i < f.args.size(); ++i) text << (i ? ", " : "") << f.args[i];
  text << ")\n";
  int code = Exit::Ok;
  if (r.precondition_unmet) {
    text << "precondition unmet: " << r.precondition_message << "\n";
    code = Exit::PreconditionUnmet;
  } else {
    text << "values: " << format_values(r.values) << (r.returned_unit ? " (unit)" : "") << "\n";
    for (const auto& v : r.violations) text << describe_violation(v);
    text << "states " << r.stats.states << ", transitions " << r.stats.transitions << ", "
         << std::to_string(secs).substr(0, 5) << "s\n";
    if (r.budget_exceeded || r.nontermination) {
      text << "budget exhausted: results cover only the explored part of the state space\n";
    }
    if (!r.violations.empty()) code = Exit::Failed;
    else if (r.budget_exceeded || r.nontermination) code = Exit::Budget;
  }

  if (!f.save_witness.empty() && !r.violations.empty()) {
    std::ofstream(f.save_witness) << json(r.violations.front().witness).dump() << "\n";
  }
  json report = report_header(in);
  report["extraction"] = extraction_section(in.model);
  report["explore"] = explore_section(r, budget);
  report["explore"]["stats"]["seconds"] = secs;
  return finish(c, report, text.str(), code, out, err);
}

// --- deadlock ------------------------------------------------------------

int cmd_deadlock(const Common& c, std::ostream& out, std::ostream& err) {
  Input in = load(c.input);
  print_warnings(in, err);
  deadlock::Classification cl = deadlock::classify(in.model);
  deadlock::Justification j = deadlock::justify(in.model, cl);
  std::ostringstream text;
  text << "free (" << cl.free.size() << "):\n";
  for (const auto& m : cl.free) text << "  " << m << "\n";
  text << "unknown (" << cl.unknown.size() << "):\n";
  for (const auto& m : cl.unknown) text << "  " << m << "\n";
  text << j.text;
  text << "verdict: " << deadlock::to_string(j.verdict) << "\n";
  json report = report_header(in);
  report["extraction"] = extraction_section(in.model);
  report["deadlock"] = deadlock_section(cl, j);
  return finish(c, report, text.str(), j.verdict == deadlock::Verdict::DeadlockFree ? Exit::Ok : Exit::Failed,
                out, err);
}

// --- verify --------------------------------------------------------------

int cmd_verify(const Common& c, const vc::DischargeOptions& o, std::ostream& out, std::ostream& err) {
  Input in = load(c.input);
  print_warnings(in, err);
  vc::Generation g = vc::generate(in.model);
  std::vector<vc::Status> st = vc::discharge(in.model, g.obligations, o);

  std::ostringstream text;
  bool missing = false, failed = !g.unverifiable.empty();
  std::map<std::string, int> summary;
  for (size_t i = 0; i < st.size(); ++i) {
    const char* s = vc::to_string(st[i].kind);
    ++summary[s];
    text << s << std::string(15 - std::min<size_t>(14, std::strlen(s)), ' ') << g.obligations[i].name << "\n";
    if (st[i].kind == vc::Status::Kind::Invalid) {
      text << "    " << g.obligations[i].description << "; counterexample:\n";
      std::istringstream model(st[i].detail);
      for (std::string line; std::getline(model, line);) text << "    " << line << "\n";
    } else if (st[i].kind == vc::Status::Kind::Error) {
      text << "    " << st[i].detail << "\n";
    }
    if (st[i].kind == vc::Status::Kind::SolverMissing) missing = true;
    else if (st[i].kind != vc::Status::Kind::Valid) failed = true;
  }
  for (const auto& u : g.unverifiable) text << "unverifiable   " << u.method << ": " << u.reason << "\n";
  text << st.size() << " obligations:";
  for (const auto& [k, n] : summary) text << " " << n << " " << k;
  text << "\n";
  if (missing) text << "solver '" << o.solver << "' not found" << (o.out_dir.empty() ? "" : "; scripts written to " + o.out_dir) << "\n";

  json report = report_header(in);
  report["extraction"] = extraction_section(in.model);
  report["vcgen"] = vcgen_section(g, st, o);
  int code = missing ? Exit::SolverMissing : failed ? Exit::Failed : Exit::Ok;
  return finish(c, report, text.str(), code, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Translate annotated C into an Active Object model and check it"};
  app.name("c2ao");
  app.set_version_flag("--version", std::string("c2ao ") + C2AO_VERSION);
  app.require_subcommand(1);

  Common common;
  std::string output;
  ExploreFlags ef;
  vc::DischargeOptions vo;
  vo.solver = vc::default_solver();

  auto input_opt = [&](CLI::App* sub) { sub->add_option("input", common.input, "C source (or .abs model)")->required(); };

  CLI::App* extract = app.add_subcommand("extract", "Write the extracted model");
  input_opt(extract);
  extract->add_option("-o,--output", output, "Output .abs file (default: stdout)");
  add_json_option(extract, common);

  CLI::App* explore = app.add_subcommand("explore", "Enumerate every interleaving of an entry call");
  input_opt(explore);
  explore->add_option("--entry", ef.entry, "C function to call")->capture_default_str();
  explore->add_option("--args", ef.args, "Comma-separated integer arguments")->delimiter(',')->allow_extra_args(false);
  explore->add_option("--max-states", ef.max_states, "State budget")->capture_default_str();
  explore->add_option("--max-depth", ef.max_depth, "Macro-step depth budget")->capture_default_str();
  explore->add_option("--replay", ef.replay, "Replay the witness in PATH instead of exploring");
  explore->add_option("--save-witness", ef.save_witness, "Write the first violation's witness to PATH");
  add_json_option(explore, common);

  CLI::App* dl = app.add_subcommand("deadlock", "Structural deadlock analysis");
  input_opt(dl);
  add_json_option(dl, common);

  CLI::App* verify = app.add_subcommand("verify", "Generate and discharge verification conditions");
  input_opt(verify);
  verify->add_option("--out", vo.out_dir, "Directory for the SMT-LIB scripts");
  verify->add_option("--solver", vo.solver, "Solver command (default: $C2AO_SOLVER or z3)");
  verify->add_option("--timeout", vo.timeout_seconds, "Per-obligation timeout in seconds")->capture_default_str();
  verify->add_option("--jobs", vo.jobs, "Concurrent solver processes (0: one per core)");
  add_json_option(verify, common);

  std::vector<std::string> argv_storage{"c2ao"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? Exit::Ok : Exit::Usage;
  }
  if (vo.timeout_seconds < 0) {
    err << "error: --timeout must be non-negative\n";
    return Exit::Usage;
  }

  try {
    if (extract->parsed()) return cmd_extract(common, output, out, err);
    if (explore->parsed()) return cmd_explore(common, ef, out, err);
    if (dl->parsed()) return cmd_deadlock(common, out, err);
    if (verify->parsed()) return cmd_verify(common, vo, out, err);
  } catch (const DiagnosticError& e) {
    for (const auto& d : e.diagnostics()) err << located(common.input, d) << "\n";
    return Exit::Diagnostics;
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << "\n";
    return Exit::Diagnostics;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return Exit::Usage;
  }
  return Exit::Usage;
}

}  // namespace c2ao::cli
