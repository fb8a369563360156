#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "c2ao/vcgen/vcgen.hpp"

extern char** environ;

namespace c2ao::vc {

const char* to_string(Status::Kind k) {
  switch (k) {
    case Status::Kind::Valid: return "valid";
    case Status::Kind::Invalid: return "invalid";
    case Status::Kind::Timeout: return "timeout";
    case Status::Kind::Unknown: return "unknown";
    case Status::Kind::SolverMissing: return "solver_missing";
    case Status::Kind::Error: return "error";
  }
  return "error";
}

std::string default_solver() {
  const char* env = std::getenv("C2AO_SOLVER");
  return env && *env ? env : "z3";
}

bool solver_available(const std::string& solver) {
  auto executable = [](const std::filesystem::path& p) {
    std::error_code ec;
    return std::filesystem::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
  };
  if (solver.find('/') != std::string::npos) return executable(solver);
  const char* path = std::getenv("PATH");
  if (!path) return false;
  std::stringstream ss(path);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (!dir.empty() && executable(std::filesystem::path(dir) / solver)) return true;
  }
  return false;
}

namespace {

std::string sanitize(const std::string& name) {
  std::string s;
  for (char c : name) s += std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ? c : '_';
  return s.substr(0, 80);
}

/// Runs `solver -T:<n> script`; kills it past the deadline.
Status run_solver(const std::string& solver, const std::string& script, double timeout) {
  using clock = std::chrono::steady_clock;
  auto start = clock::now();
  Status st;
  int fds[2];
  if (::pipe(fds) != 0) {
    st.kind = Status::Kind::Error;
    st.detail = "pipe failed";
    return st;
  }
  posix_spawn_file_actions_t fa;
  posix_spawn_file_actions_init(&fa);
  posix_spawn_file_actions_adddup2(&fa, fds[1], 1);
  posix_spawn_file_actions_adddup2(&fa, fds[1], 2);
  posix_spawn_file_actions_addclose(&fa, fds[0]);
  posix_spawn_file_actions_addclose(&fa, fds[1]);
  std::string limit = "-T:" + std::to_string(static_cast<long>(timeout + 1));
  std::vector<char*> argv{const_cast<char*>(solver.c_str())};
  bool is_z3 = std::filesystem::path(solver).filename().string().rfind("z3", 0) == 0;
  if (is_z3) argv.push_back(limit.data());
  argv.push_back(const_cast<char*>(script.c_str()));
  argv.push_back(nullptr);
  pid_t pid;
  int rc = posix_spawnp(&pid, solver.c_str(), &fa, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&fa);
  ::close(fds[1]);
  if (rc != 0) {
    ::close(fds[0]);
    st.kind = rc == ENOENT ? Status::Kind::SolverMissing : Status::Kind::Error;
    st.detail = std::string("cannot run ") + solver + ": " + std::strerror(rc);
    return st;
  }

  std::string out;
  bool timed_out = false;
  auto deadline = start + std::chrono::duration<double>(timeout);
  char buf[4096];
  for (;;) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
    if (left <= 0) {
      timed_out = true;
      break;
    }
    pollfd p{fds[0], POLLIN, 0};
    int r = ::poll(&p, 1, static_cast<int>(std::min<long long>(left, 1000)));
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) continue;
    ssize_t n = ::read(fds[0], buf, sizeof buf);
    if (n <= 0) break;
    out.append(buf, static_cast<size_t>(n));
  }
  if (timed_out) ::kill(pid, SIGKILL);
  ::close(fds[0]);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  st.seconds = std::chrono::duration<double>(clock::now() - start).count();

  std::string first = out.substr(0, out.find('\n'));
  while (!first.empty() && std::isspace(static_cast<unsigned char>(first.back()))) first.pop_back();
  if (timed_out || first == "timeout") {
    st.kind = Status::Kind::Timeout;
  } else if (first == "unsat") {
    st.kind = Status::Kind::Valid;
  } else if (first == "sat") {
    st.kind = Status::Kind::Invalid;
    st.detail = out.find('\n') == std::string::npos ? "" : out.substr(out.find('\n') + 1);
  } else if (first == "unknown") {
    st.kind = Status::Kind::Unknown;
  } else {
    st.kind = Status::Kind::Error;
    st.detail = out;
  }
  return st;
}

}  // namespace

std::vector<Status> discharge(const model::Model& model, const std::vector<Obligation>& obligations,
                              const DischargeOptions& options) {
  std::vector<Status> result(obligations.size());
  namespace fs = std::filesystem;

  fs::path dir;
  bool temporary = options.out_dir.empty();
  if (temporary) {
    std::string tmpl = (fs::temp_directory_path() / "c2ao-vc-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw InternalError("cannot create a temporary directory");
    dir = tmpl;
  } else {
    dir = options.out_dir;
    fs::create_directories(dir);
  }

  std::vector<std::string> paths(obligations.size());
  for (size_t i = 0; i < obligations.size(); ++i) {
    std::ostringstream name;
    name << std::setw(3) << std::setfill('0') << i << "_" << sanitize(obligations[i].name) << ".smt2";
    paths[i] = (dir / name.str()).string();
    std::ofstream(paths[i]) << emit_smtlib(model, obligations[i]);
  }

  bool available = solver_available(options.solver);
  if (!available || options.timeout_seconds <= 0) {
    for (auto& s : result) {
      s.kind = available ? Status::Kind::Timeout : Status::Kind::SolverMissing;
      if (!available) s.detail = "solver '" + options.solver + "' not found";
    }
  } else {
    unsigned jobs = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max<size_t>(1, obligations.size())));
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (size_t i; (i = next.fetch_add(1)) < obligations.size();) {
        result[i] = run_solver(options.solver, paths[i], options.timeout_seconds);
      }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (temporary) {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  return result;
}

}  // namespace c2ao::vc
