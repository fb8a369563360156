#pragma once

// File access and corpus conventions shared by the test programs.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "c2ao/extract/extractor.hpp"
#include "c2ao/frontend/parser.hpp"
#include "c2ao/model/model.hpp"

namespace testing {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(C2AO_TEST_DIR) / "fixtures" / name;
}

inline std::string fixture(const std::string& name) { return read_file(fixture_path(name)); }

inline std::string golden(const std::string& name) {
  return read_file(std::filesystem::path(C2AO_TEST_DIR) / "golden" / name);
}

inline c2ao::model::Model extract_source(const std::string& src) {
  return c2ao::extract::extract(c2ao::frontend::parse(src));
}

inline c2ao::model::Model extract_fixture(const std::string& name) { return extract_source(fixture(name)); }

/// Replaces the first line containing `needle` with `line`.
inline std::string replace_line(const std::string& src, const std::string& needle, const std::string& line) {
  std::istringstream in(src);
  std::string out, l;
  bool done = false;
  while (std::getline(in, l)) {
    if (!done && l.find(needle) != std::string::npos) {
      l = line;
      done = true;
    }
    out += l + "\n";
  }
  if (!done) throw std::runtime_error("no line contains " + needle);
  return out;
}

struct EntryCall {
  std::string function;
  std::vector<std::int64_t> args;
};

struct CorpusProgram {
  std::string name;
  std::string source;
  std::vector<EntryCall> entries;
};

/// Programs under tests/corpus; each names its entry calls in
/// `// entry: f(1, 2)` header lines.
inline std::vector<CorpusProgram> corpus() {
  std::vector<CorpusProgram> out;
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(std::filesystem::path(C2AO_TEST_DIR) / "corpus")) {
    if (e.path().extension() == ".c") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  static const std::regex entry_re(R"(//\s*entry:\s*(\w+)\(([^)]*)\))");
  for (const auto& f : files) {
    CorpusProgram p;
    p.name = f.filename().string();
    p.source = read_file(f);
    for (std::sregex_iterator it(p.source.begin(), p.source.end(), entry_re), end; it != end; ++it) {
      EntryCall c;
      c.function = (*it)[1];
      std::stringstream args((*it)[2].str());
      for (std::string a; std::getline(args, a, ',');) {
        if (a.find_first_not_of(' ') != std::string::npos) c.args.push_back(std::stoll(a));
      }
      p.entries.push_back(std::move(c));
    }
    out.push_back(std::move(p));
  }
  return out;
}

/// A fresh directory under the working directory (the build tree when run
/// by ctest), removed again on destruction.
struct ScratchDir {
  std::filesystem::path path;
  explicit ScratchDir(const std::string& name) : path(std::filesystem::current_path() / ("scratch_" + name)) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~ScratchDir() { std::filesystem::remove_all(path); }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
};

}  // namespace testing
