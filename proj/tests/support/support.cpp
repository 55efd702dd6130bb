#include "support.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

#include "perfix/process.hpp"
#include "perfix/util.hpp"

namespace perfix::testing {

fs::path source_dir() { return fs::path(PERFIX_SOURCE_DIR); }

fs::path fixture_path(const std::string& relative) {
  return source_dir() / "tests" / "fixtures" / relative;
}

fs::path golden_path(const std::string& relative) {
  return source_dir() / "tests" / "golden" / relative;
}

std::string slurp(const fs::path& path) { return read_file(path); }

SourceMethod fixture_method(const std::string& relative) {
  const auto text = slurp(fixture_path(relative));
  auto methods = extract_methods(parse_file(relative, text));
  // Bare methods are top-level local functions to the parser.
  if (methods.empty()) return parse_method_text(text);
  return methods.front();
}

std::string fixture_method_text(const std::string& relative) {
  return std::string(fixture_method(relative).text());
}

TempDir::TempDir() {
  std::string pattern = (fs::temp_directory_path() / "perfix-test-XXXXXX").string();
  if (!::mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  if (std::getenv("PERFIX_KEEP_TEMP")) return;
  std::error_code ec;
  fs::remove_all(path_, ec);
}

GitRepo::GitRepo(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  git({"init", "--quiet", "--initial-branch=main"});
}

std::string GitRepo::git(const std::vector<std::string>& args) const {
  std::vector<std::string> argv{"git",
                                "-c", "user.name=Fixture",
                                "-c", "user.email=fixture@example.com",
                                "-c", "commit.gpgsign=false",
                                "-c", "core.autocrlf=false"};
  argv.insert(argv.end(), args.begin(), args.end());
  const auto r = run_process(argv, dir_);
  if (r.exit_code != 0) throw std::runtime_error("git failed: " + r.err);
  return r.out;
}

std::string GitRepo::commit(const std::map<std::string, std::string>& files,
                            const std::string& message) {
  for (const auto& [path, content] : files) {
    const auto full = dir_ / path;
    if (content.empty()) {
      fs::remove(full);
      git({"rm", "--quiet", "--cached", "--ignore-unmatch", path});
      continue;
    }
    fs::create_directories(full.parent_path());
    write_file(full, content);
    git({"add", path});
  }
  ++commits_;
  const auto date = "2020-01-01T00:00:" + std::string(commits_ < 10 ? "0" : "") +
                    std::to_string(commits_) + "Z";
  ::setenv("GIT_AUTHOR_DATE", date.c_str(), 1);
  ::setenv("GIT_COMMITTER_DATE", date.c_str(), 1);
  git({"commit", "--quiet", "--allow-empty", "-m", message});
  return std::string(trim(git({"rev-parse", "HEAD"})));
}

SourceMethod undo_before_method() { return fixture_method("undo/undo_before.cs"); }
SourceMethod undo_after_method() { return fixture_method("undo/undo_after.cs"); }

MethodPair instruction_pair(const std::string& stem, const std::string& repo_id,
                            const std::string& commit_id) {
  return MethodPair{fixture_method("instructions/" + stem + "_before.cs"),
                    fixture_method("instructions/" + stem + "_after.cs"), repo_id, commit_id,
                    stem + ".cs"};
}

std::vector<std::string> instruction_stems() {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(fixture_path("instructions"))) {
    const auto name = entry.path().filename().string();
    const std::string suffix = "_before.cs";
    if (name.size() > suffix.size() && name.ends_with(suffix))
      out.push_back(name.substr(0, name.size() - suffix.size()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string to_crlf(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '\n') out += '\r';
    out += c;
  }
  return out;
}

}  // namespace perfix::testing
