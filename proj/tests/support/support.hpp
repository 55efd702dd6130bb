#pragma once

#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "perfix/code_model.hpp"
#include "perfix/mining.hpp"

namespace perfix::testing {

namespace fs = std::filesystem;

fs::path source_dir();
fs::path fixture_path(const std::string& relative);
fs::path golden_path(const std::string& relative);
std::string slurp(const fs::path& path);

/// Text of the first method in a fixture file.
std::string fixture_method_text(const std::string& relative);
SourceMethod fixture_method(const std::string& relative);

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

/// Scratch git repository with a fixed author and dates so commit ids are
/// stable from run to run.
class GitRepo {
 public:
  explicit GitRepo(fs::path dir);

  const fs::path& path() const { return dir_; }
  /// Writes the files (path -> content, empty content deletes) and commits.
  std::string commit(const std::map<std::string, std::string>& files, const std::string& message);
  std::string git(const std::vector<std::string>& args) const;

 private:
  fs::path dir_;
  int commits_ = 0;
};

/// The slow and fixed UndoAction methods.
SourceMethod undo_before_method();
SourceMethod undo_after_method();
MethodPair instruction_pair(const std::string& stem, const std::string& repo_id = "fixture",
                            const std::string& commit_id = "c0");
/// Stems of tests/fixtures/instructions/*_before.cs, sorted.
std::vector<std::string> instruction_stems();

/// CRLF version of a text.
std::string to_crlf(const std::string& text);

}  // namespace perfix::testing
