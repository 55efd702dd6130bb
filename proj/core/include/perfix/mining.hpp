#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "perfix/code_model.hpp"

namespace perfix {

struct FileChange {
  std::string path;
  SourceFilePtr before;
  SourceFilePtr after;
};

struct PerfCommit {
  std::string repo_id;
  std::string commit_id;
  std::string title;
  std::vector<FileChange> changeset;
};

struct MiningFilters {
  std::vector<std::string> title_prefixes = {"PERF:", "[PERF]"};
  std::vector<std::string> extensions = {".cs"};
  std::string ref = "HEAD";
  ParseOptions parse;
};

struct SkipDiagnostic {
  std::string repo_id;
  std::string commit_id;
  std::string path;
  std::string reason;
};

/// Case-insensitive prefix test after trimming.
bool is_perf_title(std::string_view title, const MiningFilters& filters = {});

/// First-parent history of `filters.ref`, oldest first. Throws RepoAccessError.
std::vector<PerfCommit> select_perf_commits(const std::filesystem::path& repo,
                                            const std::string& repo_id,
                                            const MiningFilters& filters = {},
                                            std::vector<SkipDiagnostic>* skipped = nullptr);

struct MethodPair {
  SourceMethod before;
  SourceMethod after;
  std::string repo_id;
  std::string commit_id;
  std::string file;
};

/// Pairs methods by (containing type, name, arity); duplicates pair by
/// occurrence. Pairs whose texts are equal up to whitespace and comments are
/// dropped. Output is ordered by file path, then by position in the file.
std::vector<MethodPair> pair_methods(const PerfCommit& commit);

/// Before-statements whose text does not occur in the after method. Distinct
/// by text, in source order.
std::vector<Statement> diff_removed_statements(const MethodPair& pair);

struct LocalizedBug {
  MethodPair pair;
  Statement buggy_line;
  std::size_t line_index = 0;
};

/// Index of the first before-statement that differs from the after-statement
/// at the same index. Throws NoDifference.
std::size_t localize_index(const std::vector<Statement>& before,
                           const std::vector<Statement>& after);
LocalizedBug localize_bug(const MethodPair& pair);

/// One JSON Lines record of the `mine` output.
struct MinedRecord {
  std::string repo_id;
  std::string commit_id;
  std::string file;
  std::string method_name;
  std::string before_text;
  std::string after_text;
  std::string buggy_line_text;
  std::size_t buggy_line_index = 0;

  bool operator==(const MinedRecord&) const = default;
};

MinedRecord to_record(const LocalizedBug& bug);

/// Re-parses the stored method texts. Throws ParseError.
MethodPair to_pair(const MinedRecord& record);

std::string record_to_json(const MinedRecord& record);
/// Throws IoError.
MinedRecord record_from_json(std::string_view line);

struct ManifestEntry {
  std::string repo_id;
  std::string location;
};

/// `repo_id<TAB>path-or-URL` per line; blank lines and `#` comments ignored.
std::vector<ManifestEntry> parse_manifest(std::string_view text);

/// Local paths are returned as is (relative to `base`); URLs are cloned or
/// fetched into `cache_dir/<repo_id>`. Throws RepoAccessError.
std::filesystem::path resolve_repo(const ManifestEntry& entry, const std::filesystem::path& base,
                                   const std::filesystem::path& cache_dir);

}  // namespace perfix
