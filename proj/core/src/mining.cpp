#include "perfix/mining.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <tuple>

#include "perfix/errors.hpp"
#include "perfix/lexer.hpp"
#include "perfix/process.hpp"
#include "perfix/util.hpp"

namespace perfix {
namespace {

using json = nlohmann::ordered_json;

ProcessResult git(const std::filesystem::path& repo, std::vector<std::string> args) {
  args.insert(args.begin(), {"git", "-c", "core.quotepath=off"});
  return run_process(args, repo);
}

std::string git_checked(const std::filesystem::path& repo, const std::string& repo_id,
                        std::vector<std::string> args) {
  auto r = git(repo, std::move(args));
  if (r.exit_code != 0) {
    throw RepoAccessError(repo_id + " (" + repo.string() + "): " + std::string(trim(r.err)));
  }
  return std::move(r.out);
}

bool has_extension(std::string_view path, const std::vector<std::string>& extensions) {
  return std::any_of(extensions.begin(), extensions.end(), [&](const std::string& ext) {
    return path.size() >= ext.size() && to_lower(path.substr(path.size() - ext.size())) == to_lower(ext);
  });
}

bool is_url(std::string_view location) {
  return location.find("://") != std::string_view::npos || location.starts_with("git@");
}

using PairKey = std::tuple<std::string, std::string, int>;

PairKey key_of(const SourceMethod& m) { return {m.containing_type, m.name, m.arity}; }

}  // namespace

bool is_perf_title(std::string_view title, const MiningFilters& filters) {
  const auto t = trim(title);
  return std::any_of(filters.title_prefixes.begin(), filters.title_prefixes.end(),
                     [&](const std::string& p) { return starts_with_icase(t, p); });
}

std::vector<PerfCommit> select_perf_commits(const std::filesystem::path& repo,
                                            const std::string& repo_id,
                                            const MiningFilters& filters,
                                            std::vector<SkipDiagnostic>* skipped) {
  std::error_code ec;
  if (!std::filesystem::is_directory(repo, ec)) {
    throw RepoAccessError(repo_id + ": not a directory: " + repo.string());
  }
  git_checked(repo, repo_id, {"rev-parse", "--git-dir"});
  const auto log = git_checked(repo, repo_id,
                               {"log", "--first-parent", "--reverse",
                                "--format=%H%x1f%P%x1f%s%x1e", filters.ref, "--"});

  std::vector<PerfCommit> commits;
  for (auto record : split(log, '\x1e')) {
    record = trim(record);
    if (record.empty()) continue;
    const auto fields = split(record, '\x1f');
    if (fields.size() < 3) continue;
    const std::string commit_id(fields[0]);
    const auto parents = split(trim(fields[1]), ' ');
    const std::string title(trim(fields[2]));
    if (!is_perf_title(title, filters)) continue;
    if (parents.empty() || parents.front().empty()) continue;  // root commit: nothing modified
    const std::string parent(parents.front());

    PerfCommit commit{repo_id, commit_id, title, {}};
    const auto names = git_checked(repo, repo_id,
                                   {"diff-tree", "-r", "--no-renames", "--diff-filter=M",
                                    "--name-only", "-z", parent, commit_id});
    for (const auto name : split(names, '\0')) {
      if (name.empty() || !has_extension(name, filters.extensions)) continue;
      const std::string path(name);
      auto skip = [&](const std::string& reason) {
        spdlog::warn("skip {} {} {}: {}", repo_id, commit_id.substr(0, 12), path, reason);
        if (skipped) skipped->push_back({repo_id, commit_id, path, reason});
      };
      try {
        auto before = git_checked(repo, repo_id, {"cat-file", "blob", parent + ":" + path});
        auto after = git_checked(repo, repo_id, {"cat-file", "blob", commit_id + ":" + path});
        commit.changeset.push_back({path, parse_file(path, std::move(before), filters.parse),
                                    parse_file(path, std::move(after), filters.parse)});
      } catch (const ParseError& e) {
        skip(e.what());
      } catch (const RepoAccessError& e) {
        skip(e.what());
      }
    }
    commits.push_back(std::move(commit));
  }
  return commits;
}

std::vector<MethodPair> pair_methods(const PerfCommit& commit) {
  std::vector<const FileChange*> files;
  for (const auto& change : commit.changeset) files.push_back(&change);
  std::stable_sort(files.begin(), files.end(),
                   [](const FileChange* a, const FileChange* b) { return a->path < b->path; });

  std::vector<MethodPair> pairs;
  for (const auto* change : files) {
    if (!change->before || !change->after) continue;
    auto before = extract_methods(change->before);
    auto after = extract_methods(change->after);
    std::map<PairKey, std::vector<std::size_t>> after_by_key;
    for (std::size_t i = 0; i < after.size(); ++i) after_by_key[key_of(after[i])].push_back(i);
    std::map<PairKey, std::size_t> seen;
    for (auto& m : before) {
      const auto key = key_of(m);
      const auto occurrence = seen[key]++;
      const auto it = after_by_key.find(key);
      if (it == after_by_key.end() || occurrence >= it->second.size()) continue;
      auto& counterpart = after[it->second[occurrence]];
      if (normalize_code(m.text()) == normalize_code(counterpart.text())) continue;
      pairs.push_back(MethodPair{m, counterpart, commit.repo_id, commit.commit_id, change->path});
    }
  }
  return pairs;
}

std::vector<Statement> diff_removed_statements(const MethodPair& pair) {
  std::set<std::string_view> after_texts;
  for (const auto& s : pair.after.statements) after_texts.insert(s.text);
  std::set<std::string_view> emitted;
  std::vector<Statement> out;
  for (const auto& s : pair.before.statements) {
    if (after_texts.contains(s.text) || !emitted.insert(s.text).second) continue;
    out.push_back(s);
  }
  return out;
}

std::size_t localize_index(const std::vector<Statement>& before,
                           const std::vector<Statement>& after) {
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (i >= after.size() || before[i].text != after[i].text) return i;
  }
  throw NoDifference("every before-statement matches the after-statement at the same index");
}

LocalizedBug localize_bug(const MethodPair& pair) {
  const auto index = localize_index(pair.before.statements, pair.after.statements);
  return LocalizedBug{pair, pair.before.statements[index], index};
}

MinedRecord to_record(const LocalizedBug& bug) {
  return MinedRecord{bug.pair.repo_id,
                     bug.pair.commit_id,
                     bug.pair.file,
                     bug.pair.before.name,
                     std::string(bug.pair.before.text()),
                     std::string(bug.pair.after.text()),
                     bug.buggy_line.text,
                     bug.line_index};
}

MethodPair to_pair(const MinedRecord& record) {
  return MethodPair{parse_method_text(record.before_text), parse_method_text(record.after_text),
                    record.repo_id, record.commit_id, record.file};
}

std::string record_to_json(const MinedRecord& r) {
  json j;
  j["repo_id"] = r.repo_id;
  j["commit_id"] = r.commit_id;
  j["file"] = r.file;
  j["method_name"] = r.method_name;
  j["before_text"] = r.before_text;
  j["after_text"] = r.after_text;
  j["buggy_line_text"] = r.buggy_line_text;
  j["buggy_line_index"] = r.buggy_line_index;
  return j.dump();
}

MinedRecord record_from_json(std::string_view line) {
  try {
    const auto j = json::parse(line);
    MinedRecord r;
    r.repo_id = j.at("repo_id").get<std::string>();
    r.commit_id = j.at("commit_id").get<std::string>();
    r.file = j.value("file", std::string());
    r.method_name = j.value("method_name", std::string());
    r.before_text = j.at("before_text").get<std::string>();
    r.after_text = j.at("after_text").get<std::string>();
    r.buggy_line_text = j.value("buggy_line_text", std::string());
    r.buggy_line_index = j.value("buggy_line_index", std::size_t{0});
    return r;
  } catch (const json::exception& e) {
    throw IoError(std::string("bad pair record: ") + e.what());
  }
}

std::vector<ManifestEntry> parse_manifest(std::string_view text) {
  std::vector<ManifestEntry> out;
  std::size_t line_no = 0;
  for (const auto raw : split(text, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw IoError("manifest line " + std::to_string(line_no) + ": expected repo_id<TAB>location");
    }
    out.push_back({std::string(trim(line.substr(0, tab))), std::string(trim(line.substr(tab + 1)))});
  }
  return out;
}

std::filesystem::path resolve_repo(const ManifestEntry& entry, const std::filesystem::path& base,
                                   const std::filesystem::path& cache_dir) {
  if (!is_url(entry.location)) {
    std::filesystem::path p(entry.location);
    return p.is_absolute() ? p : base / p;
  }
  const auto target = cache_dir / entry.repo_id;
  std::error_code ec;
  if (std::filesystem::exists(target / ".git", ec) || std::filesystem::exists(target / "HEAD", ec)) {
    const auto r = git(target, {"fetch", "--quiet", "origin"});
    if (r.exit_code != 0) spdlog::warn("fetch failed for {}: {}", entry.repo_id, trim(r.err));
    return target;
  }
  std::filesystem::create_directories(cache_dir, ec);
  const auto r = run_process({"git", "clone", "--quiet", entry.location, target.string()});
  if (r.exit_code != 0) {
    throw RepoAccessError(entry.repo_id + ": clone of " + entry.location + " failed: " +
                          std::string(trim(r.err)));
  }
  return target;
}

}  // namespace perfix
