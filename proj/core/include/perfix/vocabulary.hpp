#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "perfix/code_model.hpp"

namespace perfix {

/// Identifiers and literals seen in at least `min_projects` distinct projects.
/// Membership is exact string match.
class CommonVocabulary {
 public:
  using Counts = std::map<std::string, int, std::less<>>;

  CommonVocabulary() = default;
  CommonVocabulary(Counts identifiers, Counts literals, int min_projects);

  bool has_identifier(std::string_view text) const { return identifiers_.contains(text); }
  bool has_literal(std::string_view text) const { return literals_.contains(text); }

  const Counts& identifiers() const noexcept { return identifiers_; }
  const Counts& literals() const noexcept { return literals_; }
  int min_projects() const noexcept { return min_projects_; }

  std::string serialize() const;
  static CommonVocabulary parse(std::string_view text);

  /// sha256 of serialize().
  std::string hash() const;

  /// Copy with extra identifiers added (count = min_projects).
  CommonVocabulary with_identifiers(const std::vector<std::string>& extra) const;

  bool operator==(const CommonVocabulary&) const = default;

 private:
  Counts identifiers_;
  Counts literals_;
  int min_projects_ = 2;
};

struct CorpusFile {
  std::string project_id;
  SourceFilePtr file;
};

/// Throws InsufficientCorpus when fewer than min_projects projects are given,
/// and UsageError when min_projects < 2.
CommonVocabulary build_vocabulary(const std::vector<CorpusFile>& corpus, int min_projects = 2);

/// Bundled list of .NET library names. Counts are nominal.
const CommonVocabulary& default_vocabulary();
CommonVocabulary load_default_vocabulary();

void save_vocabulary(const CommonVocabulary& vocab, const std::filesystem::path& path);
CommonVocabulary load_vocabulary(const std::filesystem::path& path);

}  // namespace perfix
