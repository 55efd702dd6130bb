#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace perfix {

/// Process exit codes used by the command line tool. Library errors carry the
/// category they map to so callers never need to switch on concrete types.
enum class ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kInput = 3,
  kBackend = 4,
  kPatternNotFound = 5,
};

class Error : public std::runtime_error {
 public:
  Error(const std::string& what, ExitCode code) : std::runtime_error(what), code_(code) {}

  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

#define PERFIX_DEFINE_ERROR(Name, Code)                                          \
  class Name : public Error {                                                    \
   public:                                                                       \
    explicit Name(const std::string& what) : Error(#Name ": " + what, Code) {}   \
  };

// code-model
PERFIX_DEFINE_ERROR(ParseError, ExitCode::kInput)
// abstraction
PERFIX_DEFINE_ERROR(InsufficientCorpus, ExitCode::kInput)
// mining
PERFIX_DEFINE_ERROR(RepoAccessError, ExitCode::kInput)
PERFIX_DEFINE_ERROR(NoDifference, ExitCode::kInput)
// knowledge-base
PERFIX_DEFINE_ERROR(EmptyChange, ExitCode::kInput)
PERFIX_DEFINE_ERROR(VersionMismatch, ExitCode::kInput)
// retrieval
PERFIX_DEFINE_ERROR(PatternNotFound, ExitCode::kPatternNotFound)
// prompting
PERFIX_DEFINE_ERROR(CommentCollision, ExitCode::kInput)
PERFIX_DEFINE_ERROR(NoHotspotIdentifier, ExitCode::kInput)
// generation
PERFIX_DEFINE_ERROR(BackendUnavailable, ExitCode::kBackend)
PERFIX_DEFINE_ERROR(UnbalancedCompletion, ExitCode::kInput)
PERFIX_DEFINE_ERROR(NoCommentClose, ExitCode::kInput)
PERFIX_DEFINE_ERROR(NoMethodFound, ExitCode::kInput)
// evaluation
PERFIX_DEFINE_ERROR(EmptySuggestionSet, ExitCode::kInput)
// cli
PERFIX_DEFINE_ERROR(UsageError, ExitCode::kUsage)

#undef PERFIX_DEFINE_ERROR

/// I/O failure. When the failure is a malformed or truncated file, `offset`
/// holds the byte position at which reading stopped.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what, std::optional<std::uint64_t> offset = std::nullopt)
      : Error("IoError: " + what + (offset ? " (at byte " + std::to_string(*offset) + ")" : ""),
              ExitCode::kInput),
        offset_(offset) {}

  std::optional<std::uint64_t> offset() const noexcept { return offset_; }

 private:
  std::optional<std::uint64_t> offset_;
};

}  // namespace perfix
