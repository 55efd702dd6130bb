#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace perfix {

struct ProcessResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

/// Runs argv[0] (looked up on PATH) without a shell. Throws Error when the
/// process cannot be started.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::filesystem::path& cwd = {});

}  // namespace perfix
