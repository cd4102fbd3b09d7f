#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace xlv {

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string out;
  std::string err;
};

struct ProcessOptions {
  std::string stdin_data;
  std::chrono::seconds timeout{60};
  std::map<std::string, std::string> env;  // added to / overriding the inherited environment
  std::filesystem::path cwd;
};

/// Runs argv[0] (searched on PATH when not a path) to completion. Output is
/// captured through temporary files so large outputs cannot deadlock. Throws
/// Error when the program cannot be started.
ProcessResult run_process(const std::vector<std::string>& argv, const ProcessOptions& options = {});

}  // namespace xlv
