#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xlv::cli {

enum ExitCode : int {
  kOk = 0,
  kPipelineError = 1,
  kResolverTransport = 2,
  kEmission = 3,
  kUsage = 4,
};

struct Options {
  std::string config;
  std::string project;
  bool offline = false;
  std::string format = "table";
};

int cmd_resolve_types(const Options& o, std::ostream& out, std::ostream& err);
int cmd_gen_mocks(const Options& o, std::ostream& out, std::ostream& err);
int cmd_validate(const Options& o, std::ostream& out, std::ostream& err);
int cmd_report(const Options& o, std::ostream& out, std::ostream& err);

/// Parses argv ("xlv <command> --config ... [--project ...] [--offline] [--format ...]") and dispatches.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace xlv::cli
