#pragma once

// Shared helpers for the C++ test binaries: fixture locations, a prepared
// pipeline output directory and the embedded interpreter setup.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "xlv/config.hpp"
#include "xlv/project_schema.hpp"
#include "xlv/trace_model.hpp"

namespace xlv::testsupport {

namespace fs = std::filesystem;

fs::path source_dir();
fs::path binary_dir();
fs::path fixture_dir();  // the cli_mini project
fs::path python_package_dir();

/// Every committed *.trace file, sorted.
std::vector<fs::path> trace_files();
ProjectSchema fixture_schema();

/// Empty scratch directory under the build tree.
fs::path scratch(const std::string& name);

/// Writes a config for the fixture project with its output under `out_dir`
/// and returns its path. `translator_dir` selects committed translations.
fs::path write_config(const fs::path& out_dir, const std::optional<fs::path>& translator_dir = std::nullopt);

/// Config plus a resolved type map and emitted mock tests, produced through the CLI.
struct Prepared {
  fs::path config_path;
  Config config;
};
Prepared prepare_pipeline(const std::string& name, const std::optional<fs::path>& translator_dir = std::nullopt);

/// Puts the translated fixture sources and the built package on sys.path.
/// Requires a running interpreter.
void extend_sys_path();

}  // namespace xlv::testsupport
