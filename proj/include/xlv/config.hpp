#pragma once

// Pipeline configuration file. Relative paths are resolved against the
// directory holding the config file.

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xlv/equality_config.hpp"
#include "xlv/trace_json.hpp"

namespace xlv {

struct ProjectConfig {
  std::string name;
  std::filesystem::path source_root;
  std::filesystem::path schema;
  std::filesystem::path trace_dir;
  std::filesystem::path translated_src_dir;
  std::optional<std::filesystem::path> test_results;  // translated source-test outcomes
};

struct ResolverConfig {
  std::string kind = "rules";  // rules | remote
  std::optional<std::filesystem::path> rules;
};

struct DocsConfig {
  std::filesystem::path cache_dir;
  std::optional<std::filesystem::path> root;  // offline documentation tree
  std::string url_pattern;
};

struct TranslatorConfig {
  std::string kind = "fixture";  // fixture | remote
  std::optional<std::filesystem::path> dir;
};

struct Config {
  std::filesystem::path out_dir;
  int budget = 4;
  std::string python = "python3";
  int test_timeout_seconds = 60;
  std::vector<std::filesystem::path> runtime_path;  // extra PYTHONPATH entries for emitted tests
  EqualityConfig equality;
  std::set<std::string> nondet_allowlist;  // fragment ids
  ResolverConfig resolver;
  DocsConfig docs;
  TranslatorConfig translator;
  std::vector<ProjectConfig> projects;

  /// Throws ConfigError on unreadable files, bad JSON or bad values.
  static Config load(const std::filesystem::path& path);
  static Config from_json(const Json& doc, const std::filesystem::path& base_dir);

  /// Projects selected by `filter` (all when empty). Throws ConfigError for an unknown name.
  std::vector<const ProjectConfig*> select(const std::string& filter) const;

  /// Throws ConfigError naming the first configured input path that does not exist.
  void check_paths(const std::vector<const ProjectConfig*>& projects) const;

  std::filesystem::path ctm_dir() const { return out_dir / "ctm"; }
  std::filesystem::path project_out(const std::string& project) const { return out_dir / project; }
};

}  // namespace xlv
