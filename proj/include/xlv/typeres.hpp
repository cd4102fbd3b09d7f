#pragma once

// Context-aware type resolution: every library-type occurrence in a project is
// mapped to a target type by a pluggable resolver, checked in a target-runtime
// session, and otherwise filled from other projects or the universal base type.

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "xlv/project_schema.hpp"
#include "xlv/trace_json.hpp"

namespace xlv::typeres {

inline constexpr std::string_view kFallbackType = "object";
inline constexpr int kDefaultBudget = 4;

struct Site {
  std::string file;
  int line = 0;
  std::string symbol;
  auto operator<=>(const Site&) const = default;
};

struct TypeOccurrence {
  std::string project;
  std::string source_type;
  Site site;
  std::string context_code;

  /// "<file>:<line>:<symbol>#<source_type>", unique within a project.
  std::string key() const;
};

enum class Provenance { resolved, global, fallback_object };

std::string_view to_string(Provenance p);
std::optional<Provenance> parse_provenance(std::string_view text);

struct TypeMapping {
  std::string target_type;
  std::vector<std::string> target_imports;
  std::string reasoning;
  Provenance provenance = Provenance::fallback_object;
  bool validated = false;

  bool operator==(const TypeMapping&) const = default;
};

TypeMapping fallback_mapping();

// ---- resolver -------------------------------------------------------------

struct ResolverRequest {
  std::string source_type;
  std::string doc_text;
  std::string context_code;
  std::vector<std::string> feedback;  // validation errors of earlier attempts
};

struct Candidate {
  std::string target_type;
  std::vector<std::string> target_imports;
  std::string reasoning;
};

struct ResolverReply {
  std::optional<Candidate> candidate;
  std::string error;               // why there is no candidate
  bool transport_failure = false;  // endpoint unreachable / non-2xx

  static ResolverReply ok(Candidate c) { return {std::move(c), {}, false}; }
  static ResolverReply malformed(std::string why) { return {std::nullopt, std::move(why), false}; }
  static ResolverReply transport(std::string why) { return {std::nullopt, std::move(why), true}; }
};

class Resolver {
 public:
  virtual ~Resolver() = default;
  virtual ResolverReply request(const ResolverRequest& req) = 0;
};

struct ResolutionRule {
  std::string source_type;
  std::string context_pattern;  // ECMAScript regex searched in the context code; empty matches all
  std::string target_type;
  std::vector<std::string> imports;
  std::string reasoning;
};

/// Deterministic offline resolver: the first rule whose type matches and whose
/// context pattern occurs in the usage code wins.
class RuleTableResolver : public Resolver {
 public:
  explicit RuleTableResolver(std::vector<ResolutionRule> rules);
  static RuleTableResolver from_json(const Json& rules);

  ResolverReply request(const ResolverRequest& req) override;

 private:
  std::vector<ResolutionRule> rules_;
  std::vector<std::regex> patterns_;
};

/// Chat-completions style HTTP client.
class RemoteResolver : public Resolver {
 public:
  struct Settings {
    std::string url;
    std::string model;
    std::string key;
    std::string prompt_template;
    int timeout_seconds = 60;

    /// XLV_RESOLVER_URL, XLV_RESOLVER_MODEL, XLV_RESOLVER_KEY. Throws ConfigError when the URL is unset.
    static Settings from_env();
  };

  explicit RemoteResolver(Settings settings);
  ResolverReply request(const ResolverRequest& req) override;

 private:
  Settings settings_;
};

std::string default_prompt_template();
/// Fills {type}, {documentation}, {code} and {feedback} in `tmpl`.
std::string render_prompt(const std::string& tmpl, const ResolverRequest& req);
/// Extracts a candidate from model output text holding a JSON object.
ResolverReply parse_model_reply(const std::string& content);

// ---- validation -----------------------------------------------------------

class MappingValidator {
 public:
  virtual ~MappingValidator() = default;
  /// nullopt when valid, else a description fit to be fed back to the resolver.
  virtual std::optional<std::string> validate(const Candidate& candidate) = 0;
};

/// Checks imports and the type expression in a fresh interpreter process. Results are memoized.
class PythonMappingValidator : public MappingValidator {
 public:
  explicit PythonMappingValidator(std::string python = "python3");
  std::optional<std::string> validate(const Candidate& candidate) override;

 private:
  std::string python_;
  std::map<std::string, std::optional<std::string>> memo_;
};

// ---- documentation --------------------------------------------------------

class DocSource {
 public:
  virtual ~DocSource() = default;
  /// Documentation text, nullopt when none exists. Throws NetworkError on transport failure.
  virtual std::optional<std::string> fetch(const std::string& source_type) = 0;
};

/// Official API documentation pages. `url_pattern` may use {path} ("java/util/List"),
/// {type} ("java.util.List") and {simple} ("List").
class HttpDocSource : public DocSource {
 public:
  explicit HttpDocSource(std::string url_pattern = default_url_pattern());
  std::optional<std::string> fetch(const std::string& source_type) override;
  static std::string default_url_pattern();

 private:
  std::string url_pattern_;
};

/// Offline backend: <root>/<type>.txt, or <root>/<type>.html reduced to text.
class FileTreeDocSource : public DocSource {
 public:
  explicit FileTreeDocSource(std::filesystem::path root);
  std::optional<std::string> fetch(const std::string& source_type) override;

 private:
  std::filesystem::path root_;
};

/// Reduces an HTML page to whitespace-normalized text.
std::string html_to_text(const std::string& html);

/// On-disk cache keyed by type. A warm entry never touches `source`; a cold
/// lookup returns "" in offline mode or when there is no source.
std::string fetch_doc(const std::string& source_type, const std::filesystem::path& cache_dir, DocSource* source,
                      bool offline);

// ---- context type map -----------------------------------------------------

struct CtmEntry {
  Site site;
  std::string source_type;
  TypeMapping mapping;

  std::string key() const;
};

class ContextTypeMap {
 public:
  void put(const std::string& project, CtmEntry entry);
  const CtmEntry* find(const std::string& project, const std::string& key) const;
  const CtmEntry* find(const TypeOccurrence& occ) const { return find(occ.project, occ.key()); }
  /// Entry for a declared type at a fragment site, if any.
  const CtmEntry* find_site(const std::string& project, const std::string& file, int line,
                            const std::string& symbol, const std::string& source_type) const;

  std::vector<std::string> projects() const;
  const std::map<std::string, CtmEntry>& entries(const std::string& project) const;
  std::size_t size() const;

  /// Every (project, entry) for a source type, in project then key order.
  std::vector<std::pair<std::string, const CtmEntry*>> by_type(const std::string& source_type) const;

  Json project_to_json(const std::string& project) const;
  void load_project_json(const Json& doc);

  /// One document per project: <dir>/<project>.json.
  void save(const std::filesystem::path& dir) const;
  void save_project(const std::filesystem::path& dir, const std::string& project) const;
  bool load_project_file(const std::filesystem::path& path);

 private:
  std::map<std::string, std::map<std::string, CtmEntry>> entries_;
};

// ---- pipeline -------------------------------------------------------------

std::vector<TypeOccurrence> collect_types(const ProjectSchema& schema);

struct ResolveOutcome {
  std::optional<TypeMapping> mapping;
  int attempts = 0;
  int transport_failures = 0;
  std::string last_error;
};

ResolveOutcome resolve_type(const TypeOccurrence& occ, const std::string& doc, Resolver& resolver,
                            MappingValidator& validator, int budget = kDefaultBudget);

/// Most frequent resolved mapping for `source_type` in projects other than
/// `exclude_project`; ties go to the lexicographically smallest target type.
std::optional<TypeMapping> resolve_globally(const std::string& source_type, const ContextTypeMap& ctm,
                                            const std::string& exclude_project = {});

struct BuildOptions {
  int budget = kDefaultBudget;
  bool offline = false;
  std::filesystem::path doc_cache_dir;
  DocSource* docs = nullptr;
  /// Called with "resolve", "global" or "fallback" as each stage is entered.
  std::function<void(const TypeOccurrence&, std::string_view stage)> observer;
};

struct BuildStats {
  std::size_t occurrences = 0;
  std::size_t resolved = 0;
  std::size_t global = 0;
  std::size_t fallback = 0;
  std::size_t transport_failures = 0;
};

/// Resolves every occurrence of every project: first each occurrence on its
/// own, then unresolved ones from other projects, then the fallback type.
BuildStats build_ctm(const std::vector<ProjectSchema>& projects, Resolver& resolver, MappingValidator& validator,
                     const BuildOptions& options, ContextTypeMap& ctm);

}  // namespace xlv::typeres
