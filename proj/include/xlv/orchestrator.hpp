#pragma once

// Pipeline driver: fragment scheduling, the translate / syntax-check / mock-test
// repair loop, classification of translated-test results and report assembly.

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "xlv/config.hpp"
#include "xlv/mockgen.hpp"
#include "xlv/project_schema.hpp"
#include "xlv/typeres.hpp"

namespace xlv::orchestrator {

// ---- scheduling -----------------------------------------------------------

struct CallGraph {
  std::set<std::string> nodes;
  std::set<std::pair<std::string, std::string>> edges;  // caller -> callee

  /// Non-test method fragments and the callee edges between them.
  static CallGraph from_schema(const ProjectSchema& schema);
};

/// Edges closing a cycle under a depth-first search that visits roots and
/// successors in lexicographic order.
std::set<std::pair<std::string, std::string>> back_edges(const CallGraph& g);

/// Reverse topological order of `g` without its back edges: callees first.
std::vector<std::string> build_order(const CallGraph& g);

// ---- validation -----------------------------------------------------------

enum class TestStatus { pass, fail_assert, fail_runtime, skipped_nondet };
enum class MockClass { NM, MS, MF };

std::string_view to_string(TestStatus s);
std::string_view to_string(MockClass c);
std::optional<TestStatus> parse_test_status(std::string_view text);
std::optional<MockClass> parse_mock_class(std::string_view text);

struct TestDetail {
  std::string test_id;
  TestStatus status = TestStatus::pass;
  std::string message;
  std::vector<std::string> failed_checks;  // subTest labels, e.g. "args[1]" or "result"
};

struct ValidationOutcome {
  std::string fragment_id;
  MockClass mock_class = MockClass::NM;
  std::vector<TestDetail> tests;
  int attempts_used = 0;
  bool syntax_ok = false;
  std::string detail;
};

/// Target source for one fragment. Without text the committed translated
/// module is used as is.
struct Translation {
  std::optional<std::string> text;
};

struct TranslationRequest {
  const Fragment& fragment;
  std::vector<typeres::CtmEntry> types;
  std::vector<std::string> feedback;
  int attempt = 1;
};

class Translator {
 public:
  virtual ~Translator() = default;
  /// Throws TranslatorError when no translation can be produced.
  virtual Translation translate(const TranslationRequest& req) = 0;
};

/// Committed translations: <dir>/<sanitized fragment id>/attempt_<n>.py, using
/// the highest n not above the attempt. Fragments without files keep the module.
class FixtureTranslator : public Translator {
 public:
  explicit FixtureTranslator(std::optional<std::filesystem::path> dir);
  Translation translate(const TranslationRequest& req) override;

 private:
  std::optional<std::filesystem::path> dir_;
};

/// Chat-completions client. XLV_TRANSLATOR_URL, XLV_TRANSLATOR_MODEL, XLV_TRANSLATOR_KEY.
class RemoteTranslator : public Translator {
 public:
  RemoteTranslator(std::string url, std::string model, std::string key, int timeout_seconds = 120);
  static RemoteTranslator from_env();
  Translation translate(const TranslationRequest& req) override;

 private:
  std::string url_, model_, key_;
  int timeout_seconds_;
};

/// Drops a surrounding markdown code fence, if any.
std::string strip_code_fence(const std::string& text);

class TestRunner {
 public:
  virtual ~TestRunner() = default;
  /// nullopt when the translation parses, else the error text.
  virtual std::optional<std::string> syntax_check(const Fragment& fragment, const Translation& t) = 0;
  /// Runs one emitted test in a fresh interpreter.
  virtual TestDetail run(const std::filesystem::path& test, const Fragment& fragment, const Translation& t) = 0;
};

struct PythonRunnerOptions {
  std::string python = "python3";
  std::filesystem::path translated_src_dir;
  std::vector<std::filesystem::path> runtime_path;
  std::filesystem::path scratch_dir;  // translation texts are written here
  int timeout_seconds = 60;
  const ProjectSchema* schema = nullptr;
};

class PythonTestRunner : public TestRunner {
 public:
  explicit PythonTestRunner(PythonRunnerOptions options);
  std::optional<std::string> syntax_check(const Fragment& fragment, const Translation& t) override;
  TestDetail run(const std::filesystem::path& test, const Fragment& fragment, const Translation& t) override;

  /// File the translation text is written to (stable per fragment).
  std::filesystem::path fragment_file(const Fragment& fragment) const;

 private:
  std::map<std::string, std::string> environment(const Fragment& fragment, const Translation& t) const;
  PythonRunnerOptions opt_;
};

/// Parses the "XLV-RESULT {...}" line and exit status of an emitted test run.
TestDetail interpret_test_run(const std::string& test_id, int exit_code, bool timed_out, const std::string& out,
                              const std::string& err);

struct ValidateOptions {
  int budget = 4;
  bool nondeterministic = false;  // allowlisted: tests are reported skipped
  std::vector<typeres::CtmEntry> types;
};

ValidationOutcome validate_fragment(const Fragment& fragment, Translator& translator,
                                    const std::vector<std::filesystem::path>& tests, TestRunner& runner,
                                    const ValidateOptions& options);

// ---- classification and reporting -----------------------------------------

enum class TestBucket { NT, ATP, OTF, MTF, ATF };
enum class FailureKind { none, RE, AF };

struct TestClass {
  TestBucket bucket = TestBucket::NT;
  FailureKind dominant = FailureKind::none;
  bool operator==(const TestClass&) const = default;
};

std::string_view to_string(TestBucket b);
std::string_view to_string(FailureKind k);

/// Results of the compilable translated tests covering one fragment.
/// Statuses are pass, fail_assert or fail_runtime.
TestClass classify_tests(const std::vector<TestStatus>& results);

/// Translated source-test results: {"tests": [{"id", "status", "covers": [fragment ids]}]}
/// with status pass | fail_assert | fail_runtime | not_compilable.
struct TranslatedTestResults {
  std::map<std::string, std::vector<TestStatus>> by_fragment;
  std::size_t executed = 0;
  std::size_t passed = 0;

  static TranslatedTestResults from_json(const Json& doc);
};

struct Report {
  std::string project;
  std::size_t amf = 0;
  double syntax_check = 0, nm = 0, ms = 0, mf = 0;
  double nt = 0, atp = 0;
  double otf = 0, otf_re = 0, otf_af = 0;
  double mtf = 0, mtf_re = 0, mtf_af = 0;
  double atf = 0, atf_re = 0, atf_af = 0;
  double tpr = 0;
};

double round2(double value);
/// Test pass rate: passed executions over executed runs, in percent.
double test_pass_rate(std::size_t passed, std::size_t executed);

/// `classes` must hold one entry per outcome (same fragment order).
Report compute_report(const std::string& project, const std::vector<ValidationOutcome>& outcomes,
                      const std::vector<TestClass>& classes, std::size_t tests_passed, std::size_t tests_executed);

Json to_json(const Report& r);
Report report_from_json(const Json& node);
Json to_json(const ValidationOutcome& o);

std::string table_header();
/// Tab-separated rows, header first.
std::string render_table(const std::vector<Report>& reports);
/// {"projects": [...]}, canonical text.
std::string render_document(const std::vector<Report>& reports);

// ---- pipeline -------------------------------------------------------------

struct GenStats {
  std::size_t traces = 0;
  std::size_t invocations = 0;
  std::size_t emitted = 0;
  std::vector<std::string> errors;
};

/// Emits one test per focal invocation of every trace under the project's
/// trace directory into <out>/<project>/mock_tests and writes an index
/// (<out>/<project>/mock_index.json) from fragment id to test files.
GenStats generate_mock_tests(const Config& cfg, const ProjectConfig& project, const ProjectSchema& schema,
                             const typeres::ContextTypeMap& ctm);

/// fragment id -> test files, from the index written by generate_mock_tests.
std::map<std::string, std::vector<std::filesystem::path>> load_mock_index(const Config& cfg,
                                                                          const ProjectConfig& project);

struct ProjectRun {
  std::vector<ValidationOutcome> outcomes;  // build order
  Report report;
};

ProjectRun validate_project(const Config& cfg, const ProjectConfig& project, const ProjectSchema& schema,
                            const typeres::ContextTypeMap& ctm, Translator& translator);

}  // namespace xlv::orchestrator
