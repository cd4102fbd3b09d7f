#include "xlv/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <sstream>

#include "xlv/errors.hpp"
#include "xlv/http.hpp"
#include "xlv/process.hpp"

namespace xlv::orchestrator {

namespace fs = std::filesystem;

// ---- scheduling -----------------------------------------------------------

CallGraph CallGraph::from_schema(const ProjectSchema& schema) {
  CallGraph g;
  for (const auto& f : schema.fragments) {
    if (f.kind == "method" && !f.is_test) g.nodes.insert(f.id);
  }
  for (const auto& f : schema.fragments) {
    if (!g.nodes.contains(f.id)) continue;
    for (const auto& callee : f.callees) {
      if (g.nodes.contains(callee)) g.edges.emplace(f.id, callee);
    }
  }
  return g;
}

namespace {

std::map<std::string, std::vector<std::string>> adjacency(const CallGraph& g) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& n : g.nodes) adj[n];
  for (const auto& [from, to] : g.edges) {
    adj[from].push_back(to);
    adj[to];
  }
  return adj;  // std::set iteration already yields sorted successor lists
}

// Iterative DFS; `on_back` sees cycle-closing edges, `on_finish` post-order nodes.
void dfs(const CallGraph& g, const std::function<void(const std::string&, const std::string&)>& on_back,
         const std::function<void(const std::string&)>& on_finish) {
  const auto adj = adjacency(g);
  enum class Color { white, gray, black };
  std::map<std::string, Color> color;
  for (const auto& [n, _] : adj) color[n] = Color::white;
  for (const auto& [root, _] : adj) {
    if (color[root] != Color::white) continue;
    std::vector<std::pair<std::string, std::size_t>> stack{{root, 0}};
    color[root] = Color::gray;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      const auto& succ = adj.at(node);
      if (next < succ.size()) {
        const std::string to = succ[next++];
        if (color[to] == Color::white) {
          color[to] = Color::gray;
          stack.emplace_back(to, 0);
        } else if (color[to] == Color::gray) {
          on_back(node, to);
        }
      } else {
        color[node] = Color::black;
        on_finish(node);
        stack.pop_back();
      }
    }
  }
}

}  // namespace

std::set<std::pair<std::string, std::string>> back_edges(const CallGraph& g) {
  std::set<std::pair<std::string, std::string>> out;
  dfs(g, [&](const std::string& a, const std::string& b) { out.emplace(a, b); }, [](const std::string&) {});
  return out;
}

std::vector<std::string> build_order(const CallGraph& g) {
  // Post-order of the same search places every tree, forward and cross edge's
  // callee before its caller; only back edges point the other way.
  std::vector<std::string> order;
  dfs(g, [](const std::string&, const std::string&) {}, [&](const std::string& n) { order.push_back(n); });
  return order;
}

// ---- enums ----------------------------------------------------------------

std::string_view to_string(TestStatus s) {
  switch (s) {
    case TestStatus::pass: return "pass";
    case TestStatus::fail_assert: return "fail_assert";
    case TestStatus::fail_runtime: return "fail_runtime";
    case TestStatus::skipped_nondet: return "skipped_nondet";
  }
  return "?";
}

std::string_view to_string(MockClass c) {
  switch (c) {
    case MockClass::NM: return "NM";
    case MockClass::MS: return "MS";
    case MockClass::MF: return "MF";
  }
  return "?";
}

std::optional<TestStatus> parse_test_status(std::string_view text) {
  for (auto s : {TestStatus::pass, TestStatus::fail_assert, TestStatus::fail_runtime, TestStatus::skipped_nondet}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

std::optional<MockClass> parse_mock_class(std::string_view text) {
  for (auto c : {MockClass::NM, MockClass::MS, MockClass::MF}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

std::string_view to_string(TestBucket b) {
  switch (b) {
    case TestBucket::NT: return "NT";
    case TestBucket::ATP: return "ATP";
    case TestBucket::OTF: return "OTF";
    case TestBucket::MTF: return "MTF";
    case TestBucket::ATF: return "ATF";
  }
  return "?";
}

std::string_view to_string(FailureKind k) {
  switch (k) {
    case FailureKind::none: return "none";
    case FailureKind::RE: return "RE";
    case FailureKind::AF: return "AF";
  }
  return "?";
}

// ---- translators ----------------------------------------------------------

FixtureTranslator::FixtureTranslator(std::optional<fs::path> dir) : dir_(std::move(dir)) {}

Translation FixtureTranslator::translate(const TranslationRequest& req) {
  if (!dir_) return {};
  const fs::path d = *dir_ / mockgen::sanitize(req.fragment.id);
  if (!fs::is_directory(d)) return {};
  for (int n = req.attempt; n >= 1; --n) {
    const fs::path file = d / ("attempt_" + std::to_string(n) + ".py");
    if (fs::exists(file)) return Translation{read_file(file)};
  }
  throw TranslatorError("no committed translation for " + req.fragment.id + " at attempt " +
                        std::to_string(req.attempt));
}

RemoteTranslator::RemoteTranslator(std::string url, std::string model, std::string key, int timeout_seconds)
    : url_(std::move(url)), model_(std::move(model)), key_(std::move(key)), timeout_seconds_(timeout_seconds) {}

RemoteTranslator RemoteTranslator::from_env() {
  const auto env = [](const char* name) {
    const char* v = std::getenv(name);
    return std::string(v ? v : "");
  };
  std::string url = env("XLV_TRANSLATOR_URL");
  if (url.empty()) throw ConfigError("XLV_TRANSLATOR_URL is not set");
  return RemoteTranslator(url, env("XLV_TRANSLATOR_MODEL"), env("XLV_TRANSLATOR_KEY"));
}

std::string strip_code_fence(const std::string& text) {
  const auto open = text.find("```");
  if (open == std::string::npos) return text;
  const auto body = text.find('\n', open);
  if (body == std::string::npos) return text;
  const auto close = text.find("```", body + 1);
  return text.substr(body + 1, (close == std::string::npos ? text.size() : close) - body - 1);
}

Translation RemoteTranslator::translate(const TranslationRequest& req) {
  std::ostringstream prompt;
  prompt << "Translate this Java method of class " << req.fragment.class_name << " to Python. The method becomes "
         << req.fragment.target_name << " of the translated class; reply with the Python definition only.\n\n"
         << req.fragment.code << "\n";
  if (!req.types.empty()) {
    prompt << "\nType mappings for this method:\n";
    for (const auto& t : req.types) {
      prompt << "- " << t.source_type << " (" << t.site.symbol << ") -> " << t.mapping.target_type;
      if (!t.mapping.reasoning.empty()) prompt << ": " << t.mapping.reasoning;
      prompt << "\n";
    }
  }
  for (const auto& f : req.feedback) prompt << "\nA previous attempt failed:\n" << f << "\n";

  Json body = Json::object();
  body["model"] = model_;
  body["temperature"] = 0;
  body["messages"] = Json::array({Json{{"role", "user"}, {"content", prompt.str()}}});
  std::map<std::string, std::string> headers;
  if (!key_.empty()) headers["Authorization"] = "Bearer " + key_;
  HttpResponse res;
  try {
    res = http_request(url_, body.dump(), headers, std::chrono::seconds(timeout_seconds_));
  } catch (const NetworkError& e) {
    throw TranslatorError(e.what());
  }
  if (res.status < 200 || res.status >= 300) {
    throw TranslatorError("translator endpoint returned HTTP " + std::to_string(res.status));
  }
  try {
    const Json doc = Json::parse(res.body);
    return Translation{strip_code_fence(doc.at("choices").at(0).at("message").at("content").get<std::string>())};
  } catch (const Json::exception& e) {
    throw TranslatorError(std::string("unreadable translator response: ") + e.what());
  }
}

// ---- test runner ----------------------------------------------------------

PythonTestRunner::PythonTestRunner(PythonRunnerOptions options) : opt_(std::move(options)) {}

fs::path PythonTestRunner::fragment_file(const Fragment& fragment) const {
  return opt_.scratch_dir / mockgen::sanitize(fragment.id) / "translation.py";
}

std::optional<std::string> PythonTestRunner::syntax_check(const Fragment& fragment, const Translation& t) {
  fs::path file;
  if (t.text) {
    file = fragment_file(fragment);
    write_file(file, *t.text);
  } else {
    const ClassInfo* cls = opt_.schema ? opt_.schema->find_class(fragment.class_name) : nullptr;
    if (!cls) return "class " + fragment.class_name + " has no translated module";
    std::string rel = cls->target_module;
    std::replace(rel.begin(), rel.end(), '.', '/');
    file = opt_.translated_src_dir / (rel + ".py");
    if (!fs::exists(file)) return "translated module missing: " + file.string();
  }
  static const char* kScript =
      "import ast, sys, textwrap\n"
      "path = sys.argv[1]\n"
      "with open(path, encoding='utf-8') as fh:\n"
      "    text = fh.read()\n"
      "try:\n"
      "    ast.parse(textwrap.dedent(text), path)\n"
      "except SyntaxError as exc:\n"
      "    sys.stderr.write('%s:%s: %s\\n' % (path, exc.lineno, exc.msg))\n"
      "    sys.exit(1)\n";
  ProcessOptions po;
  po.timeout = std::chrono::seconds(opt_.timeout_seconds);
  const auto r = run_process({opt_.python, "-c", kScript, file.string()}, po);
  if (r.exit_code == 0 && !r.timed_out) return std::nullopt;
  return r.err.empty() ? std::string("syntax check failed") : r.err;
}

std::map<std::string, std::string> PythonTestRunner::environment(const Fragment& fragment,
                                                                 const Translation& t) const {
  std::string path = opt_.translated_src_dir.string();
  for (const auto& p : opt_.runtime_path) path += ":" + p.string();
  std::map<std::string, std::string> env{{"PYTHONPATH", path}, {"PYTHONDONTWRITEBYTECODE", "1"}};
  env["XLV_FOCAL_SOURCE"] = t.text ? fragment_file(fragment).string() : "";
  return env;
}

TestDetail PythonTestRunner::run(const fs::path& test, const Fragment& fragment, const Translation& t) {
  ProcessOptions po;
  po.timeout = std::chrono::seconds(opt_.timeout_seconds);
  po.env = environment(fragment, t);
  const auto r = run_process({opt_.python, test.string()}, po);
  return interpret_test_run(test.string(), r.exit_code, r.timed_out, r.out, r.err);
}

TestDetail interpret_test_run(const std::string& test_id, int exit_code, bool timed_out, const std::string& out,
                              const std::string& err) {
  TestDetail d{test_id, TestStatus::fail_runtime, {}, {}};
  if (timed_out) {
    d.message = "timed out";
    return d;
  }
  static constexpr std::string_view kTag = "XLV-RESULT ";
  std::optional<Json> result;
  std::istringstream lines(out);
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind(kTag, 0) == 0) {
      try {
        result = Json::parse(line.substr(kTag.size()));
      } catch (const Json::parse_error&) {
      }
    }
  }
  if (result && result->is_object()) {
    const auto status = parse_test_status(result->value("status", ""));
    if (status) d.status = *status;
    d.message = result->value("message", "");
    if (result->contains("failed_checks") && (*result)["failed_checks"].is_array()) {
      for (const auto& c : (*result)["failed_checks"]) {
        if (c.is_string()) d.failed_checks.push_back(c.get<std::string>());
      }
    }
    if (d.status == TestStatus::pass && exit_code != 0) d.status = TestStatus::fail_runtime;
    return d;
  }
  d.message = "no result line (exit " + std::to_string(exit_code) + ")";
  if (!err.empty()) d.message += "\n" + (err.size() > 4000 ? err.substr(err.size() - 4000) : err);
  return d;
}

// ---- validation loop --------------------------------------------------------

ValidationOutcome validate_fragment(const Fragment& fragment, Translator& translator,
                                    const std::vector<fs::path>& tests, TestRunner& runner,
                                    const ValidateOptions& options) {
  ValidationOutcome out;
  out.fragment_id = fragment.id;
  std::vector<std::string> feedback;
  const int budget = std::max(1, options.budget);
  for (int attempt = 1; attempt <= budget; ++attempt) {
    out.attempts_used = attempt;
    Translation t;
    try {
      t = translator.translate(TranslationRequest{fragment, options.types, feedback, attempt});
    } catch (const TranslatorError& e) {
      out.mock_class = tests.empty() ? MockClass::NM : MockClass::MF;
      out.detail = std::string("translator error: ") + e.what();
      out.tests.clear();
      for (const auto& test : tests) out.tests.push_back({test.string(), TestStatus::fail_runtime, out.detail, {}});
      return out;
    }
    if (auto error = runner.syntax_check(fragment, t)) {
      out.syntax_ok = false;
      out.detail = *error;
      feedback.push_back(*error);
      continue;
    }
    out.syntax_ok = true;
    out.detail.clear();
    if (tests.empty()) {
      out.mock_class = MockClass::NM;
      out.tests.clear();
      return out;
    }
    out.tests.clear();
    const TestDetail* first_failure = nullptr;
    for (const auto& test : tests) {
      TestDetail d = runner.run(test, fragment, t);
      if (options.nondeterministic && d.status != TestStatus::pass) d.status = TestStatus::skipped_nondet;
      out.tests.push_back(std::move(d));
    }
    for (const auto& d : out.tests) {
      if (d.status == TestStatus::fail_assert || d.status == TestStatus::fail_runtime) {
        first_failure = &d;
        break;
      }
    }
    if (!first_failure) {
      out.mock_class = MockClass::MS;
      return out;
    }
    feedback.push_back(first_failure->test_id + "\n" + first_failure->message);
  }
  out.mock_class = tests.empty() ? MockClass::NM : MockClass::MF;
  if (!out.syntax_ok) {
    out.tests.clear();
    for (const auto& test : tests) {
      out.tests.push_back({test.string(), TestStatus::fail_runtime, "translation does not parse", {}});
    }
  }
  return out;
}

// ---- classification and reporting -----------------------------------------

TestClass classify_tests(const std::vector<TestStatus>& results) {
  if (results.empty()) return {TestBucket::NT, FailureKind::none};
  std::size_t re = 0, af = 0;
  for (auto s : results) {
    if (s == TestStatus::fail_runtime) ++re;
    if (s == TestStatus::fail_assert) ++af;
  }
  const std::size_t failed = re + af;
  if (failed == 0) return {TestBucket::ATP, FailureKind::none};
  const FailureKind dominant = af > re ? FailureKind::AF : FailureKind::RE;
  if (failed == results.size()) return {TestBucket::ATF, dominant};
  if (failed == 1) return {TestBucket::OTF, dominant};
  return {TestBucket::MTF, dominant};
}

TranslatedTestResults TranslatedTestResults::from_json(const Json& doc) {
  TranslatedTestResults r;
  if (!doc.is_object() || !doc.contains("tests") || !doc["tests"].is_array()) {
    throw ConfigError("test results must be {\"tests\": [...]}");
  }
  for (const auto& t : doc["tests"]) {
    const std::string status = t.value("status", "");
    if (status == "not_compilable") continue;
    const auto parsed = parse_test_status(status);
    if (!parsed || *parsed == TestStatus::skipped_nondet) {
      throw ConfigError("bad translated test status \"" + status + "\"");
    }
    ++r.executed;
    if (*parsed == TestStatus::pass) ++r.passed;
    for (const auto& id : t.value("covers", Json::array())) r.by_fragment[id.get<std::string>()].push_back(*parsed);
  }
  return r;
}

double round2(double value) { return std::round(value * 100.0) / 100.0; }

double test_pass_rate(std::size_t passed, std::size_t executed) {
  return executed == 0 ? 0.0 : round2(100.0 * static_cast<double>(passed) / static_cast<double>(executed));
}

Report compute_report(const std::string& project, const std::vector<ValidationOutcome>& outcomes,
                      const std::vector<TestClass>& classes, std::size_t tests_passed, std::size_t tests_executed) {
  if (classes.size() != outcomes.size()) throw Error("compute_report: one test class per outcome is required");
  Report r;
  r.project = project;
  r.amf = outcomes.size();
  r.tpr = test_pass_rate(tests_passed, tests_executed);
  if (r.amf == 0) return r;
  std::size_t syntax = 0;
  std::map<MockClass, std::size_t> mock;
  std::map<std::pair<TestBucket, FailureKind>, std::size_t> bucket;
  std::map<TestBucket, std::size_t> bucket_total;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].syntax_ok) ++syntax;
    ++mock[outcomes[i].mock_class];
    ++bucket[{classes[i].bucket, classes[i].dominant}];
    ++bucket_total[classes[i].bucket];
  }
  const auto pct = [&](std::size_t n) { return round2(100.0 * static_cast<double>(n) / static_cast<double>(r.amf)); };
  r.syntax_check = pct(syntax);
  r.nm = pct(mock[MockClass::NM]);
  r.ms = pct(mock[MockClass::MS]);
  r.mf = pct(mock[MockClass::MF]);
  r.nt = pct(bucket_total[TestBucket::NT]);
  r.atp = pct(bucket_total[TestBucket::ATP]);
  r.otf = pct(bucket_total[TestBucket::OTF]);
  r.otf_re = pct(bucket[{TestBucket::OTF, FailureKind::RE}]);
  r.otf_af = pct(bucket[{TestBucket::OTF, FailureKind::AF}]);
  r.mtf = pct(bucket_total[TestBucket::MTF]);
  r.mtf_re = pct(bucket[{TestBucket::MTF, FailureKind::RE}]);
  r.mtf_af = pct(bucket[{TestBucket::MTF, FailureKind::AF}]);
  r.atf = pct(bucket_total[TestBucket::ATF]);
  r.atf_re = pct(bucket[{TestBucket::ATF, FailureKind::RE}]);
  r.atf_af = pct(bucket[{TestBucket::ATF, FailureKind::AF}]);
  return r;
}

namespace {

struct Column {
  const char* name;
  double Report::*field;
};

constexpr std::array<Column, 16> kColumns{{
    {"SyntaxCheck", &Report::syntax_check},
    {"NM", &Report::nm},
    {"MS", &Report::ms},
    {"MF", &Report::mf},
    {"NT", &Report::nt},
    {"ATP", &Report::atp},
    {"OTF_O", &Report::otf},
    {"OTF_RE", &Report::otf_re},
    {"OTF_AF", &Report::otf_af},
    {"MTF_O", &Report::mtf},
    {"MTF_RE", &Report::mtf_re},
    {"MTF_AF", &Report::mtf_af},
    {"ATF_O", &Report::atf},
    {"ATF_RE", &Report::atf_re},
    {"ATF_AF", &Report::atf_af},
    {"TPR", &Report::tpr},
}};

std::string fixed2(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << v;
  return s.str();
}

}  // namespace

Json to_json(const Report& r) {
  Json out = Json::object();
  out["Subject"] = r.project;
  out["AMF"] = r.amf;
  for (const auto& c : kColumns) out[c.name] = r.*(c.field);
  return out;
}

Report report_from_json(const Json& node) {
  Report r;
  try {
    r.project = node.at("Subject").get<std::string>();
    r.amf = node.at("AMF").get<std::size_t>();
    for (const auto& c : kColumns) r.*(c.field) = node.at(c.name).get<double>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed report entry: ") + e.what());
  }
  return r;
}

Json to_json(const ValidationOutcome& o) {
  Json out = Json::object();
  out["fragment_id"] = o.fragment_id;
  out["mock_class"] = to_string(o.mock_class);
  out["attempts_used"] = o.attempts_used;
  out["syntax_ok"] = o.syntax_ok;
  out["detail"] = o.detail;
  Json tests = Json::array();
  for (const auto& t : o.tests) {
    tests.push_back(Json{{"test_id", t.test_id},
                         {"status", to_string(t.status)},
                         {"failed_checks", t.failed_checks},
                         {"message", t.message}});
  }
  out["tests"] = std::move(tests);
  return out;
}

std::string table_header() {
  std::string h = "Subject\tAMF";
  for (const auto& c : kColumns) h += std::string("\t") + c.name;
  return h;
}

std::string render_table(const std::vector<Report>& reports) {
  std::string out = table_header() + "\n";
  for (const auto& r : reports) {
    out += r.project + "\t" + std::to_string(r.amf);
    for (const auto& c : kColumns) out += "\t" + fixed2(r.*(c.field));
    out += "\n";
  }
  return out;
}

std::string render_document(const std::vector<Report>& reports) {
  Json doc = Json::object();
  doc["projects"] = Json::array();
  for (const auto& r : reports) doc["projects"].push_back(to_json(r));
  return doc.dump(2) + "\n";
}

// ---- pipeline -------------------------------------------------------------

namespace {

fs::path index_path(const Config& cfg, const ProjectConfig& project) {
  return cfg.project_out(project.name) / "mock_index.json";
}

std::vector<fs::path> trace_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".trace") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<typeres::CtmEntry> fragment_types(const Fragment& f, const typeres::ContextTypeMap& ctm,
                                              const std::string& project) {
  std::vector<typeres::CtmEntry> out;
  const auto projects = ctm.projects();
  if (std::find(projects.begin(), projects.end(), project) == projects.end()) return out;
  for (const auto& [_, e] : ctm.entries(project)) {
    if (e.site.file == f.file && e.site.line >= f.start_line && e.site.line <= f.end_line) out.push_back(e);
  }
  return out;
}

}  // namespace

GenStats generate_mock_tests(const Config& cfg, const ProjectConfig& project, const ProjectSchema& schema,
                             const typeres::ContextTypeMap& ctm) {
  GenStats stats;
  const auto app = schema.app_methods();
  const fs::path out = cfg.project_out(project.name);
  fs::remove_all(out / "mock_tests");
  const mockgen::EmitContext ctx{schema, ctm, cfg.equality};
  std::map<std::string, std::vector<std::string>> index;
  for (const auto& file : trace_files(project.trace_dir)) {
    ++stats.traces;
    TraceLog log;
    try {
      log = parse_trace(read_file(file));
    } catch (const Error& e) {
      stats.errors.push_back(file.string() + ": " + e.what());
      continue;
    }
    for (const InvocationRecord* inv : extract_invocations(log)) {
      if (!app.contains(inv->method)) continue;
      ++stats.invocations;
      try {
        const auto spec = mockgen::plan_mock_test(*inv, log, app);
        const auto test = mockgen::emit_test(spec, ctx);
        write_file(out / test.file_name, test.source_text);
        index[test.focal_fragment_id].push_back(test.file_name);
        ++stats.emitted;
      } catch (const EmitError& e) {
        stats.errors.push_back(file.filename().string() + " #" + std::to_string(inv->invocation_index) + ": " +
                               e.what());
      }
    }
  }
  Json doc = Json::object();
  for (auto& [id, files] : index) {
    std::sort(files.begin(), files.end());
    doc[id] = files;
  }
  write_file(index_path(cfg, project), doc.dump(2) + "\n");
  return stats;
}

std::map<std::string, std::vector<fs::path>> load_mock_index(const Config& cfg, const ProjectConfig& project) {
  std::map<std::string, std::vector<fs::path>> out;
  const fs::path p = index_path(cfg, project);
  if (!fs::exists(p)) return out;
  const Json doc = Json::parse(read_file(p));
  for (const auto& [id, files] : doc.items()) {
    for (const auto& f : files) out[id].push_back(cfg.project_out(project.name) / f.get<std::string>());
  }
  return out;
}

ProjectRun validate_project(const Config& cfg, const ProjectConfig& project, const ProjectSchema& schema,
                            const typeres::ContextTypeMap& ctm, Translator& translator) {
  const auto index = load_mock_index(cfg, project);
  PythonRunnerOptions ro;
  ro.python = cfg.python;
  ro.translated_src_dir = project.translated_src_dir;
  ro.runtime_path = cfg.runtime_path;
  ro.scratch_dir = cfg.project_out(project.name) / "translations";
  ro.timeout_seconds = cfg.test_timeout_seconds;
  ro.schema = &schema;
  PythonTestRunner runner(ro);

  TranslatedTestResults results;
  if (project.test_results) results = TranslatedTestResults::from_json(Json::parse(read_file(*project.test_results)));

  ProjectRun run;
  std::vector<TestClass> classes;
  for (const auto& id : build_order(CallGraph::from_schema(schema))) {
    const Fragment* f = schema.find_fragment(id);
    ValidateOptions vo;
    vo.budget = cfg.budget;
    vo.nondeterministic = cfg.nondet_allowlist.contains(id);
    vo.types = fragment_types(*f, ctm, project.name);
    const auto it = index.find(id);
    static const std::vector<fs::path> kNone;
    run.outcomes.push_back(validate_fragment(*f, translator, it == index.end() ? kNone : it->second, runner, vo));
    const auto r = results.by_fragment.find(id);
    classes.push_back(classify_tests(r == results.by_fragment.end() ? std::vector<TestStatus>{} : r->second));
  }
  run.report = compute_report(project.name, run.outcomes, classes, results.passed, results.executed);

  Json doc = Json::object();
  doc["project"] = project.name;
  doc["outcomes"] = Json::array();
  for (const auto& o : run.outcomes) doc["outcomes"].push_back(to_json(o));
  write_file(cfg.project_out(project.name) / "outcomes.json", doc.dump(2) + "\n");
  return run;
}

}  // namespace xlv::orchestrator
