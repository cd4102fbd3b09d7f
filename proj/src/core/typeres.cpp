#include "xlv/typeres.hpp"

#include <algorithm>
#include <set>

#include "xlv/errors.hpp"
#include "xlv/http.hpp"
#include "xlv/process.hpp"

namespace xlv::typeres {

namespace {

constexpr const char* kValidatorScript = R"PY(
import ast
import json
import sys

req = json.loads(sys.stdin.read())


def done(error):
    print(json.dumps({"error": error}))
    sys.exit(0)


ns = {}
for stmt in req["imports"]:
    try:
        tree = ast.parse(stmt)
    except SyntaxError as exc:
        done("import does not parse: %s (%s)" % (stmt, exc.msg))
    if not tree.body or not all(isinstance(n, (ast.Import, ast.ImportFrom)) for n in tree.body):
        done("not an import statement: " + stmt)
    try:
        exec(compile(tree, "<import>", "exec"), ns)
    except ImportError as exc:
        done("import failed: " + (exc.name or stmt))
    except Exception as exc:
        done("import failed: %s (%s)" % (stmt, exc))

target = req["target"]
try:
    ast.parse(target, mode="eval")
except SyntaxError:
    done("type expression does not parse: " + target)
try:
    value = eval(target, ns)
except Exception as exc:
    done("type expression does not resolve: %s (%s: %s)" % (target, type(exc).__name__, exc))
if value is not None and not isinstance(value, type) and getattr(value, "__origin__", None) is None:
    done("not a type: " + target)
print(json.dumps({"error": None}))
)PY";

bool is_bare_primitive(std::string_view t) {
  static const std::set<std::string_view> kPrimitives = {"int",  "long",   "short", "byte", "char",
                                                         "boolean", "float", "double", "void"};
  return kPrimitives.contains(t);
}

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

std::string simple_name(const std::string& type) {
  const auto cut = type.find_last_of(".$");
  return cut == std::string::npos ? type : type.substr(cut + 1);
}

std::string cache_name(const std::string& type) {
  std::string out = type;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '$' && c != '_') c = '_';
  }
  return out + ".txt";
}

Json site_to_json(const Site& site) {
  Json out = Json::object();
  out["file"] = site.file;
  out["line"] = site.line;
  out["symbol"] = site.symbol;
  return out;
}

Json mapping_to_json(const TypeMapping& m) {
  Json out = Json::object();
  out["target_type"] = m.target_type;
  out["target_imports"] = m.target_imports;
  out["reasoning"] = m.reasoning;
  out["provenance"] = std::string(to_string(m.provenance));
  out["validated"] = m.validated;
  return out;
}

std::string imports_key(const std::vector<std::string>& imports) {
  std::string out;
  for (const auto& i : imports) out += i + "\n";
  return out;
}

}  // namespace

std::string TypeOccurrence::key() const {
  return site.file + ":" + std::to_string(site.line) + ":" + site.symbol + "#" + source_type;
}

std::string CtmEntry::key() const {
  return site.file + ":" + std::to_string(site.line) + ":" + site.symbol + "#" + source_type;
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::resolved:
      return "resolved";
    case Provenance::global:
      return "global";
    case Provenance::fallback_object:
      return "fallback_object";
  }
  return "fallback_object";
}

std::optional<Provenance> parse_provenance(std::string_view text) {
  if (text == "resolved") return Provenance::resolved;
  if (text == "global") return Provenance::global;
  if (text == "fallback_object") return Provenance::fallback_object;
  return std::nullopt;
}

TypeMapping fallback_mapping() {
  return TypeMapping{std::string(kFallbackType), {}, "no validated mapping available; using the universal base type",
                     Provenance::fallback_object, false};
}

// ---- resolvers --------------------------------------------------------------

RuleTableResolver::RuleTableResolver(std::vector<ResolutionRule> rules) : rules_(std::move(rules)) {
  for (const auto& rule : rules_) {
    try {
      patterns_.emplace_back(rule.context_pattern.empty() ? std::string(".*") : rule.context_pattern);
    } catch (const std::regex_error& e) {
      throw ConfigError("bad context pattern '" + rule.context_pattern + "': " + e.what());
    }
  }
}

RuleTableResolver RuleTableResolver::from_json(const Json& rules) {
  std::vector<ResolutionRule> out;
  if (!rules.is_array()) throw ConfigError("resolver rules must be an array");
  for (const auto& node : rules) {
    ResolutionRule rule;
    rule.source_type = node.at("source_type").get<std::string>();
    rule.context_pattern = node.value("context_pattern", "");
    rule.target_type = node.at("target_type").get<std::string>();
    rule.imports = node.value("imports", std::vector<std::string>{});
    rule.reasoning = node.value("reasoning", "");
    out.push_back(std::move(rule));
  }
  return RuleTableResolver(std::move(out));
}

ResolverReply RuleTableResolver::request(const ResolverRequest& req) {
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    if (rules_[i].source_type != req.source_type) continue;
    if (!std::regex_search(req.context_code, patterns_[i])) continue;
    return ResolverReply::ok(Candidate{rules_[i].target_type, rules_[i].imports, rules_[i].reasoning});
  }
  return ResolverReply::malformed("no rule maps " + req.source_type);
}

RemoteResolver::Settings RemoteResolver::Settings::from_env() {
  Settings s;
  const char* url = std::getenv("XLV_RESOLVER_URL");
  if (!url || !*url) throw ConfigError("XLV_RESOLVER_URL is not set");
  s.url = url;
  if (const char* model = std::getenv("XLV_RESOLVER_MODEL")) s.model = model;
  if (const char* key = std::getenv("XLV_RESOLVER_KEY")) s.key = key;
  s.prompt_template = default_prompt_template();
  return s;
}

RemoteResolver::RemoteResolver(Settings settings) : settings_(std::move(settings)) {
  if (settings_.prompt_template.empty()) settings_.prompt_template = default_prompt_template();
}

ResolverReply RemoteResolver::request(const ResolverRequest& req) {
  Json body = Json::object();
  body["model"] = settings_.model;
  body["temperature"] = 0;
  body["messages"] = Json::array({
      Json{{"role", "system"}, {"content", "You map Java library types to Python types. Reply with JSON only."}},
      Json{{"role", "user"}, {"content", render_prompt(settings_.prompt_template, req)}},
  });
  std::map<std::string, std::string> headers;
  if (!settings_.key.empty()) headers["Authorization"] = "Bearer " + settings_.key;
  HttpResponse res;
  try {
    res = http_request(settings_.url, body.dump(), headers, std::chrono::seconds(settings_.timeout_seconds));
  } catch (const NetworkError& e) {
    return ResolverReply::transport(e.what());
  }
  if (res.status < 200 || res.status >= 300) {
    return ResolverReply::transport("resolver endpoint returned HTTP " + std::to_string(res.status));
  }
  try {
    const Json doc = Json::parse(res.body);
    return parse_model_reply(doc.at("choices").at(0).at("message").at("content").get<std::string>());
  } catch (const Json::exception& e) {
    return ResolverReply::malformed(std::string("unreadable resolver response: ") + e.what());
  }
}

std::string default_prompt_template() {
  return "Source type: {type}\n\n"
         "API documentation:\n{documentation}\n\n"
         "Usage in the source project:\n{code}\n\n"
         "{feedback}"
         "Choose the Python type that preserves the behavior of this particular usage. "
         "Reply with a JSON object with the keys \"imports\" (list of Python import statements), "
         "\"target_type\" (a Python type expression) and \"reasoning\" (a short justification).\n";
}

std::string render_prompt(const std::string& tmpl, const ResolverRequest& req) {
  std::string feedback;
  if (!req.feedback.empty()) {
    feedback = "Earlier answers failed validation:\n";
    for (const auto& f : req.feedback) feedback += "- " + f + "\n";
    feedback += "\n";
  }
  std::string out = replace_all(tmpl, "{type}", req.source_type);
  out = replace_all(out, "{documentation}", req.doc_text.empty() ? "(none available)" : req.doc_text);
  out = replace_all(out, "{code}", req.context_code);
  return replace_all(out, "{feedback}", feedback);
}

ResolverReply parse_model_reply(const std::string& content) {
  const auto open = content.find('{');
  const auto close = content.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    return ResolverReply::malformed("reply contains no JSON object");
  }
  try {
    const Json doc = Json::parse(content.substr(open, close - open + 1));
    Candidate c;
    c.target_type = doc.contains("target_type") ? doc.at("target_type").get<std::string>()
                                                 : doc.at("type").get<std::string>();
    const char* imports_key = doc.contains("target_imports") ? "target_imports" : "imports";
    if (doc.contains(imports_key)) {
      const auto& imports = doc.at(imports_key);
      if (imports.is_string()) {
        c.target_imports.push_back(imports.get<std::string>());
      } else {
        c.target_imports = imports.get<std::vector<std::string>>();
      }
    }
    c.reasoning = doc.value("reasoning", "");
    if (c.target_type.empty()) return ResolverReply::malformed("reply has an empty target_type");
    return ResolverReply::ok(std::move(c));
  } catch (const Json::exception& e) {
    return ResolverReply::malformed(std::string("reply JSON is not usable: ") + e.what());
  }
}

// ---- validation ---------------------------------------------------------------

PythonMappingValidator::PythonMappingValidator(std::string python) : python_(std::move(python)) {}

std::optional<std::string> PythonMappingValidator::validate(const Candidate& candidate) {
  const std::string key = candidate.target_type + "\n" + imports_key(candidate.target_imports);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  Json req = Json::object();
  req["imports"] = candidate.target_imports;
  req["target"] = candidate.target_type;
  ProcessOptions options;
  options.stdin_data = req.dump();
  options.timeout = std::chrono::seconds(60);
  const ProcessResult res = run_process({python_, "-c", kValidatorScript}, options);

  std::optional<std::string> verdict;
  if (res.timed_out) {
    verdict = "validation timed out";
  } else if (res.exit_code != 0) {
    verdict = "validation session failed: " + res.err;
  } else {
    try {
      const Json out = Json::parse(res.out);
      if (!out.at("error").is_null()) verdict = out.at("error").get<std::string>();
    } catch (const Json::exception&) {
      verdict = "validation session produced no verdict: " + res.out + res.err;
    }
  }
  memo_.emplace(key, verdict);
  return verdict;
}

// ---- documentation ------------------------------------------------------------

HttpDocSource::HttpDocSource(std::string url_pattern) : url_pattern_(std::move(url_pattern)) {}

std::string HttpDocSource::default_url_pattern() { return "https://docs.oracle.com/javase/8/docs/api/{path}.html"; }

std::optional<std::string> HttpDocSource::fetch(const std::string& source_type) {
  std::string path = source_type;
  std::replace(path.begin(), path.end(), '.', '/');
  std::replace(path.begin(), path.end(), '$', '.');
  std::string url = replace_all(url_pattern_, "{path}", path);
  url = replace_all(url, "{type}", source_type);
  url = replace_all(url, "{simple}", simple_name(source_type));
  const HttpResponse res = http_request(url);
  if (res.status == 404) return std::nullopt;
  if (res.status < 200 || res.status >= 300) {
    throw NetworkError("documentation fetch for " + source_type + " returned HTTP " + std::to_string(res.status));
  }
  return html_to_text(res.body);
}

FileTreeDocSource::FileTreeDocSource(std::filesystem::path root) : root_(std::move(root)) {}

std::optional<std::string> FileTreeDocSource::fetch(const std::string& source_type) {
  const auto text = root_ / (source_type + ".txt");
  if (std::filesystem::exists(text)) return read_file(text);
  const auto html = root_ / (source_type + ".html");
  if (std::filesystem::exists(html)) return html_to_text(read_file(html));
  return std::nullopt;
}

std::string html_to_text(const std::string& html) {
  static const std::regex kBlocks(R"(<(script|style)[^>]*>[\s\S]*?</\1>)", std::regex::icase);
  static const std::regex kTags(R"(<[^>]*>)");
  std::string text = std::regex_replace(html, kBlocks, " ");
  text = std::regex_replace(text, kTags, " ");
  for (const auto& [entity, ch] : std::vector<std::pair<std::string, std::string>>{
           {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&#39;", "'"}, {"&nbsp;", " "}, {"&amp;", "&"}}) {
    text = replace_all(text, entity, ch);
  }
  std::string out;
  bool space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
    } else {
      if (space) out += ' ';
      out += c;
      space = false;
    }
  }
  return out;
}

std::string fetch_doc(const std::string& source_type, const std::filesystem::path& cache_dir, DocSource* source,
                      bool offline) {
  const auto cached = cache_dir / cache_name(source_type);
  if (!cache_dir.empty() && std::filesystem::exists(cached)) return read_file(cached);
  if (offline || !source) return "";
  const std::optional<std::string> text = source->fetch(source_type);
  if (!text) return "";
  if (!cache_dir.empty()) write_file(cached, *text);
  return *text;
}

// ---- context type map -----------------------------------------------------------

void ContextTypeMap::put(const std::string& project, CtmEntry entry) {
  const std::string key = entry.key();
  entries_[project].insert_or_assign(key, std::move(entry));
}

const CtmEntry* ContextTypeMap::find(const std::string& project, const std::string& key) const {
  const auto p = entries_.find(project);
  if (p == entries_.end()) return nullptr;
  const auto e = p->second.find(key);
  return e == p->second.end() ? nullptr : &e->second;
}

const CtmEntry* ContextTypeMap::find_site(const std::string& project, const std::string& file, int line,
                                          const std::string& symbol, const std::string& source_type) const {
  return find(project, file + ":" + std::to_string(line) + ":" + symbol + "#" + source_type);
}

std::vector<std::string> ContextTypeMap::projects() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : entries_) out.push_back(name);
  return out;
}

const std::map<std::string, CtmEntry>& ContextTypeMap::entries(const std::string& project) const {
  static const std::map<std::string, CtmEntry> kEmpty;
  const auto p = entries_.find(project);
  return p == entries_.end() ? kEmpty : p->second;
}

std::size_t ContextTypeMap::size() const {
  std::size_t n = 0;
  for (const auto& [_, e] : entries_) n += e.size();
  return n;
}

std::vector<std::pair<std::string, const CtmEntry*>> ContextTypeMap::by_type(const std::string& source_type) const {
  std::vector<std::pair<std::string, const CtmEntry*>> out;
  for (const auto& [project, entries] : entries_) {
    for (const auto& [_, entry] : entries) {
      if (entry.source_type == source_type) out.emplace_back(project, &entry);
    }
  }
  return out;
}

Json ContextTypeMap::project_to_json(const std::string& project) const {
  Json doc = Json::object();
  doc["project"] = project;
  Json entries = Json::array();
  for (const auto& [_, entry] : this->entries(project)) {
    Json e = Json::object();
    e["site"] = site_to_json(entry.site);
    e["source_type"] = entry.source_type;
    e["mapping"] = mapping_to_json(entry.mapping);
    entries.push_back(std::move(e));
  }
  doc["entries"] = std::move(entries);
  return doc;
}

void ContextTypeMap::load_project_json(const Json& doc) {
  try {
    const std::string project = doc.at("project").get<std::string>();
    entries_[project];
    for (const auto& e : doc.at("entries")) {
      CtmEntry entry;
      entry.site.file = e.at("site").at("file").get<std::string>();
      entry.site.line = e.at("site").at("line").get<int>();
      entry.site.symbol = e.at("site").at("symbol").get<std::string>();
      entry.source_type = e.at("source_type").get<std::string>();
      const auto& m = e.at("mapping");
      entry.mapping.target_type = m.at("target_type").get<std::string>();
      entry.mapping.target_imports = m.value("target_imports", std::vector<std::string>{});
      entry.mapping.reasoning = m.value("reasoning", "");
      const auto provenance = parse_provenance(m.at("provenance").get<std::string>());
      if (!provenance) throw SchemaError("ctm", "unknown provenance");
      entry.mapping.provenance = *provenance;
      entry.mapping.validated = m.value("validated", false);
      put(project, std::move(entry));
    }
  } catch (const Json::exception& e) {
    throw SchemaError("ctm", std::string("malformed type map: ") + e.what());
  }
}

void ContextTypeMap::save(const std::filesystem::path& dir) const {
  for (const auto& [project, _] : entries_) save_project(dir, project);
}

void ContextTypeMap::save_project(const std::filesystem::path& dir, const std::string& project) const {
  write_file(dir / (project + ".json"), project_to_json(project).dump(2) + "\n");
}

bool ContextTypeMap::load_project_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return false;
  try {
    load_project_json(Json::parse(read_file(path)));
  } catch (const Json::parse_error& e) {
    throw SchemaError(path.string(), std::string("malformed document: ") + e.what());
  }
  return true;
}

// ---- pipeline -------------------------------------------------------------------

std::vector<TypeOccurrence> collect_types(const ProjectSchema& schema) {
  std::map<std::string, TypeOccurrence> unique;
  for (const auto& fragment : schema.fragments) {
    if (fragment.is_test) continue;
    for (const auto& use : fragment.types) {
      const std::string type = erasure(use.source_type);
      if (type.empty() || is_bare_primitive(type) || schema.is_application_type(type)) continue;
      TypeOccurrence occ{schema.project, type, Site{fragment.file, use.line, use.symbol}, fragment.code};
      unique.emplace(occ.key(), std::move(occ));
    }
  }
  std::vector<TypeOccurrence> out;
  out.reserve(unique.size());
  for (auto& [_, occ] : unique) out.push_back(std::move(occ));
  return out;
}

ResolveOutcome resolve_type(const TypeOccurrence& occ, const std::string& doc, Resolver& resolver,
                            MappingValidator& validator, int budget) {
  if (budget < 1) throw ConfigError("resolution budget must be >= 1");
  ResolveOutcome outcome;
  ResolverRequest req{occ.source_type, doc, occ.context_code, {}};
  for (int attempt = 1; attempt <= budget; ++attempt) {
    outcome.attempts = attempt;
    const ResolverReply reply = resolver.request(req);
    if (reply.transport_failure) {
      ++outcome.transport_failures;
      outcome.last_error = reply.error;
      continue;
    }
    if (!reply.candidate) {
      outcome.last_error = reply.error;
      req.feedback.push_back(reply.error);
      continue;
    }
    if (auto error = validator.validate(*reply.candidate)) {
      outcome.last_error = *error;
      req.feedback.push_back(*error);
      continue;
    }
    const Candidate& c = *reply.candidate;
    outcome.mapping = TypeMapping{c.target_type, c.target_imports, c.reasoning, Provenance::resolved, true};
    return outcome;
  }
  return outcome;
}

std::optional<TypeMapping> resolve_globally(const std::string& source_type, const ContextTypeMap& ctm,
                                            const std::string& exclude_project) {
  struct Tally {
    std::size_t count = 0;
    const TypeMapping* first = nullptr;
  };
  std::map<std::pair<std::string, std::string>, Tally> tallies;
  for (const auto& [project, entry] : ctm.by_type(source_type)) {
    if (project == exclude_project) continue;
    const TypeMapping& m = entry->mapping;
    if (m.provenance != Provenance::resolved || !m.validated) continue;
    Tally& t = tallies[{m.target_type, imports_key(m.target_imports)}];
    if (!t.first) t.first = &m;
    ++t.count;
  }
  // std::map iterates in (target_type, imports) order, so the first maximum is the tie-break winner.
  const Tally* best = nullptr;
  for (const auto& [_, tally] : tallies) {
    if (!best || tally.count > best->count) best = &tally;
  }
  if (!best) return std::nullopt;
  TypeMapping out = *best->first;
  out.provenance = Provenance::global;
  out.validated = true;
  return out;
}

BuildStats build_ctm(const std::vector<ProjectSchema>& projects, Resolver& resolver, MappingValidator& validator,
                     const BuildOptions& options, ContextTypeMap& ctm) {
  BuildStats stats;
  const auto notify = [&](const TypeOccurrence& occ, std::string_view stage) {
    if (options.observer) options.observer(occ, stage);
  };
  std::vector<TypeOccurrence> pending;
  for (const auto& schema : projects) {
    for (const auto& occ : collect_types(schema)) {
      ++stats.occurrences;
      notify(occ, "resolve");
      std::string doc;
      try {
        doc = fetch_doc(occ.source_type, options.doc_cache_dir, options.docs, options.offline);
      } catch (const NetworkError&) {
        ++stats.transport_failures;
      }
      const ResolveOutcome outcome = resolve_type(occ, doc, resolver, validator, options.budget);
      stats.transport_failures += static_cast<std::size_t>(outcome.transport_failures);
      if (outcome.mapping) {
        ++stats.resolved;
        ctm.put(occ.project, CtmEntry{occ.site, occ.source_type, *outcome.mapping});
      } else {
        pending.push_back(occ);
      }
    }
  }
  for (const auto& occ : pending) {
    notify(occ, "global");
    if (auto mapping = resolve_globally(occ.source_type, ctm, occ.project)) {
      ++stats.global;
      ctm.put(occ.project, CtmEntry{occ.site, occ.source_type, *mapping});
      continue;
    }
    notify(occ, "fallback");
    ++stats.fallback;
    ctm.put(occ.project, CtmEntry{occ.site, occ.source_type, fallback_mapping()});
  }
  return stats;
}

}  // namespace xlv::typeres
