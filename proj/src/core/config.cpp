#include "xlv/config.hpp"

#include "xlv/errors.hpp"
#include "xlv/project_schema.hpp"

namespace xlv {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& value) {
  fs::path p(value);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

const Json* member(const Json& node, const char* key) {
  if (!node.is_object()) return nullptr;
  auto it = node.find(key);
  return it == node.end() || it->is_null() ? nullptr : &*it;
}

std::string string_at(const Json& node, const char* key, const std::string& where) {
  const Json* v = member(node, key);
  if (!v || !v->is_string()) throw ConfigError(where + "." + key + " must be a string");
  return v->get<std::string>();
}

std::optional<fs::path> optional_path(const Json& node, const char* key, const fs::path& base) {
  const Json* v = member(node, key);
  if (!v) return std::nullopt;
  if (!v->is_string()) throw ConfigError(std::string(key) + " must be a string");
  return resolve(base, v->get<std::string>());
}

}  // namespace

Config Config::load(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(doc, fs::absolute(path).parent_path());
}

Config Config::from_json(const Json& doc, const fs::path& base) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  Config cfg;
  cfg.out_dir = resolve(base, string_at(doc, "out_dir", "config"));
  try {
    if (const Json* v = member(doc, "budget")) cfg.budget = v->get<int>();
    if (const Json* v = member(doc, "python")) cfg.python = v->get<std::string>();
    if (const Json* v = member(doc, "test_timeout_seconds")) cfg.test_timeout_seconds = v->get<int>();
    if (const Json* v = member(doc, "runtime_path")) {
      for (const auto& p : *v) cfg.runtime_path.push_back(resolve(base, p.get<std::string>()));
    }
    if (const Json* v = member(doc, "nondet_allowlist")) {
      for (const auto& id : *v) cfg.nondet_allowlist.insert(id.get<std::string>());
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (cfg.budget < 1) throw ConfigError("budget must be at least 1");
  if (cfg.test_timeout_seconds < 1) throw ConfigError("test_timeout_seconds must be at least 1");
  if (const Json* v = member(doc, "equality")) cfg.equality = equality_config_from_json(*v);

  if (const Json* r = member(doc, "resolver")) {
    if (const Json* k = member(*r, "kind")) cfg.resolver.kind = k->get<std::string>();
    cfg.resolver.rules = optional_path(*r, "rules", base);
  }
  if (cfg.resolver.kind != "rules" && cfg.resolver.kind != "remote") {
    throw ConfigError("resolver.kind must be \"rules\" or \"remote\"");
  }
  if (cfg.resolver.kind == "rules" && !cfg.resolver.rules) throw ConfigError("resolver.rules is required");

  cfg.docs.cache_dir = cfg.out_dir / "doc_cache";
  if (const Json* d = member(doc, "docs")) {
    if (auto p = optional_path(*d, "cache_dir", base)) cfg.docs.cache_dir = *p;
    cfg.docs.root = optional_path(*d, "root", base);
    if (const Json* u = member(*d, "url_pattern")) cfg.docs.url_pattern = u->get<std::string>();
  }

  if (const Json* t = member(doc, "translator")) {
    if (const Json* k = member(*t, "kind")) cfg.translator.kind = k->get<std::string>();
    cfg.translator.dir = optional_path(*t, "dir", base);
  }
  if (cfg.translator.kind != "fixture" && cfg.translator.kind != "remote") {
    throw ConfigError("translator.kind must be \"fixture\" or \"remote\"");
  }

  const Json* projects = member(doc, "projects");
  if (!projects || !projects->is_array()) throw ConfigError("config.projects must be an array");
  std::set<std::string> names;
  for (std::size_t i = 0; i < projects->size(); ++i) {
    const Json& p = (*projects)[i];
    const std::string where = "projects[" + std::to_string(i) + "]";
    ProjectConfig pc;
    pc.name = string_at(p, "name", where);
    if (!names.insert(pc.name).second) throw ConfigError("duplicate project " + pc.name);
    pc.source_root = resolve(base, string_at(p, "source_root", where));
    pc.schema = resolve(base, string_at(p, "schema", where));
    pc.trace_dir = resolve(base, string_at(p, "trace_dir", where));
    pc.translated_src_dir = resolve(base, string_at(p, "translated_src_dir", where));
    pc.test_results = optional_path(p, "test_results", base);
    cfg.projects.push_back(std::move(pc));
  }
  return cfg;
}

std::vector<const ProjectConfig*> Config::select(const std::string& filter) const {
  std::vector<const ProjectConfig*> out;
  for (const auto& p : projects) {
    if (filter.empty() || p.name == filter) out.push_back(&p);
  }
  if (!filter.empty() && out.empty()) throw ConfigError("no project named " + filter);
  return out;
}

void Config::check_paths(const std::vector<const ProjectConfig*>& selected) const {
  const auto require = [](const fs::path& p, const std::string& what) {
    if (!fs::exists(p)) throw ConfigError(what + " does not exist: " + p.string());
  };
  if (resolver.rules) require(*resolver.rules, "resolver.rules");
  if (docs.root) require(*docs.root, "docs.root");
  if (translator.dir) require(*translator.dir, "translator.dir");
  for (const auto* p : selected) {
    require(p->source_root, p->name + ".source_root");
    require(p->schema, p->name + ".schema");
    require(p->trace_dir, p->name + ".trace_dir");
    require(p->translated_src_dir, p->name + ".translated_src_dir");
    if (p->test_results) require(*p->test_results, p->name + ".test_results");
  }
}

}  // namespace xlv
