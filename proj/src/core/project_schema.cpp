#include "xlv/project_schema.hpp"

#include <fstream>
#include <sstream>

#include "xlv/errors.hpp"

namespace xlv {

namespace {

TypeRole parse_role(const std::string& text, const std::string& path) {
  if (text == "param") return TypeRole::param;
  if (text == "return") return TypeRole::return_;
  if (text == "local") return TypeRole::local;
  if (text == "field") return TypeRole::field;
  throw SchemaError(path, "unknown type role '" + text + "'");
}

template <class T>
T required(const Json& node, const char* key, const std::string& path) {
  if (!node.contains(key)) throw SchemaError(path, std::string("missing key '") + key + "'");
  try {
    return node.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw SchemaError(path + "." + key, e.what());
  }
}

}  // namespace

std::string_view to_string(TypeRole role) {
  switch (role) {
    case TypeRole::param:
      return "param";
    case TypeRole::return_:
      return "return";
    case TypeRole::local:
      return "local";
    case TypeRole::field:
      return "field";
  }
  return "local";
}

MethodId Fragment::method() const {
  return MethodId{class_name, name, signature, is_constructor, is_static};
}

const ClassInfo* ProjectSchema::find_class(std::string_view name) const {
  for (const auto& c : classes) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const Fragment* ProjectSchema::find_fragment(std::string_view id) const {
  for (const auto& f : fragments) {
    if (f.id == id) return &f;
  }
  return nullptr;
}

const Fragment* ProjectSchema::find_method(const MethodId& method) const {
  for (const auto& f : fragments) {
    if (f.kind == "method" && f.method() == method) return &f;
  }
  return nullptr;
}

std::set<MethodId> ProjectSchema::app_methods() const {
  std::set<MethodId> out;
  for (const auto& f : fragments) {
    if (f.kind == "method" && !f.is_test) out.insert(f.method());
  }
  return out;
}

bool ProjectSchema::is_application_type(std::string_view type_name) const {
  return find_class(erasure(type_name)) != nullptr;
}

std::string erasure(std::string_view type_name) {
  std::string out;
  int depth = 0;
  for (char c : type_name) {
    if (c == '<') {
      ++depth;
    } else if (c == '>') {
      --depth;
    } else if (depth == 0 && c != '[' && c != ']' && c != ' ') {
      out += c;
    }
  }
  return out;
}

ProjectSchema parse_project_schema(const Json& doc) {
  ProjectSchema out;
  out.project = required<std::string>(doc, "project", "schema");
  if (doc.contains("classes")) {
    for (std::size_t i = 0; i < doc.at("classes").size(); ++i) {
      const auto& node = doc.at("classes")[i];
      const std::string path = "classes[" + std::to_string(i) + "]";
      ClassInfo c;
      c.name = required<std::string>(node, "name", path);
      c.file = node.value("file", "");
      c.target_module = required<std::string>(node, "target_module", path);
      c.target_class = required<std::string>(node, "target_class", path);
      c.kind = node.value("kind", "class");
      out.classes.push_back(std::move(c));
    }
  }
  if (doc.contains("fragments")) {
    for (std::size_t i = 0; i < doc.at("fragments").size(); ++i) {
      const auto& node = doc.at("fragments")[i];
      const std::string path = "fragments[" + std::to_string(i) + "]";
      Fragment f;
      f.kind = node.value("kind", "method");
      f.class_name = required<std::string>(node, "class", path);
      f.name = required<std::string>(node, "name", path);
      f.signature = node.value("signature", "");
      f.is_static = node.value("is_static", false);
      f.is_constructor = node.value("is_constructor", false);
      f.id = node.value("id", f.kind == "method" ? f.method().key() : f.class_name + "." + f.name);
      f.target_name = node.value("target_name", f.name);
      f.file = node.value("file", "");
      f.start_line = node.value("start_line", 0);
      f.end_line = node.value("end_line", 0);
      f.code = node.value("code", "");
      f.callees = node.value("callees", std::vector<std::string>{});
      f.is_test = node.value("is_test", false);
      if (node.contains("types")) {
        for (std::size_t j = 0; j < node.at("types").size(); ++j) {
          const auto& t = node.at("types")[j];
          const std::string tpath = path + ".types[" + std::to_string(j) + "]";
          TypeUse use;
          use.source_type = required<std::string>(t, "source_type", tpath);
          use.line = t.value("line", 0);
          use.symbol = t.value("symbol", "");
          use.role = parse_role(t.value("role", "local"), tpath);
          if (t.contains("index")) use.index = t.at("index").get<int>();
          f.types.push_back(std::move(use));
        }
      }
      out.fragments.push_back(std::move(f));
    }
  }
  return out;
}

ProjectSchema load_project_schema(const std::filesystem::path& path) {
  try {
    return parse_project_schema(Json::parse(read_file(path)));
  } catch (const Json::parse_error& e) {
    throw SchemaError(path.string(), std::string("malformed document: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace xlv
