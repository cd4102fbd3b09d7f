#pragma once

// Decomposed project description: classes with their translated locations and
// per-fragment meta-information (source text, callees, declared types).

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xlv/trace_json.hpp"
#include "xlv/trace_model.hpp"

namespace xlv {

struct ClassInfo {
  std::string name;  // fully qualified source name
  std::string file;
  std::string target_module;
  std::string target_class;
  std::string kind = "class";  // class | enum | interface | exception
};

enum class TypeRole { param, return_, local, field };

std::string_view to_string(TypeRole role);

struct TypeUse {
  std::string source_type;
  int line = 0;
  std::string symbol;
  TypeRole role = TypeRole::local;
  std::optional<int> index;  // parameter position for role == param
};

struct Fragment {
  std::string id;
  std::string kind = "method";  // method | field
  std::string class_name;
  std::string name;
  std::string signature;
  bool is_static = false;
  bool is_constructor = false;
  std::string target_name;
  std::string file;
  int start_line = 0;
  int end_line = 0;
  std::string code;
  std::vector<std::string> callees;  // fragment ids
  std::vector<TypeUse> types;
  bool is_test = false;

  MethodId method() const;
};

struct ProjectSchema {
  std::string project;
  std::vector<ClassInfo> classes;
  std::vector<Fragment> fragments;

  const ClassInfo* find_class(std::string_view name) const;
  const Fragment* find_fragment(std::string_view id) const;
  const Fragment* find_method(const MethodId& method) const;
  /// Non-test method fragments, as MethodIds.
  std::set<MethodId> app_methods() const;
  /// True when `type_name` (generics and array suffixes stripped) names a project class.
  bool is_application_type(std::string_view type_name) const;
};

/// Strips generic arguments and array brackets: "java.util.List<Foo>[]" -> "java.util.List".
std::string erasure(std::string_view type_name);

ProjectSchema parse_project_schema(const Json& doc);
ProjectSchema load_project_schema(const std::filesystem::path& path);

/// Reads a whole file; throws Error when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
/// Writes atomically enough for our purposes (temp file + rename), creating parents.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace xlv
