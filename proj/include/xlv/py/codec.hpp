#pragma once

// Rebuilds target-runtime (Python) values from SerializedValue nodes, keeping
// aliasing and cycles intact, and moves recorded static-field snapshots onto
// translated classes. Every function here requires the GIL.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <pybind11/pybind11.h>

#include "xlv/trace_json.hpp"
#include "xlv/trace_model.hpp"

namespace xlv::pyrt {

namespace py = pybind11;

/// identity token -> reconstructed object, scoped to one reconstruction session.
class IdentityRegistry {
 public:
  /// `fallback` answers lookups of tokens this registry has not bound.
  explicit IdentityRegistry(const IdentityRegistry* fallback = nullptr) : fallback_(fallback) {}

  bool contains(const std::string& token) const { return bindings_.contains(token); }
  /// Throws UnboundReferenceError for tokens unknown here and in the fallback.
  py::object lookup(const std::string& token) const;
  /// Throws PayloadError when the token is already bound.
  void bind(const std::string& token, py::object value);
  std::size_t size() const noexcept { return bindings_.size(); }

 private:
  const IdentityRegistry* fallback_;
  std::unordered_map<std::string, py::object> bindings_;
};

/// Source type name -> target class. Application classes come from the
/// translated modules; library entries come from the context type map.
class TargetClassRegistry {
 public:
  void bind_application(std::string source_name, py::object cls);
  void bind_library(std::string source_name, py::object target);

  /// Application class first, then library target. nullptr when unmapped.
  const py::object* find(std::string_view source_name) const;
  /// Throws UnknownTypeError when unmapped.
  py::object resolve(std::string_view source_name) const;
  const py::object* find_library(std::string_view source_name) const;
  bool is_application(std::string_view source_name) const;

  const std::map<std::string, py::object, std::less<>>& application_classes() const { return app_; }

  /// {"classes": {src: {"module", "class"}}, "types": {src: {"target", "imports"}}}.
  /// Imports every named module; missing modules or attributes raise UnknownTypeError.
  static TargetClassRegistry from_type_map(const Json& type_map);

 private:
  std::map<std::string, py::object, std::less<>> app_;
  std::map<std::string, py::object, std::less<>> library_;
};

/// Evaluates a target type expression after running its import statements in a
/// fresh namespace.
py::object eval_target_type(const std::string& expression, const std::vector<std::string>& imports);

/// Converts one node. `container_hint`, when not None, overrides the default
/// target container for this node only (e.g. tuple for a list occurrence).
py::object reconstruct(const SerializedValue& value, IdentityRegistry& registry,
                       const TargetClassRegistry& classes, py::handle container_hint = py::none());

/// Like reconstruct, but nodes whose token is already bound have their recorded
/// state copied into the bound object (via assign_in_place) instead of being
/// returned unchanged. Used to replay a callee's side effects onto live objects.
py::object reconstruct_effect(const SerializedValue& value, IdentityRegistry& registry,
                              const TargetClassRegistry& classes, py::handle container_hint = py::none());

/// Copies the state recorded in `value` into the existing object `live`, binding
/// the node's token to `live` if it is not bound yet.
void update_into(py::handle live, const SerializedValue& value, IdentityRegistry& registry,
                 const TargetClassRegistry& classes, py::handle container_hint = py::none());

/// Allocates without running the translated constructor, then assigns fields.
py::object reconstruct_app_object(const SerializedValue& value, IdentityRegistry& registry,
                                  const TargetClassRegistry& classes);

void apply_static_state(const StaticSnapshot& snapshot, const TargetClassRegistry& classes,
                        IdentityRegistry& registry);

/// source class -> source field name -> current value
using TargetStaticSnapshot = std::map<std::string, std::map<std::string, py::object>>;

TargetStaticSnapshot snapshot_static_state(
    const TargetClassRegistry& classes,
    const std::function<bool(const std::string&)>& class_filter = nullptr);

/// "_<Class>__<field>" with leading underscores of the class name stripped.
std::string private_attribute(std::string_view class_name, std::string_view field);

/// Attribute a field record is stored under on a reconstructed instance.
std::string field_attribute(const FieldRecord& field, const TargetClassRegistry& classes);

/// Attribute name a static field currently lives under on `cls` (mangled or plain).
std::string static_attribute(py::handle cls, std::string_view field);

/// True for declaring classes from the source standard library.
bool is_library_class(std::string_view declaring_class);

/// object.__new__-style allocation through the nearest built-in base.
py::object low_level_allocate(py::handle cls);

/// Overwrites the state of a mutable `target` with that of `source`; immutable
/// targets are left alone.
void assign_in_place(py::handle target, py::handle source);

/// Built-in exception class for a source exception type; Exception when unknown.
py::object default_exception_class(std::string_view source_type);

}  // namespace xlv::pyrt
