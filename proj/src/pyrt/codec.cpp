#include "xlv/py/codec.hpp"

#include <algorithm>
#include <array>
#include <set>

#include <pybind11/eval.h>
#include <pybind11/stl.h>

#include "xlv/errors.hpp"

namespace xlv::pyrt {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool contains(std::initializer_list<std::string_view> names, std::string_view name) {
  return std::find(names.begin(), names.end(), name) != names.end();
}

bool is_integral_type(std::string_view t) {
  return contains({"int", "long", "short", "byte", "java.lang.Integer", "java.lang.Long", "java.lang.Short",
                   "java.lang.Byte", "java.math.BigInteger", "java.util.concurrent.atomic.AtomicInteger",
                   "java.util.concurrent.atomic.AtomicLong"},
                  t);
}

bool is_floating_type(std::string_view t) {
  return contains({"float", "double", "java.lang.Float", "java.lang.Double"}, t);
}

bool is_boolean_type(std::string_view t) { return contains({"boolean", "java.lang.Boolean"}, t); }

py::module_ import(const char* name) { return py::module_::import(name); }

bool same_object(py::handle a, py::handle b) { return a.ptr() == b.ptr(); }

bool is_builtin(py::handle target, const char* name) {
  return same_object(target, py::module_::import("builtins").attr(name));
}

bool is_class(py::handle target, const char* module, const char* name) {
  return same_object(target, import(module).attr(name));
}

py::object parse_int(const std::string& literal) {
  PyObject* out = PyLong_FromString(literal.c_str(), nullptr, 10);
  if (!out) {
    PyErr_Clear();
    throw PayloadError("not an integer literal: '" + literal + "'");
  }
  return py::reinterpret_steal<py::object>(out);
}

py::object parse_float(const std::string& literal) {
  py::str text(literal);
  PyObject* out = PyFloat_FromString(text.ptr());
  if (!out) {
    PyErr_Clear();
    throw PayloadError("not a floating-point literal: '" + literal + "'");
  }
  return py::reinterpret_steal<py::object>(out);
}

py::object parse_bool(const std::string& literal) {
  if (literal == "true" || literal == "True") return py::bool_(true);
  if (literal == "false" || literal == "False") return py::bool_(false);
  throw PayloadError("not a boolean literal: '" + literal + "'");
}

py::bytes unsigned_bytes(const std::vector<std::int8_t>& data) {
  std::string raw(data.size(), '\0');
  std::transform(data.begin(), data.end(), raw.begin(),
                 [](std::int8_t b) { return static_cast<char>(static_cast<unsigned char>(b & 0xFF)); });
  return py::bytes(raw);
}

py::object enum_scalar(const EnumScalar& scalar) {
  return std::visit(Overloaded{
                        [](std::int64_t v) -> py::object { return py::int_(v); },
                        [](const std::string& v) -> py::object { return py::str(v); },
                        [](bool v) -> py::object { return py::bool_(v); },
                    },
                    scalar);
}

void set_instance_attribute(py::handle obj, const std::string& attr, py::handle value) {
  try {
    if (py::hasattr(obj, "__dict__")) {
      py::object dict = obj.attr("__dict__");
      if (PyDict_Check(dict.ptr())) {
        py::reinterpret_borrow<py::dict>(dict)[py::str(attr)] = value;
        return;
      }
    }
    py::setattr(obj, py::str(attr), value);
  } catch (const py::error_already_set& e) {
    throw FieldAssignError("cannot assign attribute '" + attr + "': " + e.what());
  }
}

class Reconstructor {
 public:
  Reconstructor(IdentityRegistry& registry, const TargetClassRegistry& classes, bool refresh_bound = false)
      : registry_(registry), classes_(classes), refresh_bound_(refresh_bound) {}

  py::object value(const SerializedValue& v, py::handle hint) {
    if (v.kind() != ValueKind::reference && v.identity && registry_.contains(*v.identity)) {
      py::object live = registry_.lookup(*v.identity);
      if (refresh_bound_ && refreshed_.insert(*v.identity).second) refresh(live, v, hint);
      return live;
    }
    return std::visit([&](const auto& payload) { return handle(v, payload, hint); }, v.payload);
  }

  void update(py::handle live, const SerializedValue& v, py::handle hint) {
    if (v.identity) {
      if (!registry_.contains(*v.identity)) registry_.bind(*v.identity, py::reinterpret_borrow<py::object>(live));
      refreshed_.insert(*v.identity);
    }
    refresh(live, v, hint);
  }

 private:
  // Builds the recorded state detached from its token, then copies it into `live`.
  void refresh(py::handle live, const SerializedValue& v, py::handle hint) {
    SerializedValue detached = v;
    detached.identity.reset();
    py::object fresh = std::visit([&](const auto& payload) { return handle(detached, payload, hint); },
                                  detached.payload);
    assign_in_place(live, fresh);
  }

  void bind(const SerializedValue& v, py::handle obj) {
    if (v.identity) registry_.bind(*v.identity, py::reinterpret_borrow<py::object>(obj));
  }

  py::handle override_for(const SerializedValue& v, py::handle hint) const {
    if (!hint.is_none()) return hint;
    if (const py::object* lib = classes_.find_library(v.type_name)) {
      if (!is_builtin(*lib, "object")) return *lib;
    }
    return py::none();
  }

  py::object handle(const SerializedValue&, const NullPayload&, py::handle) { return py::none(); }

  py::object handle(const SerializedValue& v, const PrimitivePayload& p, py::handle hint) {
    const std::string& t = v.type_name;
    py::handle target = override_for(v, hint);
    py::object out;
    if (is_integral_type(t)) {
      out = parse_int(p.value);
    } else if (is_floating_type(t)) {
      out = parse_float(p.value);
    } else if (is_boolean_type(t)) {
      out = parse_bool(p.value);
    } else if (t == "java.math.BigDecimal") {
      out = import("decimal").attr("Decimal")(p.value);
    } else {
      out = py::str(p.value);
    }
    if (!target.is_none() && !same_object(target, out.get_type())) {
      if (is_class(target, "io", "StringIO")) {
        py::object buffer = target();
        buffer.attr("write")(py::str(out));
        out = buffer;
      } else if (PyCallable_Check(target.ptr()) && !is_builtin(target, "object")) {
        try {
          out = target(out);
        } catch (const py::error_already_set& e) {
          throw PayloadError("cannot convert primitive of type '" + t + "': " + e.what());
        }
      }
    }
    bind(v, out);
    return out;
  }

  py::object sequence(const SerializedValue& v, CollectionCategory category,
                      const std::vector<SerializedValue>& items, py::handle hint) {
    py::handle target = override_for(v, hint);
    if (target.is_none()) {
      if (category == CollectionCategory::set) target = py::module_::import("builtins").attr("set");
      if (category == CollectionCategory::immutable) target = py::module_::import("builtins").attr("tuple");
    }
    // Mutable containers are registered before their items so cycles resolve.
    if (target.is_none() || is_builtin(target, "list")) {
      py::list out;
      bind(v, out);
      for (const auto& item : items) out.append(value(item, py::none()));
      return out;
    }
    if (is_builtin(target, "set")) {
      py::set out;
      bind(v, out);
      for (const auto& item : items) add_hashable(out, value(item, py::none()), v);
      return out;
    }
    if (is_class(target, "collections", "deque")) {
      py::object out = target();
      bind(v, out);
      for (const auto& item : items) out.attr("append")(value(item, py::none()));
      return out;
    }
    py::list elements;
    for (const auto& item : items) elements.append(value(item, py::none()));
    py::object out;
    try {
      if (is_builtin(target, "bytearray") || is_builtin(target, "bytes")) {
        py::list masked;
        for (py::handle e : elements) masked.append(py::int_(e.cast<long long>() & 0xFF));
        out = target(masked);
      } else {
        out = target(elements);
      }
    } catch (const py::error_already_set& e) {
      throw PayloadError("cannot build container for '" + v.type_name + "': " + e.what());
    } catch (const py::cast_error& e) {
      throw PayloadError("cannot build container for '" + v.type_name + "': " + e.what());
    }
    bind(v, out);
    return out;
  }

  static void add_hashable(py::set& out, py::handle item, const SerializedValue& v) {
    if (PySet_Add(out.ptr(), item.ptr()) != 0) {
      py::error_already_set e;
      throw PayloadError("unhashable element in '" + v.type_name + "': " + e.what());
    }
  }

  py::object handle(const SerializedValue& v, const ArrayPayload& p, py::handle hint) {
    return sequence(v, p.category, p.items, hint);
  }

  py::object handle(const SerializedValue& v, const CollectionPayload& p, py::handle hint) {
    return sequence(v, p.category, p.items, hint);
  }

  py::object handle(const SerializedValue& v, const MapPayload& p, py::handle hint) {
    py::handle target = override_for(v, hint);
    py::object out = (target.is_none() || is_builtin(target, "dict")) ? py::object(py::dict()) : target();
    bind(v, out);
    for (const auto& entry : p.entries) {
      py::object key = value(entry.key, py::none());
      py::object val = value(entry.value, py::none());
      if (PyObject_SetItem(out.ptr(), key.ptr(), val.ptr()) != 0) {
        py::error_already_set e;
        throw PayloadError("cannot insert map entry in '" + v.type_name + "': " + e.what());
      }
    }
    return out;
  }

  py::object handle(const SerializedValue& v, const StreamPayload& p, py::handle hint) {
    py::handle target = override_for(v, hint);
    py::bytes data = unsigned_bytes(p.byte_array);
    py::object out;
    if (!target.is_none() && is_class(target, "io", "StringIO")) {
      py::object text = data.attr("decode")("utf-8", "replace");
      py::object prefix = py::bytes(std::string(data).substr(0, static_cast<std::size_t>(p.position)))
                              .attr("decode")("utf-8", "replace");
      out = target(text);
      out.attr("seek")(py::len(prefix));
    } else {
      out = import("io").attr("BytesIO")(data);
      out.attr("seek")(p.position);
    }
    bind(v, out);
    return out;
  }

  py::object handle(const SerializedValue& v, const EnumPayload& p, py::handle) {
    py::object cls = classes_.resolve(v.type_name);
    py::object enum_base = import("enum").attr("Enum");
    py::object out;
    if (PyType_Check(cls.ptr()) && PyObject_IsSubclass(cls.ptr(), enum_base.ptr()) == 1) {
      py::dict members = cls.attr("__members__").attr("copy")();
      if (members.contains(p.name)) {
        out = members[py::str(p.name)];
      } else if (p.value) {
        try {
          out = cls(enum_scalar(*p.value));
        } catch (const py::error_already_set&) {
        }
      }
      if (!out && p.ordinal) {
        py::list ordered(cls);
        if (*p.ordinal >= 0 && *p.ordinal < static_cast<std::int64_t>(ordered.size())) {
          out = ordered[static_cast<std::size_t>(*p.ordinal)];
        }
      }
      if (!out) throw PayloadError("enum '" + v.type_name + "' has no constant '" + p.name + "'");
    } else {
      out = low_level_allocate(cls);
      set_instance_attribute(out, "_name_", py::str(p.name));
      py::object internal = p.value ? enum_scalar(*p.value) : p.ordinal ? py::object(py::int_(*p.ordinal))
                                                                         : py::object(py::none());
      set_instance_attribute(out, "_value_", internal);
    }
    bind(v, out);
    return out;
  }

  py::object handle(const SerializedValue& v, const ExceptionPayload& p, py::handle) {
    py::object cls;
    if (const py::object* mapped = classes_.find(v.type_name)) {
      cls = *mapped;
    } else {
      cls = default_exception_class(v.type_name);
    }
    if (!PyType_Check(cls.ptr()) || PyObject_IsSubclass(cls.ptr(), PyExc_BaseException) != 1) {
      throw PayloadError("type '" + v.type_name + "' does not map to an exception class");
    }
    py::object out = low_level_allocate(cls);
    out.attr("args") = p.message ? py::make_tuple(*p.message) : py::tuple();
    bind(v, out);
    return out;
  }

  py::object handle(const SerializedValue& v, const ObjectPayload& p, py::handle) {
    py::object cls = classes_.resolve(v.type_name);
    py::object out = low_level_allocate(cls);
    bind(v, out);
    const bool is_exception = PyType_Check(cls.ptr()) && PyObject_IsSubclass(cls.ptr(), PyExc_BaseException) == 1;
    for (const auto& field : p.fields) {
      if (field.is_static) continue;
      if (is_library_class(field.declaring_class)) {
        if (is_exception && field.name == "detailMessage") {
          py::object message = value(field.value, py::none());
          out.attr("args") = message.is_none() ? py::tuple() : py::make_tuple(message);
        }
        continue;
      }
      set_instance_attribute(out, field_attribute(field, classes_), value(field.value, py::none()));
    }
    return out;
  }

  py::object handle(const SerializedValue&, const ReferencePayload& p, py::handle) {
    return registry_.lookup(p.ref);
  }

  IdentityRegistry& registry_;
  const TargetClassRegistry& classes_;
  bool refresh_bound_;
  std::set<std::string> refreshed_;
};

std::string simple_name(std::string_view qualified) {
  const auto cut = qualified.find_last_of(".$");
  return std::string(cut == std::string_view::npos ? qualified : qualified.substr(cut + 1));
}

bool is_dunder(std::string_view name) {
  return name.size() > 4 && name.starts_with("__") && name.ends_with("__");
}

bool is_sunder(std::string_view name) {
  return name.size() > 2 && name.front() == '_' && name.back() == '_' && !is_dunder(name);
}

// Strips "_<Class>__" from a mangled attribute name.
std::string demangle(std::string_view attr, std::string_view class_name) {
  const std::string prefix = private_attribute(class_name, "");
  if (attr.starts_with(prefix) && attr.size() > prefix.size()) return std::string(attr.substr(prefix.size()));
  return std::string(attr);
}

}  // namespace

py::object IdentityRegistry::lookup(const std::string& token) const {
  auto it = bindings_.find(token);
  if (it == bindings_.end() && fallback_) return fallback_->lookup(token);
  if (it == bindings_.end()) throw UnboundReferenceError("identity token '" + token + "' is not bound");
  return it->second;
}

void IdentityRegistry::bind(const std::string& token, py::object value) {
  if (!bindings_.emplace(token, std::move(value)).second) {
    throw PayloadError("identity token '" + token + "' bound twice");
  }
}

void TargetClassRegistry::bind_application(std::string source_name, py::object cls) {
  app_.insert_or_assign(std::move(source_name), std::move(cls));
}

void TargetClassRegistry::bind_library(std::string source_name, py::object target) {
  library_.insert_or_assign(std::move(source_name), std::move(target));
}

const py::object* TargetClassRegistry::find(std::string_view source_name) const {
  if (auto it = app_.find(source_name); it != app_.end()) return &it->second;
  return find_library(source_name);
}

const py::object* TargetClassRegistry::find_library(std::string_view source_name) const {
  if (auto it = library_.find(source_name); it != library_.end()) return &it->second;
  return nullptr;
}

py::object TargetClassRegistry::resolve(std::string_view source_name) const {
  if (const py::object* found = find(source_name)) return *found;
  throw UnknownTypeError("no target class for source type '" + std::string(source_name) + "'");
}

bool TargetClassRegistry::is_application(std::string_view source_name) const {
  return app_.find(source_name) != app_.end();
}

TargetClassRegistry TargetClassRegistry::from_type_map(const Json& type_map) {
  TargetClassRegistry out;
  if (type_map.contains("classes")) {
    for (const auto& [source, info] : type_map.at("classes").items()) {
      const std::string module_name = info.at("module").get<std::string>();
      const std::string class_name = info.at("class").get<std::string>();
      try {
        py::module_ module = py::module_::import(module_name.c_str());
        out.bind_application(source, module.attr(class_name.c_str()));
      } catch (const py::error_already_set& e) {
        throw UnknownTypeError("cannot load target class " + module_name + "." + class_name + " for '" + source +
                               "': " + e.what());
      }
    }
  }
  if (type_map.contains("types")) {
    for (const auto& [source, info] : type_map.at("types").items()) {
      const auto imports = info.value("imports", std::vector<std::string>{});
      try {
        out.bind_library(source, eval_target_type(info.at("target").get<std::string>(), imports));
      } catch (const py::error_already_set& e) {
        throw UnknownTypeError("cannot evaluate target type for '" + source + "': " + e.what());
      }
    }
  }
  return out;
}

py::object eval_target_type(const std::string& expression, const std::vector<std::string>& imports) {
  py::dict ns;
  ns["__builtins__"] = py::module_::import("builtins");
  for (const auto& statement : imports) py::exec(py::str(statement), ns);
  return py::eval(py::str(expression), ns);
}

py::object reconstruct(const SerializedValue& value, IdentityRegistry& registry, const TargetClassRegistry& classes,
                       py::handle container_hint) {
  Reconstructor r(registry, classes);
  try {
    return r.value(value, container_hint);
  } catch (const py::error_already_set& e) {
    throw PayloadError(std::string("target runtime error during reconstruction: ") + e.what());
  }
}

py::object reconstruct_effect(const SerializedValue& value, IdentityRegistry& registry,
                              const TargetClassRegistry& classes, py::handle container_hint) {
  Reconstructor r(registry, classes, true);
  try {
    return r.value(value, container_hint);
  } catch (const py::error_already_set& e) {
    throw PayloadError(std::string("target runtime error during reconstruction: ") + e.what());
  }
}

void update_into(py::handle live, const SerializedValue& value, IdentityRegistry& registry,
                 const TargetClassRegistry& classes, py::handle container_hint) {
  Reconstructor r(registry, classes, true);
  try {
    r.update(live, value, container_hint);
  } catch (const py::error_already_set& e) {
    throw PayloadError(std::string("target runtime error while applying recorded state: ") + e.what());
  }
}

py::object reconstruct_app_object(const SerializedValue& value, IdentityRegistry& registry,
                                  const TargetClassRegistry& classes) {
  if (value.kind() != ValueKind::app_object) {
    throw PayloadError("expected an app_object node, got " + std::string(to_string(value.kind())));
  }
  return reconstruct(value, registry, classes);
}

std::string private_attribute(std::string_view class_name, std::string_view field) {
  const auto first = class_name.find_first_not_of('_');
  const std::string_view stripped = first == std::string_view::npos ? std::string_view{} : class_name.substr(first);
  return "_" + std::string(stripped) + "__" + std::string(field);
}

std::string field_attribute(const FieldRecord& field, const TargetClassRegistry& classes) {
  if (field.visibility != Visibility::private_ && field.visibility != Visibility::protected_) return field.name;
  std::string owner = simple_name(field.declaring_class);
  if (const py::object* cls = classes.find(field.declaring_class)) {
    owner = py::str(cls->attr("__name__"));
  }
  return private_attribute(owner, field.name);
}

std::string static_attribute(py::handle cls, std::string_view field) {
  const std::string mangled = private_attribute(py::str(cls.attr("__name__")).cast<std::string>(), field);
  for (py::handle klass : cls.attr("__mro__")) {
    py::dict attrs = klass.attr("__dict__").attr("copy")();
    if (attrs.contains(mangled)) return mangled;
    if (attrs.contains(std::string(field))) return std::string(field);
  }
  return std::string(field);
}

bool is_library_class(std::string_view declaring_class) {
  return declaring_class.starts_with("java.") || declaring_class.starts_with("javax.") ||
         declaring_class.starts_with("jdk.") || declaring_class.starts_with("sun.") ||
         declaring_class.starts_with("com.sun.");
}

py::object low_level_allocate(py::handle cls) {
  if (!PyType_Check(cls.ptr())) {
    throw UnknownTypeError("target '" + py::repr(cls).cast<std::string>() + "' is not a class");
  }
  for (py::handle base : cls.attr("__mro__")) {
    auto* type = reinterpret_cast<PyTypeObject*>(base.ptr());
    if (!(type->tp_flags & Py_TPFLAGS_HEAPTYPE)) {
      try {
        return base.attr("__new__")(cls);
      } catch (const py::error_already_set& e) {
        throw FieldAssignError("cannot allocate " + py::str(cls).cast<std::string>() + ": " + e.what());
      }
    }
  }
  throw FieldAssignError("no built-in base to allocate " + py::str(cls).cast<std::string>());
}

void assign_in_place(py::handle target, py::handle source) {
  if (same_object(target, source)) return;
  if (PyList_Check(target.ptr()) || PyByteArray_Check(target.ptr())) {
    target.attr("__setitem__")(py::slice(py::none(), py::none(), py::none()), source);
    return;
  }
  if (PyDict_Check(target.ptr()) || PySet_Check(target.ptr())) {
    target.attr("clear")();
    target.attr("update")(source);
    return;
  }
  py::module_ io = import("io");
  if (py::isinstance(target, import("collections").attr("deque"))) {
    target.attr("clear")();
    target.attr("extend")(source);
    return;
  }
  if (py::isinstance(target, io.attr("BytesIO")) || py::isinstance(target, io.attr("StringIO"))) {
    target.attr("seek")(0);
    target.attr("truncate")();
    target.attr("write")(source.attr("getvalue")());
    target.attr("seek")(source.attr("tell")());
    return;
  }
  if (PyExceptionInstance_Check(target.ptr()) && PyExceptionInstance_Check(source.ptr())) {
    target.attr("args") = source.attr("args");
  }
  if (py::hasattr(target, "__dict__") && py::hasattr(source, "__dict__") && !PyType_Check(target.ptr())) {
    py::object dict = target.attr("__dict__");
    dict.attr("clear")();
    dict.attr("update")(source.attr("__dict__"));
  }
}

py::object default_exception_class(std::string_view source_type) {
  static constexpr std::array<std::pair<std::string_view, const char*>, 17> kTable{{
      {"java.lang.IllegalArgumentException", "ValueError"},
      {"java.lang.NumberFormatException", "ValueError"},
      {"java.lang.IllegalStateException", "RuntimeError"},
      {"java.lang.RuntimeException", "RuntimeError"},
      {"java.lang.UnsupportedOperationException", "NotImplementedError"},
      {"java.lang.IndexOutOfBoundsException", "IndexError"},
      {"java.lang.ArrayIndexOutOfBoundsException", "IndexError"},
      {"java.lang.StringIndexOutOfBoundsException", "IndexError"},
      {"java.util.NoSuchElementException", "StopIteration"},
      {"java.lang.ArithmeticException", "ZeroDivisionError"},
      {"java.lang.ClassCastException", "TypeError"},
      {"java.lang.NullPointerException", "AttributeError"},
      {"java.io.IOException", "OSError"},
      {"java.io.FileNotFoundException", "FileNotFoundError"},
      {"java.io.EOFException", "EOFError"},
      {"java.io.UncheckedIOException", "OSError"},
      {"java.lang.Exception", "Exception"},
  }};
  py::module_ builtins = py::module_::import("builtins");
  for (const auto& [source, target] : kTable) {
    if (source == source_type) return builtins.attr(target);
  }
  return builtins.attr("Exception");
}

void apply_static_state(const StaticSnapshot& snapshot, const TargetClassRegistry& classes,
                        IdentityRegistry& registry) {
  for (const auto& [class_name, fields] : snapshot) {
    py::object cls = classes.resolve(class_name);
    for (const auto& [field, value] : fields) {
      py::object reconstructed = reconstruct(value, registry, classes);
      const std::string attr = static_attribute(cls, field);
      try {
        py::setattr(cls, py::str(attr), reconstructed);
      } catch (const py::error_already_set& e) {
        throw FieldAssignError("cannot set static " + class_name + "." + field + ": " + e.what());
      }
    }
  }
}

TargetStaticSnapshot snapshot_static_state(const TargetClassRegistry& classes,
                                           const std::function<bool(const std::string&)>& class_filter) {
  TargetStaticSnapshot out;
  py::object enum_base = import("enum").attr("Enum");
  py::object routine_types = py::make_tuple(py::module_::import("builtins").attr("staticmethod"),
                                            py::module_::import("builtins").attr("classmethod"),
                                            py::module_::import("builtins").attr("property"));
  for (const auto& [source_name, cls] : classes.application_classes()) {
    if (class_filter && !class_filter(source_name)) continue;
    const bool is_enum = PyType_Check(cls.ptr()) && PyObject_IsSubclass(cls.ptr(), enum_base.ptr()) == 1;
    const std::string class_name = py::str(cls.attr("__name__"));
    py::dict attrs = cls.attr("__dict__").attr("copy")();
    for (auto [key, value] : attrs) {
      const std::string name = py::str(key);
      if (is_dunder(name) || is_sunder(name)) continue;
      if (PyCallable_Check(value.ptr()) || py::isinstance(value, routine_types)) continue;
      if (is_enum && py::isinstance(value, cls)) continue;
      out[source_name][demangle(name, class_name)] = py::reinterpret_borrow<py::object>(value);
    }
  }
  return out;
}

}  // namespace xlv::pyrt
