#include "xlv/trace_model.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <unordered_set>
#include <utility>

#include "xlv/errors.hpp"
#include "xlv/trace_json.hpp"

namespace xlv {

namespace {

constexpr std::array<std::string_view, 10> kKindNames = {
    "null", "primitive", "array", "collection", "map",
    "stream", "enum_const", "exception", "app_object", "reference",
};

constexpr std::array<std::string_view, 3> kCategoryNames = {"list", "set", "immutable"};

constexpr std::array<std::string_view, 4> kVisibilityNames = {"public", "protected", "private",
                                                              "package"};

template <std::size_t N>
std::optional<std::size_t> index_of(const std::array<std::string_view, N>& names,
                                    std::string_view text) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == text) return i;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// JSON field access with path-qualified errors

const Json& require(const Json& node, const char* key, const std::string& path) {
  if (!node.is_object()) throw SchemaError(path, "expected an object");
  auto it = node.find(key);
  if (it == node.end()) throw SchemaError(path, std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const Json& node, const char* key, const std::string& path) {
  const Json& v = require(node, key, path);
  if (!v.is_string()) throw SchemaError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

bool require_bool(const Json& node, const char* key, const std::string& path) {
  const Json& v = require(node, key, path);
  if (!v.is_boolean()) throw SchemaError(path + "." + key, "expected a boolean");
  return v.get<bool>();
}

std::int64_t require_int(const Json& node, const char* key, const std::string& path) {
  const Json& v = require(node, key, path);
  if (!v.is_number_integer()) throw SchemaError(path + "." + key, "expected an integer");
  return v.get<std::int64_t>();
}

const Json& require_array(const Json& node, const char* key, const std::string& path) {
  const Json& v = require(node, key, path);
  if (!v.is_array()) throw SchemaError(path + "." + key, "expected an array");
  return v;
}

std::string indexed(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

std::vector<SerializedValue> items_from_json(const Json& payload, const std::string& path) {
  const Json& items = require_array(payload, "items", path);
  std::vector<SerializedValue> out;
  out.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    out.push_back(value_from_json(items[i], indexed(path + ".items", i)));
  }
  return out;
}

CollectionCategory category_from_json(const Json& payload, const std::string& path) {
  auto it = payload.find("category");
  if (it == payload.end()) return CollectionCategory::list;
  if (!it->is_string()) throw SchemaError(path + ".category", "expected a string");
  auto category = parse_collection_category(it->get<std::string>());
  if (!category) {
    throw SchemaError(path + ".category", "unknown collection category '" +
                                              it->get<std::string>() + "'");
  }
  return *category;
}

Payload payload_from_json(ValueKind kind, const Json& node, const std::string& path) {
  static const Json kEmpty = Json::object();
  const Json* payload_ptr = &kEmpty;
  if (auto it = node.find("payload"); it != node.end()) {
    payload_ptr = &*it;
  } else if (kind != ValueKind::null) {
    throw SchemaError(path, "missing field 'payload'");
  }
  const Json& payload = *payload_ptr;
  const std::string ppath = path + ".payload";
  if (!payload.is_object()) throw SchemaError(ppath, "expected an object");

  switch (kind) {
    case ValueKind::null:
      return NullPayload{};
    case ValueKind::primitive:
      return PrimitivePayload{require_string(payload, "value", ppath)};
    case ValueKind::array:
      return ArrayPayload{category_from_json(payload, ppath), items_from_json(payload, ppath)};
    case ValueKind::collection:
      return CollectionPayload{category_from_json(payload, ppath), items_from_json(payload, ppath)};
    case ValueKind::map: {
      MapPayload out;
      const Json& entries = require_array(payload, "entries", ppath);
      for (std::size_t i = 0; i < entries.size(); ++i) {
        const std::string epath = indexed(ppath + ".entries", i);
        out.entries.push_back(MapEntry{value_from_json(require(entries[i], "key", epath), epath + ".key"),
                                       value_from_json(require(entries[i], "value", epath),
                                                       epath + ".value")});
      }
      return out;
    }
    case ValueKind::stream: {
      StreamPayload out;
      const Json& bytes = require_array(payload, "byte_array", ppath);
      for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (!bytes[i].is_number_integer()) {
          throw SchemaError(indexed(ppath + ".byte_array", i), "expected an integer");
        }
        auto b = bytes[i].get<std::int64_t>();
        if (b < -128 || b > 127) {
          throw SchemaError(indexed(ppath + ".byte_array", i), "byte out of range -128..127");
        }
        out.byte_array.push_back(static_cast<std::int8_t>(b));
      }
      out.position = require_int(payload, "position", ppath);
      return out;
    }
    case ValueKind::enum_const: {
      EnumPayload out;
      out.name = require_string(payload, "name", ppath);
      if (auto it = payload.find("value"); it != payload.end() && !it->is_null()) {
        if (it->is_number_integer()) {
          out.value = it->get<std::int64_t>();
        } else if (it->is_string()) {
          out.value = it->get<std::string>();
        } else if (it->is_boolean()) {
          out.value = it->get<bool>();
        } else {
          throw SchemaError(ppath + ".value", "enum value must be an integer, string or boolean");
        }
      }
      if (auto it = payload.find("ordinal"); it != payload.end() && !it->is_null()) {
        if (!it->is_number_integer()) throw SchemaError(ppath + ".ordinal", "expected an integer");
        out.ordinal = it->get<std::int64_t>();
      }
      return out;
    }
    case ValueKind::exception: {
      ExceptionPayload out;
      if (auto it = payload.find("message"); it != payload.end() && !it->is_null()) {
        if (!it->is_string()) throw SchemaError(ppath + ".message", "expected a string");
        out.message = it->get<std::string>();
      }
      return out;
    }
    case ValueKind::app_object: {
      ObjectPayload out;
      const Json& fields = require_array(payload, "fields", ppath);
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const std::string fpath = indexed(ppath + ".fields", i);
        FieldRecord field;
        field.name = require_string(fields[i], "name", fpath);
        field.declaring_class = require_string(fields[i], "declaring_class", fpath);
        const std::string vis = require_string(fields[i], "visibility", fpath);
        auto parsed = parse_visibility(vis);
        if (!parsed) throw SchemaError(fpath + ".visibility", "unknown visibility '" + vis + "'");
        field.visibility = *parsed;
        field.is_static = require_bool(fields[i], "is_static", fpath);
        field.value = value_from_json(require(fields[i], "value", fpath), fpath + ".value");
        out.fields.push_back(std::move(field));
      }
      return out;
    }
    case ValueKind::reference:
      return ReferencePayload{require_string(payload, "ref", ppath)};
  }
  throw SchemaError(path, "unhandled kind");
}

Json payload_to_json(const Payload& payload) {
  return std::visit(
      [](const auto& p) -> Json {
        using T = std::decay_t<decltype(p)>;
        Json out = Json::object();
        if constexpr (std::is_same_v<T, NullPayload>) {
          return out;
        } else if constexpr (std::is_same_v<T, PrimitivePayload>) {
          out["value"] = p.value;
        } else if constexpr (std::is_same_v<T, ArrayPayload> || std::is_same_v<T, CollectionPayload>) {
          out["category"] = std::string(to_string(p.category));
          out["items"] = to_json(p.items);
        } else if constexpr (std::is_same_v<T, MapPayload>) {
          Json entries = Json::array();
          for (const auto& e : p.entries) {
            Json entry = Json::object();
            entry["key"] = to_json(e.key);
            entry["value"] = to_json(e.value);
            entries.push_back(std::move(entry));
          }
          out["entries"] = std::move(entries);
        } else if constexpr (std::is_same_v<T, StreamPayload>) {
          Json bytes = Json::array();
          for (auto b : p.byte_array) bytes.push_back(static_cast<int>(b));
          out["byte_array"] = std::move(bytes);
          out["position"] = p.position;
        } else if constexpr (std::is_same_v<T, EnumPayload>) {
          out["name"] = p.name;
          if (p.value) {
            std::visit([&](const auto& v) { out["value"] = v; }, *p.value);
          }
          if (p.ordinal) out["ordinal"] = *p.ordinal;
        } else if constexpr (std::is_same_v<T, ExceptionPayload>) {
          out["message"] = p.message ? Json(*p.message) : Json(nullptr);
        } else if constexpr (std::is_same_v<T, ObjectPayload>) {
          Json fields = Json::array();
          for (const auto& f : p.fields) {
            Json field = Json::object();
            field["name"] = f.name;
            field["declaring_class"] = f.declaring_class;
            field["visibility"] = std::string(to_string(f.visibility));
            field["is_static"] = f.is_static;
            field["value"] = to_json(f.value);
            fields.push_back(std::move(field));
          }
          out["fields"] = std::move(fields);
        } else if constexpr (std::is_same_v<T, ReferencePayload>) {
          out["ref"] = p.ref;
        }
        return out;
      },
      payload);
}

// ---------------------------------------------------------------------------
// Invariant checking

class InvariantChecker {
 public:
  void check_log(const TraceLog& log) {
    std::int64_t last_index = std::numeric_limits<std::int64_t>::min();
    for (std::size_t i = 0; i < log.roots.size(); ++i) {
      check_record(log.roots[i], indexed("roots", i), last_index);
    }
  }

 private:
  std::unordered_set<std::string> seen_tokens_;

  // Pre-order numbering: every record's index exceeds everything emitted before it,
  // which places children strictly between the parent's entry and its next sibling.
  void check_record(const InvocationRecord& rec, const std::string& path, std::int64_t& last_index) {
    if (rec.invocation_index <= last_index) {
      throw SchemaError(path + ".invocation_index",
                        "invocation_index " + std::to_string(rec.invocation_index) +
                            " not greater than preceding index " + std::to_string(last_index));
    }
    last_index = rec.invocation_index;

    const MethodId& m = rec.method;
    if (m.is_constructor && m.method_name != kConstructorToken) {
      throw SchemaError(path + ".method", "constructor must be named <init>");
    }
    if (m.is_constructor && m.is_static) {
      throw SchemaError(path + ".method", "constructor cannot be static");
    }
    const bool expects_before = !m.is_static && !m.is_constructor;
    if (rec.instance_before.has_value() != expects_before) {
      throw SchemaError(path + ".instance_before",
                        expects_before ? "instance method requires instance_before"
                                       : "static method or constructor must not carry instance_before");
    }
    if (rec.instance_after.has_value() == m.is_static) {
      throw SchemaError(path + ".instance_after",
                        m.is_static ? "static method must not carry instance_after"
                                    : "instance method or constructor requires instance_after");
    }
    if (rec.args_before.size() != rec.args_after.size()) {
      throw SchemaError(path + ".args_after", "args_before and args_after lengths differ");
    }

    if (rec.instance_before) check_value(*rec.instance_before, path + ".instance_before");
    check_values(rec.args_before, path + ".args_before");
    check_static(rec.static_before, path + ".static_before");
    for (std::size_t i = 0; i < rec.children.size(); ++i) {
      check_record(rec.children[i], indexed(path + ".children", i), last_index);
    }
    if (rec.instance_after) check_value(*rec.instance_after, path + ".instance_after");
    check_values(rec.args_after, path + ".args_after");
    check_static(rec.static_after, path + ".static_after");
    if (const auto* r = std::get_if<ReturnValue>(&rec.result)) {
      check_value(r->value, path + ".result.return");
    } else if (const auto* t = std::get_if<Thrown>(&rec.result)) {
      auto kind = t->value.kind();
      if (kind != ValueKind::exception && kind != ValueKind::app_object &&
          kind != ValueKind::reference) {
        throw SchemaError(path + ".result.thrown", "thrown value must be an exception");
      }
      check_value(t->value, path + ".result.thrown");
    }
  }

  void check_values(const std::vector<SerializedValue>& values, const std::string& path) {
    for (std::size_t i = 0; i < values.size(); ++i) check_value(values[i], indexed(path, i));
  }

  void check_static(const StaticSnapshot& snapshot, const std::string& path) {
    for (const auto& [cls, fields] : snapshot) {
      for (const auto& [name, value] : fields) check_value(value, path + "." + cls + "." + name);
    }
  }

  void check_value(const SerializedValue& v, const std::string& path) {
    if (v.kind() == ValueKind::reference) {
      const auto& ref = std::get<ReferencePayload>(v.payload).ref;
      if (!seen_tokens_.contains(ref)) {
        throw SchemaError(path, "reference to identity '" + ref + "' not emitted earlier");
      }
      return;
    }
    // Registered before the payload so self-referential graphs are well formed.
    if (v.identity) seen_tokens_.insert(*v.identity);

    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ArrayPayload> || std::is_same_v<T, CollectionPayload>) {
            check_values(p.items, path + ".payload.items");
          } else if constexpr (std::is_same_v<T, MapPayload>) {
            for (std::size_t i = 0; i < p.entries.size(); ++i) {
              const std::string epath = indexed(path + ".payload.entries", i);
              check_value(p.entries[i].key, epath + ".key");
              check_value(p.entries[i].value, epath + ".value");
            }
          } else if constexpr (std::is_same_v<T, StreamPayload>) {
            const auto len = static_cast<std::int64_t>(p.byte_array.size());
            if (p.position < 0 || p.position > len) {
              throw SchemaError(path + ".payload.position",
                                "stream position " + std::to_string(p.position) +
                                    " outside [0, " + std::to_string(len) + "]");
            }
          } else if constexpr (std::is_same_v<T, ObjectPayload>) {
            std::set<std::pair<std::string, std::string>> names;
            for (std::size_t i = 0; i < p.fields.size(); ++i) {
              const auto& f = p.fields[i];
              const std::string fpath = indexed(path + ".payload.fields", i);
              if (!names.emplace(f.name, f.declaring_class).second) {
                throw SchemaError(fpath, "duplicate field '" + f.name + "' declared in " +
                                             f.declaring_class);
              }
              check_value(f.value, fpath + ".value");
            }
          }
        },
        v.payload);
  }
};

template <typename Fn>
void visit_preorder(const InvocationRecord& rec, Fn& fn) {
  fn(rec);
  for (const auto& child : rec.children) visit_preorder(child, fn);
}

}  // namespace

// ---------------------------------------------------------------------------
// enums

std::string_view to_string(ValueKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<ValueKind> parse_value_kind(std::string_view text) {
  if (auto i = index_of(kKindNames, text)) return static_cast<ValueKind>(*i);
  return std::nullopt;
}

std::string_view to_string(CollectionCategory category) {
  return kCategoryNames[static_cast<std::size_t>(category)];
}

std::optional<CollectionCategory> parse_collection_category(std::string_view text) {
  if (auto i = index_of(kCategoryNames, text)) return static_cast<CollectionCategory>(*i);
  return std::nullopt;
}

std::string_view to_string(Visibility visibility) {
  return kVisibilityNames[static_cast<std::size_t>(visibility)];
}

std::optional<Visibility> parse_visibility(std::string_view text) {
  if (auto i = index_of(kVisibilityNames, text)) return static_cast<Visibility>(*i);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// value types

bool ArrayPayload::operator==(const ArrayPayload& o) const {
  return category == o.category && items == o.items;
}
bool CollectionPayload::operator==(const CollectionPayload& o) const {
  return category == o.category && items == o.items;
}
bool MapPayload::operator==(const MapPayload& o) const { return entries == o.entries; }
bool ObjectPayload::operator==(const ObjectPayload& o) const { return fields == o.fields; }

bool SerializedValue::operator==(const SerializedValue& o) const {
  return type_name == o.type_name && identity == o.identity && payload == o.payload;
}

SerializedValue SerializedValue::null_value() { return SerializedValue{"null", std::nullopt, NullPayload{}}; }

SerializedValue SerializedValue::primitive(std::string type_name, std::string literal) {
  return SerializedValue{std::move(type_name), std::nullopt, PrimitivePayload{std::move(literal)}};
}

SerializedValue SerializedValue::reference(std::string token) {
  return SerializedValue{"", std::nullopt, ReferencePayload{std::move(token)}};
}

std::string MethodId::key() const { return class_name + "." + method_name + signature; }

// ---------------------------------------------------------------------------
// JSON mapping

Json to_json(const SerializedValue& value) {
  Json out = Json::object();
  out["kind"] = std::string(to_string(value.kind()));
  out["type_name"] = value.type_name;
  if (value.identity) out["identity"] = *value.identity;
  out["payload"] = payload_to_json(value.payload);
  return out;
}

Json to_json(const std::vector<SerializedValue>& values) {
  Json out = Json::array();
  for (const auto& v : values) out.push_back(to_json(v));
  return out;
}

Json to_json(const MethodId& method) {
  Json out = Json::object();
  out["class"] = method.class_name;
  out["name"] = method.method_name;
  out["signature"] = method.signature;
  out["is_constructor"] = method.is_constructor;
  out["is_static"] = method.is_static;
  return out;
}

Json to_json(const StaticSnapshot& snapshot) {
  Json out = Json::object();
  for (const auto& [cls, fields] : snapshot) {
    Json fs = Json::object();
    for (const auto& [name, value] : fields) fs[name] = to_json(value);
    out[cls] = std::move(fs);
  }
  return out;
}

Json to_json(const InvocationResult& result) {
  Json out = Json::object();
  if (const auto* r = std::get_if<ReturnValue>(&result)) {
    out["return"] = to_json(r->value);
  } else if (const auto* t = std::get_if<Thrown>(&result)) {
    out["thrown"] = to_json(t->value);
  } else {
    out["void"] = true;
  }
  return out;
}

Json to_json(const InvocationRecord& record) {
  Json out = Json::object();
  out["method"] = to_json(record.method);
  out["invocation_index"] = record.invocation_index;
  out["instance_before"] = record.instance_before ? to_json(*record.instance_before) : Json(nullptr);
  out["args_before"] = to_json(record.args_before);
  out["static_before"] = to_json(record.static_before);
  Json children = Json::array();
  for (const auto& c : record.children) children.push_back(to_json(c));
  out["children"] = std::move(children);
  out["instance_after"] = record.instance_after ? to_json(*record.instance_after) : Json(nullptr);
  out["args_after"] = to_json(record.args_after);
  out["static_after"] = to_json(record.static_after);
  out["result"] = to_json(record.result);
  return out;
}

Json to_json(const TraceLog& log) {
  Json out = Json::object();
  out["schema_version"] = log.schema_version;
  out["test_id"] = log.test_id;
  Json roots = Json::array();
  for (const auto& r : log.roots) roots.push_back(to_json(r));
  out["roots"] = std::move(roots);
  return out;
}

SerializedValue value_from_json(const Json& node, const std::string& path) {
  if (!node.is_object()) throw SchemaError(path, "expected an object");
  const std::string kind_text = require_string(node, "kind", path);
  auto kind = parse_value_kind(kind_text);
  if (!kind) throw SchemaError(path + ".kind", "unknown kind '" + kind_text + "'");
  SerializedValue out;
  if (auto it = node.find("type_name"); it != node.end() && !it->is_null()) {
    if (!it->is_string()) throw SchemaError(path + ".type_name", "expected a string");
    out.type_name = it->get<std::string>();
  } else if (*kind != ValueKind::null && *kind != ValueKind::reference) {
    throw SchemaError(path, "missing field 'type_name'");
  }
  if (auto it = node.find("identity"); it != node.end() && !it->is_null()) {
    if (!it->is_string()) throw SchemaError(path + ".identity", "expected a string");
    out.identity = it->get<std::string>();
  }
  out.payload = payload_from_json(*kind, node, path);
  return out;
}

std::vector<SerializedValue> values_from_json(const Json& node, const std::string& path) {
  if (!node.is_array()) throw SchemaError(path, "expected an array");
  std::vector<SerializedValue> out;
  out.reserve(node.size());
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(value_from_json(node[i], indexed(path, i)));
  return out;
}

MethodId method_from_json(const Json& node, const std::string& path) {
  MethodId m;
  m.class_name = require_string(node, "class", path);
  m.method_name = require_string(node, "name", path);
  m.signature = require_string(node, "signature", path);
  m.is_constructor = require_bool(node, "is_constructor", path);
  m.is_static = require_bool(node, "is_static", path);
  return m;
}

StaticSnapshot static_from_json(const Json& node, const std::string& path) {
  if (node.is_null()) return {};
  if (!node.is_object()) throw SchemaError(path, "expected an object");
  StaticSnapshot out;
  for (const auto& [cls, fields] : node.items()) {
    if (!fields.is_object()) throw SchemaError(path + "." + cls, "expected an object");
    auto& target = out[cls];
    for (const auto& [name, value] : fields.items()) {
      target.emplace(name, value_from_json(value, path + "." + cls + "." + name));
    }
  }
  return out;
}

InvocationResult result_from_json(const Json& node, const std::string& path) {
  if (!node.is_object()) throw SchemaError(path, "expected an object");
  const bool has_return = node.contains("return");
  const bool has_thrown = node.contains("thrown");
  const bool has_void = node.contains("void");
  if (int(has_return) + int(has_thrown) + int(has_void) != 1) {
    throw SchemaError(path, "result must hold exactly one of return, thrown, void");
  }
  if (has_return) return ReturnValue{value_from_json(node.at("return"), path + ".return")};
  if (has_thrown) return Thrown{value_from_json(node.at("thrown"), path + ".thrown")};
  if (!node.at("void").is_boolean() || !node.at("void").get<bool>()) {
    throw SchemaError(path + ".void", "expected true");
  }
  return VoidResult{};
}

InvocationRecord record_from_json(const Json& node, const std::string& path) {
  if (!node.is_object()) throw SchemaError(path, "expected an object");
  InvocationRecord rec;
  rec.method = method_from_json(require(node, "method", path), path + ".method");
  rec.invocation_index = require_int(node, "invocation_index", path);
  if (auto it = node.find("instance_before"); it != node.end() && !it->is_null()) {
    rec.instance_before = value_from_json(*it, path + ".instance_before");
  }
  if (auto it = node.find("instance_after"); it != node.end() && !it->is_null()) {
    rec.instance_after = value_from_json(*it, path + ".instance_after");
  }
  rec.args_before = values_from_json(require(node, "args_before", path), path + ".args_before");
  rec.args_after = values_from_json(require(node, "args_after", path), path + ".args_after");
  if (auto it = node.find("static_before"); it != node.end()) {
    rec.static_before = static_from_json(*it, path + ".static_before");
  }
  if (auto it = node.find("static_after"); it != node.end()) {
    rec.static_after = static_from_json(*it, path + ".static_after");
  }
  rec.result = result_from_json(require(node, "result", path), path + ".result");
  if (auto it = node.find("children"); it != node.end()) {
    if (!it->is_array()) throw SchemaError(path + ".children", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      rec.children.push_back(record_from_json((*it)[i], indexed(path + ".children", i)));
    }
  }
  return rec;
}

// ---------------------------------------------------------------------------
// operations

TraceLog parse_trace(std::string_view raw) {
  Json doc;
  try {
    doc = Json::parse(raw.begin(), raw.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("", std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("", "top level must be an object");
  TraceLog log;
  log.schema_version = require_string(doc, "schema_version", "");
  if (log.schema_version != kSchemaVersion) {
    throw VersionError("unsupported schema_version '" + log.schema_version + "' (expected '" +
                       std::string(kSchemaVersion) + "')");
  }
  log.test_id = require_string(doc, "test_id", "");
  const Json& roots = require_array(doc, "roots", "");
  for (std::size_t i = 0; i < roots.size(); ++i) {
    log.roots.push_back(record_from_json(roots[i], indexed("roots", i)));
  }
  validate_trace(log);
  return log;
}

void validate_trace(const TraceLog& log) {
  if (log.schema_version != kSchemaVersion) {
    throw VersionError("unsupported schema_version '" + log.schema_version + "'");
  }
  InvariantChecker{}.check_log(log);
}

std::string serialize_trace(const TraceLog& log) { return to_json(log).dump(2) + "\n"; }

std::vector<const InvocationRecord*> extract_invocations(const TraceLog& log) {
  std::vector<const InvocationRecord*> out;
  auto collect = [&out](const InvocationRecord& r) { out.push_back(&r); };
  for (const auto& root : log.roots) visit_preorder(root, collect);
  return out;
}

std::vector<const InvocationRecord*> direct_callees(const InvocationRecord& focal,
                                                    const std::set<MethodId>& app_methods) {
  std::vector<const InvocationRecord*> out;
  for (const auto& child : focal.children) {
    if (app_methods.contains(child.method)) out.push_back(&child);
  }
  return out;
}

std::size_t count_invocations(const TraceLog& log) {
  std::size_t n = 0;
  auto count = [&n](const InvocationRecord&) { ++n; };
  for (const auto& root : log.roots) visit_preorder(root, count);
  return n;
}

}  // namespace xlv
