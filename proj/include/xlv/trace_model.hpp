#pragma once

// Language-neutral trace schema: one TraceLog per executed source test, holding
// a call tree of InvocationRecords whose snapshots are SerializedValues.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace xlv {

inline constexpr std::string_view kSchemaVersion = "1";
inline constexpr std::string_view kConstructorToken = "<init>";

enum class ValueKind {
  null,
  primitive,
  array,
  collection,
  map,
  stream,
  enum_const,
  exception,
  app_object,
  reference,
};

std::string_view to_string(ValueKind kind);
std::optional<ValueKind> parse_value_kind(std::string_view text);

enum class CollectionCategory { list, set, immutable };

std::string_view to_string(CollectionCategory category);
std::optional<CollectionCategory> parse_collection_category(std::string_view text);

enum class Visibility { public_, protected_, private_, package };

std::string_view to_string(Visibility visibility);
std::optional<Visibility> parse_visibility(std::string_view text);

struct SerializedValue;
struct MapEntry;
struct FieldRecord;

struct NullPayload {
  bool operator==(const NullPayload&) const = default;
};

struct PrimitivePayload {
  std::string value;  // string-encoded literal
  bool operator==(const PrimitivePayload&) const = default;
};

struct ArrayPayload {
  CollectionCategory category = CollectionCategory::list;
  std::vector<SerializedValue> items;
  bool operator==(const ArrayPayload&) const;
};

struct CollectionPayload {
  CollectionCategory category = CollectionCategory::list;
  std::vector<SerializedValue> items;
  bool operator==(const CollectionPayload&) const;
};

struct MapPayload {
  std::vector<MapEntry> entries;
  bool operator==(const MapPayload&) const;
};

struct StreamPayload {
  std::vector<std::int8_t> byte_array;
  std::int64_t position = 0;
  bool operator==(const StreamPayload&) const = default;
};

using EnumScalar = std::variant<std::int64_t, std::string, bool>;

struct EnumPayload {
  std::string name;
  std::optional<EnumScalar> value;
  std::optional<std::int64_t> ordinal;
  bool operator==(const EnumPayload&) const = default;
};

struct ExceptionPayload {
  std::optional<std::string> message;
  bool operator==(const ExceptionPayload&) const = default;
};

struct ObjectPayload {
  std::vector<FieldRecord> fields;
  bool operator==(const ObjectPayload&) const;
};

struct ReferencePayload {
  std::string ref;
  bool operator==(const ReferencePayload&) const = default;
};

// Alternative order mirrors ValueKind; kind() relies on it.
using Payload = std::variant<NullPayload, PrimitivePayload, ArrayPayload, CollectionPayload,
                             MapPayload, StreamPayload, EnumPayload, ExceptionPayload,
                             ObjectPayload, ReferencePayload>;

static_assert(std::variant_size_v<Payload> == static_cast<std::size_t>(ValueKind::reference) + 1,
              "every ValueKind needs exactly one payload alternative");

struct SerializedValue {
  std::string type_name;
  std::optional<std::string> identity;
  Payload payload;

  ValueKind kind() const noexcept { return static_cast<ValueKind>(payload.index()); }
  bool operator==(const SerializedValue&) const;

  static SerializedValue null_value();
  static SerializedValue primitive(std::string type_name, std::string literal);
  static SerializedValue reference(std::string token);
};

struct MapEntry {
  SerializedValue key;
  SerializedValue value;
  bool operator==(const MapEntry&) const = default;
};

struct FieldRecord {
  std::string name;
  std::string declaring_class;
  Visibility visibility = Visibility::public_;
  bool is_static = false;
  SerializedValue value;
  bool operator==(const FieldRecord&) const = default;
};

struct MethodId {
  std::string class_name;
  std::string method_name;
  std::string signature;
  bool is_constructor = false;
  bool is_static = false;

  /// "<class>.<method><signature>"; also the fragment id of a method fragment.
  std::string key() const;
  auto operator<=>(const MethodId&) const = default;
};

/// class name -> field name -> value
using StaticSnapshot = std::map<std::string, std::map<std::string, SerializedValue>>;

struct ReturnValue {
  SerializedValue value;
  bool operator==(const ReturnValue&) const = default;
};
struct Thrown {
  SerializedValue value;
  bool operator==(const Thrown&) const = default;
};
struct VoidResult {
  bool operator==(const VoidResult&) const = default;
};
using InvocationResult = std::variant<ReturnValue, Thrown, VoidResult>;

struct InvocationRecord {
  MethodId method;
  std::int64_t invocation_index = 0;
  std::optional<SerializedValue> instance_before;
  std::optional<SerializedValue> instance_after;
  std::vector<SerializedValue> args_before;
  std::vector<SerializedValue> args_after;
  StaticSnapshot static_before;
  StaticSnapshot static_after;
  InvocationResult result = VoidResult{};
  std::vector<InvocationRecord> children;

  bool operator==(const InvocationRecord&) const = default;
};

struct TraceLog {
  std::string schema_version{kSchemaVersion};
  std::string test_id;
  std::vector<InvocationRecord> roots;

  bool operator==(const TraceLog&) const = default;
};

/// Parses and validates a trace document. Throws SchemaError or VersionError.
TraceLog parse_trace(std::string_view raw);

/// Checks every TraceLog invariant; throws SchemaError naming the first violation.
void validate_trace(const TraceLog& log);

/// Canonical text form: fixed key order, two-space indent, trailing newline.
std::string serialize_trace(const TraceLog& log);

/// Pre-order list of every invocation in the log.
std::vector<const InvocationRecord*> extract_invocations(const TraceLog& log);

/// The focal's children whose method is an application method, in execution order.
std::vector<const InvocationRecord*> direct_callees(const InvocationRecord& focal,
                                                    const std::set<MethodId>& app_methods);

std::size_t count_invocations(const TraceLog& log);

}  // namespace xlv
