#pragma once

// JSON mapping of the trace schema. Shared by the trace parser, the mock-test
// emitter (which embeds snapshots in generated tests) and the runtime that reads
// them back.

#include <string>

#include "json.hpp"
#include "xlv/trace_model.hpp"

namespace xlv {

using Json = nlohmann::ordered_json;

Json to_json(const SerializedValue& value);
Json to_json(const MethodId& method);
Json to_json(const StaticSnapshot& snapshot);
Json to_json(const InvocationResult& result);
Json to_json(const InvocationRecord& record);
Json to_json(const TraceLog& log);

// `path` prefixes SchemaError messages.
SerializedValue value_from_json(const Json& node, const std::string& path = "value");
MethodId method_from_json(const Json& node, const std::string& path = "method");
StaticSnapshot static_from_json(const Json& node, const std::string& path = "static");
InvocationResult result_from_json(const Json& node, const std::string& path = "result");
InvocationRecord record_from_json(const Json& node, const std::string& path = "record");

std::vector<SerializedValue> values_from_json(const Json& node, const std::string& path);
Json to_json(const std::vector<SerializedValue>& values);

}  // namespace xlv
