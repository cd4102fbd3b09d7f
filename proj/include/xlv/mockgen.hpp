#pragma once

// Turns one focal invocation of a trace into an in-isolation test: callees are
// replaced by recorded behaviors, the initial state is rebuilt, the focal runs
// for real, and every recorded post-state component is asserted.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xlv/equality_config.hpp"
#include "xlv/project_schema.hpp"
#include "xlv/trace_model.hpp"
#include "xlv/typeres.hpp"

namespace xlv::mockgen {

struct CallRecord {
  std::int64_t invocation_index = 0;
  InvocationResult result;
  std::vector<std::optional<SerializedValue>> arg_effects;  // set where args_after differs from args_before
  std::optional<SerializedValue> instance_effect;           // instance_after when it changed; always for constructors
  StaticSnapshot static_delta;                              // fields whose value changed during the call
};

struct CalleeBehavior {
  MethodId method;
  std::vector<CallRecord> calls;  // execution order
};

struct InitialState {
  StaticSnapshot static_before;
  std::optional<SerializedValue> instance_before;
  std::vector<SerializedValue> args_before;
};

struct ExpectedState {
  InvocationResult result;
  std::optional<SerializedValue> instance_after;
  std::vector<SerializedValue> args_after;
  StaticSnapshot static_after;
};

struct MockTestSpec {
  MethodId focal;
  std::int64_t invocation_index = 0;
  std::string test_id;
  std::string schema_version;
  std::vector<CalleeBehavior> callee_behaviors;  // ordered by first invocation
  InitialState initial;
  ExpectedState expected;
};

/// Fields of `after` that are absent from or different in `before`.
StaticSnapshot static_delta(const StaticSnapshot& before, const StaticSnapshot& after);

MockTestSpec plan_mock_test(const InvocationRecord& focal, const TraceLog& log, const std::set<MethodId>& app_methods);

struct EmittedTest {
  std::string file_name;  // relative to the project output directory
  std::string source_text;
  std::string focal_fragment_id;
};

struct EmitContext {
  const ProjectSchema& schema;
  const typeres::ContextTypeMap& ctm;
  EqualityConfig equality;
};

/// Throws EmitError when the focal or a callee is unknown to the schema or a
/// declared parameter/return type of the focal has no entry in the type map.
EmittedTest emit_test(const MockTestSpec& spec, const EmitContext& ctx);

/// "mock_tests/<class>/<method>/<test>/inv_<index>_test.py"
std::string test_file_name(const MockTestSpec& spec);

/// Type-map document embedded in emitted tests (classes, library types, focal hints, equality).
Json runtime_type_map(const Fragment& focal, const EmitContext& ctx);

/// Characters outside [A-Za-z0-9_.-] become '_'.
std::string sanitize(std::string_view text);

}  // namespace xlv::mockgen
