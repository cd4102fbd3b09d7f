#include "xlv/mockgen.hpp"

#include <map>
#include <sstream>

#include "xlv/errors.hpp"
#include "xlv/trace_json.hpp"

namespace xlv::mockgen {

namespace {

// JSON text embedded as a raw triple-quoted literal. Compact JSON escapes every
// quote inside strings, so the closing delimiter cannot occur in the payload.
std::string raw_literal(const Json& value) { return "r\"\"\"" + value.dump() + "\"\"\""; }

std::string py_string(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '\\' || c == '"') out += '\\';
    out += c;
  }
  return out + "\"";
}

Json hint_json(const typeres::TypeMapping& mapping) {
  if (mapping.target_type == typeres::kFallbackType) return nullptr;
  Json out = Json::object();
  out["target"] = mapping.target_type;
  out["imports"] = mapping.target_imports;
  return out;
}

bool needs_mapping(const ProjectSchema& schema, const std::string& type) {
  static const std::set<std::string> kPrimitives = {"int",  "long",    "short", "byte", "char",
                                                    "boolean", "float", "double", "void"};
  const std::string erased = erasure(type);
  return !erased.empty() && !kPrimitives.contains(erased) && !schema.is_application_type(erased);
}

// {"result": hint|null, "args": [hint|null, ...]} from the fragment's declared types.
Json fragment_hints(const Fragment& fragment, std::size_t arity, const EmitContext& ctx, bool strict) {
  Json result = nullptr;
  Json args = Json::array();
  for (std::size_t i = 0; i < arity; ++i) args.push_back(nullptr);
  for (const auto& use : fragment.types) {
    if (use.role != TypeRole::param && use.role != TypeRole::return_) continue;
    if (!needs_mapping(ctx.schema, use.source_type)) continue;
    // Arrays keep their recorded sequence shape; the mapping covers the element type.
    if (use.source_type.find('[') != std::string::npos) continue;
    const auto* entry =
        ctx.ctm.find_site(ctx.schema.project, fragment.file, use.line, use.symbol, erasure(use.source_type));
    if (!entry) {
      if (!strict) continue;
      throw EmitError("no type mapping for " + erasure(use.source_type) + " at " + fragment.file + ":" +
                      std::to_string(use.line) + " (" + use.symbol + ") of " + fragment.id);
    }
    if (use.role == TypeRole::return_) {
      result = hint_json(entry->mapping);
    } else if (use.index && *use.index >= 0 && static_cast<std::size_t>(*use.index) < arity) {
      args[static_cast<std::size_t>(*use.index)] = hint_json(entry->mapping);
    }
  }
  Json out = Json::object();
  out["result"] = std::move(result);
  out["args"] = std::move(args);
  return out;
}

// Parameter count of a JVM method descriptor, nullopt when `sig` is not one.
std::optional<std::size_t> descriptor_arity(std::string_view sig) {
  if (sig.empty() || sig.front() != '(') return std::nullopt;
  std::size_t n = 0;
  for (std::size_t i = 1; i < sig.size() && sig[i] != ')'; ++i, ++n) {
    while (i < sig.size() && sig[i] == '[') ++i;
    if (i < sig.size() && sig[i] == 'L') {
      i = sig.find(';', i);
      if (i == std::string_view::npos) return std::nullopt;
    }
  }
  return n;
}

std::size_t arity_of(const Fragment& fragment) {
  if (const auto n = descriptor_arity(fragment.signature)) return *n;
  std::size_t n = 0;
  for (const auto& use : fragment.types) {
    if (use.role == TypeRole::param && use.index) n = std::max(n, static_cast<std::size_t>(*use.index) + 1);
  }
  return n;
}

const Fragment& require_fragment(const ProjectSchema& schema, const MethodId& method) {
  if (!schema.find_class(method.class_name)) {
    throw EmitError("class " + method.class_name + " is not part of project " + schema.project);
  }
  const Fragment* fragment = schema.find_method(method);
  if (!fragment) throw EmitError("no fragment for method " + method.key());
  return *fragment;
}

Json call_json(const CallRecord& call) {
  Json out = Json::object();
  out["invocation_index"] = call.invocation_index;
  out["result"] = to_json(call.result);
  Json effects = Json::array();
  for (const auto& effect : call.arg_effects) effects.push_back(effect ? to_json(*effect) : Json(nullptr));
  out["arg_effects"] = std::move(effects);
  out["instance_effect"] = call.instance_effect ? to_json(*call.instance_effect) : Json(nullptr);
  out["static_delta"] = to_json(call.static_delta);
  return out;
}

}  // namespace

std::string sanitize(std::string_view text) {
  std::string out;
  for (char c : text) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
    out += keep ? c : '_';
  }
  return out;
}

StaticSnapshot static_delta(const StaticSnapshot& before, const StaticSnapshot& after) {
  StaticSnapshot out;
  for (const auto& [class_name, fields] : after) {
    const auto b = before.find(class_name);
    for (const auto& [field, value] : fields) {
      if (b != before.end()) {
        const auto f = b->second.find(field);
        if (f != b->second.end() && f->second == value) continue;
      }
      out[class_name][field] = value;
    }
  }
  return out;
}

MockTestSpec plan_mock_test(const InvocationRecord& focal, const TraceLog& log, const std::set<MethodId>& app_methods) {
  MockTestSpec spec;
  spec.focal = focal.method;
  spec.invocation_index = focal.invocation_index;
  spec.test_id = log.test_id;
  spec.schema_version = log.schema_version;
  spec.initial = InitialState{focal.static_before, focal.instance_before, focal.args_before};
  spec.expected = ExpectedState{focal.result, focal.instance_after, focal.args_after, focal.static_after};

  std::map<MethodId, std::size_t> slot;
  for (const InvocationRecord* callee : direct_callees(focal, app_methods)) {
    auto [it, inserted] = slot.emplace(callee->method, spec.callee_behaviors.size());
    if (inserted) spec.callee_behaviors.push_back(CalleeBehavior{callee->method, {}});
    CallRecord call;
    call.invocation_index = callee->invocation_index;
    call.result = callee->result;
    for (std::size_t i = 0; i < callee->args_after.size(); ++i) {
      const bool changed = i >= callee->args_before.size() || !(callee->args_before[i] == callee->args_after[i]);
      call.arg_effects.push_back(changed ? std::optional(callee->args_after[i]) : std::nullopt);
    }
    if (callee->method.is_constructor) {
      call.instance_effect = callee->instance_after;
    } else if (callee->instance_after &&
               (!callee->instance_before || !(*callee->instance_before == *callee->instance_after))) {
      call.instance_effect = callee->instance_after;
    }
    call.static_delta = static_delta(callee->static_before, callee->static_after);
    spec.callee_behaviors[it->second].calls.push_back(std::move(call));
  }
  return spec;
}

std::string test_file_name(const MockTestSpec& spec) {
  std::string method = spec.focal.method_name;
  if (spec.focal.is_constructor) method = "init";
  return "mock_tests/" + sanitize(spec.focal.class_name) + "/" + sanitize(method) + "/" + sanitize(spec.test_id) +
         "/inv_" + std::to_string(spec.invocation_index) + "_test.py";
}

Json runtime_type_map(const Fragment& focal, const EmitContext& ctx) {
  Json classes = Json::object();
  for (const auto& c : ctx.schema.classes) {
    classes[c.name] = Json{{"module", c.target_module}, {"class", c.target_class}};
  }
  // A library type gets a default target only when every occurrence in the
  // project agrees on it; context-specific choices travel as hints instead.
  std::map<std::string, std::set<std::pair<std::string, std::vector<std::string>>>> targets;
  for (const auto& [_, entry] : ctx.ctm.entries(ctx.schema.project)) {
    targets[entry.source_type].emplace(entry.mapping.target_type, entry.mapping.target_imports);
  }
  Json types = Json::object();
  for (const auto& [source_type, choices] : targets) {
    if (choices.size() != 1) continue;
    const auto& [target, imports] = *choices.begin();
    if (target == typeres::kFallbackType) continue;
    types[source_type] = Json{{"target", target}, {"imports", imports}};
  }
  Json out = Json::object();
  out["classes"] = std::move(classes);
  out["types"] = std::move(types);
  out["hints"] = fragment_hints(focal, arity_of(focal), ctx, true);
  out["equality"] = to_json(ctx.equality);
  return out;
}

EmittedTest emit_test(const MockTestSpec& spec, const EmitContext& ctx) {
  const Fragment& focal = require_fragment(ctx.schema, spec.focal);
  const Json type_map = runtime_type_map(focal, ctx);

  Json focal_json = Json::object();
  focal_json["method"] = to_json(spec.focal);
  focal_json["target_name"] = focal.target_name;

  std::vector<Json> callees;
  for (const auto& behavior : spec.callee_behaviors) {
    const Fragment& fragment = require_fragment(ctx.schema, behavior.method);
    Json c = Json::object();
    c["method"] = to_json(behavior.method);
    c["target_name"] = fragment.target_name;
    std::size_t arity = arity_of(fragment);
    for (const auto& call : behavior.calls) arity = std::max(arity, call.arg_effects.size());
    c["hints"] = fragment_hints(fragment, arity, ctx, false);
    Json calls = Json::array();
    for (const auto& call : behavior.calls) calls.push_back(call_json(call));
    c["calls"] = std::move(calls);
    callees.push_back(std::move(c));
  }

  const bool is_ctor = spec.focal.is_constructor;
  const bool has_instance = !spec.focal.is_static && !is_ctor;
  const bool thrown = std::holds_alternative<Thrown>(spec.expected.result);

  std::ostringstream py;
  py << "# Mock test generated from an execution trace.\n";
  py << "# schema_version: " << spec.schema_version << "\n";
  py << "# test_id: " << spec.test_id << "\n";
  py << "# invocation_index: " << spec.invocation_index << "\n";
  py << "# focal: " << spec.focal.key() << "\n";
  py << "import unittest\n\nimport xlv\n\n";
  py << "TYPE_MAP = " << raw_literal(type_map) << "\n";
  py << "FOCAL = " << raw_literal(focal_json) << "\n";
  for (std::size_t i = 0; i < callees.size(); ++i) py << "CALLEE_" << i << " = " << raw_literal(callees[i]) << "\n";
  py << "STATIC_BEFORE = " << raw_literal(to_json(spec.initial.static_before)) << "\n";
  if (has_instance && spec.initial.instance_before) {
    py << "INSTANCE_BEFORE = " << raw_literal(to_json(*spec.initial.instance_before)) << "\n";
  }
  py << "ARGS_BEFORE = " << raw_literal(to_json(spec.initial.args_before)) << "\n";
  if (spec.expected.instance_after) {
    py << "INSTANCE_AFTER = " << raw_literal(to_json(*spec.expected.instance_after)) << "\n";
  }
  py << "ARGS_AFTER = " << raw_literal(to_json(spec.expected.args_after)) << "\n";
  std::vector<std::pair<std::string, std::string>> static_fields;
  std::size_t static_index = 0;
  for (const auto& [class_name, fields] : spec.expected.static_after) {
    for (const auto& [field, value] : fields) {
      py << "STATIC_AFTER_" << static_index++ << " = " << raw_literal(to_json(value)) << "\n";
      static_fields.emplace_back(class_name, field);
    }
  }
  py << "RESULT = " << raw_literal(to_json(spec.expected.result)) << "\n";

  const std::string ind = "        ";
  py << "\n\nclass MockTest(unittest.TestCase):\n";
  py << "    def test_invocation(self):\n";
  py << ind << "session = xlv.Session(TYPE_MAP, FOCAL)\n";
  py << ind << "self.addCleanup(session.restore)\n";
  for (std::size_t i = 0; i < callees.size(); ++i) py << ind << "session.mock(CALLEE_" << i << ")\n";
  if (has_instance && spec.initial.instance_before) {
    py << ind << "instance = session.reconstruct(INSTANCE_BEFORE)\n";
  } else {
    py << ind << "instance = None\n";
  }
  py << ind << "args = session.reconstruct_args(ARGS_BEFORE)\n";
  py << ind << "session.apply_static_state(STATIC_BEFORE)\n";
  const std::string call = is_ctor ? "session.construct(args)" : "session.invoke(instance, args)";
  const std::string target = is_ctor ? "instance" : "result";
  if (thrown) {
    py << ind << "with self.assertRaises(session.expected_exception_type(RESULT)) as raised:\n";
    py << ind << "    " << call << "\n";
  } else {
    py << ind << target << " = " << call << "\n";
  }

  const auto check = [&](const std::string& label, const std::string& expr) {
    py << ind << "with self.subTest(check=" << py_string(label) << "):\n";
    py << ind << "    self.assertTrue(" << expr << ", session.last_mismatch())\n";
  };
  if (spec.expected.instance_after && !(is_ctor && thrown)) {
    check("instance", "session.verify_instance(instance, INSTANCE_AFTER)");
  }
  for (std::size_t i = 0; i < spec.expected.args_after.size(); ++i) {
    check("args[" + std::to_string(i) + "]", "session.verify_arg(args, " + std::to_string(i) + ", ARGS_AFTER)");
  }
  for (std::size_t i = 0; i < static_fields.size(); ++i) {
    const auto& [class_name, field] = static_fields[i];
    check("static " + class_name + "." + field, "session.verify_static_field(" + py_string(class_name) + ", " +
                                                    py_string(field) + ", STATIC_AFTER_" + std::to_string(i) + ")");
  }
  if (!callees.empty()) check("mocks", "session.verify_mocks_consumed()");
  if (thrown) {
    check("result", "session.verify_thrown(raised.exception, RESULT)");
  } else if (!is_ctor) {
    check("result", "session.verify_result(result, RESULT)");
  }
  py << "\n\nif __name__ == \"__main__\":\n    xlv.main()\n";

  return EmittedTest{test_file_name(spec), py.str(), focal.id};
}

}  // namespace xlv::mockgen
