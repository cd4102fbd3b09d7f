#include "xlv/py/session.hpp"

#include <cstdlib>
#include <fstream>
#include <map>

#include <pybind11/eval.h>
#include <pybind11/stl.h>

#include "xlv/errors.hpp"
#include "xlv/py/equality.hpp"
#include "xlv/trace_json.hpp"

namespace xlv::pyrt {

namespace {

constexpr const char* kSupportModule = "_xlv_support";

constexpr const char* kSupportSource = R"PY(
import sys
import textwrap


class MockExhaustedError(BaseException):
    """A mocked callee was called more often than the trace recorded."""


def make_mock(impl):
    def mock(*args, **kwargs):
        raised, value = impl(args, kwargs)
        if raised:
            raise value
        return value
    return mock


def make_recorder(log, active, label, fn):
    def recorded(*args, **kwargs):
        if active[0]:
            log.append(label)
        return fn(*args, **kwargs)
    recorded.__wrapped__ = fn
    return recorded


def noop_init(self, *args, **kwargs):
    pass


_HOLDER_KEYS = ("__module__", "__qualname__", "__dict__", "__weakref__", "__doc__")


def load_fragment(cls, path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    body = textwrap.indent(textwrap.dedent(text), "    ")
    ns = sys.modules[cls.__module__].__dict__
    name = cls.__name__
    missing = object()
    saved = ns.get(name, missing)
    try:
        exec(compile("class " + name + ":\n" + body + "\n    pass\n", path, "exec"), ns)
        holder = ns[name]
    finally:
        if saved is missing:
            ns.pop(name, None)
        else:
            ns[name] = saved
    members = {k: v for k, v in vars(holder).items() if k not in _HOLDER_KEYS}
    for member in members.values():
        fn = getattr(member, "__func__", member)
        code = getattr(fn, "__code__", None)
        if code is not None and "__class__" in code.co_freevars:
            fn.__closure__[code.co_freevars.index("__class__")].cell_contents = cls
    return members
)PY";

py::module_ support() {
  py::dict modules = py::module_::import("sys").attr("modules");
  if (modules.contains(kSupportModule)) return modules[kSupportModule];
  py::module_ module = py::reinterpret_steal<py::module_>(PyModule_New(kSupportModule));
  if (!module) throw py::error_already_set();
  module.attr("__builtins__") = py::module_::import("builtins");
  py::exec(kSupportSource, module.attr("__dict__"));
  modules[kSupportModule] = module;
  return module;
}

Json parse_json(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError(what, std::string("malformed document: ") + e.what());
  }
}

bool is_dunder(const std::string& name) {
  return name.size() > 4 && name.starts_with("__") && name.ends_with("__");
}

bool is_sunder(const std::string& name) {
  return name.size() > 2 && name.front() == '_' && name.back() == '_' && !is_dunder(name);
}

// Python applies private name mangling to "__x" identifiers written in a class body.
std::string python_attribute(py::handle cls, const std::string& name) {
  if (name.starts_with("__") && !name.ends_with("__")) {
    return private_attribute(py::str(cls.attr("__name__")).cast<std::string>(), name.substr(2));
  }
  return name;
}

py::object hint_from_json(const Json& node) {
  if (node.is_null()) return py::none();
  const auto imports = node.value("imports", std::vector<std::string>{});
  const std::string target = node.at("target").get<std::string>();
  if (target == "object") return py::none();
  try {
    return eval_target_type(target, imports);
  } catch (const py::error_already_set& e) {
    throw UnknownTypeError("cannot evaluate hint '" + target + "': " + e.what());
  }
}

struct Hints {
  py::object result = py::none();
  std::vector<py::object> args;

  static Hints from_json(const Json& node) {
    Hints out;
    if (!node.is_object()) return out;
    if (node.contains("result")) out.result = hint_from_json(node.at("result"));
    if (node.contains("args")) {
      for (const auto& a : node.at("args")) out.args.push_back(hint_from_json(a));
    }
    return out;
  }

  py::handle arg(std::size_t i) const { return i < args.size() ? py::handle(args[i]) : py::handle(py::none()); }
};

struct CallPlan {
  std::int64_t invocation_index = 0;
  InvocationResult result;
  std::vector<std::optional<SerializedValue>> arg_effects;
  std::optional<SerializedValue> instance_effect;
  StaticSnapshot static_delta;
};

struct CalleeMock {
  MethodId method;
  std::string label;
  Hints hints;
  std::vector<CallPlan> calls;
  std::size_t consumed = 0;
};

struct Patch {
  py::object cls;
  std::string attr;
  bool had_own = false;
  py::object previous;
};

}  // namespace

py::object mock_exhausted_error() { return support().attr("MockExhaustedError"); }

struct MockSession::State {
  TargetClassRegistry classes;
  EqualityConfig cfg;
  IdentityRegistry registry;
  IdentityRegistry expected{&registry};
  Hints hints;

  MethodId focal;
  std::string focal_label;
  py::object focal_cls;
  py::object focal_callable;

  std::vector<Patch> patches;
  std::vector<std::shared_ptr<CalleeMock>> mocks;
  std::map<std::string, py::object> expected_cache;

  py::list log;
  py::list active;
  std::string call_log_path;
  std::string mismatch;
  bool restored = false;

  void patch(py::handle cls, const std::string& attr, py::object value) {
    py::object own = cls.attr("__dict__");
    Patch p{py::reinterpret_borrow<py::object>(cls), attr, own.contains(attr), py::none()};
    if (p.had_own) p.previous = own[py::str(attr)];
    py::setattr(cls, py::str(attr), value);
    patches.push_back(std::move(p));
  }

  std::string label_for(const std::string& class_name, const std::string& attr) const {
    return class_name + "#" + attr;
  }

  void install_fragment(const std::string& path, const std::string& attr) {
    py::dict members = support().attr("load_fragment")(focal_cls, path);
    if (!members.contains(attr)) {
      throw TranslatorError("translated fragment " + path + " does not define '" + attr + "'");
    }
    patch(focal_cls, attr, members[py::str(attr)]);
  }

  void install_recorders() {
    py::module_ sup = support();
    py::object function_type = py::module_::import("types").attr("FunctionType");
    py::object staticmethod = py::module_::import("builtins").attr("staticmethod");
    for (const auto& [source_name, cls] : classes.application_classes()) {
      py::dict attrs = cls.attr("__dict__").attr("copy")();
      for (auto [key, value] : attrs) {
        const std::string name = py::str(key);
        if (name == "__new__" || is_sunder(name)) continue;
        const std::string label = label_for(source_name, name);
        if (py::isinstance(value, function_type)) {
          patch(cls, name, sup.attr("make_recorder")(log, active, label, value));
        } else if (py::isinstance(value, staticmethod) && py::isinstance(value.attr("__func__"), function_type)) {
          patch(cls, name, staticmethod(sup.attr("make_recorder")(log, active, label, value.attr("__func__"))));
        }
      }
    }
  }

  py::object expected_value(const std::string& json_text, py::handle hint) {
    const std::string key = json_text + "\x1f" + std::to_string(reinterpret_cast<std::uintptr_t>(hint.ptr()));
    if (auto it = expected_cache.find(key); it != expected_cache.end()) return it->second;
    const SerializedValue v = value_from_json(parse_json(json_text, "expected"), "expected");
    py::object out = pyrt::reconstruct(v, expected, classes, hint);
    expected_cache.emplace(key, out);
    return out;
  }

  py::list expected_args(const std::string& json_text) {
    const std::string key = "args\x1f" + json_text;
    if (auto it = expected_cache.find(key); it != expected_cache.end()) return it->second;
    const auto values = values_from_json(parse_json(json_text, "expected_args"), "expected_args");
    py::list out;
    for (std::size_t i = 0; i < values.size(); ++i) {
      out.append(pyrt::reconstruct(values[i], expected, classes, hints.arg(i)));
    }
    expected_cache.emplace(key, out);
    return out;
  }

  bool compare(py::handle expected_value, py::handle actual, const std::string& what) {
    std::string detail;
    const bool ok = semantic_equal(expected_value, actual, cfg, &detail);
    if (!ok) mismatch = what + ": " + detail;
    return ok;
  }

  std::pair<bool, py::object> replay(CalleeMock& m, py::tuple args) {
    if (m.consumed >= m.calls.size()) {
      py::object error = mock_exhausted_error()(m.label + " called more than " + std::to_string(m.calls.size()) +
                                                " time(s)");
      return {true, error};
    }
    const CallPlan& call = m.calls[m.consumed++];
    for (const auto& [class_name, fields] : call.static_delta) {
      py::object cls = classes.resolve(class_name);
      for (const auto& [field, value] : fields) {
        py::setattr(cls, py::str(static_attribute(cls, field)), reconstruct_effect(value, registry, classes));
      }
    }
    const std::size_t offset = m.method.is_static ? 0 : 1;
    for (std::size_t i = 0; i < call.arg_effects.size(); ++i) {
      if (call.arg_effects[i] && offset + i < args.size()) {
        update_into(args[offset + i], *call.arg_effects[i], registry, classes, m.hints.arg(i));
      }
    }
    if (m.method.is_constructor) {
      if (!call.instance_effect) return {false, py::none()};
      return {false, pyrt::reconstruct(*call.instance_effect, registry, classes)};
    }
    if (call.instance_effect && args.size() > 0) update_into(args[0], *call.instance_effect, registry, classes);
    if (const auto* ret = std::get_if<ReturnValue>(&call.result)) {
      return {false, pyrt::reconstruct(ret->value, registry, classes, m.hints.result)};
    }
    if (const auto* thrown = std::get_if<Thrown>(&call.result)) {
      py::object exc = pyrt::reconstruct(thrown->value, registry, classes);
      if (!PyExceptionInstance_Check(exc.ptr())) {
        exc = py::module_::import("builtins").attr("TypeError")("recorded exception is not raisable");
      }
      return {true, exc};
    }
    return {false, py::none()};
  }

  void write_call_log() {
    if (call_log_path.empty()) return;
    Json entry = Json::object();
    entry["focal"] = focal_label;
    entry["calls"] = log.cast<std::vector<std::string>>();
    std::ofstream out(call_log_path, std::ios::app);
    out << entry.dump() << "\n";
  }
};

MockSession::MockSession(const std::string& type_map_json, const std::string& focal_json)
    : state_(std::make_shared<State>()) {
  State& s = *state_;
  const Json type_map = parse_json(type_map_json, "type_map");
  const Json focal = parse_json(focal_json, "focal");
  s.classes = TargetClassRegistry::from_type_map(type_map);
  s.cfg = equality_config_from_json(type_map.contains("equality") ? type_map.at("equality") : Json());
  if (type_map.contains("hints")) s.hints = Hints::from_json(type_map.at("hints"));
  s.focal = method_from_json(focal.at("method"), "focal.method");
  s.focal_cls = s.classes.resolve(s.focal.class_name);
  const std::string attr = python_attribute(s.focal_cls, focal.at("target_name").get<std::string>());
  s.focal_label = s.label_for(s.focal.class_name, attr);
  s.active.append(false);

  try {
    if (const char* fragment = std::getenv("XLV_FOCAL_SOURCE"); fragment && *fragment) {
      s.install_fragment(fragment, attr);
    }
    if (const char* log = std::getenv("XLV_CALL_LOG"); log && *log) {
      s.call_log_path = log;
      s.install_recorders();
    }
    s.focal_callable = s.focal_cls.attr(py::str(attr));
  } catch (...) {
    restore();
    throw;
  }
}

MockSession::~MockSession() {
  try {
    restore();
  } catch (...) {
  }
}

void MockSession::mock(const std::string& callee_json) {
  State& s = *state_;
  const Json node = parse_json(callee_json, "callee");
  auto m = std::make_shared<CalleeMock>();
  m->method = method_from_json(node.at("method"), "callee.method");
  if (node.contains("hints")) m->hints = Hints::from_json(node.at("hints"));
  const auto& calls = node.at("calls");
  for (std::size_t i = 0; i < calls.size(); ++i) {
    const auto& c = calls[i];
    const std::string path = "callee.calls[" + std::to_string(i) + "]";
    CallPlan plan;
    plan.invocation_index = c.value("invocation_index", std::int64_t{0});
    plan.result = result_from_json(c.at("result"), path + ".result");
    if (c.contains("arg_effects")) {
      for (const auto& effect : c.at("arg_effects")) {
        plan.arg_effects.push_back(effect.is_null() ? std::nullopt
                                                    : std::optional(value_from_json(effect, path + ".arg_effects")));
      }
    }
    if (c.contains("instance_effect") && !c.at("instance_effect").is_null()) {
      plan.instance_effect = value_from_json(c.at("instance_effect"), path + ".instance_effect");
    }
    if (c.contains("static_delta")) plan.static_delta = static_from_json(c.at("static_delta"), path + ".static_delta");
    m->calls.push_back(std::move(plan));
  }

  py::object cls = s.classes.resolve(m->method.class_name);
  const std::string attr =
      m->method.is_constructor ? "__new__" : python_attribute(cls, node.at("target_name").get<std::string>());
  m->label = s.label_for(m->method.class_name, m->method.is_constructor ? "__init__" : attr);

  std::weak_ptr<State> weak = state_;
  py::cpp_function impl([weak, m](py::tuple args, py::dict) -> py::tuple {
    auto state = weak.lock();
    if (!state) throw Error("mock called after its session ended");
    auto [raised, value] = state->replay(*m, std::move(args));
    return py::make_tuple(raised, value);
  });
  py::object replacement = support().attr("make_mock")(impl);
  if (m->method.is_static && !m->method.is_constructor) {
    replacement = py::module_::import("builtins").attr("staticmethod")(replacement);
  }
  if (m->method.is_constructor) {
    s.patch(cls, "__new__", py::module_::import("builtins").attr("staticmethod")(replacement));
    s.patch(cls, "__init__", support().attr("noop_init"));
  } else {
    s.patch(cls, attr, replacement);
  }
  s.mocks.push_back(std::move(m));
}

void MockSession::apply_static_state(const std::string& snapshot_json) {
  const StaticSnapshot snapshot = static_from_json(parse_json(snapshot_json, "static"), "static");
  pyrt::apply_static_state(snapshot, state_->classes, state_->registry);
}

py::object MockSession::reconstruct(const std::string& value_json) {
  const SerializedValue v = value_from_json(parse_json(value_json, "value"), "value");
  return pyrt::reconstruct(v, state_->registry, state_->classes);
}

py::list MockSession::reconstruct_args(const std::string& values_json) {
  const auto values = values_from_json(parse_json(values_json, "args"), "args");
  py::list out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.append(pyrt::reconstruct(values[i], state_->registry, state_->classes, state_->hints.arg(i)));
  }
  return out;
}

py::object MockSession::invoke(py::handle instance, py::handle args) {
  State& s = *state_;
  py::tuple call_args(py::reinterpret_borrow<py::object>(args));
  s.active[0] = py::bool_(true);
  try {
    py::object out = s.focal.is_static ? s.focal_callable(*call_args) : s.focal_callable(instance, *call_args);
    s.active[0] = py::bool_(false);
    return out;
  } catch (...) {
    s.active[0] = py::bool_(false);
    throw;
  }
}

py::object MockSession::construct(py::handle args) {
  State& s = *state_;
  py::object obj = low_level_allocate(s.focal_cls);
  invoke(obj, args);
  return obj;
}

py::object MockSession::expected_exception_type(const std::string& result_json) {
  const InvocationResult result = result_from_json(parse_json(result_json, "result"), "result");
  const auto* thrown = std::get_if<Thrown>(&result);
  if (!thrown) throw PayloadError("recorded result is not an exception");
  const py::object value = state_->expected_value(to_json(thrown->value).dump(), py::none());
  return py::reinterpret_borrow<py::object>(reinterpret_cast<PyObject*>(Py_TYPE(value.ptr())));
}

bool MockSession::verify_instance(py::handle instance, const std::string& expected_json) {
  return state_->compare(state_->expected_value(expected_json, py::none()), instance, "instance");
}

bool MockSession::verify_arg(py::handle args, std::size_t index, const std::string& expected_args_json) {
  State& s = *state_;
  py::list expected = s.expected_args(expected_args_json);
  py::list actual(py::reinterpret_borrow<py::object>(args));
  if (index >= expected.size() || index >= actual.size()) {
    s.mismatch = "args[" + std::to_string(index) + "]: index out of range";
    return false;
  }
  return s.compare(expected[index], actual[index], "args[" + std::to_string(index) + "]");
}

bool MockSession::verify_static(const std::string& expected_json) {
  const StaticSnapshot snapshot = static_from_json(parse_json(expected_json, "static"), "static");
  for (const auto& [class_name, fields] : snapshot) {
    for (const auto& [field, value] : fields) {
      if (!verify_static_field(class_name, field, to_json(value).dump())) return false;
    }
  }
  return true;
}

bool MockSession::verify_static_field(const std::string& class_name, const std::string& field,
                                      const std::string& expected_json) {
  State& s = *state_;
  py::object cls = s.classes.resolve(class_name);
  const std::string attr = static_attribute(cls, field);
  const std::string what = "static " + class_name + "." + field;
  if (!py::hasattr(cls, attr.c_str())) {
    s.mismatch = what + ": attribute missing";
    return false;
  }
  return s.compare(s.expected_value(expected_json, py::none()), cls.attr(attr.c_str()), what);
}

bool MockSession::verify_mocks_consumed() {
  State& s = *state_;
  std::string pending;
  for (const auto& m : s.mocks) {
    if (m->consumed < m->calls.size()) {
      if (!pending.empty()) pending += ", ";
      pending += m->label + " (" + std::to_string(m->consumed) + "/" + std::to_string(m->calls.size()) + " calls)";
    }
  }
  if (pending.empty()) return true;
  s.mismatch = "mocks not fully consumed: " + pending;
  return false;
}

bool MockSession::verify_result(py::handle returned, const std::string& result_json) {
  State& s = *state_;
  const InvocationResult result = result_from_json(parse_json(result_json, "result"), "result");
  if (const auto* ret = std::get_if<ReturnValue>(&result)) {
    return s.compare(s.expected_value(to_json(ret->value).dump(), s.hints.result), returned, "result");
  }
  if (std::holds_alternative<VoidResult>(result)) {
    if (returned.is_none()) return true;
    s.mismatch = "result: expected no return value";
    return false;
  }
  s.mismatch = "result: expected an exception";
  return false;
}

bool MockSession::verify_thrown(py::handle raised, const std::string& result_json) {
  State& s = *state_;
  const InvocationResult result = result_from_json(parse_json(result_json, "result"), "result");
  const auto* thrown = std::get_if<Thrown>(&result);
  if (!thrown) {
    s.mismatch = "thrown: no exception was recorded";
    return false;
  }
  return s.compare(s.expected_value(to_json(thrown->value).dump(), py::none()), raised, "thrown");
}

const std::string& MockSession::last_mismatch() const { return state_->mismatch; }

void MockSession::restore() {
  State& s = *state_;
  if (s.restored) return;
  s.restored = true;
  for (auto it = s.patches.rbegin(); it != s.patches.rend(); ++it) {
    if (it->had_own) {
      py::setattr(it->cls, py::str(it->attr), it->previous);
    } else {
      py::delattr(it->cls, py::str(it->attr));
    }
  }
  s.patches.clear();
  s.write_call_log();
}

std::vector<std::string> MockSession::call_log() const { return state_->log.cast<std::vector<std::string>>(); }

}  // namespace xlv::pyrt
