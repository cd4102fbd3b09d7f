#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "xlv/cli.hpp"
#include "xlv/errors.hpp"
#include "xlv/mockgen.hpp"
#include "xlv/orchestrator.hpp"
#include "xlv/py/codec.hpp"
#include "xlv/py/equality.hpp"
#include "xlv/py/session.hpp"
#include "xlv/trace_model.hpp"

#include <sstream>

namespace py = pybind11;
namespace orc = xlv::orchestrator;

namespace {

py::object json_loads(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

xlv::EqualityConfig equality_from(const std::string& json_text) {
  if (json_text.empty()) return {};
  auto cfg = xlv::equality_config_from_json(xlv::Json::parse(json_text));
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_xlv, m) {
  m.doc() = "Trace-driven validation of translated code fragments";

  auto base = py::register_exception<xlv::Error>(m, "XlvError", PyExc_RuntimeError);
  py::register_exception<xlv::SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<xlv::VersionError>(m, "VersionError", base.ptr());
  py::register_exception<xlv::UnknownTypeError>(m, "UnknownTypeError", base.ptr());
  py::register_exception<xlv::UnboundReferenceError>(m, "UnboundReferenceError", base.ptr());
  py::register_exception<xlv::PayloadError>(m, "PayloadError", base.ptr());
  py::register_exception<xlv::FieldAssignError>(m, "FieldAssignError", base.ptr());
  py::register_exception<xlv::DepthExceededError>(m, "DepthExceededError", base.ptr());
  py::register_exception<xlv::EmitError>(m, "EmitError", base.ptr());
  py::register_exception<xlv::ConfigError>(m, "ConfigError", base.ptr());
  m.attr("MockExhaustedError") = xlv::pyrt::mock_exhausted_error();
  m.attr("SCHEMA_VERSION") = std::string(xlv::kSchemaVersion);

  py::class_<xlv::pyrt::MockSession>(m, "Session")
      .def(py::init<const std::string&, const std::string&>(), py::arg("type_map"), py::arg("focal"))
      .def("mock", &xlv::pyrt::MockSession::mock, py::arg("callee"))
      .def("apply_static_state", &xlv::pyrt::MockSession::apply_static_state, py::arg("snapshot"))
      .def("reconstruct", &xlv::pyrt::MockSession::reconstruct, py::arg("value"))
      .def("reconstruct_args", &xlv::pyrt::MockSession::reconstruct_args, py::arg("values"))
      .def("invoke", &xlv::pyrt::MockSession::invoke, py::arg("instance"), py::arg("args"))
      .def("construct", &xlv::pyrt::MockSession::construct, py::arg("args"))
      .def("expected_exception_type", &xlv::pyrt::MockSession::expected_exception_type, py::arg("result"))
      .def("verify_instance", &xlv::pyrt::MockSession::verify_instance)
      .def("verify_arg", &xlv::pyrt::MockSession::verify_arg)
      .def("verify_static", &xlv::pyrt::MockSession::verify_static)
      .def("verify_static_field", &xlv::pyrt::MockSession::verify_static_field)
      .def("verify_mocks_consumed", &xlv::pyrt::MockSession::verify_mocks_consumed)
      .def("verify_result", &xlv::pyrt::MockSession::verify_result)
      .def("verify_thrown", &xlv::pyrt::MockSession::verify_thrown)
      .def("last_mismatch", &xlv::pyrt::MockSession::last_mismatch)
      .def("restore", &xlv::pyrt::MockSession::restore)
      .def("call_log", &xlv::pyrt::MockSession::call_log);

  m.def(
      "semantic_equal",
      [](py::handle expected, py::handle actual, const std::string& equality) {
        return xlv::pyrt::semantic_equal(expected, actual, equality_from(equality));
      },
      py::arg("expected"), py::arg("actual"), py::arg("equality") = "",
      "Structural equality with float/duration tolerances and cycle awareness.");

  m.def(
      "reconstruct",
      [](const std::string& value_json, const std::string& type_map_json) {
        const auto value = xlv::value_from_json(xlv::Json::parse(value_json));
        const auto classes = xlv::pyrt::TargetClassRegistry::from_type_map(
            type_map_json.empty() ? xlv::Json::object() : xlv::Json::parse(type_map_json));
        xlv::pyrt::IdentityRegistry registry;
        return xlv::pyrt::reconstruct(value, registry, classes);
      },
      py::arg("value"), py::arg("type_map") = "", "Rebuilds one serialized value in a fresh identity scope.");

  m.def(
      "canonical_trace", [](const std::string& text) { return xlv::serialize_trace(xlv::parse_trace(text)); },
      py::arg("text"), "Parses, validates and re-serializes a trace document.");
  m.def(
      "load_trace", [](const std::string& text) { return json_loads(xlv::serialize_trace(xlv::parse_trace(text))); },
      py::arg("text"));
  m.def(
      "count_invocations", [](const std::string& text) { return xlv::count_invocations(xlv::parse_trace(text)); },
      py::arg("text"));

  m.def(
      "emit_tests",
      [](const std::string& schema_json, const std::string& ctm_json, const std::string& trace_text,
         const std::string& equality) {
        const auto schema = xlv::parse_project_schema(xlv::Json::parse(schema_json));
        xlv::typeres::ContextTypeMap ctm;
        if (!ctm_json.empty()) ctm.load_project_json(xlv::Json::parse(ctm_json));
        const auto log = xlv::parse_trace(trace_text);
        const auto app = schema.app_methods();
        const xlv::mockgen::EmitContext ctx{schema, ctm, equality_from(equality)};
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto* inv : xlv::extract_invocations(log)) {
          if (!app.contains(inv->method)) continue;
          const auto test = xlv::mockgen::emit_test(xlv::mockgen::plan_mock_test(*inv, log, app), ctx);
          out.emplace_back(test.file_name, test.source_text);
        }
        return out;
      },
      py::arg("schema"), py::arg("ctm"), py::arg("trace"), py::arg("equality") = "",
      "Emits one (file name, source) pair per application invocation of a trace.");

  m.def(
      "build_order",
      [](const std::vector<std::string>& nodes, const std::vector<std::pair<std::string, std::string>>& edges) {
        orc::CallGraph g;
        g.nodes.insert(nodes.begin(), nodes.end());
        g.edges.insert(edges.begin(), edges.end());
        return orc::build_order(g);
      },
      py::arg("nodes"), py::arg("edges"));

  m.def(
      "classify_tests",
      [](const std::vector<std::string>& statuses) {
        std::vector<orc::TestStatus> parsed;
        for (const auto& s : statuses) {
          const auto st = orc::parse_test_status(s);
          if (!st) throw py::value_error("unknown test status " + s);
          parsed.push_back(*st);
        }
        const auto c = orc::classify_tests(parsed);
        return std::make_pair(std::string(orc::to_string(c.bucket)), std::string(orc::to_string(c.dominant)));
      },
      py::arg("statuses"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        std::vector<std::string> argv{"xlv"};
        argv.insert(argv.end(), args.begin(), args.end());
        int code;
        {
          py::gil_scoped_release release;
          code = xlv::cli::run(argv, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a command-line invocation; returns (exit code, stdout, stderr).");
}
