#pragma once

// Runtime half of an emitted mock test. A MockSession owns one identity
// registry for the initial state and mock replays, a second one for expected
// values, the patches it installs on translated classes, and the checks that
// compare actual against recorded state. Requires the GIL.

#include <memory>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>

#include "xlv/equality_config.hpp"
#include "xlv/py/codec.hpp"

namespace xlv::pyrt {

namespace py = pybind11;

/// BaseException subclass raised when a mock is called more often than recorded.
py::object mock_exhausted_error();

class MockSession {
 public:
  /// `type_map_json`: {"classes", "types", "hints": {"result", "args"}, "equality"}.
  /// `focal_json`: {"method": MethodId, "target_name": python attribute name}.
  /// Honors XLV_FOCAL_SOURCE (replace the focal with a fragment file) and
  /// XLV_CALL_LOG (record calls of translated methods during invoke/construct).
  MockSession(const std::string& type_map_json, const std::string& focal_json);
  ~MockSession();

  MockSession(const MockSession&) = delete;
  MockSession& operator=(const MockSession&) = delete;

  /// {"method", "target_name", "hints"?, "calls": [{"invocation_index", "result",
  ///  "arg_effects": [null | value], "instance_effect": null | value, "static_delta": {...}}]}
  void mock(const std::string& callee_json);

  void apply_static_state(const std::string& snapshot_json);
  py::object reconstruct(const std::string& value_json);
  py::list reconstruct_args(const std::string& values_json);

  py::object invoke(py::handle instance, py::handle args);
  py::object construct(py::handle args);

  py::object expected_exception_type(const std::string& result_json);

  bool verify_instance(py::handle instance, const std::string& expected_json);
  bool verify_arg(py::handle args, std::size_t index, const std::string& expected_args_json);
  bool verify_static(const std::string& expected_json);
  bool verify_static_field(const std::string& class_name, const std::string& field,
                           const std::string& expected_json);
  bool verify_mocks_consumed();
  bool verify_result(py::handle returned, const std::string& result_json);
  bool verify_thrown(py::handle raised, const std::string& result_json);

  const std::string& last_mismatch() const;

  /// Undoes every patch; safe to call more than once.
  void restore();

  /// Labels of translated methods entered during invoke/construct ("<class>#<attr>").
  std::vector<std::string> call_log() const;

  struct State;

 private:
  std::shared_ptr<State> state_;
};

}  // namespace xlv::pyrt
