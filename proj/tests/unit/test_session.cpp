#include "doctest.h"

#include <pybind11/embed.h>

#include "xlv/errors.hpp"
#include "xlv/py/session.hpp"

namespace py = pybind11;
using xlv::Json;
using xlv::pyrt::MockSession;

namespace {

const char* kPkg = "org.example.cli.";

Json method(const std::string& cls, const std::string& name, const std::string& sig, bool is_static) {
  return Json{{"class", kPkg + cls}, {"name", name}, {"signature", sig}, {"is_constructor", false},
              {"is_static", is_static}};
}

Json type_map() {
  Json classes = Json::object();
  classes[std::string(kPkg) + "HelpFormatter"] = Json{{"module", "cli_mini.help_formatter"}, {"class", "HelpFormatter"}};
  classes[std::string(kPkg) + "TokenIterator"] = Json{{"module", "cli_mini.token_iterator"}, {"class", "TokenIterator"}};
  Json types = Json::object();
  types["java.lang.StringBuilder"] = Json{{"target", "io.StringIO"}, {"imports", Json::array({"import io"})}};
  return Json{{"classes", classes}, {"types", types}};
}

Json prim(const std::string& type, const std::string& v) {
  return Json{{"kind", "primitive"}, {"type_name", type}, {"payload", Json{{"value", v}}}};
}

Json iterator(const std::string& token, int index) {
  Json tokens = Json{{"kind", "array"}, {"type_name", "java.lang.String[]"}, {"identity", token + "a"},
                     {"payload", Json{{"category", "list"},
                                      {"items", Json::array({prim("java.lang.String", "x"),
                                                             prim("java.lang.String", "y")})}}}};
  auto field = [](const std::string& name, Json v) {
    return Json{{"name", name}, {"declaring_class", std::string(kPkg) + "TokenIterator"}, {"visibility", "private"},
                {"is_static", false}, {"value", std::move(v)}};
  };
  return Json{{"kind", "app_object"}, {"type_name", std::string(kPkg) + "TokenIterator"}, {"identity", token},
              {"payload", Json{{"fields", Json::array({field("tokens", tokens),
                                                       field("index", prim("int", std::to_string(index)))})}}}};
}

Json builder(const std::string& text) {
  return Json{{"kind", "primitive"}, {"type_name", "java.lang.StringBuilder"}, {"identity", "@sb"},
              {"payload", Json{{"value", text}}}};
}

std::unique_ptr<MockSession> separator_session(bool has_next) {
  const Json focal = Json{{"method", method("HelpFormatter", "appendSeparator",
                                            "(Ljava/lang/StringBuilder;Lorg/example/cli/TokenIterator;)V", true)},
                          {"target_name", "append_separator"}};
  auto s = std::make_unique<MockSession>(type_map().dump(), focal.dump());
  const Json callee = Json{{"method", method("TokenIterator", "hasNext", "()Z", false)},
                           {"target_name", "has_next"},
                           {"calls", Json::array({Json{{"invocation_index", 3},
                                                       {"result", Json{{"return", prim("boolean", has_next ? "true" : "false")}}}}})}};
  s->mock(callee.dump());
  return s;
}

}  // namespace

TEST_CASE("a mocked callee replays its recorded return and is consumed") {
  auto s = separator_session(true);
  py::list args = s->reconstruct_args(Json::array({builder("x"), iterator("@it", 1)}).dump());
  s->invoke(py::none(), args);
  CHECK(s->verify_arg(args, 0, Json::array({builder("x, "), iterator("@it", 1)}).dump()));
  CHECK(s->verify_arg(args, 1, Json::array({builder("x, "), iterator("@it", 1)}).dump()));
  CHECK(s->verify_mocks_consumed());
  CHECK(s->verify_result(py::none(), Json{{"void", true}}.dump()));
  s->restore();
}

TEST_CASE("state checks report the first mismatch") {
  auto s = separator_session(false);
  py::list args = s->reconstruct_args(Json::array({builder("x"), iterator("@it", 1)}).dump());
  s->invoke(py::none(), args);
  CHECK_FALSE(s->verify_arg(args, 0, Json::array({builder("x, "), iterator("@it", 1)}).dump()));
  CHECK_FALSE(s->last_mismatch().empty());
  s->restore();
}

TEST_CASE("calling a mock beyond its recording raises MockExhaustedError") {
  auto s = separator_session(true);
  py::list args = s->reconstruct_args(Json::array({builder("x"), iterator("@it", 1)}).dump());
  s->invoke(py::none(), args);
  bool exhausted = false;
  try {
    s->invoke(py::none(), args);
  } catch (py::error_already_set& e) {
    exhausted = e.matches(xlv::pyrt::mock_exhausted_error());
  }
  CHECK(exhausted);
  s->restore();
}

TEST_CASE("restore puts the translated methods back") {
  py::object it_cls = py::module_::import("cli_mini.token_iterator").attr("TokenIterator");
  py::object original = it_cls.attr("__dict__")["has_next"];
  {
    auto s = separator_session(true);
    CHECK_FALSE(py::object(it_cls.attr("__dict__")["has_next"]).is(original));
  }
  CHECK(py::object(it_cls.attr("__dict__")["has_next"]).is(original));
}

TEST_CASE("unknown focal classes are reported") {
  const Json focal = Json{{"method", method("Nope", "m", "()V", true)}, {"target_name", "m"}};
  CHECK_THROWS_AS(MockSession(type_map().dump(), focal.dump()), xlv::UnknownTypeError);
}
