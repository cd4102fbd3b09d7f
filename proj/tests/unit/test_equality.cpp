#include "doctest.h"

#include <pybind11/embed.h>

#include "xlv/errors.hpp"
#include "xlv/py/equality.hpp"

namespace py = pybind11;
using xlv::pyrt::semantic_equal;

namespace {

bool eq(const char* a, const char* b, const xlv::EqualityConfig& cfg = {}) {
  return semantic_equal(py::eval(a), py::eval(b), cfg);
}

}  // namespace

TEST_CASE("floats compare within relative and absolute tolerance") {
  CHECK(eq("0.1 + 0.2 + 0.3", "0.6"));
  CHECK_FALSE(eq("1.0", "1.001"));
  xlv::EqualityConfig loose;
  loose.float_rel_tol = 1e-2;
  CHECK(eq("1.0", "1.001", loose));
  CHECK(eq("float('nan')", "float('nan')"));
  CHECK_FALSE(eq("float('inf')", "float('-inf')"));
  CHECK(eq("1e-13", "0.0"));
}

TEST_CASE("type groups must agree") {
  CHECK_FALSE(eq("True", "1"));
  CHECK_FALSE(eq("[1, 2]", "(1, 2)"));
  CHECK_FALSE(eq("None", "0"));
  CHECK(eq("1", "1.0"));
}

TEST_CASE("sets and dicts ignore order") {
  CHECK(eq("{1, 2, 3}", "{3, 2, 1}"));
  CHECK(eq("{'a': 1, 'b': 2}", "{'b': 2, 'a': 1}"));
  CHECK_FALSE(eq("{'a': 1}", "{'a': 2}"));
  CHECK(eq("{(1, 2.0000000000001)}", "{(1, 2.0)}"));
}

TEST_CASE("objects compare by class and attributes") {
  py::dict ns;
  py::exec("class P:\n    def __init__(self, x):\n        self.x = x\nclass Q(P):\n    pass\n", ns);
  py::object p = ns["P"];
  py::object q = ns["Q"];
  CHECK(semantic_equal(p(1), p(1)));
  CHECK_FALSE(semantic_equal(p(1), p(2)));
  CHECK_FALSE(semantic_equal(p(1), q(1)));
}

TEST_CASE("mismatch paths name the first difference") {
  std::string where;
  CHECK_FALSE(semantic_equal(py::eval("{'k': [1, 2]}"), py::eval("{'k': [1, 3]}"), {}, &where));
  CHECK(where.rfind("$['k'][1]", 0) == 0);
}

TEST_CASE("cyclic structures terminate") {
  py::list a = py::eval("[1]");
  a.append(a);
  py::list b = py::eval("[1]");
  b.append(b);
  CHECK(semantic_equal(a, b));
}

TEST_CASE("depth is bounded") {
  const auto nest = [] {
    py::object deep = py::eval("[]");
    for (int i = 0; i < 20; ++i) deep = py::list(py::make_tuple(deep));
    return deep;
  };
  xlv::EqualityConfig shallow;
  shallow.max_depth = 5;
  CHECK_THROWS_AS(semantic_equal(nest(), nest(), shallow), xlv::DepthExceededError);
}

TEST_CASE("exceptions compare by class and message") {
  CHECK(eq("ValueError('x')", "ValueError('x')"));
  CHECK_FALSE(eq("ValueError('x')", "ValueError('y')"));
  CHECK_FALSE(eq("ValueError('x')", "KeyError('x')"));
}

TEST_CASE("map renderings compare across languages") {
  CHECK(eq("'{a=1, b=2}'", "\"{'b': 2, 'a': 1}\""));
  CHECK_FALSE(eq("'{a=1}'", "\"{'a': 2}\""));
}

TEST_CASE("streams compare buffer and cursor") {
  CHECK(eq("__import__('io').BytesIO(b'ab')", "__import__('io').BytesIO(b'ab')"));
  py::object a = py::eval("__import__('io').BytesIO(b'ab')");
  py::object b = py::eval("__import__('io').BytesIO(b'ab')");
  b.attr("read")(1);
  CHECK_FALSE(semantic_equal(a, b));
}

TEST_CASE("durations use their own tolerance") {
  CHECK(eq("__import__('datetime').timedelta(seconds=1)", "__import__('datetime').timedelta(seconds=1, microseconds=0.5)"));
  CHECK_FALSE(eq("__import__('datetime').timedelta(seconds=1)", "__import__('datetime').timedelta(seconds=2)"));
}

TEST_CASE("invalid tolerances are rejected") {
  xlv::EqualityConfig cfg;
  cfg.float_rel_tol = -1;
  CHECK_THROWS_AS(cfg.validate(), xlv::ConfigError);
  cfg = {};
  cfg.max_depth = 0;
  CHECK_THROWS_AS(cfg.validate(), xlv::ConfigError);
}
