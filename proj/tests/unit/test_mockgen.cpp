#include "doctest.h"

#include <pybind11/embed.h>

#include "fixture_support.hpp"
#include "xlv/errors.hpp"
#include "xlv/mockgen.hpp"

namespace py = pybind11;
namespace mg = xlv::mockgen;
namespace tr = xlv::typeres;
namespace ts = xlv::testsupport;

namespace {

xlv::TraceLog fixture_trace(const std::string& test) {
  return xlv::parse_trace(xlv::read_file(ts::fixture_dir() / "traces" / ("org.example.cli." + test + ".trace")));
}

class AcceptAll : public tr::MappingValidator {
 public:
  std::optional<std::string> validate(const tr::Candidate&) override { return std::nullopt; }
};

tr::ContextTypeMap fixture_ctm(const xlv::ProjectSchema& schema) {
  auto rules = tr::RuleTableResolver::from_json(xlv::Json::parse(xlv::read_file(ts::fixture_dir() / "rules.json")));
  AcceptAll validator;
  tr::BuildOptions bo;
  bo.offline = true;
  tr::ContextTypeMap ctm;
  tr::build_ctm({schema}, rules, validator, bo, ctm);
  return ctm;
}

}  // namespace

TEST_CASE("static deltas keep only changed fields") {
  xlv::StaticSnapshot before, after;
  before["C"]["a"] = xlv::SerializedValue::primitive("int", "1");
  before["C"]["b"] = xlv::SerializedValue::primitive("int", "2");
  after = before;
  after["C"]["b"] = xlv::SerializedValue::primitive("int", "3");
  after["D"]["c"] = xlv::SerializedValue::null_value();
  const auto d = mg::static_delta(before, after);
  CHECK(d.size() == 2);
  CHECK(d.at("C").size() == 1);
  CHECK(d.at("C").contains("b"));
  CHECK(d.at("D").contains("c"));
}

TEST_CASE("callee behaviors follow first invocation order") {
  const auto schema = ts::fixture_schema();
  const auto log = fixture_trace("HelpFormatterTest#testJoinTokens");
  const auto spec = mg::plan_mock_test(log.roots.at(0).children.empty() ? log.roots.at(1) : log.roots.at(0), log,
                                       schema.app_methods());
  const xlv::InvocationRecord* join = nullptr;
  for (const auto* r : xlv::extract_invocations(log)) {
    if (r->method.method_name == "joinTokens") join = r;
  }
  REQUIRE(join);
  const auto plan = mg::plan_mock_test(*join, log, schema.app_methods());
  REQUIRE(plan.callee_behaviors.size() == 3);
  CHECK(plan.callee_behaviors[0].method.method_name == "hasNext");
  CHECK(plan.callee_behaviors[0].calls.size() == 4);
  CHECK(plan.callee_behaviors[1].method.method_name == "next");
  CHECK(plan.callee_behaviors[1].calls.size() == 3);
  CHECK(plan.callee_behaviors[2].method.method_name == "appendSeparator");
  const auto& sep = plan.callee_behaviors[2].calls;
  REQUIRE(sep.size() == 3);
  CHECK(sep[0].arg_effects.at(0).has_value());
  CHECK_FALSE(sep[2].arg_effects.at(0).has_value());
  CHECK(plan.test_id == log.test_id);
  CHECK(mg::test_file_name(plan).rfind("mock_tests/org.example.cli.HelpFormatter/joinTokens/", 0) == 0);
  (void)spec;
}

TEST_CASE("emitted tests are valid Python naming every check") {
  const auto schema = ts::fixture_schema();
  const auto ctm = fixture_ctm(schema);
  const mg::EmitContext ctx{schema, ctm, {}};
  const auto app = schema.app_methods();
  std::size_t emitted = 0;
  for (const auto& file : ts::trace_files()) {
    const auto log = xlv::parse_trace(xlv::read_file(file));
    for (const auto* inv : xlv::extract_invocations(log)) {
      const auto test = mg::emit_test(mg::plan_mock_test(*inv, log, app), ctx);
      CHECK_NOTHROW(py::module_::import("ast").attr("parse")(test.source_text));
      CHECK(test.focal_fragment_id == inv->method.key());
      CHECK(test.source_text.find("xlv.main()") != std::string::npos);
      ++emitted;
    }
  }
  CHECK(emitted > 150);
}

TEST_CASE("emission needs type mappings for the focal signature") {
  const auto schema = ts::fixture_schema();
  tr::ContextTypeMap empty;
  const mg::EmitContext ctx{schema, empty, {}};
  const auto log = fixture_trace("HelpFormatterTest#testAppendSeparatorBetweenTokens");
  const xlv::InvocationRecord* focal = nullptr;
  for (const auto* r : xlv::extract_invocations(log)) {
    if (r->method.method_name == "appendSeparator") focal = r;
  }
  REQUIRE(focal);
  CHECK_THROWS_AS(mg::emit_test(mg::plan_mock_test(*focal, log, schema.app_methods()), ctx), xlv::EmitError);
}

TEST_CASE("runtime type maps carry classes, library types and focal hints") {
  const auto schema = ts::fixture_schema();
  const auto ctm = fixture_ctm(schema);
  const mg::EmitContext ctx{schema, ctm, {}};
  const auto* f = schema.find_fragment("org.example.cli.Options.getRequiredOptions()Ljava/util/List;");
  REQUIRE(f);
  const auto tm = mg::runtime_type_map(*f, ctx);
  CHECK(tm.at("classes").contains("org.example.cli.Options"));
  CHECK(tm.at("hints").at("result").at("target").get<std::string>() == "tuple");
  CHECK(tm.at("types").contains("java.lang.StringBuilder"));
}

TEST_CASE("sanitized names are path safe") {
  CHECK(mg::sanitize("a.B#c(Ljava/lang/String;)V") == "a.B_c_Ljava_lang_String__V");
}
