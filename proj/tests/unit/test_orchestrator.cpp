#include "doctest.h"

#include "fixture_support.hpp"
#include "xlv/errors.hpp"
#include "xlv/orchestrator.hpp"

namespace orc = xlv::orchestrator;
namespace ts = xlv::testsupport;
using orc::TestStatus;
using xlv::Json;

namespace {

class FixedRunner : public orc::TestRunner {
 public:
  std::optional<std::string> syntax_check(const xlv::Fragment&, const orc::Translation& t) override {
    if (t.text && *t.text == "syntax error") return std::string("SyntaxError");
    return std::nullopt;
  }
  orc::TestDetail run(const std::filesystem::path& test, const xlv::Fragment&, const orc::Translation&) override {
    return {test.string(), status, "", {}};
  }
  TestStatus status = TestStatus::pass;
};

class Scripted : public orc::Translator {
 public:
  explicit Scripted(std::vector<std::string> texts) : texts_(std::move(texts)) {}
  orc::Translation translate(const orc::TranslationRequest& req) override {
    feedback_sizes.push_back(req.feedback.size());
    if (static_cast<std::size_t>(req.attempt) > texts_.size()) throw xlv::TranslatorError("out of ideas");
    return {texts_[static_cast<std::size_t>(req.attempt - 1)]};
  }
  std::vector<std::size_t> feedback_sizes;

 private:
  std::vector<std::string> texts_;
};

xlv::Fragment fragment() {
  xlv::Fragment f;
  f.id = "p.C.m()V";
  f.class_name = "p.C";
  f.name = "m";
  f.signature = "()V";
  return f;
}

}  // namespace

TEST_CASE("call graphs come from non-test method fragments") {
  const auto g = orc::CallGraph::from_schema(ts::fixture_schema());
  CHECK(g.nodes.contains("org.example.cli.Options.addOption(Lorg/example/cli/Option;)Lorg/example/cli/Options;"));
  CHECK(g.edges.contains({"org.example.cli.OptionBuilder.create(Ljava/lang/String;)Lorg/example/cli/Option;",
                          "org.example.cli.OptionBuilder.reset()V"}));
  const auto order = orc::build_order(g);
  const auto pos = [&](const std::string& id) { return std::find(order.begin(), order.end(), id) - order.begin(); };
  CHECK(pos("org.example.cli.MissingOptionException.createMessage(Ljava/util/List;)Ljava/lang/String;") <
        pos("org.example.cli.MissingOptionException.<init>(Ljava/util/List;)V"));
}

TEST_CASE("self loops are back edges") {
  orc::CallGraph g;
  g.nodes = {"a"};
  g.edges = {{"a", "a"}};
  CHECK(orc::back_edges(g).contains({"a", "a"}));
  CHECK(orc::build_order(g) == std::vector<std::string>{"a"});
}

TEST_CASE("translated test results classify into buckets") {
  using orc::FailureKind;
  using orc::TestBucket;
  CHECK(orc::classify_tests({}) == orc::TestClass{TestBucket::NT, FailureKind::none});
  CHECK(orc::classify_tests({TestStatus::pass}) == orc::TestClass{TestBucket::ATP, FailureKind::none});
  CHECK(orc::classify_tests({TestStatus::pass, TestStatus::fail_assert}) ==
        orc::TestClass{TestBucket::OTF, FailureKind::AF});
  CHECK(orc::classify_tests({TestStatus::pass, TestStatus::fail_assert, TestStatus::fail_runtime}) ==
        orc::TestClass{TestBucket::MTF, FailureKind::RE});
  CHECK(orc::classify_tests({TestStatus::fail_assert, TestStatus::fail_assert, TestStatus::fail_runtime}) ==
        orc::TestClass{TestBucket::ATF, FailureKind::AF});
}

TEST_CASE("test statuses and mock classes round-trip through text") {
  for (auto s : {TestStatus::pass, TestStatus::fail_assert, TestStatus::fail_runtime, TestStatus::skipped_nondet}) {
    CHECK(orc::parse_test_status(orc::to_string(s)) == s);
  }
  for (auto m : {orc::MockClass::NM, orc::MockClass::MS, orc::MockClass::MF}) {
    CHECK(orc::parse_mock_class(orc::to_string(m)) == m);
  }
  CHECK_FALSE(orc::parse_test_status("flaky"));
}

TEST_CASE("test runs are read from the result line") {
  const auto pass = orc::interpret_test_run(
      "t", 0, false, "noise\nXLV-RESULT {\"status\": \"pass\", \"message\": \"\", \"failed_checks\": []}\n", "");
  CHECK(pass.status == TestStatus::pass);
  const auto fail = orc::interpret_test_run(
      "t", 1, false, "XLV-RESULT {\"status\": \"fail_assert\", \"message\": \"m\", \"failed_checks\": [\"result\"]}\n",
      "");
  CHECK(fail.status == TestStatus::fail_assert);
  CHECK(fail.failed_checks == std::vector<std::string>{"result"});
  CHECK(orc::interpret_test_run("t", 139, false, "", "Segmentation fault").status == TestStatus::fail_runtime);
  const auto timeout = orc::interpret_test_run("t", -1, true, "", "");
  CHECK(timeout.status == TestStatus::fail_runtime);
  CHECK(timeout.message == "timed out");
}

TEST_CASE("code fences are stripped from model output") {
  CHECK(orc::strip_code_fence("```python\ndef f():\n    pass\n```\n") == "def f():\n    pass\n");
  CHECK(orc::strip_code_fence("def f(): pass\n") == "def f(): pass\n");
}

TEST_CASE("the repair loop feeds failures back and stops at the budget") {
  FixedRunner runner;
  orc::ValidateOptions vo;
  vo.budget = 3;
  const std::vector<std::filesystem::path> tests{"a_test.py"};

  Scripted fixes({"syntax error", "ok"});
  const auto healed = orc::validate_fragment(fragment(), fixes, tests, runner, vo);
  CHECK(healed.mock_class == orc::MockClass::MS);
  CHECK(healed.attempts_used == 2);
  CHECK(fixes.feedback_sizes == std::vector<std::size_t>{0, 1});

  runner.status = TestStatus::fail_assert;
  Scripted stubborn({"a", "b", "c", "d"});
  const auto failed = orc::validate_fragment(fragment(), stubborn, tests, runner, vo);
  CHECK(failed.mock_class == orc::MockClass::MF);
  CHECK(failed.attempts_used == 3);
}

TEST_CASE("fragments without tests are NM and translator failures are MF") {
  FixedRunner runner;
  orc::ValidateOptions vo;
  Scripted one({"x"});
  CHECK(orc::validate_fragment(fragment(), one, {}, runner, vo).mock_class == orc::MockClass::NM);
  Scripted none({});
  const auto out = orc::validate_fragment(fragment(), none, {"a_test.py"}, runner, vo);
  CHECK(out.mock_class == orc::MockClass::MF);
  CHECK(out.tests.at(0).status == TestStatus::fail_runtime);
}

TEST_CASE("allowlisted nondeterministic fragments report skipped tests") {
  FixedRunner runner;
  runner.status = TestStatus::fail_assert;
  orc::ValidateOptions vo;
  vo.nondeterministic = true;
  Scripted one({"x"});
  const auto out = orc::validate_fragment(fragment(), one, {"a_test.py"}, runner, vo);
  CHECK(out.mock_class == orc::MockClass::MS);
  CHECK(out.tests.at(0).status == TestStatus::skipped_nondet);
}

TEST_CASE("fixture translations pick the latest attempt not above the request") {
  const auto dir = ts::scratch("unit_fixture_translator");
  xlv::write_file(dir / "p.C.m__V" / "attempt_1.py", "one\n");
  xlv::write_file(dir / "p.C.m__V" / "attempt_3.py", "three\n");
  orc::FixtureTranslator tr(dir);
  const auto f = fragment();
  CHECK(*tr.translate({f, {}, {}, 2}).text == "one\n");
  CHECK(*tr.translate({f, {}, {}, 4}).text == "three\n");
  xlv::Fragment other = f;
  other.id = "p.C.other()V";
  CHECK_FALSE(tr.translate({other, {}, {}, 1}).text);
  CHECK_FALSE(orc::FixtureTranslator(std::nullopt).translate({f, {}, {}, 1}).text);
}

TEST_CASE("translated test results skip uncompilable tests") {
  const auto r = orc::TranslatedTestResults::from_json(Json::parse(xlv::read_file(ts::fixture_dir() / "test_results.json")));
  CHECK(r.executed == 36);
  CHECK(r.passed == 35);
  CHECK(r.by_fragment.at("org.example.cli.Option.hashCode()I") == std::vector<TestStatus>{TestStatus::fail_assert});
  CHECK_THROWS_AS(orc::TranslatedTestResults::from_json(Json::array()), xlv::ConfigError);
}

TEST_CASE("reports round to two decimals and render as a table") {
  CHECK(orc::round2(68.4981) == doctest::Approx(68.50));
  CHECK(orc::test_pass_rate(0, 0) == 0.0);
  CHECK(orc::test_pass_rate(1, 3) == doctest::Approx(33.33));
  std::vector<orc::ValidationOutcome> outcomes(4);
  std::vector<orc::TestClass> classes(4);
  outcomes[0].mock_class = orc::MockClass::MS;
  outcomes[1].mock_class = orc::MockClass::MS;
  outcomes[2].mock_class = orc::MockClass::MF;
  classes[3] = {orc::TestBucket::ATF, orc::FailureKind::AF};
  const auto r = orc::compute_report("demo", outcomes, classes, 3, 4);
  CHECK(r.ms == 50.0);
  CHECK(r.atf_af == 25.0);
  CHECK(r.tpr == 75.0);
  const std::string table = orc::render_table({r});
  CHECK(table.rfind(orc::table_header(), 0) == 0);
  CHECK(table.find("demo\t4\t") != std::string::npos);
  const auto back = orc::report_from_json(orc::to_json(r));
  CHECK(back.ms == r.ms);
  CHECK(back.amf == r.amf);
  CHECK_THROWS(orc::compute_report("x", outcomes, {}, 0, 0));
}
