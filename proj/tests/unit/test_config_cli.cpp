#include "doctest.h"

#include <sstream>

#include "fixture_support.hpp"
#include "xlv/cli.hpp"
#include "xlv/config.hpp"
#include "xlv/errors.hpp"

namespace ts = xlv::testsupport;
using xlv::Json;

namespace {

Json minimal() {
  return Json::parse(R"({
    "out_dir": "out",
    "resolver": {"kind": "rules", "rules": "rules.json"},
    "projects": [{"name": "p", "source_root": "src", "schema": "s.json", "trace_dir": "t",
                  "translated_src_dir": "py"}]
  })");
}

int cli(const std::vector<std::string>& args, std::string* out = nullptr, std::string* err = nullptr) {
  std::ostringstream o, e;
  std::vector<std::string> argv{"xlv"};
  argv.insert(argv.end(), args.begin(), args.end());
  const int code = xlv::cli::run(argv, o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

}  // namespace

TEST_CASE("config paths resolve against the config directory") {
  const auto cfg = xlv::Config::from_json(minimal(), "/base");
  CHECK(cfg.out_dir == "/base/out");
  CHECK(cfg.projects.at(0).schema == "/base/s.json");
  CHECK(cfg.budget == 4);
  CHECK(cfg.docs.cache_dir == "/base/out/doc_cache");
  CHECK(cfg.ctm_dir() == "/base/out/ctm");
}

TEST_CASE("bad configs raise ConfigError") {
  Json j = minimal();
  j["resolver"]["kind"] = "oracle";
  CHECK_THROWS_AS(xlv::Config::from_json(j, "/"), xlv::ConfigError);
  j = minimal();
  j.erase("out_dir");
  CHECK_THROWS_AS(xlv::Config::from_json(j, "/"), xlv::ConfigError);
  j = minimal();
  j["translator"] = Json{{"kind", "magic"}};
  CHECK_THROWS_AS(xlv::Config::from_json(j, "/"), xlv::ConfigError);
  const auto cfg = xlv::Config::from_json(minimal(), "/");
  CHECK_THROWS_AS(cfg.select("nope"), xlv::ConfigError);
  CHECK(cfg.select("").size() == 1);
  CHECK_THROWS_AS(cfg.check_paths(cfg.select("")), xlv::ConfigError);
}

TEST_CASE("command-line usage errors exit with 4") {
  CHECK(cli({}) == xlv::cli::kUsage);
  CHECK(cli({"frobnicate"}) == xlv::cli::kUsage);
  CHECK(cli({"report"}) == xlv::cli::kUsage);
}

TEST_CASE("a missing config file is a pipeline error") {
  std::string err;
  CHECK(cli({"report", "--config", "/nonexistent/config.json"}, nullptr, &err) == xlv::cli::kPipelineError);
  CHECK_FALSE(err.empty());
}

TEST_CASE("mock generation without a type map is an emission error") {
  const auto out = ts::scratch("unit_cli_no_ctm");
  const auto cfg = ts::write_config(out);
  CHECK(cli({"gen-mocks", "--config", cfg.string()}) == xlv::cli::kEmission);
}

TEST_CASE("reports on an empty store print only the header") {
  const auto out = ts::scratch("unit_cli_empty_report");
  const auto cfg = ts::write_config(out);
  std::string text;
  CHECK(cli({"report", "--config", cfg.string()}, &text) == xlv::cli::kOk);
  CHECK(text.find("Subject\tAMF") == 0);
  CHECK(cli({"report", "--config", cfg.string(), "--format", "xml"}) == xlv::cli::kUsage);
  CHECK(cli({"report", "--config", cfg.string(), "--format", "doc"}, &text) == xlv::cli::kOk);
  CHECK(Json::parse(text).at("projects").empty());
}

TEST_CASE("the full pipeline runs from the command line") {
  const auto out = ts::scratch("unit_cli_pipeline");
  const auto cfg = ts::write_config(out);
  std::string text;
  CHECK(cli({"resolve-types", "--config", cfg.string(), "--offline"}, &text) == xlv::cli::kOk);
  CHECK(text.find("fallback 0") != std::string::npos);
  CHECK(cli({"gen-mocks", "--config", cfg.string(), "--project", "cli_mini"}, &text) == xlv::cli::kOk);
  CHECK(text.find("errors 0") != std::string::npos);
  CHECK(std::filesystem::exists(out / "cli_mini" / "mock_index.json"));
}
