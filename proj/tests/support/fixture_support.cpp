#include "fixture_support.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <pybind11/embed.h>

#include "xlv/cli.hpp"

namespace xlv::testsupport {

namespace py = pybind11;

fs::path source_dir() { return XLV_TEST_SOURCE_DIR; }
fs::path binary_dir() { return XLV_TEST_BINARY_DIR; }
fs::path fixture_dir() { return source_dir() / "tests" / "fixtures" / "cli_mini"; }
fs::path python_package_dir() { return binary_dir() / "python"; }

std::vector<fs::path> trace_files() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(fixture_dir() / "traces")) {
    if (e.path().extension() == ".trace") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

ProjectSchema fixture_schema() { return load_project_schema(fixture_dir() / "schema.json"); }

fs::path scratch(const std::string& name) {
  const fs::path dir = binary_dir() / "test_scratch" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& out_dir, const std::optional<fs::path>& translator_dir) {
  const fs::path fx = fixture_dir();
  Json doc = Json::parse(read_file(fx / "config.json"));
  doc["out_dir"] = out_dir.string();
  doc["runtime_path"] = Json::array({python_package_dir().string()});
  doc["resolver"]["rules"] = (fx / "rules.json").string();
  doc["docs"]["root"] = (fx / "docs").string();
  doc["translator"] = Json{{"kind", "fixture"}};
  if (translator_dir) doc["translator"]["dir"] = translator_dir->string();
  for (auto& p : doc["projects"]) {
    for (const char* key : {"source_root", "schema", "trace_dir", "translated_src_dir", "test_results"}) {
      p[key] = (fx / p[key].get<std::string>()).string();
    }
  }
  const fs::path path = out_dir / "config.json";
  write_file(path, doc.dump(2) + "\n");
  return path;
}

Prepared prepare_pipeline(const std::string& name, const std::optional<fs::path>& translator_dir) {
  const fs::path out = scratch(name);
  const fs::path cfg = write_config(out, translator_dir);
  for (const char* command : {"resolve-types", "gen-mocks"}) {
    std::ostringstream o, e;
    std::vector<std::string> args{"xlv", command, "--config", cfg.string()};
    if (std::string(command) == "resolve-types") args.push_back("--offline");
    if (const int code = cli::run(args, o, e); code != 0) {
      throw std::runtime_error(std::string(command) + " exited " + std::to_string(code) + ": " + e.str());
    }
  }
  return {cfg, Config::load(cfg)};
}

void extend_sys_path() {
  py::list path = py::module_::import("sys").attr("path");
  for (const fs::path& p : {fixture_dir() / "translated", python_package_dir()}) {
    const py::str entry(p.string());
    if (!path.contains(entry)) path.insert(0, entry);
  }
}

}  // namespace xlv::testsupport
