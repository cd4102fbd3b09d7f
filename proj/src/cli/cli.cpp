#include "xlv/cli.hpp"

#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "xlv/config.hpp"
#include "xlv/errors.hpp"
#include "xlv/orchestrator.hpp"
#include "xlv/typeres.hpp"

namespace xlv::cli {

namespace fs = std::filesystem;
namespace orc = xlv::orchestrator;

namespace {

struct Loaded {
  Config cfg;
  std::vector<const ProjectConfig*> projects;
};

Loaded load(const Options& o) {
  Loaded l{Config::load(o.config), {}};
  l.projects = l.cfg.select(o.project);
  l.cfg.check_paths(l.projects);
  return l;
}

fs::path report_path(const Config& cfg) { return cfg.out_dir / "report.json"; }

std::unique_ptr<typeres::Resolver> make_resolver(const Config& cfg) {
  if (cfg.resolver.kind == "remote") {
    return std::make_unique<typeres::RemoteResolver>(typeres::RemoteResolver::Settings::from_env());
  }
  return std::make_unique<typeres::RuleTableResolver>(
      typeres::RuleTableResolver::from_json(Json::parse(read_file(*cfg.resolver.rules))));
}

std::unique_ptr<orc::Translator> make_translator(const Config& cfg) {
  if (cfg.translator.kind == "remote") {
    return std::make_unique<orc::RemoteTranslator>(orc::RemoteTranslator::from_env());
  }
  return std::make_unique<orc::FixtureTranslator>(cfg.translator.dir);
}

typeres::ContextTypeMap load_ctm(const Config& cfg, const std::vector<const ProjectConfig*>& projects,
                                 bool require) {
  typeres::ContextTypeMap ctm;
  for (const auto* p : projects) {
    const fs::path file = cfg.ctm_dir() / (p->name + ".json");
    if (!ctm.load_project_file(file) && require) {
      throw EmitError("no context type map for " + p->name + " (run resolve-types first): " + file.string());
    }
  }
  return ctm;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const EmitError& e) {
    err << "error: " << e.what() << "\n";
    return kEmission;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kPipelineError;
  }
}

}  // namespace

int cmd_resolve_types(const Options& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Loaded l = load(o);
    std::vector<ProjectSchema> schemas;
    for (const auto* p : l.projects) {
      schemas.push_back(load_project_schema(p->schema));
      schemas.back().project = p->name;
    }
    auto resolver = make_resolver(l.cfg);
    typeres::PythonMappingValidator validator(l.cfg.python);
    std::unique_ptr<typeres::DocSource> docs;
    if (l.cfg.docs.root) {
      docs = std::make_unique<typeres::FileTreeDocSource>(*l.cfg.docs.root);
    } else {
      docs = std::make_unique<typeres::HttpDocSource>(
          l.cfg.docs.url_pattern.empty() ? typeres::HttpDocSource::default_url_pattern() : l.cfg.docs.url_pattern);
    }
    typeres::BuildOptions bo;
    bo.budget = l.cfg.budget;
    bo.offline = o.offline && !l.cfg.docs.root;
    bo.doc_cache_dir = l.cfg.docs.cache_dir;
    bo.docs = docs.get();
    typeres::ContextTypeMap ctm;
    const auto stats = typeres::build_ctm(schemas, *resolver, validator, bo, ctm);
    for (const auto* p : l.projects) ctm.save_project(l.cfg.ctm_dir(), p->name);
    out << "occurrences " << stats.occurrences << " resolved " << stats.resolved << " global " << stats.global
        << " fallback " << stats.fallback << " transport_failures " << stats.transport_failures << "\n";
    return stats.transport_failures == 0 ? kOk : kResolverTransport;
  });
}

int cmd_gen_mocks(const Options& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Loaded l = load(o);
    const auto ctm = load_ctm(l.cfg, l.projects, true);
    bool failed = false;
    for (const auto* p : l.projects) {
      ProjectSchema schema = load_project_schema(p->schema);
      schema.project = p->name;
      const auto stats = orc::generate_mock_tests(l.cfg, *p, schema, ctm);
      out << p->name << ": traces " << stats.traces << " invocations " << stats.invocations << " emitted "
          << stats.emitted << " errors " << stats.errors.size() << "\n";
      for (const auto& e : stats.errors) err << p->name << ": " << e << "\n";
      failed = failed || !stats.errors.empty();
    }
    return failed ? kEmission : kOk;
  });
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Loaded l = load(o);
    const auto ctm = load_ctm(l.cfg, l.projects, false);
    auto translator = make_translator(l.cfg);
    std::vector<orc::Report> reports;
    for (const auto* p : l.projects) {
      ProjectSchema schema = load_project_schema(p->schema);
      schema.project = p->name;
      if (!fs::exists(l.cfg.project_out(p->name) / "mock_index.json")) {
        const auto stats = orc::generate_mock_tests(l.cfg, *p, schema, ctm);
        for (const auto& e : stats.errors) err << p->name << ": " << e << "\n";
      }
      const auto run = orc::validate_project(l.cfg, *p, schema, ctm, *translator);
      reports.push_back(run.report);
    }
    write_file(report_path(l.cfg), orc::render_document(reports));
    write_file(l.cfg.out_dir / "report.tsv", orc::render_table(reports));
    out << orc::render_table(reports);
    return kOk;
  });
}

int cmd_report(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.format != "table" && o.format != "doc") {
    err << "error: unknown format " << o.format << " (expected table or doc)\n";
    return kUsage;
  }
  return guarded(err, [&] {
    const Config cfg = Config::load(o.config);
    std::vector<orc::Report> reports;
    const fs::path path = report_path(cfg);
    if (fs::exists(path)) {
      const Json doc = Json::parse(read_file(path));
      for (const auto& p : doc.at("projects")) {
        auto r = orc::report_from_json(p);
        if (o.project.empty() || r.project == o.project) reports.push_back(std::move(r));
      }
    }
    out << (o.format == "table" ? orc::render_table(reports) : orc::render_document(reports));
    return kOk;
  });
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Validate translated code fragments against recorded execution traces", "xlv"};
  app.require_subcommand(1);
  Options o;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Pipeline configuration file")->required();
    sub->add_option("--project", o.project, "Restrict to one configured project");
  };
  auto* resolve = app.add_subcommand("resolve-types", "Build the context type map");
  add_common(resolve);
  resolve->add_flag("--offline", o.offline, "Use cached documentation only");
  auto* gen = app.add_subcommand("gen-mocks", "Emit one mock test per traced focal invocation");
  add_common(gen);
  auto* validate = app.add_subcommand("validate", "Validate translations and write the report");
  add_common(validate);
  auto* report = app.add_subcommand("report", "Render the stored report");
  add_common(report);
  report->add_option("--format", o.format, "table or doc");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  }
  if (resolve->parsed()) return cmd_resolve_types(o, out, err);
  if (gen->parsed()) return cmd_gen_mocks(o, out, err);
  if (validate->parsed()) return cmd_validate(o, out, err);
  return cmd_report(o, out, err);
}

}  // namespace xlv::cli
