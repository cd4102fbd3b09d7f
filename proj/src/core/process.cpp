#include "xlv/process.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <thread>

#include <boost/process.hpp>

#include "xlv/errors.hpp"
#include "xlv/project_schema.hpp"

namespace xlv {

namespace bp = boost::process;

namespace {

std::filesystem::path scratch_file(const char* tag) {
  static std::atomic<unsigned> counter{0};
  return std::filesystem::temp_directory_path() /
         ("xlv-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" + tag);
}

struct ScratchFiles {
  std::filesystem::path in = scratch_file("in");
  std::filesystem::path out = scratch_file("out");
  std::filesystem::path err = scratch_file("err");
  ~ScratchFiles() {
    std::error_code ec;
    std::filesystem::remove(in, ec);
    std::filesystem::remove(out, ec);
    std::filesystem::remove(err, ec);
  }
};

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const ProcessOptions& options) {
  if (argv.empty()) throw Error("run_process: empty command");
  boost::filesystem::path exe = argv[0];
  if (!exe.has_parent_path()) exe = bp::search_path(argv[0]);
  if (exe.empty()) throw Error("program not found: " + argv[0]);

  ScratchFiles files;
  write_file(files.in, options.stdin_data);

  bp::environment env = boost::this_process::environment();
  for (const auto& [key, value] : options.env) env[key] = value;
  const std::vector<std::string> args(argv.begin() + 1, argv.end());
  const boost::filesystem::path cwd =
      options.cwd.empty() ? boost::filesystem::current_path() : boost::filesystem::path(options.cwd.string());

  ProcessResult result;
  try {
    bp::child child(exe, bp::args(args), env, bp::start_dir(cwd), bp::std_in < files.in.string(),
                    bp::std_out > files.out.string(), bp::std_err > files.err.string());
    // wait_for races on SIGCHLD when several threads wait at once
    const auto deadline = std::chrono::steady_clock::now() + options.timeout;
    auto pause = std::chrono::milliseconds(1);
    while (child.running()) {
      if (std::chrono::steady_clock::now() >= deadline) {
        result.timed_out = true;
        child.terminate();
        break;
      }
      std::this_thread::sleep_for(pause);
      pause = std::min(pause * 2, std::chrono::milliseconds(50));
    }
    child.wait();
    result.exit_code = child.exit_code();
  } catch (const bp::process_error& e) {
    throw Error("cannot run " + argv[0] + ": " + e.what());
  }
  result.out = read_file(files.out);
  result.err = read_file(files.err);
  return result;
}

}  // namespace xlv
