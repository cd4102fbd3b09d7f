#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <pybind11/embed.h>

#include "fixture_support.hpp"

int main(int argc, char** argv) {
  pybind11::scoped_interpreter interpreter;
  xlv::testsupport::extend_sys_path();
  doctest::Context context(argc, argv);
  return context.run();
}
