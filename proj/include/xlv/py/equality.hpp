#pragma once

// Deep state comparison of target-runtime values with per-group strategies.
// Requires the GIL.

#include <string>

#include <pybind11/pybind11.h>

#include "xlv/equality_config.hpp"

namespace xlv::pyrt {

namespace py = pybind11;

/// True iff `expected` and `actual` are structurally equivalent. When they are
/// not and `mismatch` is non-null, it receives the path of the first difference
/// (e.g. "$.items[2]._Foo__x"). Throws DepthExceededError past cfg.max_depth.
bool semantic_equal(py::handle expected, py::handle actual, const EqualityConfig& cfg = {},
                    std::string* mismatch = nullptr);

}  // namespace xlv::pyrt
