#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace xlv {

/// Compares two strings that may be renderings of map values. Source-style
/// "{k=v, ...}" and target-style "{'k': v, ...}" renderings are parsed into
/// key/value multisets; anything else compares verbatim.
bool string_form_equal(std::string_view expected, std::string_view actual);

/// Parses a map rendering in either style into normalized (key, value) pairs,
/// sorted. Returns false when `text` is not a parseable map rendering.
bool parse_map_rendering(std::string_view text, std::vector<std::pair<std::string, std::string>>& out);

}  // namespace xlv
