#pragma once

#include "json.hpp"

namespace xlv {

struct EqualityConfig {
  double float_rel_tol = 1e-9;
  double float_abs_tol = 1e-12;
  double duration_abs_tol_seconds = 1e-6;
  int max_depth = 200;

  /// Throws ConfigError when a tolerance is negative or max_depth < 1.
  void validate() const;

  bool operator==(const EqualityConfig&) const = default;
};

/// Reads the "equality" config section; absent keys keep their defaults.
EqualityConfig equality_config_from_json(const nlohmann::ordered_json& node);
nlohmann::ordered_json to_json(const EqualityConfig& cfg);

}  // namespace xlv
