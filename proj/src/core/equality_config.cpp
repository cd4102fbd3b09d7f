#include "xlv/equality_config.hpp"

#include "xlv/errors.hpp"

namespace xlv {

void EqualityConfig::validate() const {
  if (float_rel_tol < 0 || float_abs_tol < 0 || duration_abs_tol_seconds < 0) {
    throw ConfigError("equality tolerances must be >= 0");
  }
  if (max_depth < 1) throw ConfigError("equality.max_depth must be >= 1");
}

EqualityConfig equality_config_from_json(const nlohmann::ordered_json& node) {
  EqualityConfig cfg;
  if (node.is_null()) return cfg;
  if (!node.is_object()) throw ConfigError("'equality' must be an object");
  try {
    cfg.float_rel_tol = node.value("float_rel_tol", cfg.float_rel_tol);
    cfg.float_abs_tol = node.value("float_abs_tol", cfg.float_abs_tol);
    cfg.duration_abs_tol_seconds = node.value("duration_abs_tol_seconds", cfg.duration_abs_tol_seconds);
    cfg.max_depth = node.value("max_depth", cfg.max_depth);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid equality config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::ordered_json to_json(const EqualityConfig& cfg) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  out["float_rel_tol"] = cfg.float_rel_tol;
  out["float_abs_tol"] = cfg.float_abs_tol;
  out["duration_abs_tol_seconds"] = cfg.duration_abs_tol_seconds;
  out["max_depth"] = cfg.max_depth;
  return out;
}

}  // namespace xlv
