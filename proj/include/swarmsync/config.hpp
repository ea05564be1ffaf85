#pragma once

#include <string>

#include "swarmsync/sim.hpp"

namespace swarmsync {

/// Analysis knobs that have no role in simulation: the iota diagnostic and
/// the K-report residual defaults.
struct AnalysisSettings {
  double gamma = 1.0;
  double kappa_max = -1.0; // < 0 means "max s2 over the topology set"
  double cE0 = 0.0;        // envelope estimate of the c E_0 coupling
  double residual_tm_tn = 0.0;
};

struct LoadedConfig {
  SimConfig sim;
  AnalysisSettings analysis;
};

/// Parses and fully validates a JSON config (comments allowed). Throws
/// ParseError on malformed input and ValidationError with the violated
/// invariant named.
LoadedConfig parse_config(const std::string& path);

LoadedConfig parse_config_text(const std::string& text, const std::string& origin = "<text>");

/// Canonical serialization; parse(serialize(cfg)) is semantically identical
/// to cfg.
std::string serialize_config(const LoadedConfig& cfg);

}  // namespace swarmsync
