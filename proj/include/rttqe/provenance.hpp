#pragma once

#include <string>

namespace rttqe {

inline constexpr const char* kToolVersion = "rtt-qe 1.0.0";

/// Stamped into every JSON output so results can be traced to the tool
/// build and run configuration that produced them.
struct Provenance {
  std::string tool_version = kToolVersion;
  std::string config_digest;
};

}  // namespace rttqe
