#pragma once

#include <string>

#include "raman/setup.hpp"

namespace raman {

// Key-value config file: one `key = value` per line, `#` comments, keys as
// documented in the README. Unknown keys and malformed lines raise
// ConfigError naming the key and line number.
SimulationSetup load_setup(const std::string& path);
SimulationSetup parse_setup(const std::string& text, const std::string& origin);

// FNV-1a over the canonical serialization; stamped into run manifests.
std::string setup_hash(const SimulationSetup& setup);
std::string serialize_setup(const SimulationSetup& setup);

}  // namespace raman
