#pragma once

#include <string>

#include "raman/types.hpp"

namespace raman {

// Profile CSV: header row carries the distances (km), first column the
// channel frequencies (THz), cells are dBm.
void profile_save_csv(const PowerProfile2D& p, const std::string& path);
PowerProfile2D profile_load_csv(const std::string& path);

}  // namespace raman
