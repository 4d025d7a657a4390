#pragma once

#include <string>
#include <vector>

#include "raman/types.hpp"

namespace raman {

// Minimal self-contained SVG emitters for quick visual inspection of runs.
void svg_heatmap(const Matrix& values, const std::string& title,
                 const std::string& path);
void svg_lines(const std::vector<std::vector<double>>& series,
               const std::vector<std::string>& labels, const std::string& title,
               const std::string& path);

}  // namespace raman
