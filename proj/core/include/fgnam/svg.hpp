#pragma once
#include <string>
#include <vector>

#include "fgnam/interpret.hpp"

namespace fgnam {

/// Static line-plot panels, one per curve (zero line drawn). Output bytes
/// are deterministic for fixed input.
void render_shape_svg(const std::vector<ShapeCurve>& curves, const std::string& path);

/// Horizontal bar chart of importances for one risk, descending.
void render_importance_svg(const ImportanceTable& table, int risk, const std::string& path);

}  // namespace fgnam
