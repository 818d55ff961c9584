#pragma once

#include <vector>

#include "celltrack/densities.hpp"

namespace celltrack {

struct AssignmentResult {
  /// Column of each row, or -1 when the row is left unassigned (more rows than columns).
  std::vector<int> row_to_col;
  double cost = 0.0;
};

/// Minimum-cost assignment on a rectangular matrix; min(rows, cols) pairs are made.
/// Entries must be finite.
AssignmentResult hungarian(const Mat& cost);

}  // namespace celltrack
