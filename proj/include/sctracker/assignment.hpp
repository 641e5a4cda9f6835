#pragma once

#include "sctracker/geometry.hpp"

#include <utility>
#include <vector>

namespace sct {

struct AssignmentResult {
  std::vector<std::pair<int, int>> matches;  // (row, col), ascending by row
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
};

/// Gated linear assignment. Entries above `gate` are infeasible. Returns a
/// matching with the largest number of feasible pairs and, among those, the
/// smallest total cost. Rectangular inputs are supported; an empty side
/// leaves everything unmatched.
///
/// Throws std::invalid_argument on negative or non-finite entries.
AssignmentResult solveAssignment(const CostMatrix& costs, double gate);

/// Unconstrained rectangular min-cost assignment (Hungarian, shortest
/// augmenting paths). Returns the column assigned to each row, or -1 when
/// rows outnumber columns.
std::vector<int> hungarian(const CostMatrix& costs);

}  // namespace sct
