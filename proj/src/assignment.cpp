#include "sctracker/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sct {

namespace {

// Rows <= cols. Potentials-based O(n^2 m) shortest augmenting path.
std::vector<int> hungarianWide(const CostMatrix& c) {
  const int n = static_cast<int>(c.rows());
  const int m = static_cast<int>(c.cols());
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

std::vector<int> hungarian(const CostMatrix& costs) {
  const auto rows = costs.rows();
  const auto cols = costs.cols();
  if (rows == 0 || cols == 0) return std::vector<int>(rows, -1);
  if (rows <= cols) return hungarianWide(costs);

  const std::vector<int> col_to_row = hungarianWide(costs.transpose());
  std::vector<int> row_to_col(rows, -1);
  for (int j = 0; j < static_cast<int>(cols); ++j) row_to_col[col_to_row[j]] = j;
  return row_to_col;
}

AssignmentResult solveAssignment(const CostMatrix& costs, double gate) {
  if (!(gate >= 0.0)) throw std::invalid_argument("gate must be non-negative");
  const int rows = static_cast<int>(costs.rows());
  const int cols = static_cast<int>(costs.cols());

  AssignmentResult result;
  double max_feasible = 0.0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double value = costs(i, j);
      if (!std::isfinite(value) || value < 0.0) {
        throw std::invalid_argument("cost entries must be finite and non-negative");
      }
      if (value <= gate) max_feasible = std::max(max_feasible, value);
    }
  }

  if (rows == 0 || cols == 0) {
    for (int i = 0; i < rows; ++i) result.unmatched_rows.push_back(i);
    for (int j = 0; j < cols; ++j) result.unmatched_cols.push_back(j);
    return result;
  }

  // Any sentinel pair costs more than every feasible matching combined, so
  // the solver first maximizes the feasible pair count, then minimizes cost.
  const double sentinel = (std::min(rows, cols) + 1) * (max_feasible + 1.0);
  const CostMatrix gated = (costs.array() <= gate).select(costs, sentinel);

  const std::vector<int> row_to_col = hungarian(gated);
  std::vector<char> col_used(cols, 0);
  for (int i = 0; i < rows; ++i) {
    const int j = row_to_col[i];
    if (j >= 0 && costs(i, j) <= gate) {
      result.matches.emplace_back(i, j);
      col_used[j] = 1;
    } else {
      result.unmatched_rows.push_back(i);
    }
  }
  for (int j = 0; j < cols; ++j) {
    if (!col_used[j]) result.unmatched_cols.push_back(j);
  }
  return result;
}

}  // namespace sct
