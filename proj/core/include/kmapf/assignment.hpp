#pragma once

#include <vector>

namespace kmapf {

// Minimum-total-cost matching of min(m, n) row/column pairs of an m x n cost
// matrix (shortest augmenting path, square-padded with zeros). Returns the
// matched column per row, -1 for unmatched rows. Entries must be finite; use
// a large sentinel to discourage infeasible pairs.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost,
                           double* total_cost = nullptr);

}  // namespace kmapf
