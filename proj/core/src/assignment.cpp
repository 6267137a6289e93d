#include "kmapf/assignment.hpp"

#include <limits>
#include <stdexcept>

namespace kmapf {

std::vector<int> hungarian(const std::vector<std::vector<double>>& cost,
                           double* total_cost) {
  const int m = static_cast<int>(cost.size());
  const int n = m > 0 ? static_cast<int>(cost[0].size()) : 0;
  for (const auto& row : cost)
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("hungarian: ragged cost matrix");

  std::vector<int> rowsol(static_cast<size_t>(m), -1);
  if (m == 0 || n == 0) {
    if (total_cost) *total_cost = 0.0;
    return rowsol;
  }

  const int s = std::max(m, n);  // square padding with zero-cost dummies
  auto at = [&](int r, int c) -> double {
    return (r < m && c < n) ? cost[static_cast<size_t>(r)][static_cast<size_t>(c)] : 0.0;
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<size_t>(s) + 1, 0.0), v(static_cast<size_t>(s) + 1, 0.0);
  std::vector<int> p(static_cast<size_t>(s) + 1, 0), way(static_cast<size_t>(s) + 1, 0);

  for (int i = 1; i <= s; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<size_t>(s) + 1, inf);
    std::vector<char> used(static_cast<size_t>(s) + 1, 0);
    do {
      used[static_cast<size_t>(j0)] = 1;
      int i0 = p[static_cast<size_t>(j0)], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= s; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        double cur = at(i0 - 1, j - 1) - u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
        if (cur < minv[static_cast<size_t>(j)]) {
          minv[static_cast<size_t>(j)] = cur;
          way[static_cast<size_t>(j)] = j0;
        }
        if (minv[static_cast<size_t>(j)] < delta) {
          delta = minv[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= s; ++j) {
        if (used[static_cast<size_t>(j)]) {
          u[static_cast<size_t>(p[static_cast<size_t>(j)])] += delta;
          v[static_cast<size_t>(j)] -= delta;
        } else {
          minv[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<size_t>(j0)] != 0);
    do {
      int j1 = way[static_cast<size_t>(j0)];
      p[static_cast<size_t>(j0)] = p[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  double total = 0.0;
  for (int j = 1; j <= s; ++j) {
    int i = p[static_cast<size_t>(j)];
    if (i >= 1 && i <= m && j <= n) {
      rowsol[static_cast<size_t>(i - 1)] = j - 1;
      total += cost[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)];
    }
  }
  if (total_cost) *total_cost = total;
  return rowsol;
}

}  // namespace kmapf
