#pragma once

#include <vector>

namespace sectk {

// Exact minimum-cost assignment on a square cost matrix (Jonker-Volgenant
// style shortest augmenting paths, O(n^3)). Returns row -> column.
std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost);

// Maximum-weight assignment; weight matrix may be rectangular. Returns
// row -> column with -1 for rows matched to padding.
std::vector<int> solve_max_assignment(const std::vector<std::vector<double>>& weight);

}  // namespace sectk
