#include "sectk/assignment.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace sectk {

std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    for (const auto& row : cost)
        if (static_cast<int>(row.size()) != n) throw std::invalid_argument("cost matrix must be square");
    if (n == 0) return {};

    const double inf = std::numeric_limits<double>::infinity();
    // 1-based potentials/matching, column 0 is the virtual start.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = match[j0], j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (match[j] > 0) row_to_col[match[j] - 1] = j - 1;
    return row_to_col;
}

std::vector<int> solve_max_assignment(const std::vector<std::vector<double>>& weight) {
    const int rows = static_cast<int>(weight.size());
    const int cols = rows == 0 ? 0 : static_cast<int>(weight[0].size());
    if (rows == 0 || cols == 0) return std::vector<int>(rows, -1);
    const int n = std::max(rows, cols);

    // Pad to square with zero weight, negate to minimize.
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) cost[i][j] = -weight[i][j];

    std::vector<int> full = solve_assignment(cost);
    std::vector<int> out(rows, -1);
    for (int i = 0; i < rows; ++i)
        if (full[i] < cols) out[i] = full[i];
    return out;
}

}  // namespace sectk
