// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0

#include <mcmot/hungarian.hpp>

#include <limits>
#include <stdexcept>

namespace mcmot {

namespace {

// Potentials formulation over a (rows <= cols) matrix, 1-based internals.
std::vector<int> solve_wide(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    constexpr double kInf = std::numeric_limits<double>::infinity();

    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(m) + 1, 0.0);
    std::vector<int> p(static_cast<std::size_t>(m) + 1, 0);    // col -> row
    std::vector<int> way(static_cast<std::size_t>(m) + 1, 0);  // augmenting path

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(m) + 1, kInf);
        std::vector<char> used(static_cast<std::size_t>(m) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = p[static_cast<std::size_t>(j0)];
            int j1 = 0;
            double delta = kInf;
            for (int j = 1; j <= m; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = cost(i0 - 1, j - 1) -
                                   u[static_cast<std::size_t>(i0)] -
                                   v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= m; ++j) {
        if (p[static_cast<std::size_t>(j)] > 0) {
            row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)]) - 1] =
                j - 1;
        }
    }
    return row_to_col;
}

}  // namespace

std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
    if (!cost.allFinite()) {
        throw std::invalid_argument("hungarian: cost entries must be finite");
    }
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    if (n == 0 || m == 0) return std::vector<int>(static_cast<std::size_t>(n), -1);
    if (n <= m) return solve_wide(cost);

    const std::vector<int> col_to_row = solve_wide(cost.transpose());
    std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
    for (int j = 0; j < m; ++j) {
        if (col_to_row[static_cast<std::size_t>(j)] >= 0) {
            row_to_col[static_cast<std::size_t>(col_to_row[static_cast<std::size_t>(j)])] =
                j;
        }
    }
    return row_to_col;
}

}  // namespace mcmot
