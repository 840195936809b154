// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>
#include <mcmot/hungarian.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

using namespace mcmot;

namespace {

double assignment_cost(const Eigen::MatrixXd& cost,
                       const std::vector<int>& row_to_col) {
    double total = 0.0;
    for (std::size_t r = 0; r < row_to_col.size(); ++r) {
        if (row_to_col[r] >= 0) total += cost(static_cast<int>(r), row_to_col[r]);
    }
    return total;
}

// Brute-force oracle for rows <= cols: enumerate every ordered choice of
// `rows` distinct columns (permutations of the column set, truncated).
double brute_force_min_cost(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    REQUIRE(n <= m);
    std::vector<int> cols(static_cast<std::size_t>(m));
    std::iota(cols.begin(), cols.end(), 0);
    double best = 1e300;
    do {
        double total = 0.0;
        for (int r = 0; r < n; ++r) total += cost(r, cols[static_cast<std::size_t>(r)]);
        best = std::min(best, total);
    } while (std::next_permutation(cols.begin(), cols.end()));
    return best;
}

}  // namespace

TEST_CASE("known square instance") {
    Eigen::MatrixXd cost(3, 3);
    cost << 4, 1, 3,
            2, 0, 5,
            3, 2, 2;
    const std::vector<int> m = hungarian(cost);
    CHECK(assignment_cost(cost, m) == doctest::Approx(5.0));
    CHECK(m[0] == 1);
    CHECK(m[1] == 0);
    CHECK(m[2] == 2);
}

TEST_CASE("square result is a permutation") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 8);
        Eigen::MatrixXd cost(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) cost(i, j) = u(rng);

        const std::vector<int> m = hungarian(cost);
        std::vector<bool> seen(static_cast<std::size_t>(n), false);
        for (int c : m) {
            REQUIRE(c >= 0);
            REQUIRE(c < n);
            CHECK(!seen[static_cast<std::size_t>(c)]);
            seen[static_cast<std::size_t>(c)] = true;
        }
    }
}

TEST_CASE("square instances match the permutation oracle") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 6);
        Eigen::MatrixXd cost(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) cost(i, j) = u(rng);

        const double got = assignment_cost(cost, hungarian(cost));
        CHECK(got == doctest::Approx(brute_force_min_cost(cost)).epsilon(1e-9));
    }
}

TEST_CASE("wide instances match the truncated-permutation oracle") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 4);
        const int m = n + 1 + static_cast<int>(rng() % 3);
        Eigen::MatrixXd cost(n, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) cost(i, j) = u(rng);

        const std::vector<int> assign = hungarian(cost);
        int assigned = 0;
        for (int c : assign) {
            if (c >= 0) ++assigned;
        }
        CHECK(assigned == n);
        CHECK(assignment_cost(cost, assign) ==
              doctest::Approx(brute_force_min_cost(cost)).epsilon(1e-9));
    }
}

TEST_CASE("tall instances leave the expensive rows unmatched") {
    Eigen::MatrixXd tall(3, 2);
    tall << 1, 8,
            9, 1,
            100, 100;
    const std::vector<int> t = hungarian(tall);
    CHECK(t[0] == 0);
    CHECK(t[1] == 1);
    CHECK(t[2] == -1);
}

TEST_CASE("tall instances match the transposed oracle") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 1 + static_cast<int>(rng() % 4);
        const int n = m + 1 + static_cast<int>(rng() % 3);
        Eigen::MatrixXd cost(n, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) cost(i, j) = u(rng);

        const double got = assignment_cost(cost, hungarian(cost));
        CHECK(got ==
              doctest::Approx(brute_force_min_cost(cost.transpose())).epsilon(1e-9));
    }
}

TEST_CASE("degenerate and invalid inputs") {
    CHECK(hungarian(Eigen::MatrixXd(0, 0)).empty());
    CHECK(hungarian(Eigen::MatrixXd(0, 3)).empty());
    const std::vector<int> no_cols = hungarian(Eigen::MatrixXd(2, 0));
    REQUIRE(no_cols.size() == 2);
    CHECK(no_cols[0] == -1);
    CHECK(no_cols[1] == -1);

    Eigen::MatrixXd nan2 = Eigen::MatrixXd::Zero(2, 2);
    nan2(0, 0) = std::nan("");
    CHECK_THROWS_AS(hungarian(nan2), std::invalid_argument);
}
