// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//
// Min-cost one-to-one assignment (Kuhn-Munkres with potentials, the
// O(n^2 m) shortest-augmenting-path form). Shared by the one-to-one
// association baseline and by metric matching.

#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mcmot {

/// Per row, the assigned column index or -1. Exactly min(rows, cols) rows
/// are assigned; the sum of their costs is minimal. All entries must be
/// finite. Deterministic for tied optima.
std::vector<int> hungarian(const Eigen::MatrixXd& cost);

}  // namespace mcmot
