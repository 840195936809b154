// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//
// Fractional optimal transport assignment. A cost matrix between N tracks
// and M detections is extended with a dustbin row/column, the entropic
// transport problem is solved with log-domain Sinkhorn scaling, and discrete
// one-to-many matches are read off the resulting plan. An exact LP oracle
// for small instances backs the tests.

#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace mcmot {

// Sentinel for "detection matched to no track".
inline constexpr int kUnmatched = -1;

struct TransportProblem {
    Eigen::MatrixXd cost;  // N x M, finite
    Eigen::VectorXd p;     // track masses, length N, > 0
    Eigen::VectorXd q;     // detection masses, length M, > 0
    double s = 0.0;        // transported fraction, 0 < s <= min(|p|_1, |q|_1)
    double epsilon = 0.0;  // dustbin cost bound, >= 0
    double gamma = 0.1;    // entropic regularization, > 0
    int max_iters = 50;    // Sinkhorn sweeps
    double tol = 1e-6;     // marginal tolerance
};

void validate(const TransportProblem& problem);

// Largest admissible transported fraction: min(|p|_1, |q|_1).
double default_s(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

struct TransportPlan {
    Eigen::MatrixXd plan;  // (N+1) x (M+1), nonnegative
    int iterations_used = 0;
    double marginal_error = 0.0;
    bool converged = false;
};

struct Assignment {
    // Per detection: matched track row, or kUnmatched.
    std::vector<int> detection_to_track;
    // Per track: indices of the detections assigned to it.
    std::vector<std::vector<int>> track_to_detections;
};

// Dustbin extension: [[C, eps], [eps, 2 eps + max(C)]]. The corner exceeds
// every path through the dustbin so slack mass only parks there.
Eigen::MatrixXd extend_cost(const Eigen::MatrixXd& cost, double epsilon);

// Entropic transport on the dustbin-extended problem, log-domain scaling.
// Row marginals target [p, |q|_1 - s], columns [q, |p|_1 - s]. Failure to
// reach tol within max_iters returns converged=false with the best-effort
// plan; non-finite kernel values throw std::domain_error (gamma too small
// for the cost scale).
TransportPlan sinkhorn(const TransportProblem& problem);

// Discrete matches: each detection column goes to its argmax row, unmatched
// if the dustbin row wins or the winning mass is below min_mass. Ties break
// toward the lowest row index.
Assignment extract_assignment(const TransportPlan& plan, double min_mass = 0.3);

// Exact optimum of the dustbin-extended problem for test-scale instances
// (N*M <= 64). Enumerates integral one-to-many placements when masses are
// integral and small enough, otherwise falls back to exact LP pivoting
// (two-phase primal simplex, Bland's rule). Returns the optimal extended
// plan and its total cost.
std::pair<Eigen::MatrixXd, double> lp_oracle(const TransportProblem& problem);

// extend -> sinkhorn -> extract in one call.
Assignment solve(const TransportProblem& problem, double min_mass = 0.3);

}  // namespace mcmot
