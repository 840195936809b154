// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//
// Set-prediction loss over predicted boxes and class distributions against
// ground-truth tracks, as pure functions: no network anywhere. Continuing
// tracks are force-matched to their own identity, vanished tracks fall to
// background, and newly visible objects are matched to detection queries by
// transport assignment over a classification-plus-box cost.

#pragma once

#include <mcmot/model.hpp>

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace mcmot {

/// Matching entry for a prediction that maps to no ground-truth track.
inline constexpr int kBackgroundMatch = -1;

struct QueryPrediction {
    Box3D box;
    // Class probability simplex; index 0 is background. Sums to 1 within
    // 1e-9, entries in [0, 1].
    Eigen::VectorXd class_probs;
    bool is_track_query = false;
    std::int64_t prev_track_id = -1;  // identity carried by a track query
};

void validate(const QueryPrediction& pred);

struct GroundTruthTrack {
    std::int64_t track_id = 0;
    int class_id = 1;  // >= 1
    Box3D box_t;       // pose at the current frame
    bool visible_t = true;
    bool visible_prev = false;
};

struct LossWeights {
    double lambda_l1 = 5.0;
    double lambda_giou = 2.0;
    // Positions and dims are divided by this before the l1 term so the
    // weights transfer across scene sizes; yaw enters as (sin, cos).
    double scene_scale = 1.0;
};

/// -p_hat(class of gt) + lambda_l1 * |params(gt) - params(pred)|_1
/// + lambda_giou * d_giou_3d(gt, pred), with params =
/// (x, y, z, l, w, h, sin yaw, cos yaw) scaled per LossWeights.
double match_cost(const GroundTruthTrack& gt, const QueryPrediction& pred,
                  const LossWeights& weights);

/// Per-prediction matching: gt index or kBackgroundMatch.
/// Track queries whose identity is visible now are force-matched to it;
/// track queries whose identity vanished go to background; remaining
/// visible gts are assigned to object queries by transport matching on
/// match_cost (full matching of the smaller side). Each gt ends up with at
/// most one prediction. Throws std::invalid_argument on duplicate track
/// query identities.
std::vector<int> match_queries(const std::vector<GroundTruthTrack>& gts,
                               const std::vector<QueryPrediction>& preds,
                               const LossWeights& weights);

/// Sum over predictions: matched ones pay -p_hat(gt class) plus the box
/// terms of match_cost; unmatched ones pay -p_hat(background).
double set_prediction_loss(const std::vector<GroundTruthTrack>& gts,
                           const std::vector<QueryPrediction>& preds,
                           const std::vector<int>& matching,
                           const LossWeights& weights);

}  // namespace mcmot
