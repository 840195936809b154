// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//
// Training-loss reference: continuing identities are forced onto their own
// track queries, vanished identities fall to background, and the remaining
// visible objects are assigned to object queries by a sharp transport
// matching (gamma = 0.01) over the classification-plus-box cost.

#include <mcmot/fota.hpp>
#include <mcmot/geometry.hpp>
#include <mcmot/setloss.hpp>

#include <cmath>
#include <set>
#include <stdexcept>

namespace mcmot {

namespace {

double box_l1(const Box3D& a, const Box3D& b, double scene_scale) {
    return (a.center - b.center).lpNorm<1>() / scene_scale +
           (a.dims - b.dims).lpNorm<1>() / scene_scale +
           std::abs(std::sin(a.yaw) - std::sin(b.yaw)) +
           std::abs(std::cos(a.yaw) - std::cos(b.yaw));
}

double box_terms(const Box3D& gt, const Box3D& pred, const LossWeights& w) {
    return w.lambda_l1 * box_l1(gt, pred, w.scene_scale) +
           w.lambda_giou * d_giou_3d(gt, pred);
}

double class_prob(const QueryPrediction& pred, int class_id) {
    if (class_id < 0 || class_id >= pred.class_probs.size()) {
        throw std::invalid_argument(
            "set loss: class id outside the prediction's class simplex");
    }
    return pred.class_probs(class_id);
}

}  // namespace

void validate(const QueryPrediction& pred) {
    validate(pred.box);
    if (pred.class_probs.size() < 1) {
        throw std::invalid_argument(
            "query prediction: class_probs must cover background");
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < pred.class_probs.size(); ++i) {
        const double p = pred.class_probs(i);
        if (!(p >= -1e-9 && p <= 1.0 + 1e-9)) {
            throw std::invalid_argument(
                "query prediction: probabilities must lie in [0, 1]");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument(
            "query prediction: class_probs must sum to 1");
    }
}

double match_cost(const GroundTruthTrack& gt, const QueryPrediction& pred,
                  const LossWeights& weights) {
    return -class_prob(pred, gt.class_id) +
           box_terms(gt.box_t, pred.box, weights);
}

std::vector<int> match_queries(const std::vector<GroundTruthTrack>& gts,
                               const std::vector<QueryPrediction>& preds,
                               const LossWeights& weights) {
    std::vector<int> matching(preds.size(), kBackgroundMatch);

    std::set<std::int64_t> seen_track_ids;
    std::vector<bool> claimed(gts.size(), false);

    // Track queries first: a continuing identity (visible both frames) is
    // force-matched regardless of cost; anything else a track query might
    // carry (vanished, or an id that never existed) goes to background.
    for (std::size_t j = 0; j < preds.size(); ++j) {
        const QueryPrediction& pred = preds[j];
        if (!pred.is_track_query) continue;
        if (!seen_track_ids.insert(pred.prev_track_id).second) {
            throw std::invalid_argument(
                "match_queries: duplicate track query identity");
        }
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (gts[g].track_id != pred.prev_track_id) continue;
            if (gts[g].visible_t && gts[g].visible_prev && !claimed[g]) {
                matching[j] = static_cast<int>(g);
                claimed[g] = true;
            }
            break;
        }
    }

    // Newly visible (or unclaimed) objects vs object queries.
    std::vector<int> candidate_gts;
    for (std::size_t g = 0; g < gts.size(); ++g) {
        if (gts[g].visible_t && !claimed[g]) {
            candidate_gts.push_back(static_cast<int>(g));
        }
    }
    std::vector<int> object_queries;
    for (std::size_t j = 0; j < preds.size(); ++j) {
        if (!preds[j].is_track_query) object_queries.push_back(static_cast<int>(j));
    }
    const Eigen::Index n = static_cast<Eigen::Index>(candidate_gts.size());
    const Eigen::Index m = static_cast<Eigen::Index>(object_queries.size());
    if (n == 0 || m == 0) return matching;

    Eigen::MatrixXd cost(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            cost(i, j) = match_cost(
                gts[static_cast<std::size_t>(candidate_gts[static_cast<std::size_t>(i)])],
                preds[static_cast<std::size_t>(object_queries[static_cast<std::size_t>(j)])],
                weights);
        }
    }

    TransportProblem problem;
    // Map the costs affinely onto [0, 1]. The optimal matching is invariant
    // under this, and it makes gamma a fixed sharpness relative to the
    // instance instead of an absolute scale the caller's weights can dwarf
    // (a scene 100 m across would otherwise need tens of thousands of
    // sweeps to sharpen).
    const double lo = cost.minCoeff();
    const double spread = cost.maxCoeff() - lo;
    problem.cost = (cost.array() - lo) / (spread > 0.0 ? spread : 1.0);
    problem.p = Eigen::VectorXd::Ones(n);
    problem.q = Eigen::VectorXd::Ones(m);
    problem.s = static_cast<double>(std::min(n, m));
    problem.epsilon = 2.0;  // strictly above any normalized pair cost
    problem.gamma = 0.01;
    problem.max_iters = 500;
    problem.tol = 1e-9;

    const Assignment assign = solve(problem, 0.3);

    // The per-query argmax can in principle hand one gt to two queries on
    // near-ties; keep the cheaper pair, the other query falls back to
    // background.
    std::vector<int> winner(static_cast<std::size_t>(n), -1);
    for (Eigen::Index j = 0; j < m; ++j) {
        const int row = assign.detection_to_track[static_cast<std::size_t>(j)];
        if (row == kUnmatched) continue;
        int& best = winner[static_cast<std::size_t>(row)];
        if (best < 0 || cost(row, j) < cost(row, best)) {
            best = static_cast<int>(j);
        }
    }
    for (Eigen::Index row = 0; row < n; ++row) {
        const int j = winner[static_cast<std::size_t>(row)];
        if (j < 0) continue;
        matching[static_cast<std::size_t>(
            object_queries[static_cast<std::size_t>(j)])] =
            candidate_gts[static_cast<std::size_t>(row)];
    }
    return matching;
}

double set_prediction_loss(const std::vector<GroundTruthTrack>& gts,
                           const std::vector<QueryPrediction>& preds,
                           const std::vector<int>& matching,
                           const LossWeights& weights) {
    if (matching.size() != preds.size()) {
        throw std::invalid_argument(
            "set_prediction_loss: matching size must equal prediction count");
    }
    double loss = 0.0;
    for (std::size_t j = 0; j < preds.size(); ++j) {
        const int g = matching[j];
        if (g == kBackgroundMatch) {
            loss += -class_prob(preds[j], 0);
            continue;
        }
        if (g < 0 || g >= static_cast<int>(gts.size())) {
            throw std::invalid_argument(
                "set_prediction_loss: matching entry out of range");
        }
        const GroundTruthTrack& gt = gts[static_cast<std::size_t>(g)];
        loss += -class_prob(preds[j], gt.class_id) +
                box_terms(gt.box_t, preds[j].box, weights);
    }
    return loss;
}

}  // namespace mcmot
