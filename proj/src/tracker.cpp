// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//
// One tracker step: predict all tracks to the frame timestamp, pool the
// detections of every camera into one world-frame cost matrix, associate,
// fuse matched detections per track, then run lifecycle (confirm / coast /
// lose / rebirth / birth). The transport association gives each track
// capacity for one detection per camera, which is what fuses co-visible
// duplicates instead of splitting them into parallel tracks.

#include <mcmot/geometry.hpp>
#include <mcmot/hungarian.hpp>
#include <mcmot/tracker.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcmot {

namespace {

// Added on top of gate_threshold for gated / cross-class pairs. Keeps the
// matrix finite (the transport kernel needs finite costs) while making the
// pair strictly worse than any dustbin route.
constexpr double kGatePenalty = 1000.0;

double pair_distance(const Tracklet& track, const Detection& det,
                     const TrackerConfig& config) {
    switch (config.distance_metric) {
        case DistanceMetric::kMahalanobis: {
            const MeasVec mean = track.state.measurement();
            MeasVec z;
            z << det.box.center, det.box.yaw, det.box.dims;
            // Wrap the yaw residual: shift the measured yaw to the branch
            // nearest the prediction before differencing.
            z(3) = mean(3) + normalize_yaw(det.box.yaw - mean(3));
            const MeasMat s = innovation_covariance(track.state, config.kalman);
            return d_mahalanobis(mean, s, z);
        }
        case DistanceMetric::kGiou2D:
            return d_giou_2d(track.state.box(), det.box);
        case DistanceMetric::kGiou3D:
            return d_giou_3d(track.state.box(), det.box);
    }
    throw std::invalid_argument("unknown distance metric");
}

// Rebuilds track_to_detections from detection_to_track.
void rebuild_track_lists(Assignment* assign, std::size_t num_tracks) {
    assign->track_to_detections.assign(num_tracks, {});
    for (std::size_t j = 0; j < assign->detection_to_track.size(); ++j) {
        const int i = assign->detection_to_track[j];
        if (i >= 0) {
            assign->track_to_detections[static_cast<std::size_t>(i)].push_back(
                static_cast<int>(j));
        }
    }
}

struct AssociationOutcome {
    Assignment assignment;
    int solver_iterations = 0;
    double marginal_error = 0.0;
};

AssociationOutcome associate_fota(const Eigen::MatrixXd& cost,
                                  const FrameBundle& frame,
                                  const TrackerConfig& config) {
    const Eigen::Index n = cost.rows();
    const Eigen::Index m = cost.cols();
    AssociationOutcome out;
    out.assignment.detection_to_track.assign(static_cast<std::size_t>(m),
                                             kUnmatched);

    // Each track can absorb one detection per camera; each detection is one
    // unit of evidence.
    const double capacity = static_cast<double>(std::max<std::size_t>(
        frame.rig.size(), 1));

    // Transported fraction: one unit per detection that has at least one
    // in-gate track. The spec default min(|p|, |q|) would leave no slack for
    // clutter once tracks out-number detections, force-assigning every
    // detection; counting gateable detections sends exactly the plausible
    // ones through the plan and parks the rest in the dustbin.
    double s = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
        if ((cost.col(j).array() <= config.gate_threshold).any()) s += 1.0;
    }
    s = std::min(s, capacity * static_cast<double>(n));
    if (s <= 0.0) {
        rebuild_track_lists(&out.assignment, static_cast<std::size_t>(n));
        return out;
    }

    TransportProblem problem;
    problem.cost = cost;
    problem.p = Eigen::VectorXd::Constant(n, capacity);
    problem.q = Eigen::VectorXd::Ones(m);
    problem.s = s;
    problem.epsilon = config.gate_threshold;
    problem.gamma = config.fota.gamma;
    problem.max_iters = config.fota.max_iters;
    problem.tol = config.fota.tol;

    const TransportPlan plan = sinkhorn(problem);
    out.solver_iterations = plan.iterations_used;
    out.marginal_error = plan.marginal_error;
    out.assignment = extract_assignment(plan, config.fota.min_mass);
    return out;
}

AssociationOutcome associate_km(const Eigen::MatrixXd& cost) {
    AssociationOutcome out;
    out.assignment.detection_to_track.assign(
        static_cast<std::size_t>(cost.cols()), kUnmatched);
    const std::vector<int> row_to_col = hungarian(cost);
    for (std::size_t i = 0; i < row_to_col.size(); ++i) {
        if (row_to_col[i] >= 0) {
            out.assignment.detection_to_track[static_cast<std::size_t>(
                row_to_col[i])] = static_cast<int>(i);
        }
    }
    return out;
}

FrameResult step_impl(TrackerState& state, const FrameBundle& frame,
                      const TrackerConfig& config, AssociationMethod method) {
    validate(config);
    if (frame.frame_index <= state.frame_index) {
        throw std::invalid_argument(
            "tracker step: frame_index must strictly increase");
    }
    if (state.frame_index >= 0 && frame.timestamp < state.last_timestamp) {
        throw std::invalid_argument(
            "tracker step: timestamp must not decrease");
    }

    FrameResult result;
    result.frame_index = frame.frame_index;

    // Predict every live track to the frame timestamp.
    for (Tracklet& track : state.tracks) {
        const double dt = frame.timestamp - track.state_timestamp;
        if (dt > 0.0) {
            track.state = kf_predict(track.state, dt, config.kalman);
            track.state_timestamp = frame.timestamp;
        }
    }

    // Drop lost tracks whose rebirth window has closed.
    std::erase_if(state.lost_pool, [&](const LostTracklet& lost) {
        return lost.expiry_frame < frame.frame_index;
    });

    const std::vector<Detection>& dets = frame.detections;
    const std::size_t n = state.tracks.size();
    const std::size_t m = dets.size();

    AssociationOutcome outcome;
    outcome.assignment.detection_to_track.assign(m, kUnmatched);
    Eigen::MatrixXd cost;
    if (n > 0 && m > 0) {
        cost = build_cost_matrix(state.tracks, dets, config);
        outcome = method == AssociationMethod::kFota
                      ? associate_fota(cost, frame, config)
                      : associate_km(cost);
        // Post-extraction gate: whatever the associator proposed, a pair
        // beyond the gate is not a match.
        for (std::size_t j = 0; j < m; ++j) {
            const int i = outcome.assignment.detection_to_track[j];
            if (i >= 0 && cost(i, static_cast<Eigen::Index>(j)) >
                              config.gate_threshold) {
                outcome.assignment.detection_to_track[j] = kUnmatched;
            }
        }
    }
    rebuild_track_lists(&outcome.assignment, n);
    result.diagnostics.solver_iterations = outcome.solver_iterations;
    result.diagnostics.marginal_error = outcome.marginal_error;

    // Update matched tracks; fuse multi-camera detections per track.
    std::vector<bool> matched(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const std::vector<int>& det_ids =
            outcome.assignment.track_to_detections[i];
        Tracklet& track = state.tracks[i];
        if (det_ids.empty()) {
            track.misses += 1;
            continue;
        }
        matched[i] = true;
        std::vector<Detection> fused;
        fused.reserve(det_ids.size());
        double score_sum = 0.0;
        for (int j : det_ids) {
            fused.push_back(dets[static_cast<std::size_t>(j)]);
            score_sum += dets[static_cast<std::size_t>(j)].score;
        }
        track.state =
            update_with_multiple(track.state, std::move(fused), config.kalman)
                .first;
        track.state_timestamp = frame.timestamp;
        track.hits += 1;
        track.misses = 0;
        track.score = score_sum / static_cast<double>(det_ids.size());
        if (track.status == TrackStatus::kTentative &&
            track.hits >= config.lifecycle.confirm_hits) {
            track.status = TrackStatus::kConfirmed;
        }
    }

    // Lifecycle: tentative tracks die on their first miss, confirmed tracks
    // coast up to max_misses frames and then move to the lost pool.
    std::vector<Tracklet> survivors;
    survivors.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Tracklet& track = state.tracks[i];
        if (matched[i] || track.misses == 0) {
            survivors.push_back(std::move(track));
            continue;
        }
        if (track.status == TrackStatus::kTentative) {
            result.diagnostics.num_deaths += 1;
            continue;
        }
        if (track.misses > config.lifecycle.max_misses) {
            result.diagnostics.num_deaths += 1;
            state.lost_pool.push_back(LostTracklet{
                std::move(track),
                frame.frame_index + config.lifecycle.rebirth_window_frames});
            continue;
        }
        survivors.push_back(std::move(track));
    }
    state.tracks = std::move(survivors);

    // Unmatched detections either revive a compatible lost track (rebirth,
    // original id kept) or start a new tentative track. Higher-score
    // detections choose first.
    std::vector<std::size_t> unmatched;
    for (std::size_t j = 0; j < m; ++j) {
        if (outcome.assignment.detection_to_track[j] == kUnmatched) {
            unmatched.push_back(j);
        }
    }
    std::stable_sort(unmatched.begin(), unmatched.end(),
                     [&](std::size_t a, std::size_t b) {
                         return dets[a].score > dets[b].score;
                     });
    for (std::size_t j : unmatched) {
        const Detection& det = dets[j];
        // Rebirth scan: lazily predict each candidate to now and take the
        // closest same-class lost track within the gate.
        int best = -1;
        double best_dist = 0.0;
        Tracklet best_predicted;
        for (std::size_t k = 0; k < state.lost_pool.size(); ++k) {
            Tracklet candidate = state.lost_pool[k].track;
            if (candidate.class_id != det.class_id) continue;
            const double dt = frame.timestamp - candidate.state_timestamp;
            if (dt > 0.0) {
                candidate.state = kf_predict(candidate.state, dt, config.kalman);
                candidate.state_timestamp = frame.timestamp;
            }
            const double dist = pair_distance(candidate, det, config);
            if (dist <= config.gate_threshold &&
                (best < 0 || dist < best_dist)) {
                best_dist = dist;
                best = static_cast<int>(k);
                best_predicted = candidate;
            }
        }
        if (best >= 0) {
            Tracklet revived = std::move(best_predicted);
            revived.state =
                kf_update(revived.state, det, config.kalman).first;
            revived.state_timestamp = frame.timestamp;
            revived.hits += 1;
            revived.misses = 0;
            revived.score = det.score;
            state.lost_pool.erase(state.lost_pool.begin() + best);
            state.tracks.push_back(std::move(revived));
            result.diagnostics.num_rebirths += 1;
            continue;
        }
        Tracklet born;
        born.track_id = state.next_track_id++;
        born.class_id = det.class_id;
        born.state = kf_init(det, config.kalman);
        born.state_timestamp = frame.timestamp;
        born.hits = 1;
        born.misses = 0;
        born.birth_frame = frame.frame_index;
        born.score = det.score;
        born.status = born.hits >= config.lifecycle.confirm_hits
                          ? TrackStatus::kConfirmed
                          : TrackStatus::kTentative;
        state.tracks.push_back(std::move(born));
        result.diagnostics.num_births += 1;
    }

    // Report confirmed tracks, including ones coasting on a miss.
    for (const Tracklet& track : state.tracks) {
        if (track.status != TrackStatus::kConfirmed) continue;
        TrackOutput out;
        out.track_id = track.track_id;
        out.class_id = track.class_id;
        out.box = track.state.box();
        out.velocity = track.state.velocity();
        out.score = track.score;
        result.outputs.push_back(out);
    }

    result.assignment = std::move(outcome.assignment);
    state.frame_index = frame.frame_index;
    state.last_timestamp = frame.timestamp;
    return result;
}

}  // namespace

double default_gate(DistanceMetric metric) {
    switch (metric) {
        case DistanceMetric::kMahalanobis: return 11.07;
        case DistanceMetric::kGiou2D:
        case DistanceMetric::kGiou3D: return 1.5;
    }
    throw std::invalid_argument("unknown distance metric");
}

void validate(const TrackerConfig& config) {
    if (!(std::isfinite(config.gate_threshold) && config.gate_threshold > 0.0)) {
        throw std::invalid_argument("tracker config: gate_threshold must be > 0");
    }
    if (!(std::isfinite(config.fota.gamma) && config.fota.gamma > 0.0)) {
        throw std::invalid_argument("tracker config: fota.gamma must be > 0");
    }
    if (config.fota.max_iters < 1) {
        throw std::invalid_argument("tracker config: fota.max_iters must be >= 1");
    }
    if (!(std::isfinite(config.fota.tol) && config.fota.tol > 0.0)) {
        throw std::invalid_argument("tracker config: fota.tol must be > 0");
    }
    if (!(config.fota.min_mass >= 0.0 && config.fota.min_mass <= 1.0)) {
        throw std::invalid_argument(
            "tracker config: fota.min_mass must lie in [0, 1]");
    }
    if (config.lifecycle.confirm_hits < 1) {
        throw std::invalid_argument(
            "tracker config: lifecycle.confirm_hits must be >= 1");
    }
    if (config.lifecycle.max_misses < 0) {
        throw std::invalid_argument(
            "tracker config: lifecycle.max_misses must be >= 0");
    }
    if (config.lifecycle.rebirth_window_frames < 0) {
        throw std::invalid_argument(
            "tracker config: lifecycle.rebirth_window_frames must be >= 0");
    }
    validate(config.kalman);
}

Eigen::MatrixXd build_cost_matrix(const std::vector<Tracklet>& tracks,
                                  const std::vector<Detection>& detections,
                                  const TrackerConfig& config) {
    const Eigen::Index n = static_cast<Eigen::Index>(tracks.size());
    const Eigen::Index m = static_cast<Eigen::Index>(detections.size());
    Eigen::MatrixXd cost(n, m);
    const double penalty = config.gate_threshold + kGatePenalty;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Tracklet& track = tracks[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m; ++j) {
            const Detection& det = detections[static_cast<std::size_t>(j)];
            if (track.class_id != det.class_id) {
                cost(i, j) = penalty;
                continue;
            }
            const double d = pair_distance(track, det, config);
            cost(i, j) = d > config.gate_threshold ? penalty : d;
        }
    }
    return cost;
}

FrameResult step(TrackerState& state, const FrameBundle& frame,
                 const TrackerConfig& config) {
    return step_impl(state, frame, config, AssociationMethod::kFota);
}

FrameResult km_baseline_step(TrackerState& state, const FrameBundle& frame,
                             const TrackerConfig& config) {
    return step_impl(state, frame, config, AssociationMethod::kKuhnMunkres);
}

std::vector<FrameResult> run(const std::vector<FrameBundle>& frames,
                             const TrackerConfig& config) {
    TrackerState state;
    std::vector<FrameResult> results;
    results.reserve(frames.size());
    for (const FrameBundle& frame : frames) {
        results.push_back(config.association == AssociationMethod::kFota
                              ? step(state, frame, config)
                              : km_baseline_step(state, frame, config));
    }
    return results;
}

}  // namespace mcmot
