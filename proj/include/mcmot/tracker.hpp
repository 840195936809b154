// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//
// Track-by-detection pipeline over multi-camera frames: predict every track,
// build one global world-coordinate cost matrix against all detections from
// all cameras, associate (one-to-many transport by default, one-to-one
// Hungarian as the baseline), update matched tracks, and manage birth,
// death and rebirth of identities.

#pragma once

#include <mcmot/fota.hpp>
#include <mcmot/model.hpp>
#include <mcmot/motion.hpp>

#include <utility>
#include <vector>

namespace mcmot {

enum class DistanceMetric { kMahalanobis, kGiou2D, kGiou3D };
enum class AssociationMethod { kFota, kKuhnMunkres };

/// Gate defaults per metric: 11.07 for Mahalanobis (chi-square-quantile
/// flavored, tunable), 1.5 for both GIoU distances (range [0, 2)).
double default_gate(DistanceMetric metric);

struct FotaSolverConfig {
    double gamma = 0.1;
    int max_iters = 50;
    double tol = 1e-6;
    double min_mass = 0.3;
};

struct LifecycleConfig {
    int confirm_hits = 2;           // updates needed before a track is reported
    int max_misses = 3;             // consecutive misses a confirmed track survives
    int rebirth_window_frames = 10; // frames a lost track stays re-acquirable
};

struct TrackerConfig {
    DistanceMetric distance_metric = DistanceMetric::kMahalanobis;
    double gate_threshold = 11.07;
    FotaSolverConfig fota;
    LifecycleConfig lifecycle;
    KalmanConfig kalman;
    AssociationMethod association = AssociationMethod::kFota;
};

void validate(const TrackerConfig& config);

enum class TrackStatus { kTentative, kConfirmed };

struct Tracklet {
    int track_id = 0;
    int class_id = 1;
    TrackStatus status = TrackStatus::kTentative;
    KalmanState state;
    double state_timestamp = 0.0;  // time the state refers to
    int hits = 0;                  // frames with at least one matched detection
    int misses = 0;                // consecutive unmatched frames
    int birth_frame = 0;
    double score = 0.0;            // last aggregated detection score
};

struct LostTracklet {
    Tracklet track;
    int expiry_frame = 0;  // last frame_index at which rebirth is allowed
};

struct TrackerState {
    std::vector<Tracklet> tracks;
    std::vector<LostTracklet> lost_pool;
    int next_track_id = 0;
    int frame_index = -1;  // last processed frame, -1 before the first step
    double last_timestamp = 0.0;
};

struct TrackOutput {
    int track_id = 0;
    int class_id = 1;
    Box3D box;
    Eigen::Vector3d velocity{0.0, 0.0, 0.0};  // m/s, world frame
    double score = 0.0;
};

struct FrameDiagnostics {
    int num_births = 0;
    int num_deaths = 0;
    int num_rebirths = 0;
    int solver_iterations = 0;
    double marginal_error = 0.0;
};

struct FrameResult {
    int frame_index = 0;
    std::vector<TrackOutput> outputs;  // confirmed live tracks
    Assignment assignment;             // per input detection, post-gating
    FrameDiagnostics diagnostics;
};

/// Entry (i, j) is the configured distance between predicted track i and
/// detection j. Cross-class pairs and pairs beyond gate_threshold get
/// gate_threshold + a large finite penalty (never infinity, the transport
/// kernel must stay well defined). Costs depend only on world-frame boxes,
/// so the same box seen from two cameras produces equal columns.
Eigen::MatrixXd build_cost_matrix(const std::vector<Tracklet>& tracks,
                                  const std::vector<Detection>& detections,
                                  const TrackerConfig& config);

/// Advances the tracker by one frame with one-to-many transport association
/// (track capacity = camera count, detection mass 1). Throws
/// std::invalid_argument when frame_index does not strictly increase.
FrameResult step(TrackerState& state, const FrameBundle& frame,
                 const TrackerConfig& config);

/// Identical pipeline with one-to-one Hungarian association on the same
/// pooled cost matrix; co-visible duplicate detections birth extra tracks.
FrameResult km_baseline_step(TrackerState& state, const FrameBundle& frame,
                             const TrackerConfig& config);

/// Folds step (or km_baseline_step, per config.association) over an ordered
/// frame sequence starting from a fresh state.
std::vector<FrameResult> run(const std::vector<FrameBundle>& frames,
                             const TrackerConfig& config);

}  // namespace mcmot
