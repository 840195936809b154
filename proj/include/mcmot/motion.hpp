// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//
// Linear Kalman motion model. State is a 10-vector
//   (x, y, z, yaw, l, w, h, vx, vy, vz)
// with constant-velocity dynamics in x/y/z and random-walk yaw and dims.
// Measurements observe the first seven components.

#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include <mcmot/model.hpp>

namespace mcmot {

inline constexpr int kStateDim = 10;
inline constexpr int kMeasDim = 7;

using StateVec = Eigen::Matrix<double, kStateDim, 1>;
using StateMat = Eigen::Matrix<double, kStateDim, kStateDim>;
using MeasVec = Eigen::Matrix<double, kMeasDim, 1>;
using MeasMat = Eigen::Matrix<double, kMeasDim, kMeasDim>;

struct KalmanConfig {
    // Per-state process noise variances, applied per second of prediction.
    StateVec process_noise = StateVec::Constant(0.01);
    // Per-measurement noise variances for (x, y, z, yaw, l, w, h):
    // 0.3 m position, 0.2 rad yaw, 0.1 dims.
    MeasVec measurement_noise =
        (MeasVec() << 0.09, 0.09, 0.09, 0.04, 0.01, 0.01, 0.01).finished();
    // Variance assigned to the unobserved velocity states at birth.
    double initial_velocity_var = 25.0;
};

void validate(const KalmanConfig& cfg);

struct KalmanState {
    StateVec mean = StateVec::Zero();
    StateMat covariance = StateMat::Identity();

    // Predicted measurement (x, y, z, yaw, l, w, h).
    MeasVec measurement() const { return mean.head<kMeasDim>(); }
    // Box view of the state, yaw wrapped into [-pi, pi).
    Box3D box() const;
    Eigen::Vector3d velocity() const { return mean.tail<3>(); }
};

// New filter state centered on a detection. Velocity comes from the
// detection's velocity_hint when present, otherwise zero with
// cfg.initial_velocity_var uncertainty.
KalmanState kf_init(const Detection& det, const KalmanConfig& cfg);

// Constant-velocity prediction over dt seconds (dt > 0 required).
KalmanState kf_predict(const KalmanState& state, double dt,
                       const KalmanConfig& cfg);

// Innovation covariance S = H P H^T + R of the current state; used both by
// the measurement update and for Mahalanobis gating before association.
MeasMat innovation_covariance(const KalmanState& state,
                              const KalmanConfig& cfg);

// Standard measurement update observing (x, y, z, yaw, l, w, h). The yaw
// innovation is wrapped into [-pi, pi) first. Returns the posterior and the
// innovation covariance S used by the update. Throws std::domain_error when
// S cannot be factored (filter divergence).
std::pair<KalmanState, MeasMat> kf_update(const KalmanState& state,
                                          const Detection& det,
                                          const KalmanConfig& cfg);

// Fuses several detections assigned to one track by sequential updates in
// descending score order. Returns the final posterior and the innovation
// covariance of the last applied update. Empty input is rejected; the
// caller owns the missed-detection branch.
std::pair<KalmanState, MeasMat> update_with_multiple(
    const KalmanState& state, std::vector<Detection> dets,
    const KalmanConfig& cfg);

}  // namespace mcmot
