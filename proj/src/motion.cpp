// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//

#include <mcmot/motion.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcmot {

namespace {

// Smallest legal box dimension; keeps the dims > 0 invariant when a noisy
// measurement would otherwise drag a dimension negative.
constexpr double kMinDim = 0.01;

StateMat transition(double dt) {
    StateMat f = StateMat::Identity();
    f(0, 7) = dt;
    f(1, 8) = dt;
    f(2, 9) = dt;
    return f;
}

Eigen::Matrix<double, kMeasDim, kStateDim> observation() {
    Eigen::Matrix<double, kMeasDim, kStateDim> h;
    h.setZero();
    h.topLeftCorner<kMeasDim, kMeasDim>().setIdentity();
    return h;
}

void symmetrize(StateMat& p) { p = ((p + p.transpose()) * 0.5).eval(); }

void enforce_state_invariants(KalmanState& state) {
    state.mean(3) = normalize_yaw(state.mean(3));
    for (int i = 4; i < 7; ++i) {
        state.mean(i) = std::max(state.mean(i), kMinDim);
    }
}

}  // namespace

void validate(const KalmanConfig& cfg) {
    if (!(cfg.process_noise.minCoeff() > 0.0) ||
        !(cfg.measurement_noise.minCoeff() > 0.0) ||
        !(cfg.initial_velocity_var > 0.0)) {
        throw std::invalid_argument("KalmanConfig: variances must be positive");
    }
}

Box3D KalmanState::box() const {
    Box3D b;
    b.center = mean.head<3>();
    b.yaw = normalize_yaw(mean(3));
    b.dims = mean.segment<3>(4);
    return b;
}

KalmanState kf_init(const Detection& det, const KalmanConfig& cfg) {
    validate(cfg);
    KalmanState state;
    state.mean.head<3>() = det.box.center;
    state.mean(3) = det.box.yaw;
    state.mean.segment<3>(4) = det.box.dims;
    state.mean.tail<3>() =
        det.velocity_hint ? *det.velocity_hint : Eigen::Vector3d::Zero();

    state.covariance.setZero();
    state.covariance.topLeftCorner<kMeasDim, kMeasDim>() =
        cfg.measurement_noise.asDiagonal();
    state.covariance.bottomRightCorner<3, 3>() =
        Eigen::Matrix3d::Identity() * cfg.initial_velocity_var;
    return state;
}

KalmanState kf_predict(const KalmanState& state, double dt,
                       const KalmanConfig& cfg) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("kf_predict: dt must be positive");
    }
    const StateMat f = transition(dt);
    KalmanState out;
    out.mean = f * state.mean;
    out.covariance = f * state.covariance * f.transpose();
    out.covariance += (dt * cfg.process_noise).asDiagonal().toDenseMatrix();
    symmetrize(out.covariance);
    return out;
}

MeasMat innovation_covariance(const KalmanState& state,
                              const KalmanConfig& cfg) {
    MeasMat s = state.covariance.topLeftCorner<kMeasDim, kMeasDim>();
    s += MeasMat(cfg.measurement_noise.asDiagonal());
    return s;
}

std::pair<KalmanState, MeasMat> kf_update(const KalmanState& state,
                                          const Detection& det,
                                          const KalmanConfig& cfg) {
    const auto h = observation();
    const MeasMat s = innovation_covariance(state, cfg);

    const Eigen::LLT<MeasMat> llt(s);
    if (llt.info() != Eigen::Success) {
        throw std::domain_error(
            "kf_update: innovation covariance not positive definite");
    }

    MeasVec innovation;
    innovation.head<3>() = det.box.center - state.mean.head<3>();
    innovation(3) = normalize_yaw(det.box.yaw - state.mean(3));
    innovation.tail<3>() = det.box.dims - state.mean.segment<3>(4);

    // Gain K = P H^T S^-1 via the Cholesky factor.
    const Eigen::Matrix<double, kStateDim, kMeasDim> pht =
        state.covariance * h.transpose();
    const Eigen::Matrix<double, kStateDim, kMeasDim> gain =
        llt.solve(pht.transpose()).transpose();

    KalmanState out;
    out.mean = state.mean + gain * innovation;

    // Joseph form keeps the posterior covariance PSD for any gain.
    const StateMat ikh = StateMat::Identity() - gain * h;
    const MeasMat r = cfg.measurement_noise.asDiagonal();
    out.covariance = ikh * state.covariance * ikh.transpose() +
                     gain * r * gain.transpose();
    symmetrize(out.covariance);
    enforce_state_invariants(out);
    return {out, s};
}

std::pair<KalmanState, MeasMat> update_with_multiple(
    const KalmanState& state, std::vector<Detection> dets,
    const KalmanConfig& cfg) {
    if (dets.empty()) {
        throw std::invalid_argument("update_with_multiple: no detections");
    }
    std::stable_sort(dets.begin(), dets.end(),
                     [](const Detection& a, const Detection& b) {
                         return a.score > b.score;
                     });
    KalmanState current = state;
    MeasMat last_s;
    for (const Detection& det : dets) {
        auto [next, s] = kf_update(current, det, cfg);
        current = next;
        last_s = s;
    }
    return {current, last_s};
}

}  // namespace mcmot
