// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//

#include <mcmot/model.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

namespace mcmot {

double normalize_yaw(double angle) {
    if (!std::isfinite(angle)) {
        throw std::invalid_argument("normalize_yaw: non-finite angle");
    }
    constexpr double two_pi = 2.0 * M_PI;
    double wrapped = std::fmod(angle + M_PI, two_pi);
    if (wrapped < 0.0) wrapped += two_pi;
    wrapped -= M_PI;
    // fmod can land exactly on +pi for inputs just below an odd multiple.
    if (wrapped >= M_PI) wrapped -= two_pi;
    return wrapped;
}

bool operator==(const Box3D& a, const Box3D& b) {
    return a.center == b.center && a.dims == b.dims && a.yaw == b.yaw;
}

void validate(const Box3D& box) {
    if (!box.center.allFinite() || !box.dims.allFinite() || !std::isfinite(box.yaw)) {
        throw std::invalid_argument("Box3D: non-finite field");
    }
    if (!(box.dims.minCoeff() > 0.0)) {
        throw std::invalid_argument("Box3D: dims must be strictly positive");
    }
    if (box.yaw < -M_PI || box.yaw >= M_PI) {
        throw std::invalid_argument("Box3D: yaw outside [-pi, pi)");
    }
}

bool operator==(const Detection& a, const Detection& b) {
    if (a.velocity_hint.has_value() != b.velocity_hint.has_value()) return false;
    if (a.velocity_hint && *a.velocity_hint != *b.velocity_hint) return false;
    return a.box == b.box && a.class_id == b.class_id && a.score == b.score &&
           a.camera_id == b.camera_id && a.frame_index == b.frame_index &&
           a.gt_id == b.gt_id;
}

void validate(const Detection& det, int rig_size) {
    validate(det.box);
    if (det.class_id < 1) {
        throw std::invalid_argument("Detection: class_id must be >= 1");
    }
    if (!(det.score >= 0.0 && det.score <= 1.0)) {
        throw std::invalid_argument("Detection: score outside [0, 1]");
    }
    if (det.camera_id < 0 || (rig_size >= 0 && det.camera_id >= rig_size)) {
        throw std::invalid_argument("Detection: camera_id out of rig range");
    }
    if (det.frame_index < 0) {
        throw std::invalid_argument("Detection: negative frame_index");
    }
    if (det.velocity_hint && !det.velocity_hint->allFinite()) {
        throw std::invalid_argument("Detection: non-finite velocity_hint");
    }
}

bool operator==(const CameraModel& a, const CameraModel& b) {
    return a.camera_id == b.camera_id && a.rotation == b.rotation &&
           a.translation == b.translation && a.fx == b.fx && a.fy == b.fy &&
           a.cx == b.cx && a.cy == b.cy && a.width == b.width &&
           a.height == b.height && a.max_range == b.max_range;
}

void validate(const CameraModel& cam) {
    if (!cam.rotation.allFinite() || !cam.translation.allFinite()) {
        throw std::invalid_argument("CameraModel: non-finite pose");
    }
    const Eigen::Matrix3d gram = cam.rotation.transpose() * cam.rotation;
    if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9) {
        throw std::invalid_argument("CameraModel: rotation not orthonormal");
    }
    if (std::abs(cam.rotation.determinant() - 1.0) > 1e-9) {
        throw std::invalid_argument("CameraModel: rotation determinant != +1");
    }
    if (cam.width < 1 || cam.height < 1 || !(cam.fx > 0.0) || !(cam.fy > 0.0)) {
        throw std::invalid_argument("CameraModel: bad intrinsics");
    }
    if (!(cam.max_range > 0.0)) {
        throw std::invalid_argument("CameraModel: max_range must be positive");
    }
}

namespace {

// Total order on detection content so canonicalize() is a pure function of
// the multiset of detections.
auto detection_key(const Detection& d) {
    return std::make_tuple(d.camera_id, -d.score, d.class_id, d.box.center.x(),
                           d.box.center.y(), d.box.center.z(), d.box.yaw,
                           d.box.dims.x(), d.box.dims.y(), d.box.dims.z());
}

}  // namespace

void FrameBundle::canonicalize() {
    std::stable_sort(detections.begin(), detections.end(),
                     [](const Detection& a, const Detection& b) {
                         return detection_key(a) < detection_key(b);
                     });
}

bool operator==(const FrameBundle& a, const FrameBundle& b) {
    return a.frame_index == b.frame_index && a.timestamp == b.timestamp &&
           a.detections == b.detections && a.rig == b.rig;
}

void validate(const FrameBundle& frame) {
    if (frame.frame_index < 0 || !std::isfinite(frame.timestamp)) {
        throw std::invalid_argument("FrameBundle: bad frame_index/timestamp");
    }
    for (const CameraModel& cam : frame.rig) validate(cam);
    for (const Detection& det : frame.detections) {
        validate(det, static_cast<int>(frame.rig.size()));
    }
}

}  // namespace mcmot
