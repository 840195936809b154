// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//
// Core value types shared by every module: world-frame boxes, per-camera
// detections, camera models and per-frame detection bundles. No algorithms
// here beyond validation and canonical ordering.
//
// Conventions: world frame is right-handed, z-up; yaw is measured
// counterclockwise from +x about the world up-axis and stored in [-pi, pi).
// class_id 0 is reserved for background and never appears on a detection.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace mcmot {

/// Wraps an angle into [-pi, pi). Throws std::invalid_argument on
/// non-finite input.
double normalize_yaw(double angle);

/// Oriented 3D bounding box in world coordinates.
struct Box3D {
    Eigen::Vector3d center{0.0, 0.0, 0.0};   // meters, world frame
    Eigen::Vector3d dims{1.0, 1.0, 1.0};     // length, width, height; > 0
    double yaw = 0.0;                        // radians in [-pi, pi)

    double volume() const { return dims.x() * dims.y() * dims.z(); }
};

bool operator==(const Box3D& a, const Box3D& b);

/// Throws std::invalid_argument when dims are not strictly positive, yaw is
/// outside [-pi, pi) or any field is non-finite.
void validate(const Box3D& box);

/// One detector output from one camera, already lifted to world coordinates.
struct Detection {
    Box3D box;
    int class_id = 1;       // >= 1; 0 is reserved for background
    double score = 1.0;     // in [0, 1]
    int camera_id = 0;      // index into the rig, [0, K)
    int frame_index = 0;
    std::optional<Eigen::Vector3d> velocity_hint;  // m/s, world frame

    // Ground-truth provenance for evaluation only; the tracker never reads it.
    std::optional<std::int64_t> gt_id;
};

bool operator==(const Detection& a, const Detection& b);

/// `rig_size` < 0 skips the camera_id bound check (detections validated
/// outside a bundle).
void validate(const Detection& det, int rig_size = -1);

/// Pinhole camera with a rigid world->camera transform.
struct CameraModel {
    int camera_id = 0;
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();  // world->camera
    Eigen::Vector3d translation{0.0, 0.0, 0.0};
    double fx = 1.0, fy = 1.0;   // focal lengths, pixels
    double cx = 0.0, cy = 0.0;   // principal point, pixels
    int width = 1, height = 1;   // image size, pixels
    double max_range = 100.0;    // meters

    Eigen::Vector3d to_camera(const Eigen::Vector3d& world_point) const {
        return rotation * world_point + translation;
    }
};

bool operator==(const CameraModel& a, const CameraModel& b);

/// Checks the rotation is orthonormal with determinant +1 to 1e-9.
void validate(const CameraModel& cam);

/// Every detection from all K cameras at one timestep, plus the rig.
struct FrameBundle {
    int frame_index = 0;
    double timestamp = 0.0;  // seconds
    std::vector<Detection> detections;
    std::vector<CameraModel> rig;

    /// Sorts detections by (camera_id, descending score) with a stable total
    /// order so serialization and association are deterministic. Idempotent.
    void canonicalize();
};

bool operator==(const FrameBundle& a, const FrameBundle& b);

void validate(const FrameBundle& frame);

}  // namespace mcmot
