// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic multi-camera scenario generation and persistence. Objects move
// with constant velocity in the world frame; a ring of pinhole cameras rides
// an ego vehicle translating along +x. Detections are ground-truth boxes
// perturbed by Gaussian noise, dropped at miss_rate, and topped up with
// Poisson clutter per camera. Everything is a deterministic function of
// (config, seed).

#pragma once

#include <mcmot/model.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace mcmot {

struct ScenarioConfig {
    std::uint64_t seed = 42;
    int num_cameras = 6;

    // Rig geometry. Empty vectors mean "evenly spaced ring, uniform FOV".
    std::vector<double> fov_deg;         // per camera; default 70 each
    std::vector<double> yaw_offset_deg;  // per camera; default k * 360 / K
    double max_range = 80.0;             // meters

    int num_objects = 20;
    int num_frames = 200;
    double dt = 0.5;  // seconds between frames

    // Object speed range, m/s, measured relative to the ego so traffic
    // stays inside sensing range over long runs. World-frame velocity is
    // the ego velocity plus the drawn relative velocity, both constant.
    double object_speed_min = 2.0;
    double object_speed_max = 8.0;

    // Detection noise, one sigma: position (m, per axis), dims (m, per
    // axis), yaw (rad).
    double noise_pos = 0.3;
    double noise_dims = 0.05;
    double noise_yaw = 0.05;

    double miss_rate = 0.1;     // in [0, 1)
    double clutter_rate = 0.5;  // expected false detections per camera per frame
    double ego_speed = 5.0;     // m/s along +x
};

/// Throws std::invalid_argument on out-of-range fields (K < 1, rates out of
/// range, nonpositive frame counts, fov/yaw vectors of the wrong length).
void validate(const ScenarioConfig& config);

/// Ground-truth state of one object at one frame.
struct GtObjectState {
    std::int64_t gt_id = 0;
    int class_id = 1;
    Box3D box;
    Eigen::Vector3d velocity{0.0, 0.0, 0.0};  // m/s, world frame
};

struct GtFrame {
    int frame_index = 0;
    double timestamp = 0.0;
    std::vector<GtObjectState> objects;
};

struct Scenario {
    ScenarioConfig config;
    std::vector<GtFrame> gt_frames;   // one per frame, all objects
    std::vector<FrameBundle> frames;  // noisy detections, canonical order
};

/// True iff the world point is strictly in front of the camera, projects
/// strictly inside the image bounds, and lies at camera-frame distance
/// strictly below max_range. All boundary cases are excluded (strict
/// inequalities).
bool frustum_contains(const CameraModel& cam, const Eigen::Vector3d& world_point);

/// The camera rig at a given ego x-position (cameras share one origin on
/// the ego, differing by yaw).
std::vector<CameraModel> build_rig(const ScenarioConfig& config, double ego_x);

/// Deterministic in config.seed; see the .cpp for the documented draw order.
Scenario generate(const ScenarioConfig& config);

/// Writes `<path_prefix>.frames.jsonl` and `<path_prefix>.gt.jsonl`. Line 1
/// of each file is a header {schema_version, kind, config}; each further
/// line is one frame. Throws std::runtime_error on I/O failure.
void save(const Scenario& scenario, const std::string& path_prefix);

/// Reads the two files written by save(). Schema violations raise
/// std::runtime_error naming the file and 1-based line number.
Scenario load(const std::string& path_prefix);

}  // namespace mcmot
