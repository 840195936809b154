// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//
// Scenario synthesis. A single SplitMix64 stream drives every draw, in the
// fixed order documented above generate(); any change to that order is a
// format break for seeded scenarios and must bump the header schema_version.

#include <mcmot/rng.hpp>
#include <mcmot/scenario.hpp>
#include <mcmot/serialization.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mcmot {

namespace {

constexpr double kCameraHeight = 1.6;  // meters above ground
constexpr int kImageWidth = 1600;
constexpr int kImageHeight = 900;
constexpr double kSpawnRadiusMin = 10.0;
constexpr double kSpawnRadiusMax = 50.0;
constexpr double kDefaultFovDeg = 70.0;

double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("scenario config: " + what);
}

// Per-class box dimension ranges (length, width, height), car-ish / truck-ish
// / pedestrian-ish. Class ids 1..3.
struct DimRange {
    double lo[3];
    double hi[3];
};
constexpr DimRange kDimRanges[3] = {
    {{4.2, 1.7, 1.4}, {4.8, 2.0, 1.7}},
    {{6.0, 2.2, 2.5}, {8.0, 2.6, 3.2}},
    {{0.5, 0.5, 1.6}, {0.8, 0.8, 1.9}},
};

struct ObjectInit {
    Eigen::Vector3d pos0;      // world position at t = 0
    Eigen::Vector3d velocity;  // world frame, constant
    Eigen::Vector3d dims;
    double yaw = 0.0;
    int class_id = 1;
};

Eigen::Vector3d draw_dims(SplitMix64& rng, int class_id) {
    const DimRange& r = kDimRanges[class_id - 1];
    return {rng.uniform(r.lo[0], r.hi[0]), rng.uniform(r.lo[1], r.hi[1]),
            rng.uniform(r.lo[2], r.hi[2])};
}

int draw_class(SplitMix64& rng) {
    const int c = 1 + static_cast<int>(rng.uniform() * 3.0);
    return c > 3 ? 3 : c;
}

}  // namespace

void validate(const ScenarioConfig& config) {
    require(config.num_cameras >= 1, "num_cameras must be >= 1");
    require(config.fov_deg.empty() ||
                static_cast<int>(config.fov_deg.size()) == config.num_cameras,
            "fov_deg must be empty or have num_cameras entries");
    for (double fov : config.fov_deg) {
        require(std::isfinite(fov) && fov > 0.0 && fov < 180.0,
                "fov_deg entries must lie in (0, 180)");
    }
    require(config.yaw_offset_deg.empty() ||
                static_cast<int>(config.yaw_offset_deg.size()) ==
                    config.num_cameras,
            "yaw_offset_deg must be empty or have num_cameras entries");
    for (double yaw : config.yaw_offset_deg) {
        require(std::isfinite(yaw), "yaw_offset_deg entries must be finite");
    }
    require(std::isfinite(config.max_range) && config.max_range > 0.0,
            "max_range must be positive");
    require(config.num_objects >= 0, "num_objects must be >= 0");
    require(config.num_frames >= 1, "num_frames must be >= 1");
    require(std::isfinite(config.dt) && config.dt > 0.0, "dt must be positive");
    require(std::isfinite(config.object_speed_min) &&
                std::isfinite(config.object_speed_max) &&
                config.object_speed_min >= 0.0 &&
                config.object_speed_min <= config.object_speed_max,
            "object speeds must satisfy 0 <= object_speed_min <= "
            "object_speed_max");
    require(std::isfinite(config.noise_pos) && config.noise_pos >= 0.0,
            "noise_pos must be >= 0");
    require(std::isfinite(config.noise_dims) && config.noise_dims >= 0.0,
            "noise_dims must be >= 0");
    require(std::isfinite(config.noise_yaw) && config.noise_yaw >= 0.0,
            "noise_yaw must be >= 0");
    require(std::isfinite(config.miss_rate) && config.miss_rate >= 0.0 &&
                config.miss_rate < 1.0,
            "miss_rate must lie in [0, 1)");
    require(std::isfinite(config.clutter_rate) && config.clutter_rate >= 0.0 &&
                config.clutter_rate <= 100.0,
            "clutter_rate must lie in [0, 100]");
    require(std::isfinite(config.ego_speed), "ego_speed must be finite");
}

bool frustum_contains(const CameraModel& cam,
                      const Eigen::Vector3d& world_point) {
    const Eigen::Vector3d pc = cam.to_camera(world_point);
    if (!(pc.z() > 0.0)) return false;
    if (!(pc.norm() < cam.max_range)) return false;
    const double u = cam.fx * pc.x() / pc.z() + cam.cx;
    const double v = cam.fy * pc.y() / pc.z() + cam.cy;
    return u > 0.0 && u < static_cast<double>(cam.width) && v > 0.0 &&
           v < static_cast<double>(cam.height);
}

std::vector<CameraModel> build_rig(const ScenarioConfig& config, double ego_x) {
    const Eigen::Vector3d position(ego_x, 0.0, kCameraHeight);
    std::vector<CameraModel> rig;
    rig.reserve(static_cast<std::size_t>(config.num_cameras));
    for (int k = 0; k < config.num_cameras; ++k) {
        const double yaw =
            config.yaw_offset_deg.empty()
                ? deg2rad(360.0 * k / config.num_cameras)
                : deg2rad(config.yaw_offset_deg[static_cast<std::size_t>(k)]);
        const double fov =
            deg2rad(config.fov_deg.empty()
                        ? kDefaultFovDeg
                        : config.fov_deg[static_cast<std::size_t>(k)]);
        CameraModel cam;
        cam.camera_id = k;
        // Camera axes in world coordinates: x_cam = image right, y_cam =
        // image down, z_cam = optical axis. The optical axis points along
        // the camera yaw in the ground plane.
        cam.rotation.row(0) = Eigen::RowVector3d(std::sin(yaw), -std::cos(yaw), 0.0);
        cam.rotation.row(1) = Eigen::RowVector3d(0.0, 0.0, -1.0);
        cam.rotation.row(2) = Eigen::RowVector3d(std::cos(yaw), std::sin(yaw), 0.0);
        cam.translation = -cam.rotation * position;
        cam.width = kImageWidth;
        cam.height = kImageHeight;
        cam.fx = (kImageWidth / 2.0) / std::tan(fov / 2.0);
        cam.fy = cam.fx;
        cam.cx = kImageWidth / 2.0;
        cam.cy = kImageHeight / 2.0;
        cam.max_range = config.max_range;
        rig.push_back(cam);
    }
    return rig;
}

// Draw order, fixed for reproducibility:
//   1. Per object (index order): spawn bearing, spawn radius, velocity
//      heading, velocity speed, class, then length/width/height.
//   2. Per frame, per camera (rig order), per object (index order), when the
//      true center is inside the frustum: one miss uniform; if the object
//      survives, 3 position gaussians, 3 dims gaussians, 1 yaw gaussian,
//      3 velocity-hint gaussians, 1 score uniform.
//   3. Per frame, per camera after its objects: one Poisson count, then per
//      clutter box: bearing, range, height, class, length/width/height, yaw,
//      score.
//
// Object velocities are drawn relative to the ego and the ego velocity is
// added, so traffic stays in sensing range over long runs; this keeps the
// world-frame velocity constant too (the ego moves uniformly).
Scenario generate(const ScenarioConfig& config) {
    validate(config);
    SplitMix64 rng(config.seed);

    std::vector<ObjectInit> objects;
    objects.reserve(static_cast<std::size_t>(config.num_objects));
    const Eigen::Vector3d ego_velocity(config.ego_speed, 0.0, 0.0);
    for (int i = 0; i < config.num_objects; ++i) {
        const double bearing = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double radius = rng.uniform(kSpawnRadiusMin, kSpawnRadiusMax);
        const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double speed =
            config.object_speed_min == config.object_speed_max
                ? config.object_speed_min
                : rng.uniform(config.object_speed_min, config.object_speed_max);
        ObjectInit obj;
        obj.class_id = draw_class(rng);
        obj.dims = draw_dims(rng, obj.class_id);
        obj.velocity = ego_velocity + Eigen::Vector3d(speed * std::cos(heading),
                                                      speed * std::sin(heading),
                                                      0.0);
        obj.pos0 = Eigen::Vector3d(radius * std::cos(bearing),
                                   radius * std::sin(bearing),
                                   obj.dims.z() / 2.0);
        obj.yaw = (obj.velocity.head<2>().norm() > 0.0)
                      ? normalize_yaw(std::atan2(obj.velocity.y(), obj.velocity.x()))
                      : 0.0;
        objects.push_back(obj);
    }

    Scenario scenario;
    scenario.config = config;
    scenario.gt_frames.reserve(static_cast<std::size_t>(config.num_frames));
    scenario.frames.reserve(static_cast<std::size_t>(config.num_frames));

    for (int t = 0; t < config.num_frames; ++t) {
        const double time = t * config.dt;
        const double ego_x = config.ego_speed * time;
        const std::vector<CameraModel> rig = build_rig(config, ego_x);

        std::vector<Eigen::Vector3d> centers(objects.size());
        std::vector<bool> observable(objects.size(), false);
        for (std::size_t i = 0; i < objects.size(); ++i) {
            centers[i] = objects[i].pos0 + objects[i].velocity * time;
            for (const CameraModel& cam : rig) {
                if (frustum_contains(cam, centers[i])) {
                    observable[i] = true;
                    break;
                }
            }
        }

        // Ground truth lists only objects observable from >= 1 camera, so
        // evaluation never penalizes the tracker for objects no sensor
        // could see.
        GtFrame gt;
        gt.frame_index = t;
        gt.timestamp = time;
        for (std::size_t i = 0; i < objects.size(); ++i) {
            if (!observable[i]) continue;
            GtObjectState state;
            state.gt_id = static_cast<std::int64_t>(i);
            state.class_id = objects[i].class_id;
            state.box = Box3D{centers[i], objects[i].dims, objects[i].yaw};
            state.velocity = objects[i].velocity;
            gt.objects.push_back(state);
        }

        FrameBundle frame;
        frame.frame_index = t;
        frame.timestamp = time;
        frame.rig = rig;
        for (const CameraModel& cam : rig) {
            for (std::size_t i = 0; i < objects.size(); ++i) {
                if (!frustum_contains(cam, centers[i])) continue;
                if (rng.uniform() < config.miss_rate) continue;
                Detection det;
                det.box.center =
                    centers[i] + config.noise_pos *
                                     Eigen::Vector3d(rng.gaussian(),
                                                     rng.gaussian(),
                                                     rng.gaussian());
                det.box.dims =
                    (objects[i].dims +
                     config.noise_dims * Eigen::Vector3d(rng.gaussian(),
                                                         rng.gaussian(),
                                                         rng.gaussian()))
                        .cwiseMax(0.1);
                det.box.yaw =
                    normalize_yaw(objects[i].yaw +
                                  config.noise_yaw * rng.gaussian());
                det.velocity_hint =
                    objects[i].velocity +
                    config.noise_pos * Eigen::Vector3d(rng.gaussian(),
                                                       rng.gaussian(),
                                                       rng.gaussian());
                det.score = rng.uniform(0.5, 1.0);
                det.class_id = objects[i].class_id;
                det.camera_id = cam.camera_id;
                det.frame_index = t;
                det.gt_id = static_cast<std::int64_t>(i);
                // Noise can push the reported center outside the frustum;
                // drop such draws so no detection ever originates outside
                // its camera. The stream position is unaffected (all draws
                // above already happened).
                if (!frustum_contains(cam, det.box.center)) continue;
                frame.detections.push_back(std::move(det));
            }
        }
        for (const CameraModel& cam : rig) {
            const double cam_yaw =
                config.yaw_offset_deg.empty()
                    ? deg2rad(360.0 * cam.camera_id / config.num_cameras)
                    : deg2rad(config.yaw_offset_deg[static_cast<std::size_t>(
                          cam.camera_id)]);
            const double fov =
                deg2rad(config.fov_deg.empty()
                            ? kDefaultFovDeg
                            : config.fov_deg[static_cast<std::size_t>(
                                  cam.camera_id)]);
            const int count = rng.poisson(config.clutter_rate);
            for (int c = 0; c < count; ++c) {
                // Keep clutter comfortably interior to the frustum (90% of
                // the half-FOV and of max range) so the draws below almost
                // never have to be discarded.
                const double bearing =
                    cam_yaw + rng.uniform(-0.45 * fov, 0.45 * fov);
                const double range =
                    rng.uniform(5.0, 0.9 * config.max_range);
                const double z = rng.uniform(0.3, 1.5);
                Detection det;
                det.box.center = Eigen::Vector3d(
                    ego_x + range * std::cos(bearing),
                    range * std::sin(bearing), z);
                det.class_id = draw_class(rng);
                det.box.dims = draw_dims(rng, det.class_id);
                det.box.yaw =
                    rng.uniform(-std::numbers::pi, std::numbers::pi);
                det.score = rng.uniform(0.05, 0.6);
                det.camera_id = cam.camera_id;
                det.frame_index = t;
                if (!frustum_contains(cam, det.box.center)) continue;
                frame.detections.push_back(std::move(det));
            }
        }
        frame.canonicalize();

        scenario.gt_frames.push_back(std::move(gt));
        scenario.frames.push_back(std::move(frame));
    }
    return scenario;
}

namespace {

[[noreturn]] void line_error(const std::string& path, std::size_t line_no,
                             const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

void save(const Scenario& scenario, const std::string& path_prefix) {
    std::vector<Json> frame_lines;
    frame_lines.reserve(scenario.frames.size());
    for (const FrameBundle& frame : scenario.frames) {
        frame_lines.push_back(to_json(frame));
    }
    write_jsonl(path_prefix + ".frames.jsonl", "frames",
                to_json(scenario.config), frame_lines);

    std::vector<Json> gt_lines;
    gt_lines.reserve(scenario.gt_frames.size());
    for (const GtFrame& frame : scenario.gt_frames) {
        gt_lines.push_back(to_json(frame));
    }
    write_jsonl(path_prefix + ".gt.jsonl", "gt", to_json(scenario.config),
                gt_lines);
}

Scenario load(const std::string& path_prefix) {
    const std::string frames_path = path_prefix + ".frames.jsonl";
    const std::string gt_path = path_prefix + ".gt.jsonl";

    Json frames_config;
    const std::vector<Json> frame_lines =
        read_jsonl(frames_path, "frames", &frames_config);
    Json gt_config;
    const std::vector<Json> gt_lines = read_jsonl(gt_path, "gt", &gt_config);

    if (frames_config.dump() != gt_config.dump()) {
        line_error(gt_path, 1, "config differs from " + frames_path);
    }

    Scenario scenario;
    try {
        scenario.config = scenario_config_from_json(frames_config);
    } catch (const std::exception& e) {
        line_error(frames_path, 1, e.what());
    }

    if (static_cast<int>(frame_lines.size()) != scenario.config.num_frames) {
        line_error(frames_path, frame_lines.size() + 1,
                   "expected " + std::to_string(scenario.config.num_frames) +
                       " frame lines, found " +
                       std::to_string(frame_lines.size()));
    }
    if (gt_lines.size() != frame_lines.size()) {
        line_error(gt_path, gt_lines.size() + 1,
                   "expected " + std::to_string(frame_lines.size()) +
                       " gt lines, found " + std::to_string(gt_lines.size()));
    }

    for (std::size_t i = 0; i < frame_lines.size(); ++i) {
        try {
            scenario.frames.push_back(frame_bundle_from_json(frame_lines[i]));
        } catch (const std::exception& e) {
            line_error(frames_path, i + 2, e.what());
        }
        if (scenario.frames.back().frame_index != static_cast<int>(i)) {
            line_error(frames_path, i + 2, "frame_index out of order");
        }
    }
    for (std::size_t i = 0; i < gt_lines.size(); ++i) {
        try {
            scenario.gt_frames.push_back(gt_frame_from_json(gt_lines[i]));
        } catch (const std::exception& e) {
            line_error(gt_path, i + 2, e.what());
        }
        if (scenario.gt_frames.back().frame_index != static_cast<int>(i)) {
            line_error(gt_path, i + 2, "frame_index out of order");
        }
    }
    return scenario;
}

}  // namespace mcmot
