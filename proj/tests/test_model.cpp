// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>
#include <mcmot/model.hpp>

#include <cmath>
#include <stdexcept>

using namespace mcmot;

namespace {

// Reference wrap: shift by 2*pi until inside [-pi, pi). Slow but obviously
// correct for moderate angles; used to cross-check the fmod implementation.
double wrap_by_shifting(double a) {
    while (a < -M_PI) a += 2.0 * M_PI;
    while (a >= M_PI) a -= 2.0 * M_PI;
    return a;
}

Detection make_det(double x, double y, int camera_id, double score) {
    Detection d;
    d.box.center = {x, y, 0.0};
    d.box.dims = {4.0, 2.0, 1.5};
    d.camera_id = camera_id;
    d.score = score;
    return d;
}

}  // namespace

TEST_CASE("normalize_yaw maps known angles") {
    CHECK(normalize_yaw(0.0) == 0.0);
    CHECK(normalize_yaw(3.0 * M_PI / 2.0) == doctest::Approx(-M_PI / 2.0).epsilon(1e-12));
    CHECK(normalize_yaw(-M_PI) == doctest::Approx(-M_PI));
    // +pi is excluded from the range, it wraps to -pi.
    CHECK(normalize_yaw(M_PI) == doctest::Approx(-M_PI));
    CHECK(normalize_yaw(-M_PI - 1e-9) == doctest::Approx(M_PI).epsilon(1e-8));
}

TEST_CASE("normalize_yaw agrees with repeated shifting") {
    for (int i = -100; i <= 100; ++i) {
        const double a = 0.37 * static_cast<double>(i);
        const double got = normalize_yaw(a);
        CHECK(got == doctest::Approx(wrap_by_shifting(a)).epsilon(1e-12));
        CHECK(got >= -M_PI);
        CHECK(got < M_PI);
    }
}

TEST_CASE("normalize_yaw is idempotent") {
    for (int i = -50; i <= 50; ++i) {
        const double a = normalize_yaw(0.71 * static_cast<double>(i));
        CHECK(normalize_yaw(a) == a);
    }
}

TEST_CASE("normalize_yaw rejects non-finite input") {
    CHECK_THROWS_AS(normalize_yaw(std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(normalize_yaw(INFINITY), std::invalid_argument);
}

TEST_CASE("Box3D validation") {
    Box3D box;
    box.dims = {4.0, 2.0, 1.5};
    CHECK_NOTHROW(validate(box));
    CHECK(box.volume() == doctest::Approx(12.0));

    Box3D flat = box;
    flat.dims.z() = 0.0;
    CHECK_THROWS_AS(validate(flat), std::invalid_argument);

    Box3D spun = box;
    spun.yaw = M_PI;  // out of the half-open range
    CHECK_THROWS_AS(validate(spun), std::invalid_argument);

    Box3D broken = box;
    broken.center.x() = std::nan("");
    CHECK_THROWS_AS(validate(broken), std::invalid_argument);
}

TEST_CASE("Detection validation") {
    Detection d = make_det(1.0, 2.0, 0, 0.9);
    CHECK_NOTHROW(validate(d));

    Detection bad_score = d;
    bad_score.score = 1.5;
    CHECK_THROWS_AS(validate(bad_score), std::invalid_argument);

    Detection background = d;
    background.class_id = 0;  // reserved for "no object"
    CHECK_THROWS_AS(validate(background), std::invalid_argument);

    Detection off_rig = d;
    off_rig.camera_id = 6;
    CHECK_NOTHROW(validate(off_rig));          // unknown rig size: only >= 0 enforced
    CHECK_THROWS_AS(validate(off_rig, 6), std::invalid_argument);
}

TEST_CASE("CameraModel validation checks the rotation") {
    CameraModel cam;
    cam.camera_id = 0;
    cam.rotation = Eigen::Matrix3d::Identity();
    cam.translation = {0.0, 0.0, -1.6};
    cam.fx = cam.fy = 800.0;
    cam.cx = 800.0;
    cam.cy = 450.0;
    cam.width = 1600;
    cam.height = 900;
    cam.max_range = 80.0;
    CHECK_NOTHROW(validate(cam));

    CameraModel sheared = cam;
    sheared.rotation(0, 1) = 0.01;
    CHECK_THROWS_AS(validate(sheared), std::invalid_argument);

    CameraModel mirrored = cam;
    mirrored.rotation(0, 0) = -1.0;  // det = -1
    CHECK_THROWS_AS(validate(mirrored), std::invalid_argument);
}

TEST_CASE("CameraModel world-to-camera transform") {
    CameraModel cam;
    cam.camera_id = 0;
    // Camera looking down +x from the origin: z_cam = +x_w, x_cam = -y_w(?)
    // Use the plain pose form x_c = R x_w + t and verify with a hand example.
    cam.rotation << 0, -1, 0,
                    0, 0, -1,
                    1, 0, 0;
    cam.translation = Eigen::Vector3d::Zero();
    cam.fx = cam.fy = 800.0;
    cam.cx = 800.0;
    cam.cy = 450.0;
    cam.width = 1600;
    cam.height = 900;
    cam.max_range = 80.0;
    CHECK_NOTHROW(validate(cam));

    const Eigen::Vector3d ahead = cam.to_camera({10.0, 0.0, 0.0});
    CHECK(ahead.x() == doctest::Approx(0.0));
    CHECK(ahead.y() == doctest::Approx(0.0));
    CHECK(ahead.z() == doctest::Approx(10.0));

    const Eigen::Vector3d left = cam.to_camera({10.0, 2.0, 0.0});
    CHECK(left.x() == doctest::Approx(-2.0));  // world left maps to image left
    CHECK(left.z() == doctest::Approx(10.0));

    const Eigen::Vector3d up = cam.to_camera({10.0, 0.0, 1.0});
    CHECK(up.y() == doctest::Approx(-1.0));  // world up maps to image up (y down)
}

TEST_CASE("FrameBundle canonicalize orders by camera then score") {
    FrameBundle frame;
    frame.frame_index = 3;
    frame.timestamp = 0.3;
    frame.detections = {
        make_det(0.0, 0.0, 2, 0.5),
        make_det(1.0, 0.0, 0, 0.4),
        make_det(2.0, 0.0, 0, 0.9),
        make_det(3.0, 0.0, 1, 0.7),
    };
    frame.canonicalize();

    CHECK(frame.detections[0].camera_id == 0);
    CHECK(frame.detections[0].score == 0.9);
    CHECK(frame.detections[1].camera_id == 0);
    CHECK(frame.detections[1].score == 0.4);
    CHECK(frame.detections[2].camera_id == 1);
    CHECK(frame.detections[3].camera_id == 2);

    // Idempotent: a second pass is a no-op.
    FrameBundle again = frame;
    again.canonicalize();
    CHECK(again == frame);
}

TEST_CASE("FrameBundle canonical order ignores input permutation") {
    FrameBundle a;
    a.frame_index = 0;
    a.timestamp = 0.0;
    a.detections = {
        make_det(0.0, 0.0, 1, 0.5),
        make_det(5.0, 1.0, 0, 0.5),
        make_det(2.0, -1.0, 1, 0.8),
    };
    FrameBundle b = a;
    std::reverse(b.detections.begin(), b.detections.end());

    a.canonicalize();
    b.canonicalize();
    CHECK(a == b);
}
