// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>
#include <mcmot/motion.hpp>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace mcmot;

namespace {

Detection det_at(double x, double y, double z, double yaw = 0.0,
                 double score = 1.0) {
    Detection d;
    d.box.center = {x, y, z};
    d.box.dims = {4.0, 2.0, 1.5};
    d.box.yaw = yaw;
    d.score = score;
    return d;
}

// Scalar Kalman update oracle: prior (m, p), measurement z with variance r.
struct Scalar1D {
    double mean, var;
    void update(double z, double r) {
        const double k = var / (var + r);
        mean += k * (z - mean);
        var *= (1.0 - k);
    }
};

}  // namespace

TEST_CASE("kf_init seeds mean and covariance from the detection") {
    KalmanConfig cfg;
    Detection d = det_at(1.0, 2.0, 0.0);
    KalmanState s = kf_init(d, cfg);
    CHECK(s.mean(0) == 1.0);
    CHECK(s.mean(1) == 2.0);
    CHECK(s.velocity().norm() == 0.0);

    d.velocity_hint = Eigen::Vector3d(1.0, 0.0, 0.0);
    s = kf_init(d, cfg);
    CHECK(s.mean(7) == 1.0);

    for (int i = 0; i < kMeasDim; ++i) {
        CHECK(s.covariance(i, i) == cfg.measurement_noise(i));
    }
    for (int i = kMeasDim; i < kStateDim; ++i) {
        CHECK(s.covariance(i, i) == cfg.initial_velocity_var);
    }
}

TEST_CASE("kf_predict moves the position by velocity dt") {
    KalmanConfig cfg;
    Detection d = det_at(0.0, 0.0, 0.0);
    d.velocity_hint = Eigen::Vector3d(1.0, 0.0, 0.0);
    const KalmanState s = kf_init(d, cfg);

    const KalmanState moved = kf_predict(s, 0.5, cfg);
    CHECK(moved.mean(0) == doctest::Approx(0.5));
    CHECK(moved.mean(1) == doctest::Approx(0.0));
    CHECK(moved.mean(3) == s.mean(3));  // yaw is a random walk
    CHECK(moved.mean.segment<3>(4) == s.mean.segment<3>(4));

    Detection still = det_at(3.0, -1.0, 0.0);
    const KalmanState parked = kf_predict(kf_init(still, cfg), 2.0, cfg);
    CHECK(parked.mean(0) == doctest::Approx(3.0));
    CHECK(parked.mean(1) == doctest::Approx(-1.0));

    CHECK_THROWS_AS(kf_predict(s, 0.0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(kf_predict(s, -0.1, cfg), std::invalid_argument);
}

TEST_CASE("kf_predict covariance matches the dense oracle") {
    KalmanConfig cfg;
    cfg.process_noise.setConstant(0.1);

    KalmanState s = kf_init(det_at(0, 0, 0), cfg);
    s.covariance = StateMat::Identity();

    // Oracle: build F for dt=1 by hand and compute F F^T + 0.1 I densely.
    StateMat f = StateMat::Identity();
    f(0, 7) = f(1, 8) = f(2, 9) = 1.0;
    const StateMat expected = f * f.transpose() + 0.1 * StateMat::Identity();

    const KalmanState out = kf_predict(s, 1.0, cfg);
    CHECK((out.covariance - expected).cwiseAbs().maxCoeff() < 1e-12);

    // Trace strictly increases when Q is positive definite.
    CHECK(out.covariance.trace() > s.covariance.trace());
}

TEST_CASE("kf_update with zero innovation leaves the mean unchanged") {
    KalmanConfig cfg;
    const KalmanState s = kf_init(det_at(1.0, 2.0, 0.5, 0.3), cfg);
    const auto [post, innov_cov] = kf_update(s, det_at(1.0, 2.0, 0.5, 0.3), cfg);
    CHECK((post.mean - s.mean).cwiseAbs().maxCoeff() < 1e-12);

    // Returned S equals H P H^T + R for this state.
    const MeasMat expected = innovation_covariance(s, cfg);
    CHECK((innov_cov - expected).cwiseAbs().maxCoeff() == 0.0);

    // Information is gained whenever R is positive definite.
    CHECK(post.covariance.trace() < s.covariance.trace());
}

TEST_CASE("kf_update matches the scalar oracle on a decoupled state") {
    KalmanConfig cfg;
    cfg.measurement_noise.setConstant(1.0);

    KalmanState s = kf_init(det_at(0.0, 0.0, 0.0), cfg);
    s.covariance = StateMat::Identity();  // fully decoupled, unit prior

    Scalar1D oracle{0.0, 1.0};
    oracle.update(1.0, 1.0);
    CHECK(oracle.mean == doctest::Approx(0.5));
    CHECK(oracle.var == doctest::Approx(0.5));

    // Move only the x measurement; everything else has zero innovation.
    const auto [post, _] = kf_update(s, det_at(1.0, 0.0, 0.0), cfg);
    CHECK(post.mean(0) == doctest::Approx(oracle.mean).epsilon(1e-12));
    CHECK(post.covariance(0, 0) == doctest::Approx(oracle.var).epsilon(1e-12));
    CHECK(post.mean(1) == doctest::Approx(0.0));
}

TEST_CASE("kf_update wraps the yaw innovation") {
    KalmanConfig cfg;
    cfg.measurement_noise.setConstant(1.0);

    KalmanState s = kf_init(det_at(0, 0, 0, M_PI - 0.1), cfg);
    s.covariance = StateMat::Identity();

    // Measurement across the pi seam: the short way is +0.2, so the posterior
    // sits at the seam, not at yaw 0.
    const auto [post, _] = kf_update(s, det_at(0, 0, 0, -M_PI + 0.1), cfg);
    const double err = std::abs(normalize_yaw(post.mean(3) - M_PI));
    CHECK(err < 1e-9);
}

TEST_CASE("update_with_multiple equals sequential scalar updates") {
    KalmanConfig cfg;
    cfg.measurement_noise.setConstant(1.0);

    KalmanState s = kf_init(det_at(0.0, 0.0, 0.0), cfg);
    s.covariance = StateMat::Identity();

    SUBCASE("single detection matches kf_update") {
        const auto [a, sa] = update_with_multiple(s, {det_at(1, 0, 0)}, cfg);
        const auto [b, sb] = kf_update(s, det_at(1, 0, 0), cfg);
        CHECK((a.mean - b.mean).cwiseAbs().maxCoeff() == 0.0);
        CHECK((sa - sb).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("two identical detections act like one with halved noise") {
        Scalar1D two_steps{0.0, 1.0};
        two_steps.update(1.0, 1.0);
        two_steps.update(1.0, 1.0);

        Scalar1D halved{0.0, 1.0};
        halved.update(1.0, 0.5);
        CHECK(two_steps.mean == doctest::Approx(halved.mean).epsilon(1e-12));
        CHECK(two_steps.var == doctest::Approx(halved.var).epsilon(1e-12));

        const auto [post, _] =
            update_with_multiple(s, {det_at(1, 0, 0), det_at(1, 0, 0)}, cfg);
        CHECK(post.mean(0) == doctest::Approx(two_steps.mean).epsilon(1e-12));
        CHECK(post.covariance(0, 0) ==
              doctest::Approx(two_steps.var).epsilon(1e-12));
    }

    SUBCASE("update order does not change the linear-Gaussian posterior") {
        const Detection high = det_at(1.0, 0.0, 0.0, 0.0, 0.9);
        const Detection low = det_at(-1.0, 0.5, 0.0, 0.0, 0.2);
        const auto [ab, _s1] = update_with_multiple(s, {high, low}, cfg);

        // Force the reverse application order by swapping the scores.
        Detection high2 = high, low2 = low;
        high2.score = 0.2;
        low2.score = 0.9;
        const auto [ba, _s2] = update_with_multiple(s, {high2, low2}, cfg);
        CHECK((ab.mean - ba.mean).cwiseAbs().maxCoeff() < 1e-9);
    }

    CHECK_THROWS_AS(update_with_multiple(s, {}, cfg), std::invalid_argument);
}

TEST_CASE("noise-free constant-velocity track converges") {
    KalmanConfig cfg;
    cfg.measurement_noise.setConstant(1e-12);
    cfg.process_noise.setConstant(1e-9);

    const Eigen::Vector3d vel(2.0, -1.0, 0.0);
    KalmanState s = kf_init(det_at(0, 0, 0), cfg);
    const double dt = 0.1;

    double err = 1e9;
    for (int frame = 1; frame <= 20; ++frame) {
        s = kf_predict(s, dt, cfg);
        const Eigen::Vector3d truth = vel * (dt * frame);
        err = (s.mean.head<3>() - truth).norm();
        auto [post, _] = kf_update(s, det_at(truth.x(), truth.y(), truth.z()), cfg);
        s = post;
    }
    CHECK(err < 1e-6);
}

TEST_CASE("covariance stays symmetric PSD over 1000 random cycles") {
    KalmanConfig cfg;
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g(0.0, 1.0);

    KalmanState s = kf_init(det_at(0, 0, 0), cfg);
    for (int i = 0; i < 1000; ++i) {
        s = kf_predict(s, 0.1, cfg);
        Detection d = det_at(g(rng) * 5.0, g(rng) * 5.0, g(rng),
                             normalize_yaw(g(rng)));
        auto [post, _] = kf_update(s, d, cfg);
        s = post;

        CHECK((s.covariance - s.covariance.transpose()).cwiseAbs().maxCoeff() ==
              0.0);
        const Eigen::SelfAdjointEigenSolver<StateMat> eig(s.covariance);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-9);
    }
}

TEST_CASE("state box view wraps yaw") {
    KalmanConfig cfg;
    KalmanState s = kf_init(det_at(1, 2, 3, 0.5), cfg);
    s.mean(3) = M_PI + 0.25;  // drifted past the seam between updates
    const Box3D b = s.box();
    CHECK(b.yaw == doctest::Approx(-M_PI + 0.25));
    CHECK(b.center.x() == 1.0);
    CHECK(b.dims.x() == 4.0);
}
