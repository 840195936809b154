// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//

#include <mcmot/geometry.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcmot {

namespace {

double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a,
              const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

}  // namespace

double ConvexPolygon::area() const {
    if (vertices.size() < 3) return 0.0;
    double twice = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const Eigen::Vector2d& p = vertices[i];
        const Eigen::Vector2d& q = vertices[(i + 1) % vertices.size()];
        twice += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * twice;
}

ConvexPolygon bev_footprint(const Box3D& box) {
    const double hl = 0.5 * box.dims.x();
    const double hw = 0.5 * box.dims.y();
    const double c = std::cos(box.yaw);
    const double s = std::sin(box.yaw);
    const Eigen::Vector2d center(box.center.x(), box.center.y());

    // Box-frame corners, front-left first, counterclockwise.
    const Eigen::Vector2d local[4] = {
        {hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}};

    ConvexPolygon poly;
    poly.vertices.reserve(4);
    for (const Eigen::Vector2d& v : local) {
        poly.vertices.push_back(
            center + Eigen::Vector2d(c * v.x() - s * v.y(), s * v.x() + c * v.y()));
    }
    return poly;
}

double polygon_intersection_area(const ConvexPolygon& a, const ConvexPolygon& b) {
    if (a.vertices.size() < 3 || b.vertices.size() < 3) return 0.0;

    // Clip a against each directed edge of b (both CCW, so "inside" is the
    // left half-plane).
    std::vector<Eigen::Vector2d> poly = a.vertices;
    for (std::size_t i = 0; i < b.vertices.size() && !poly.empty(); ++i) {
        const Eigen::Vector2d& e0 = b.vertices[i];
        const Eigen::Vector2d& e1 = b.vertices[(i + 1) % b.vertices.size()];

        std::vector<Eigen::Vector2d> clipped;
        clipped.reserve(poly.size() + 1);
        for (std::size_t j = 0; j < poly.size(); ++j) {
            const Eigen::Vector2d& cur = poly[j];
            const Eigen::Vector2d& nxt = poly[(j + 1) % poly.size()];
            const double side_cur = cross2(e0, e1, cur);
            const double side_nxt = cross2(e0, e1, nxt);

            if (side_cur >= 0.0) clipped.push_back(cur);
            if ((side_cur > 0.0 && side_nxt < 0.0) ||
                (side_cur < 0.0 && side_nxt > 0.0)) {
                const double t = side_cur / (side_cur - side_nxt);
                clipped.push_back(cur + t * (nxt - cur));
            }
        }
        poly = std::move(clipped);
    }

    ConvexPolygon inter;
    inter.vertices = std::move(poly);
    return std::max(0.0, inter.area());
}

ConvexPolygon convex_hull(std::vector<Eigen::Vector2d> points) {
    if (points.empty()) {
        throw std::invalid_argument("convex_hull: no points");
    }
    std::sort(points.begin(), points.end(),
              [](const Eigen::Vector2d& p, const Eigen::Vector2d& q) {
                  return p.x() < q.x() || (p.x() == q.x() && p.y() < q.y());
              });
    points.erase(std::unique(points.begin(), points.end()), points.end());

    const std::size_t n = points.size();
    if (n < 3) {
        ConvexPolygon degenerate;
        degenerate.vertices = std::move(points);
        return degenerate;
    }

    // Andrew monotone chain; strict turns only, so collinear interior points
    // are dropped.
    std::vector<Eigen::Vector2d> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross2(hull[k - 2], hull[k - 1], points[i]) <= 0.0) --k;
        hull[k++] = points[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross2(hull[k - 2], hull[k - 1], points[i]) <= 0.0) --k;
        hull[k++] = points[i];
    }
    hull.resize(k - 1);

    ConvexPolygon poly;
    poly.vertices = std::move(hull);
    return poly;
}

namespace {

// Shared GIoU-distance arithmetic once the three measures are known.
double giou_distance(double inter, double measure_a, double measure_b,
                     double hull) {
    const double uni = measure_a + measure_b - inter;
    const double iou = inter / uni;
    const double penalty = (hull - uni) / hull;
    return 1.0 - (iou - penalty);
}

std::vector<Eigen::Vector2d> merged_corners(const ConvexPolygon& a,
                                            const ConvexPolygon& b) {
    std::vector<Eigen::Vector2d> pts = a.vertices;
    pts.insert(pts.end(), b.vertices.begin(), b.vertices.end());
    return pts;
}

}  // namespace

double d_giou_2d(const Box3D& a, const Box3D& b) {
    const ConvexPolygon fa = bev_footprint(a);
    const ConvexPolygon fb = bev_footprint(b);
    const double area_a = fa.area();
    const double area_b = fb.area();
    if (area_a <= 0.0 || area_b <= 0.0) {
        throw std::invalid_argument("d_giou_2d: degenerate (zero-area) box");
    }
    const double inter = polygon_intersection_area(fa, fb);
    const double hull = convex_hull(merged_corners(fa, fb)).area();
    return giou_distance(inter, area_a, area_b, hull);
}

double d_giou_3d(const Box3D& a, const Box3D& b) {
    const ConvexPolygon fa = bev_footprint(a);
    const ConvexPolygon fb = bev_footprint(b);
    const double area_a = fa.area();
    const double area_b = fb.area();
    if (area_a <= 0.0 || area_b <= 0.0 || a.dims.z() <= 0.0 || b.dims.z() <= 0.0) {
        throw std::invalid_argument("d_giou_3d: degenerate (zero-volume) box");
    }

    const double a_lo = a.center.z() - 0.5 * a.dims.z();
    const double a_hi = a.center.z() + 0.5 * a.dims.z();
    const double b_lo = b.center.z() - 0.5 * b.dims.z();
    const double b_hi = b.center.z() + 0.5 * b.dims.z();
    const double z_overlap =
        std::max(0.0, std::min(a_hi, b_hi) - std::max(a_lo, b_lo));
    const double z_span = std::max(a_hi, b_hi) - std::min(a_lo, b_lo);

    const double inter = polygon_intersection_area(fa, fb) * z_overlap;
    const double vol_a = area_a * a.dims.z();
    const double vol_b = area_b * b.dims.z();
    const double hull = convex_hull(merged_corners(fa, fb)).area() * z_span;
    return giou_distance(inter, vol_a, vol_b, hull);
}

double d_mahalanobis(const Eigen::VectorXd& predicted_mean,
                     const Eigen::MatrixXd& innovation_cov,
                     const Eigen::VectorXd& detection_vec) {
    if (predicted_mean.size() != detection_vec.size() ||
        innovation_cov.rows() != predicted_mean.size() ||
        innovation_cov.cols() != predicted_mean.size()) {
        throw std::invalid_argument("d_mahalanobis: dimension mismatch");
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(innovation_cov);
    if (llt.info() != Eigen::Success) {
        throw std::domain_error(
            "d_mahalanobis: innovation covariance not positive definite");
    }
    const Eigen::VectorXd r = detection_vec - predicted_mean;
    // r^T S^-1 r via the Cholesky factor: solve L y = r, then |y|^2.
    const Eigen::VectorXd y = llt.matrixL().solve(r);
    return std::sqrt(y.squaredNorm());
}

}  // namespace mcmot
