// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//
// Bird's-eye-view overlap computations and the two distance families used
// for association costs: generalized-IoU distances on oriented boxes and
// the Mahalanobis distance against a filter's innovation covariance.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include <mcmot/model.hpp>

namespace mcmot {

// 2D convex polygon, vertices counterclockwise. Fewer than 3 vertices (or
// collinear input) is a degenerate polygon with zero area.
struct ConvexPolygon {
    std::vector<Eigen::Vector2d> vertices;

    double area() const;  // shoelace, >= 0 for CCW input
    bool degenerate() const { return area() <= 0.0; }
};

// Footprint rectangle of the box on the ground plane, rotated by yaw about
// the center. First vertex is the front-left corner (+l/2, +w/2 in the box
// frame), remaining vertices counterclockwise.
ConvexPolygon bev_footprint(const Box3D& box);

// Area of a intersect b via convex clipping (Sutherland-Hodgman).
double polygon_intersection_area(const ConvexPolygon& a, const ConvexPolygon& b);

// Smallest convex polygon containing all points (monotone chain). Collinear
// input yields a degenerate polygon.
ConvexPolygon convex_hull(std::vector<Eigen::Vector2d> points);

// Generalized-IoU distance on BEV footprints:
//   d = 1 - (IoU - |hull \ union| / |hull|),  range [0, 2).
// 0 iff the footprints coincide; grows toward 2 as boxes separate.
// Throws std::invalid_argument on zero-area footprints.
double d_giou_2d(const Box3D& a, const Box3D& b);

// Volumetric variant: intersection = BEV intersection area x vertical
// overlap, enclosing volume = BEV hull area x joint vertical span.
double d_giou_3d(const Box3D& a, const Box3D& b);

// sqrt(r^T S^-1 r) with r = detection_vec - predicted_mean. S must be
// symmetric positive definite; failure to factor throws std::domain_error
// (filter divergence). Callers building the canonical 7-dim box measurement
// (x, y, z, yaw, l, w, h) are expected to wrap the yaw residual themselves.
double d_mahalanobis(const Eigen::VectorXd& predicted_mean,
                     const Eigen::MatrixXd& innovation_cov,
                     const Eigen::VectorXd& detection_vec);

}  // namespace mcmot
