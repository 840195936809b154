// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//
// Tracking evaluation against scenario ground truth: CLEAR-style event
// counting (FP/FN/IDS/FRAG, MOTA/MOTP, MT/ML) at one operating point, a
// score-sweep accumulation (AMOTA/AMOTP/MOTAR) over a recall grid, and the
// center/scale/orientation/velocity error means for matched pairs. All
// matching is by 2D ground-plane center distance.

#pragma once

#include <mcmot/scenario.hpp>
#include <mcmot/tracker.hpp>

#include <string>
#include <vector>

namespace mcmot {

struct ClassBreakdown {
    int class_id = 0;
    double mota = 0.0;
    int ids = 0;
    int fp = 0;
    int fn = 0;
    int gt_total = 0;
};

struct MetricReport {
    double amota = 0.0;
    double amotp = 0.0;
    double motar = 0.0;
    double mota = 0.0;
    double motp = 0.0;
    double recall = 0.0;
    int mt = 0;
    int ml = 0;
    int ids = 0;
    int frag = 0;
    int fp = 0;
    int fn = 0;
    int gt_total = 0;
    double fps = 0.0;  // filled by callers that time the tracker
    std::vector<ClassBreakdown> per_class;
};

struct MotionErrors {
    double mate = 0.0;  // mean 2D center distance, meters
    double mase = 0.0;  // mean 1 - IoU after aligning center and yaw
    double maoe = 0.0;  // mean smallest yaw difference, radians
    double mave = 0.0;  // mean 2D velocity error, m/s
};

/// Single operating point. Ground truth and hypotheses must cover the same
/// frame_index sequence (throws std::invalid_argument otherwise).
/// Correspondence is sticky: a gt keeps its hypothesis while both persist
/// within match_dist_m; leftover pairs re-match by minimum total distance.
/// IDS counts a matched gt whose hypothesis id differs from the last one it
/// was ever matched to; FRAG counts coverage gaps that later resume.
MetricReport clear_mot(const std::vector<GtFrame>& gt,
                       const std::vector<FrameResult>& hyp,
                       double match_dist_m);

/// Recall-swept accumulation per the devkit convention the column names come
/// from: for each of n_points recall targets k/n, k = 1..n, pick the score
/// threshold whose achieved recall is closest; average MOTAR (recall-
/// normalized MOTA, clamped at 0) and MOTP there. Unreachable recalls
/// contribute 0 to AMOTA and match_dist_m to AMOTP. The single-point
/// motar/mota/motp fields report the threshold that maximizes MOTA.
MetricReport amota_amotp(const std::vector<GtFrame>& gt,
                         const std::vector<FrameResult>& hyp,
                         double match_dist_m, int n_points);

/// Error means over externally matched (gt, hypothesis) pairs with the
/// hypothesis world velocity alongside. All four are 0 for perfect input.
MotionErrors motion_errors(
    const std::vector<std::pair<GtObjectState, TrackOutput>>& matches);

/// Full report: clear_mot counts at score threshold 0 plus the accumulated
/// sweep. n_points defaults to 40, match distance to 2 m.
MetricReport evaluate(const std::vector<GtFrame>& gt,
                      const std::vector<FrameResult>& hyp,
                      double match_dist_m = 2.0, int n_points = 40);

/// One fixed-width table, header "AMOTA AMOTP MOTAR MOTA MOTP MT ML IDS
/// FRAG FPS", one row per report; diffable golden-file format.
std::string render_table(const std::vector<std::pair<std::string, MetricReport>>& rows);

}  // namespace mcmot
