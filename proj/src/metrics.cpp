// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//
// CLEAR-style event counting with sticky gt<->hypothesis correspondence:
// a pair persists as long as both sides exist within the match distance;
// everything left over is re-matched per frame by minimum total 2D center
// distance. Matching never crosses classes. The accumulated sweep follows
// the devkit convention the column names come from: recall targets k/n,
// operating threshold chosen by closest achieved recall on the base run's
// matched-score curve, metrics re-run at each chosen threshold.

#include <mcmot/hungarian.hpp>
#include <mcmot/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>

namespace mcmot {

namespace {

constexpr double kInfeasible = 1e9;  // cost for pairs that must not match

double center_dist_2d(const Box3D& a, const Box3D& b) {
    return std::hypot(a.center.x() - b.center.x(),
                      a.center.y() - b.center.y());
}

struct TrajStat {
    int present = 0;
    int matched = 0;
    bool ever_matched = false;
    bool in_gap = false;
};

struct ClassAccum {
    int fp = 0;
    int fn = 0;
    int ids = 0;
    int gt_total = 0;
};

struct ClearDetail {
    MetricReport report;
    // Hypothesis score of every matched pair, all frames; drives the
    // recall sweep.
    std::vector<double> matched_scores;
};

ClearDetail clear_mot_impl(const std::vector<GtFrame>& gt,
                           const std::vector<FrameResult>& hyp,
                           double match_dist_m) {
    if (!(std::isfinite(match_dist_m) && match_dist_m > 0.0)) {
        throw std::invalid_argument("clear_mot: match_dist_m must be > 0");
    }
    if (gt.size() != hyp.size()) {
        throw std::invalid_argument(
            "clear_mot: gt and hypothesis frame counts differ");
    }
    for (std::size_t f = 0; f < gt.size(); ++f) {
        if (gt[f].frame_index != hyp[f].frame_index) {
            throw std::invalid_argument(
                "clear_mot: gt and hypothesis frame indices differ");
        }
    }

    ClearDetail detail;
    MetricReport& rep = detail.report;
    double motp_sum = 0.0;
    int match_count = 0;

    std::map<std::int64_t, int> sticky;     // gt id -> hypothesis id
    std::map<std::int64_t, int> last_ever;  // gt id -> last matched hyp id
    std::map<std::int64_t, TrajStat> trajs;
    std::map<int, ClassAccum> per_class;

    for (std::size_t f = 0; f < gt.size(); ++f) {
        const std::vector<GtObjectState>& gobjs = gt[f].objects;
        const std::vector<TrackOutput>& houts = hyp[f].outputs;
        const std::size_t ng = gobjs.size();
        const std::size_t nh = houts.size();
        rep.gt_total += static_cast<int>(ng);
        for (const GtObjectState& g : gobjs) {
            trajs[g.gt_id].present += 1;
            per_class[g.class_id].gt_total += 1;
        }

        std::vector<int> g_match(ng, -1);  // gt slot -> hyp slot
        std::vector<bool> h_used(nh, false);
        std::vector<double> match_dist(ng, 0.0);

        // Sticky phase: keep last frame's pairing when both sides persist
        // within the match distance. gt id order makes conflicts (two gts
        // remembering the same hypothesis) deterministic.
        std::vector<std::size_t> g_order(ng);
        for (std::size_t i = 0; i < ng; ++i) g_order[i] = i;
        std::sort(g_order.begin(), g_order.end(),
                  [&](std::size_t a, std::size_t b) {
                      return gobjs[a].gt_id < gobjs[b].gt_id;
                  });
        for (std::size_t gi : g_order) {
            const auto it = sticky.find(gobjs[gi].gt_id);
            if (it == sticky.end()) continue;
            for (std::size_t hi = 0; hi < nh; ++hi) {
                if (h_used[hi] || houts[hi].track_id != it->second) continue;
                const double d = center_dist_2d(gobjs[gi].box, houts[hi].box);
                if (d <= match_dist_m) {
                    g_match[gi] = static_cast<int>(hi);
                    match_dist[gi] = d;
                    h_used[hi] = true;
                }
                break;
            }
        }

        // Leftovers: minimum-total-distance assignment, same class only.
        std::vector<std::size_t> g_free, h_free;
        for (std::size_t gi = 0; gi < ng; ++gi) {
            if (g_match[gi] < 0) g_free.push_back(gi);
        }
        for (std::size_t hi = 0; hi < nh; ++hi) {
            if (!h_used[hi]) h_free.push_back(hi);
        }
        if (!g_free.empty() && !h_free.empty()) {
            Eigen::MatrixXd cost(g_free.size(), h_free.size());
            for (std::size_t a = 0; a < g_free.size(); ++a) {
                for (std::size_t b = 0; b < h_free.size(); ++b) {
                    const GtObjectState& g = gobjs[g_free[a]];
                    const TrackOutput& h = houts[h_free[b]];
                    if (g.class_id != h.class_id) {
                        cost(a, b) = kInfeasible;
                        continue;
                    }
                    const double d = center_dist_2d(g.box, h.box);
                    cost(a, b) = d <= match_dist_m ? d : kInfeasible;
                }
            }
            const std::vector<int> row_to_col = hungarian(cost);
            for (std::size_t a = 0; a < g_free.size(); ++a) {
                const int b = row_to_col[a];
                if (b < 0 || cost(a, b) > match_dist_m) continue;
                g_match[g_free[a]] = static_cast<int>(h_free[static_cast<std::size_t>(b)]);
                match_dist[g_free[a]] = cost(a, b);
                h_used[h_free[static_cast<std::size_t>(b)]] = true;
            }
        }

        // Event counting.
        for (std::size_t gi = 0; gi < ng; ++gi) {
            const GtObjectState& g = gobjs[gi];
            TrajStat& traj = trajs[g.gt_id];
            if (g_match[gi] < 0) {
                rep.fn += 1;
                per_class[g.class_id].fn += 1;
                if (traj.ever_matched) traj.in_gap = true;
                continue;
            }
            const TrackOutput& h = houts[static_cast<std::size_t>(g_match[gi])];
            const auto le = last_ever.find(g.gt_id);
            if (le != last_ever.end() && le->second != h.track_id) {
                rep.ids += 1;
                per_class[g.class_id].ids += 1;
            }
            last_ever[g.gt_id] = h.track_id;
            sticky[g.gt_id] = h.track_id;
            if (traj.in_gap) {
                rep.frag += 1;
                traj.in_gap = false;
            }
            traj.matched += 1;
            traj.ever_matched = true;
            motp_sum += match_dist[gi];
            match_count += 1;
            detail.matched_scores.push_back(h.score);
        }
        for (std::size_t hi = 0; hi < nh; ++hi) {
            if (h_used[hi]) continue;
            rep.fp += 1;
            per_class[houts[hi].class_id].fp += 1;
        }
    }

    for (const auto& [gt_id, traj] : trajs) {
        (void)gt_id;
        const double coverage =
            static_cast<double>(traj.matched) / traj.present;
        if (coverage >= 0.8) rep.mt += 1;
        if (coverage <= 0.2) rep.ml += 1;
    }

    if (rep.gt_total > 0) {
        rep.mota = 1.0 - static_cast<double>(rep.fp + rep.fn + rep.ids) /
                             rep.gt_total;
        rep.recall = static_cast<double>(match_count) / rep.gt_total;
    } else {
        // No ground truth: perfect iff nothing was hypothesized.
        rep.mota = rep.fp == 0 ? 1.0 : 0.0;
        rep.recall = 0.0;
    }
    rep.motp = match_count > 0 ? motp_sum / match_count : 0.0;

    for (const auto& [class_id, acc] : per_class) {
        ClassBreakdown cb;
        cb.class_id = class_id;
        cb.fp = acc.fp;
        cb.fn = acc.fn;
        cb.ids = acc.ids;
        cb.gt_total = acc.gt_total;
        cb.mota = acc.gt_total > 0
                      ? 1.0 - static_cast<double>(acc.fp + acc.fn + acc.ids) /
                                  acc.gt_total
                      : (acc.fp == 0 ? 1.0 : 0.0);
        rep.per_class.push_back(cb);
    }
    return detail;
}

std::vector<FrameResult> filter_by_score(const std::vector<FrameResult>& hyp,
                                         double threshold) {
    std::vector<FrameResult> out;
    out.reserve(hyp.size());
    for (const FrameResult& frame : hyp) {
        FrameResult kept;
        kept.frame_index = frame.frame_index;
        for (const TrackOutput& o : frame.outputs) {
            if (o.score >= threshold) kept.outputs.push_back(o);
        }
        out.push_back(std::move(kept));
    }
    return out;
}

double motar_of(const MetricReport& rep, int gt_total) {
    const double r = rep.recall;
    if (r <= 0.0 || gt_total == 0) return 0.0;
    const double p = static_cast<double>(gt_total);
    const double raw =
        1.0 - (rep.fp + rep.fn + rep.ids - (1.0 - r) * p) / (r * p);
    return std::max(0.0, raw);
}

}  // namespace

MetricReport clear_mot(const std::vector<GtFrame>& gt,
                       const std::vector<FrameResult>& hyp,
                       double match_dist_m) {
    return clear_mot_impl(gt, hyp, match_dist_m).report;
}

MetricReport amota_amotp(const std::vector<GtFrame>& gt,
                         const std::vector<FrameResult>& hyp,
                         double match_dist_m, int n_points) {
    if (n_points < 1) {
        throw std::invalid_argument("amota_amotp: n_points must be >= 1");
    }
    ClearDetail base = clear_mot_impl(gt, hyp, match_dist_m);
    const int gt_total = base.report.gt_total;

    // Cache of operating points keyed by score threshold; -inf is the
    // unfiltered base run.
    std::map<double, MetricReport> runs;
    runs.emplace(-std::numeric_limits<double>::infinity(), base.report);

    std::vector<double> scores = base.matched_scores;
    std::sort(scores.begin(), scores.end(), std::greater<double>());
    const double max_recall =
        gt_total > 0 ? static_cast<double>(scores.size()) / gt_total : 0.0;

    double amota_sum = 0.0;
    double amotp_sum = 0.0;
    for (int k = 1; k <= n_points; ++k) {
        const double target = static_cast<double>(k) / n_points;
        if (scores.empty() || max_recall < target) {
            // Unreachable recall: worst-case contribution.
            amotp_sum += match_dist_m;
            continue;
        }
        // Closest achieved recall on the base matched-score curve; ties go
        // to the higher recall (lower threshold).
        std::size_t best_i = 0;
        double best_gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const double recall_i =
                static_cast<double>(i + 1) / gt_total;
            const double gap = std::abs(recall_i - target);
            if (gap <= best_gap) {
                best_gap = gap;
                best_i = i;
            }
            if (recall_i >= target) break;  // gaps only grow past the target
        }
        const double threshold = scores[best_i];
        auto it = runs.find(threshold);
        if (it == runs.end()) {
            const MetricReport rerun =
                clear_mot(gt, filter_by_score(hyp, threshold), match_dist_m);
            it = runs.emplace(threshold, rerun).first;
        }
        const MetricReport& rep = it->second;
        if (rep.recall > 0.0) {
            amota_sum += motar_of(rep, gt_total);
            amotp_sum += rep.motp;
        } else {
            amotp_sum += match_dist_m;
        }
    }

    // Single operating point: the evaluated threshold maximizing MOTA
    // (lowest threshold wins ties, the map iterates ascending).
    const MetricReport* best = nullptr;
    for (const auto& [threshold, rep] : runs) {
        (void)threshold;
        if (best == nullptr || rep.mota > best->mota) best = &rep;
    }

    MetricReport out = *best;
    out.amota = amota_sum / n_points;
    out.amotp = amotp_sum / n_points;
    out.motar = motar_of(*best, gt_total);
    return out;
}

MotionErrors motion_errors(
    const std::vector<std::pair<GtObjectState, TrackOutput>>& matches) {
    MotionErrors err;
    if (matches.empty()) return err;
    for (const auto& [g, h] : matches) {
        err.mate += center_dist_2d(g.box, h.box);
        // Scale error: align centers and yaw, then IoU reduces to the
        // ratio of per-axis minima to maxima.
        const Eigen::Vector3d mins = g.box.dims.cwiseMin(h.box.dims);
        const Eigen::Vector3d maxs = g.box.dims.cwiseMax(h.box.dims);
        err.mase += 1.0 - mins.prod() / maxs.prod();
        err.maoe += std::abs(normalize_yaw(g.box.yaw - h.box.yaw));
        err.mave += (g.velocity.head<2>() - h.velocity.head<2>()).norm();
    }
    const double n = static_cast<double>(matches.size());
    err.mate /= n;
    err.mase /= n;
    err.maoe /= n;
    err.mave /= n;
    return err;
}

MetricReport evaluate(const std::vector<GtFrame>& gt,
                      const std::vector<FrameResult>& hyp,
                      double match_dist_m, int n_points) {
    const MetricReport sweep = amota_amotp(gt, hyp, match_dist_m, n_points);
    MetricReport out = clear_mot(gt, hyp, match_dist_m);
    out.amota = sweep.amota;
    out.amotp = sweep.amotp;
    out.motar = sweep.motar;
    return out;
}

std::string render_table(
    const std::vector<std::pair<std::string, MetricReport>>& rows) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof(line),
                  "%-16s %7s %7s %7s %7s %7s %5s %5s %6s %6s %8s\n", "variant",
                  "AMOTA", "AMOTP", "MOTAR", "MOTA", "MOTP", "MT", "ML", "IDS",
                  "FRAG", "FPS");
    out += line;
    for (const auto& [name, rep] : rows) {
        std::snprintf(line, sizeof(line),
                      "%-16s %7.3f %7.3f %7.3f %7.3f %7.3f %5d %5d %6d %6d "
                      "%8.1f\n",
                      name.c_str(), rep.amota, rep.amotp, rep.motar, rep.mota,
                      rep.motp, rep.mt, rep.ml, rep.ids, rep.frag, rep.fps);
        out += line;
    }
    return out;
}

}  // namespace mcmot
