// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line frontend wiring scenario generation, tracking, metric
// evaluation, direct solver access, set-loss scoring and FOTA-vs-KM
// comparison into reproducible file-based experiments.
//
// Conventions shared by every subcommand:
//   - configuration comes from JSON files; command-line flags override file
//     values (flags win), and the fully resolved config is snapshotted into
//     the run manifest written next to each output artifact;
//   - results go to stdout or output files only, progress and diagnostics
//     to stderr;
//   - exit codes: 0 success, 1 I/O failure, 2 configuration or validation
//     failure, 3 numerical failure inside the solver.

#include <mcmot/manifest.hpp>
#include <mcmot/metrics.hpp>
#include <mcmot/scenario.hpp>
#include <mcmot/serialization.hpp>
#include <mcmot/setloss.hpp>
#include <mcmot/tracker.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace {

using mcmot::Json;

constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// small shared helpers

class StageTimer {
  public:
    double lap() {
        const auto now = Clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

  private:
    using Clock = std::chrono::steady_clock;
    Clock::time_point last_ = Clock::now();
};

// Parses a JSON document from disk. A missing/unreadable file is an I/O
// failure; malformed JSON is a validation failure naming the file.
Json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    if (in.bad()) throw std::runtime_error("failed reading " + path);
    try {
        return Json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + path);
}

// Overlays `patch` onto `base`, recursing into nested objects. Keys absent
// from `base` are rejected so config typos fail loudly instead of being
// silently ignored. `base` starts out as the full default config, which is
// what makes partial config files work.
void merge_config(Json& base, const Json& patch, const std::string& path) {
    if (!patch.is_object()) {
        throw std::invalid_argument("config" + (path.empty() ? "" : " " + path) +
                                    " must be a JSON object");
    }
    for (const auto& [key, value] : patch.items()) {
        const std::string where = path.empty() ? key : path + "." + key;
        if (!base.contains(key)) {
            throw std::invalid_argument("unknown config field '" + where + "'");
        }
        if (base[key].is_object() && value.is_object()) {
            merge_config(base[key], value, where);
        } else {
            base[key] = value;
        }
    }
}

std::string join_command(int argc, char** argv) {
    std::string cmd;
    for (int i = 0; i < argc; ++i) {
        if (i > 0) cmd += ' ';
        cmd += argv[i];
    }
    return cmd;
}

// Builds and writes the manifest for a finished command. Digests are
// computed from the artifacts on disk so a rerun can verify them.
void emit_manifest(const std::string& manifest_path, const std::string& command,
                   const Json& config, const std::vector<std::string>& inputs,
                   const std::vector<std::string>& outputs,
                   const std::vector<std::pair<std::string, double>>& timings) {
    mcmot::RunManifest manifest;
    manifest.tool_version = kToolVersion;
    manifest.command = command;
    manifest.config = config;
    for (const std::string& path : inputs) {
        manifest.inputs.emplace_back(path, mcmot::sha256_file(path));
    }
    for (const std::string& path : outputs) {
        manifest.outputs.emplace_back(path, mcmot::sha256_file(path));
    }
    manifest.timings_sec = timings;
    mcmot::write_manifest(manifest, manifest_path);
    std::cerr << "wrote " << manifest_path << '\n';
}

enum class OutputFormat { kTable, kJson };

OutputFormat format_from_string(const std::string& name) {
    if (name == "table") return OutputFormat::kTable;
    if (name == "json") return OutputFormat::kJson;
    throw std::invalid_argument("unknown --format '" + name +
                                "' (expected table or json)");
}

std::vector<mcmot::GtFrame> load_gt_file(const std::string& path,
                                         Json* config_out) {
    const std::vector<Json> lines = mcmot::read_jsonl(path, "gt", config_out);
    std::vector<mcmot::GtFrame> gt;
    gt.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        try {
            gt.push_back(mcmot::gt_frame_from_json(lines[i]));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(i + 2) + ": " +
                                     e.what());
        }
    }
    return gt;
}

std::vector<mcmot::FrameBundle> load_frames_file(const std::string& path,
                                                 Json* config_out) {
    const std::vector<Json> lines =
        mcmot::read_jsonl(path, "frames", config_out);
    std::vector<mcmot::FrameBundle> frames;
    frames.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        try {
            frames.push_back(mcmot::frame_bundle_from_json(lines[i]));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(i + 2) + ": " +
                                     e.what());
        }
    }
    return frames;
}

std::vector<mcmot::FrameResult> load_results_file(const std::string& path,
                                                  Json* config_out) {
    const std::vector<Json> lines =
        mcmot::read_jsonl(path, "results", config_out);
    std::vector<mcmot::FrameResult> results;
    results.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        try {
            results.push_back(mcmot::frame_result_from_json(lines[i]));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(i + 2) + ": " +
                                     e.what());
        }
    }
    return results;
}

// Resolves the effective tracker config from an optional config file plus
// flag overrides. When nobody pins gate_threshold explicitly it follows the
// per-metric default, so `--metric giou2d` alone gets a sane gate.
mcmot::TrackerConfig resolve_tracker_config(
    const std::optional<std::string>& config_path,
    const std::optional<std::string>& association,
    const std::optional<std::string>& metric, Json* effective_out) {
    Json effective = mcmot::to_json(mcmot::TrackerConfig{});
    bool gate_pinned = false;
    if (config_path) {
        const Json file_config = load_json_file(*config_path);
        merge_config(effective, file_config, "");
        gate_pinned = file_config.contains("gate_threshold");
    }
    if (metric) {
        effective["distance_metric"] =
            mcmot::to_string(mcmot::distance_metric_from_string(*metric));
    }
    if (association) {
        effective["association"] =
            mcmot::to_string(mcmot::association_from_string(*association));
    }
    if (!gate_pinned) {
        effective["gate_threshold"] =
            mcmot::default_gate(mcmot::distance_metric_from_string(
                effective["distance_metric"].get<std::string>()));
    }
    mcmot::TrackerConfig config = mcmot::tracker_config_from_json(effective);
    mcmot::validate(config);
    *effective_out = mcmot::to_json(config);
    return config;
}

std::string variant_name(const mcmot::TrackerConfig& config) {
    return mcmot::to_string(config.association) + "_" +
           mcmot::to_string(config.distance_metric);
}

// ---------------------------------------------------------------------------
// generate

int cmd_generate(const std::string& command, const std::string& config_path,
                 const std::string& out_prefix,
                 const std::optional<std::uint64_t>& seed) {
    Json effective = mcmot::to_json(mcmot::ScenarioConfig{});
    merge_config(effective, load_json_file(config_path), "");
    if (seed) effective["seed"] = *seed;
    const mcmot::ScenarioConfig config =
        mcmot::scenario_config_from_json(effective);
    mcmot::validate(config);

    StageTimer timer;
    const mcmot::Scenario scenario = mcmot::generate(config);
    const double t_generate = timer.lap();
    mcmot::save(scenario, out_prefix);
    const double t_save = timer.lap();

    std::size_t detections = 0;
    for (const mcmot::FrameBundle& frame : scenario.frames) {
        detections += frame.detections.size();
    }
    std::cerr << "generated " << scenario.frames.size() << " frames, "
              << detections << " detections (seed " << config.seed << ")\n";

    emit_manifest(out_prefix + ".manifest.json", command,
                  mcmot::to_json(config), {config_path},
                  {out_prefix + ".frames.jsonl", out_prefix + ".gt.jsonl"},
                  {{"generate", t_generate}, {"save", t_save}});
    return 0;
}

// ---------------------------------------------------------------------------
// track

int cmd_track(const std::string& command, const std::string& frames_path,
              const std::string& out_path,
              const std::optional<std::string>& config_path,
              const std::optional<std::string>& association,
              const std::optional<std::string>& metric) {
    Json effective;
    const mcmot::TrackerConfig config =
        resolve_tracker_config(config_path, association, metric, &effective);

    StageTimer timer;
    Json scenario_config;
    const std::vector<mcmot::FrameBundle> frames =
        load_frames_file(frames_path, &scenario_config);
    const double t_load = timer.lap();

    const std::vector<mcmot::FrameResult> results = mcmot::run(frames, config);
    const double t_track = timer.lap();

    std::vector<Json> lines;
    lines.reserve(results.size());
    for (const mcmot::FrameResult& result : results) {
        lines.push_back(mcmot::to_json(result));
    }
    mcmot::write_jsonl(out_path, "results", effective, lines);
    const double t_write = timer.lap();

    const double fps =
        t_track > 0.0 ? static_cast<double>(frames.size()) / t_track : 0.0;
    std::cerr << "tracked " << frames.size() << " frames with "
              << variant_name(config) << " in " << t_track << " s (" << fps
              << " fps)\n";

    std::vector<std::string> inputs = {frames_path};
    if (config_path) inputs.push_back(*config_path);
    emit_manifest(out_path + ".manifest.json", command, effective, inputs,
                  {out_path},
                  {{"load", t_load}, {"track", t_track}, {"write", t_write}});
    return 0;
}

// ---------------------------------------------------------------------------
// eval

int cmd_eval(const std::string& command, const std::string& gt_path,
             const std::string& results_path, double match_dist,
             const std::optional<std::string>& report_path,
             OutputFormat format) {
    StageTimer timer;
    Json gt_config;
    const std::vector<mcmot::GtFrame> gt = load_gt_file(gt_path, &gt_config);
    Json results_config;
    const std::vector<mcmot::FrameResult> hyp =
        load_results_file(results_path, &results_config);
    const double t_load = timer.lap();

    const mcmot::MetricReport report = mcmot::evaluate(gt, hyp, match_dist);
    const double t_eval = timer.lap();

    std::string name = "results";
    if (results_config.contains("association") &&
        results_config.contains("distance_metric")) {
        name = results_config["association"].get<std::string>() + "_" +
               results_config["distance_metric"].get<std::string>();
    }

    const Json report_json = mcmot::to_json(report);
    if (format == OutputFormat::kJson) {
        std::cout << report_json.dump(2) << '\n';
    } else {
        std::cout << mcmot::render_table({{name, report}});
    }

    if (report_path) {
        write_text_file(*report_path, report_json.dump(2) + "\n");
        Json config;
        config["match_dist_m"] = match_dist;
        config["results_config"] = results_config;
        emit_manifest(*report_path + ".manifest.json", command, config,
                      {gt_path, results_path}, {*report_path},
                      {{"load", t_load}, {"evaluate", t_eval}});
    }
    return 0;
}

// ---------------------------------------------------------------------------
// solve

int cmd_solve(const std::string& command, const std::string& problem_path,
              const std::string& out_path, double min_mass) {
    const Json problem_json = load_json_file(problem_path);
    mcmot::TransportProblem problem;
    try {
        problem = mcmot::transport_problem_from_json(problem_json);
    } catch (const std::exception& e) {
        throw std::invalid_argument(problem_path + ": " + e.what());
    }
    mcmot::validate(problem);

    StageTimer timer;
    const mcmot::TransportPlan plan = mcmot::sinkhorn(problem);
    const double t_solve = timer.lap();
    const mcmot::Assignment assignment =
        mcmot::extract_assignment(plan, min_mass);

    const Eigen::MatrixXd extended =
        mcmot::extend_cost(problem.cost, problem.epsilon);
    const double transport_cost =
        (extended.array() * plan.plan.array()).sum();

    Json out;
    out["problem"] = mcmot::to_json(problem);
    out["plan"] = mcmot::to_json(plan);
    out["assignment"] = mcmot::to_json(assignment);
    out["transport_cost"] = transport_cost;
    write_text_file(out_path, out.dump(2) + "\n");

    std::cerr << (plan.converged ? "converged" : "did not converge") << " in "
              << plan.iterations_used << " sweeps, marginal error "
              << plan.marginal_error << ", transport cost " << transport_cost
              << '\n';

    Json config = mcmot::to_json(problem);
    config["min_mass"] = min_mass;
    emit_manifest(out_path + ".manifest.json", command, config, {problem_path},
                  {out_path}, {{"solve", t_solve}});
    return 0;
}

// ---------------------------------------------------------------------------
// loss

int cmd_loss(const std::string& command, const std::string& doc_path,
             const std::optional<std::string>& out_path, OutputFormat format) {
    const Json doc = load_json_file(doc_path);
    if (!doc.is_object() || !doc.contains("gts") || !doc.contains("preds")) {
        throw std::invalid_argument(doc_path +
                                    ": document must carry gts and preds");
    }
    std::vector<mcmot::GroundTruthTrack> gts;
    for (const Json& g : doc.at("gts")) {
        gts.push_back(mcmot::ground_truth_track_from_json(g));
    }
    std::vector<mcmot::QueryPrediction> preds;
    for (const Json& p : doc.at("preds")) {
        preds.push_back(mcmot::query_prediction_from_json(p));
        mcmot::validate(preds.back());
    }
    const mcmot::LossWeights weights = mcmot::loss_weights_from_json(
        doc.contains("weights") ? doc.at("weights") : Json::object());

    StageTimer timer;
    const std::vector<int> matching =
        mcmot::match_queries(gts, preds, weights);
    const double loss =
        mcmot::set_prediction_loss(gts, preds, matching, weights);
    const double t_match = timer.lap();

    Json out;
    out["matching"] = matching;
    out["loss"] = loss;

    std::string table;
    for (std::size_t k = 0; k < matching.size(); ++k) {
        table += "query " + std::to_string(k) + " -> " +
                 (matching[k] == mcmot::kBackgroundMatch
                      ? "background"
                      : "gt " + std::to_string(matching[k])) +
                 "\n";
    }
    char loss_line[64];
    std::snprintf(loss_line, sizeof loss_line, "loss %.9f\n", loss);
    table += loss_line;

    if (out_path) {
        write_text_file(*out_path, out.dump(2) + "\n");
        Json config;
        config["weights"] = doc.contains("weights") ? doc.at("weights")
                                                    : Json::object();
        emit_manifest(*out_path + ".manifest.json", command, config, {doc_path},
                      {*out_path}, {{"match", t_match}});
    } else if (format == OutputFormat::kJson) {
        std::cout << out.dump(2) << '\n';
    } else {
        std::cout << table;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// compare

struct VariantStats {
    std::string name;
    std::vector<mcmot::MetricReport> reports;  // one per seed
};

double mean_of(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double mu = mean_of(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - mu) * (x - mu);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

std::vector<double> field_of(const std::vector<mcmot::MetricReport>& reports,
                             double (*get)(const mcmot::MetricReport&)) {
    std::vector<double> xs;
    xs.reserve(reports.size());
    for (const mcmot::MetricReport& r : reports) xs.push_back(get(r));
    return xs;
}

// One "mean ± stddev" cell, 18 display columns wide.
std::string pm_cell(const std::vector<double>& xs, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%8.*f ± %-7.*f", precision, mean_of(xs),
                  precision, stddev_of(xs));
    return buf;
}

int cmd_compare(const std::string& command, const std::string& frames_path,
                const std::string& gt_path, int seeds, double match_dist,
                OutputFormat format) {
    (void)command;
    if (seeds < 1) throw std::invalid_argument("--seeds must be >= 1");

    Json frames_config;
    std::vector<mcmot::FrameBundle> base_frames =
        load_frames_file(frames_path, &frames_config);
    Json gt_config;
    std::vector<mcmot::GtFrame> base_gt = load_gt_file(gt_path, &gt_config);

    // Datasets to run every variant on: the files as given, then fresh
    // regenerations of the same scenario config under successive seeds.
    std::vector<std::pair<std::vector<mcmot::FrameBundle>,
                          std::vector<mcmot::GtFrame>>>
        datasets;
    datasets.emplace_back(std::move(base_frames), std::move(base_gt));
    if (seeds > 1) {
        mcmot::ScenarioConfig config =
            mcmot::scenario_config_from_json(frames_config);
        const std::uint64_t base_seed = config.seed;
        for (int i = 1; i < seeds; ++i) {
            config.seed = base_seed + static_cast<std::uint64_t>(i);
            std::cerr << "generating seed " << config.seed << "\n";
            mcmot::Scenario scenario = mcmot::generate(config);
            datasets.emplace_back(std::move(scenario.frames),
                                  std::move(scenario.gt_frames));
        }
    }

    const mcmot::DistanceMetric metrics[] = {mcmot::DistanceMetric::kMahalanobis,
                                             mcmot::DistanceMetric::kGiou2D,
                                             mcmot::DistanceMetric::kGiou3D};
    const mcmot::AssociationMethod methods[] = {
        mcmot::AssociationMethod::kFota, mcmot::AssociationMethod::kKuhnMunkres};

    std::vector<VariantStats> variants;
    for (const mcmot::DistanceMetric metric : metrics) {
        for (const mcmot::AssociationMethod method : methods) {
            mcmot::TrackerConfig config;
            config.distance_metric = metric;
            config.gate_threshold = mcmot::default_gate(metric);
            config.association = method;

            VariantStats stats;
            stats.name = variant_name(config);
            std::cerr << "running " << stats.name << " on " << datasets.size()
                      << (datasets.size() == 1 ? " dataset\n" : " datasets\n");
            for (const auto& [frames, gt] : datasets) {
                StageTimer timer;
                const std::vector<mcmot::FrameResult> hyp =
                    mcmot::run(frames, config);
                const double t_track = timer.lap();
                mcmot::MetricReport report =
                    mcmot::evaluate(gt, hyp, match_dist);
                report.fps = t_track > 0.0
                                 ? static_cast<double>(frames.size()) / t_track
                                 : 0.0;
                stats.reports.push_back(std::move(report));
            }
            variants.push_back(std::move(stats));
        }
    }

    if (format == OutputFormat::kJson) {
        Json rows = Json::array();
        for (const VariantStats& v : variants) {
            Json row;
            row["variant"] = v.name;
            if (seeds == 1) {
                row["report"] = mcmot::to_json(v.reports.front());
            } else {
                row["seeds"] = seeds;
                Json mean, stddev;
                const auto put = [&](const char* key,
                                     double (*get)(const mcmot::MetricReport&)) {
                    const std::vector<double> xs = field_of(v.reports, get);
                    mean[key] = mean_of(xs);
                    stddev[key] = stddev_of(xs);
                };
                put("amota", [](const mcmot::MetricReport& r) { return r.amota; });
                put("amotp", [](const mcmot::MetricReport& r) { return r.amotp; });
                put("motar", [](const mcmot::MetricReport& r) { return r.motar; });
                put("mota", [](const mcmot::MetricReport& r) { return r.mota; });
                put("motp", [](const mcmot::MetricReport& r) { return r.motp; });
                put("ids", [](const mcmot::MetricReport& r) {
                    return static_cast<double>(r.ids);
                });
                put("frag", [](const mcmot::MetricReport& r) {
                    return static_cast<double>(r.frag);
                });
                put("fp", [](const mcmot::MetricReport& r) {
                    return static_cast<double>(r.fp);
                });
                put("fn", [](const mcmot::MetricReport& r) {
                    return static_cast<double>(r.fn);
                });
                put("fps", [](const mcmot::MetricReport& r) { return r.fps; });
                row["mean"] = std::move(mean);
                row["stddev"] = std::move(stddev);
            }
            rows.push_back(std::move(row));
        }
        std::cout << rows.dump(2) << '\n';
        return 0;
    }

    if (seeds == 1) {
        std::vector<std::pair<std::string, mcmot::MetricReport>> rows;
        for (const VariantStats& v : variants) {
            rows.emplace_back(v.name, v.reports.front());
        }
        std::cout << mcmot::render_table(rows);
        return 0;
    }

    // Mean ± stddev over seeds, one 18-column cell per metric.
    char header[160];
    std::snprintf(header, sizeof header,
                  "%-16s  %18s  %18s  %18s  %18s  %18s  %18s\n", "variant",
                  "AMOTA", "MOTA", "MOTP", "IDS", "FRAG", "FPS");
    std::cout << header;
    for (const VariantStats& v : variants) {
        char name[32];
        std::snprintf(name, sizeof name, "%-16s", v.name.c_str());
        std::cout << name << "  "
                  << pm_cell(field_of(v.reports,
                                      [](const mcmot::MetricReport& r) {
                                          return r.amota;
                                      }),
                             3)
                  << "  "
                  << pm_cell(field_of(v.reports,
                                      [](const mcmot::MetricReport& r) {
                                          return r.mota;
                                      }),
                             3)
                  << "  "
                  << pm_cell(field_of(v.reports,
                                      [](const mcmot::MetricReport& r) {
                                          return r.motp;
                                      }),
                             3)
                  << "  "
                  << pm_cell(field_of(v.reports,
                                      [](const mcmot::MetricReport& r) {
                                          return static_cast<double>(r.ids);
                                      }),
                             1)
                  << "  "
                  << pm_cell(field_of(v.reports,
                                      [](const mcmot::MetricReport& r) {
                                          return static_cast<double>(r.frag);
                                      }),
                             1)
                  << "  "
                  << pm_cell(field_of(v.reports,
                                      [](const mcmot::MetricReport& r) {
                                          return r.fps;
                                      }),
                             1)
                  << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------------------
// ingest: best-effort converter for nuScenes-like JSON box dumps

const std::map<std::string, int>& ingest_class_ids() {
    // The seven nuScenes tracking classes, in their alphabetical order.
    static const std::map<std::string, int> ids = {
        {"bicycle", 1}, {"bus", 2},     {"car", 3},   {"motorcycle", 4},
        {"pedestrian", 5}, {"trailer", 6}, {"truck", 7}};
    return ids;
}

std::int64_t fnv1a64(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    // Keep ids nonnegative so they read naturally in JSON output.
    return static_cast<std::int64_t>(hash & 0x7fffffffffffffffull);
}

mcmot::CameraModel ingest_camera() {
    mcmot::CameraModel cam;
    cam.camera_id = 0;
    cam.fx = 1000.0;
    cam.fy = 1000.0;
    cam.cx = 800.0;
    cam.cy = 450.0;
    cam.width = 1600;
    cam.height = 900;
    cam.max_range = 1e4;
    return cam;
}

int cmd_ingest(const std::string& command, const std::string& in_path,
               const std::string& out_prefix) {
    const Json doc = load_json_file(in_path);
    if (!doc.is_object() || !doc.contains("frames") ||
        !doc.at("frames").is_array()) {
        throw std::invalid_argument(in_path +
                                    ": document must carry a frames array");
    }

    mcmot::Scenario scenario;
    std::map<std::int64_t, bool> gt_ids;
    double prev_timestamp = -std::numeric_limits<double>::infinity();

    const Json& in_frames = doc.at("frames");
    for (std::size_t t = 0; t < in_frames.size(); ++t) {
        const Json& in_frame = in_frames[t];
        const std::string where = in_path + ": frames[" + std::to_string(t) + "]";
        if (!in_frame.is_object() || !in_frame.contains("boxes")) {
            throw std::invalid_argument(where + " must carry a boxes array");
        }

        mcmot::FrameBundle frame;
        frame.frame_index = static_cast<int>(t);
        frame.timestamp = in_frame.value("timestamp", 0.5 * static_cast<double>(t));
        if (frame.timestamp <= prev_timestamp) {
            throw std::invalid_argument(where +
                                        ": timestamps must strictly increase");
        }
        prev_timestamp = frame.timestamp;
        frame.rig.push_back(ingest_camera());

        mcmot::GtFrame gt_frame;
        gt_frame.frame_index = frame.frame_index;
        gt_frame.timestamp = frame.timestamp;

        const Json& boxes = in_frame.at("boxes");
        for (std::size_t k = 0; k < boxes.size(); ++k) {
            const Json& b = boxes[k];
            const std::string box_where =
                where + ".boxes[" + std::to_string(k) + "]";
            if (!b.is_object() || !b.contains("translation") ||
                !b.contains("size")) {
                throw std::invalid_argument(box_where +
                                            " needs translation and size");
            }

            mcmot::Detection det;
            const Json& tr = b.at("translation");
            const Json& size = b.at("size");
            if (tr.size() != 3 || size.size() != 3) {
                throw std::invalid_argument(
                    box_where + ": translation and size must have 3 entries");
            }
            det.box.center = Eigen::Vector3d(tr[0].get<double>(),
                                             tr[1].get<double>(),
                                             tr[2].get<double>());
            // nuScenes sizes are (width, length, height); boxes here store
            // (length, width, height).
            det.box.dims = Eigen::Vector3d(size[1].get<double>(),
                                           size[0].get<double>(),
                                           size[2].get<double>());
            if (b.contains("rotation")) {
                const Json& q = b.at("rotation");
                if (q.size() != 4) {
                    throw std::invalid_argument(
                        box_where + ": rotation must be a [w,x,y,z] quaternion");
                }
                const double w = q[0].get<double>(), x = q[1].get<double>();
                const double y = q[2].get<double>(), z = q[3].get<double>();
                det.box.yaw = mcmot::normalize_yaw(
                    std::atan2(2.0 * (w * z + x * y),
                               1.0 - 2.0 * (y * y + z * z)));
            } else {
                det.box.yaw = mcmot::normalize_yaw(b.value("yaw", 0.0));
            }

            if (b.contains("class_id")) {
                det.class_id = b.at("class_id").get<int>();
            } else {
                std::string name;
                for (const char* key :
                     {"detection_name", "tracking_name", "category"}) {
                    if (b.contains(key)) {
                        name = b.at(key).get<std::string>();
                        break;
                    }
                }
                const auto it = ingest_class_ids().find(name);
                if (it == ingest_class_ids().end()) {
                    throw std::invalid_argument(
                        box_where + ": unknown class '" + name +
                        "' (give class_id or one of the nuScenes tracking "
                        "class names)");
                }
                det.class_id = it->second;
            }

            double score = 1.0;
            for (const char* key :
                 {"detection_score", "tracking_score", "score"}) {
                if (b.contains(key)) {
                    score = b.at(key).get<double>();
                    break;
                }
            }
            det.score = std::clamp(score, 0.0, 1.0);
            det.camera_id = 0;
            det.frame_index = frame.frame_index;

            Eigen::Vector3d velocity(0.0, 0.0, 0.0);
            bool has_velocity = false;
            if (b.contains("velocity") && b.at("velocity").is_array()) {
                const Json& v = b.at("velocity");
                if (v.size() >= 2) {
                    velocity.x() = v[0].get<double>();
                    velocity.y() = v[1].get<double>();
                    if (v.size() >= 3) velocity.z() = v[2].get<double>();
                    has_velocity = velocity.allFinite();
                }
            }
            if (has_velocity) det.velocity_hint = velocity;

            std::optional<std::int64_t> gt_id;
            if (b.contains("tracking_id")) {
                const Json& tid = b.at("tracking_id");
                gt_id = tid.is_string() ? fnv1a64(tid.get<std::string>())
                                        : tid.get<std::int64_t>();
            }
            det.gt_id = gt_id;

            try {
                mcmot::validate(det, 1);
            } catch (const std::exception& e) {
                throw std::invalid_argument(box_where + ": " + e.what());
            }

            if (gt_id) {
                mcmot::GtObjectState state;
                state.gt_id = *gt_id;
                state.class_id = det.class_id;
                state.box = det.box;
                state.velocity = has_velocity ? velocity
                                              : Eigen::Vector3d(0.0, 0.0, 0.0);
                gt_frame.objects.push_back(std::move(state));
                gt_ids[*gt_id] = true;
            }
            frame.detections.push_back(std::move(det));
        }

        frame.canonicalize();
        scenario.frames.push_back(std::move(frame));
        scenario.gt_frames.push_back(std::move(gt_frame));
    }

    if (scenario.frames.empty()) {
        throw std::invalid_argument(in_path + ": no frames to convert");
    }

    // Header config is descriptive only; nothing regenerates from it.
    mcmot::ScenarioConfig config;
    config.seed = 0;
    config.num_cameras = 1;
    config.max_range = 1e4;
    config.num_objects = static_cast<int>(gt_ids.size());
    config.num_frames = static_cast<int>(scenario.frames.size());
    config.noise_pos = 0.0;
    config.noise_dims = 0.0;
    config.noise_yaw = 0.0;
    config.miss_rate = 0.0;
    config.clutter_rate = 0.0;
    config.ego_speed = 0.0;
    scenario.config = config;

    StageTimer timer;
    mcmot::save(scenario, out_prefix);
    const double t_save = timer.lap();

    std::size_t detections = 0;
    for (const mcmot::FrameBundle& frame : scenario.frames) {
        detections += frame.detections.size();
    }
    std::cerr << "converted " << scenario.frames.size() << " frames, "
              << detections << " boxes, " << gt_ids.size()
              << " distinct tracking ids\n";

    emit_manifest(out_prefix + ".manifest.json", command, mcmot::to_json(config),
                  {in_path},
                  {out_prefix + ".frames.jsonl", out_prefix + ".gt.jsonl"},
                  {{"convert", t_save}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-camera 3D multi-object tracking toolkit"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand(
        "generate", "Generate a synthetic multi-camera scenario");
    std::string gen_config, gen_prefix;
    std::uint64_t gen_seed = 0;
    gen->add_option("config", gen_config,
                    "Scenario config JSON; fields override built-in defaults")
        ->required();
    gen->add_option("out_prefix", gen_prefix,
                    "Output prefix for <prefix>.frames.jsonl and "
                    "<prefix>.gt.jsonl")
        ->required();
    auto* gen_seed_opt =
        gen->add_option("--seed", gen_seed, "Override the config seed");

    // track
    auto* track = app.add_subcommand(
        "track", "Run the tracker over a frames file, write results JSONL");
    std::string track_frames, track_out, track_config, track_assoc,
        track_metric;
    track->add_option("frames", track_frames, "Input <name>.frames.jsonl")
        ->required();
    track->add_option("out", track_out, "Output results JSONL path")
        ->required();
    auto* track_config_opt = track->add_option(
        "--config", track_config, "Tracker config JSON; flags override it");
    auto* track_assoc_opt = track->add_option(
        "--association", track_assoc, "Association method: fota | km");
    auto* track_metric_opt = track->add_option(
        "--metric", track_metric,
        "Distance metric: mahalanobis | giou2d | giou3d");

    // eval
    auto* eval = app.add_subcommand(
        "eval", "Score a results file against scenario ground truth");
    std::string eval_gt, eval_results, eval_report;
    double eval_match_dist = 2.0;
    std::string eval_format = "table";
    eval->add_option("gt", eval_gt, "Ground-truth <name>.gt.jsonl")->required();
    eval->add_option("results", eval_results, "Results JSONL from track")
        ->required();
    eval->add_option("--match-dist", eval_match_dist,
                     "Ground-plane match distance, meters (default 2.0)");
    auto* eval_report_opt = eval->add_option(
        "--report", eval_report, "Also write the report JSON to this path");
    eval->add_option("--format", eval_format, "Output format: table | json");

    // solve
    auto* solve = app.add_subcommand(
        "solve", "Solve one transport problem JSON, write plan + assignment");
    std::string solve_problem, solve_out;
    double solve_min_mass = 0.3;
    solve->add_option("problem", solve_problem, "TransportProblem JSON file")
        ->required();
    solve->add_option("out", solve_out, "Output JSON path")->required();
    solve->add_option("--min-mass", solve_min_mass,
                      "Minimum plan mass for a discrete match (default 0.3)");

    // loss
    auto* loss = app.add_subcommand(
        "loss", "Match predictions to ground-truth tracks and score the "
                "set-prediction loss");
    std::string loss_doc, loss_out;
    std::string loss_format = "json";
    loss->add_option("document", loss_doc,
                     "JSON document {gts, preds, weights?}")
        ->required();
    auto* loss_out_opt =
        loss->add_option("--out", loss_out, "Write the result JSON here");
    loss->add_option("--format", loss_format,
                     "Stdout format: json | table (default json)");

    // compare
    auto* compare = app.add_subcommand(
        "compare",
        "FOTA vs KM across all three distance metrics on one scenario");
    std::string compare_frames, compare_gt;
    int compare_seeds = 1;
    double compare_match_dist = 2.0;
    std::string compare_format = "table";
    compare->add_option("frames", compare_frames, "Input <name>.frames.jsonl")
        ->required();
    compare->add_option("gt", compare_gt, "Input <name>.gt.jsonl")->required();
    compare->add_option(
        "--seeds", compare_seeds,
        "Aggregate over this many regenerated seeds (mean ± stddev)");
    compare->add_option("--match-dist", compare_match_dist,
                        "Ground-plane match distance, meters (default 2.0)");
    compare->add_option("--format", compare_format,
                        "Output format: table | json");

    // ingest
    auto* ingest = app.add_subcommand(
        "ingest",
        "Best-effort conversion of a nuScenes-like JSON box dump into "
        "frames/gt JSONL");
    std::string ingest_in, ingest_prefix;
    ingest->add_option("boxes", ingest_in, "Input JSON box dump")->required();
    ingest->add_option("out_prefix", ingest_prefix,
                       "Output prefix for the converted files")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        // Help requests exit 0; anything else is a usage/validation failure.
        return code == 0 ? 0 : 2;
    }

    const std::string command = join_command(argc, argv);
    try {
        if (gen->parsed()) {
            std::optional<std::uint64_t> seed;
            if (gen_seed_opt->count() > 0) seed = gen_seed;
            return cmd_generate(command, gen_config, gen_prefix, seed);
        }
        if (track->parsed()) {
            std::optional<std::string> config, assoc, metric;
            if (track_config_opt->count() > 0) config = track_config;
            if (track_assoc_opt->count() > 0) assoc = track_assoc;
            if (track_metric_opt->count() > 0) metric = track_metric;
            return cmd_track(command, track_frames, track_out, config, assoc,
                             metric);
        }
        if (eval->parsed()) {
            std::optional<std::string> report;
            if (eval_report_opt->count() > 0) report = eval_report;
            return cmd_eval(command, eval_gt, eval_results, eval_match_dist,
                            report, format_from_string(eval_format));
        }
        if (solve->parsed()) {
            return cmd_solve(command, solve_problem, solve_out, solve_min_mass);
        }
        if (loss->parsed()) {
            std::optional<std::string> out;
            if (loss_out_opt->count() > 0) out = loss_out;
            return cmd_loss(command, loss_doc, out,
                            format_from_string(loss_format));
        }
        if (compare->parsed()) {
            return cmd_compare(command, compare_frames, compare_gt,
                               compare_seeds, compare_match_dist,
                               format_from_string(compare_format));
        }
        if (ingest->parsed()) {
            return cmd_ingest(command, ingest_in, ingest_prefix);
        }
    } catch (const std::domain_error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const Json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
