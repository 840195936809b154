// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//

#include <mcmot/serialization.hpp>

#include <fstream>
#include <stdexcept>

namespace mcmot {

namespace {

Json vec3_to_json(const Eigen::Vector3d& v) {
    return Json::array({v.x(), v.y(), v.z()});
}

Eigen::Vector3d vec3_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 3) {
        throw std::invalid_argument("expected a 3-element array");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) {
        throw std::invalid_argument("expected a non-empty 2D array");
    }
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != cols) {
            throw std::invalid_argument("ragged 2D array");
        }
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    }
    return m;
}

Json vector_to_json(const Eigen::VectorXd& v) {
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

Eigen::VectorXd vector_from_json(const Json& j) {
    if (!j.is_array()) throw std::invalid_argument("expected an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j[i].get<double>();
    return v;
}

}  // namespace

Json to_json(const Box3D& box) {
    Json j;
    j["center"] = vec3_to_json(box.center);
    j["dims"] = vec3_to_json(box.dims);
    j["yaw"] = box.yaw;
    return j;
}

Box3D box3d_from_json(const Json& j) {
    Box3D box;
    box.center = vec3_from_json(j.at("center"));
    box.dims = vec3_from_json(j.at("dims"));
    box.yaw = j.at("yaw").get<double>();
    return box;
}

Json to_json(const Detection& det) {
    Json j;
    j["box"] = to_json(det.box);
    j["class_id"] = det.class_id;
    j["score"] = det.score;
    j["camera_id"] = det.camera_id;
    j["frame_index"] = det.frame_index;
    j["velocity_hint"] =
        det.velocity_hint ? vec3_to_json(*det.velocity_hint) : Json(nullptr);
    j["gt_id"] = det.gt_id ? Json(*det.gt_id) : Json(nullptr);
    return j;
}

Detection detection_from_json(const Json& j) {
    Detection det;
    det.box = box3d_from_json(j.at("box"));
    det.class_id = j.at("class_id").get<int>();
    det.score = j.at("score").get<double>();
    det.camera_id = j.at("camera_id").get<int>();
    det.frame_index = j.at("frame_index").get<int>();
    if (!j.at("velocity_hint").is_null()) {
        det.velocity_hint = vec3_from_json(j.at("velocity_hint"));
    }
    if (!j.at("gt_id").is_null()) {
        det.gt_id = j.at("gt_id").get<std::int64_t>();
    }
    return det;
}

Json to_json(const CameraModel& cam) {
    Json j;
    j["camera_id"] = cam.camera_id;
    Json rot = Json::array();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) rot.push_back(cam.rotation(r, c));
    j["rotation"] = std::move(rot);
    j["translation"] = vec3_to_json(cam.translation);
    j["fx"] = cam.fx;
    j["fy"] = cam.fy;
    j["cx"] = cam.cx;
    j["cy"] = cam.cy;
    j["width"] = cam.width;
    j["height"] = cam.height;
    j["max_range"] = cam.max_range;
    return j;
}

CameraModel camera_from_json(const Json& j) {
    CameraModel cam;
    cam.camera_id = j.at("camera_id").get<int>();
    const Json& rot = j.at("rotation");
    if (!rot.is_array() || rot.size() != 9) {
        throw std::invalid_argument("rotation must be a 9-element array");
    }
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) cam.rotation(r, c) = rot[3 * r + c].get<double>();
    cam.translation = vec3_from_json(j.at("translation"));
    cam.fx = j.at("fx").get<double>();
    cam.fy = j.at("fy").get<double>();
    cam.cx = j.at("cx").get<double>();
    cam.cy = j.at("cy").get<double>();
    cam.width = j.at("width").get<int>();
    cam.height = j.at("height").get<int>();
    cam.max_range = j.at("max_range").get<double>();
    return cam;
}

Json to_json(const FrameBundle& frame) {
    Json j;
    j["frame_index"] = frame.frame_index;
    j["timestamp"] = frame.timestamp;
    Json rig = Json::array();
    for (const CameraModel& cam : frame.rig) rig.push_back(to_json(cam));
    j["rig"] = std::move(rig);
    Json dets = Json::array();
    for (const Detection& det : frame.detections) dets.push_back(to_json(det));
    j["detections"] = std::move(dets);
    return j;
}

FrameBundle frame_bundle_from_json(const Json& j) {
    FrameBundle frame;
    frame.frame_index = j.at("frame_index").get<int>();
    frame.timestamp = j.at("timestamp").get<double>();
    for (const Json& c : j.at("rig")) frame.rig.push_back(camera_from_json(c));
    for (const Json& d : j.at("detections")) {
        frame.detections.push_back(detection_from_json(d));
    }
    return frame;
}

Json to_json(const ScenarioConfig& config) {
    Json j;
    j["seed"] = config.seed;
    j["num_cameras"] = config.num_cameras;
    j["fov_deg"] = config.fov_deg;
    j["yaw_offset_deg"] = config.yaw_offset_deg;
    j["max_range"] = config.max_range;
    j["num_objects"] = config.num_objects;
    j["num_frames"] = config.num_frames;
    j["dt"] = config.dt;
    j["object_speed_min"] = config.object_speed_min;
    j["object_speed_max"] = config.object_speed_max;
    j["noise_pos"] = config.noise_pos;
    j["noise_dims"] = config.noise_dims;
    j["noise_yaw"] = config.noise_yaw;
    j["miss_rate"] = config.miss_rate;
    j["clutter_rate"] = config.clutter_rate;
    j["ego_speed"] = config.ego_speed;
    return j;
}

ScenarioConfig scenario_config_from_json(const Json& j) {
    ScenarioConfig config;
    config.seed = j.at("seed").get<std::uint64_t>();
    config.num_cameras = j.at("num_cameras").get<int>();
    config.fov_deg = j.at("fov_deg").get<std::vector<double>>();
    config.yaw_offset_deg = j.at("yaw_offset_deg").get<std::vector<double>>();
    config.max_range = j.at("max_range").get<double>();
    config.num_objects = j.at("num_objects").get<int>();
    config.num_frames = j.at("num_frames").get<int>();
    config.dt = j.at("dt").get<double>();
    config.object_speed_min = j.at("object_speed_min").get<double>();
    config.object_speed_max = j.at("object_speed_max").get<double>();
    config.noise_pos = j.at("noise_pos").get<double>();
    config.noise_dims = j.at("noise_dims").get<double>();
    config.noise_yaw = j.at("noise_yaw").get<double>();
    config.miss_rate = j.at("miss_rate").get<double>();
    config.clutter_rate = j.at("clutter_rate").get<double>();
    config.ego_speed = j.at("ego_speed").get<double>();
    return config;
}

Json to_json(const GtObjectState& state) {
    Json j;
    j["gt_id"] = state.gt_id;
    j["class_id"] = state.class_id;
    j["box"] = to_json(state.box);
    j["velocity"] = vec3_to_json(state.velocity);
    return j;
}

GtObjectState gt_object_from_json(const Json& j) {
    GtObjectState state;
    state.gt_id = j.at("gt_id").get<std::int64_t>();
    state.class_id = j.at("class_id").get<int>();
    state.box = box3d_from_json(j.at("box"));
    state.velocity = vec3_from_json(j.at("velocity"));
    return state;
}

Json to_json(const GtFrame& frame) {
    Json j;
    j["frame_index"] = frame.frame_index;
    j["timestamp"] = frame.timestamp;
    Json objs = Json::array();
    for (const GtObjectState& s : frame.objects) objs.push_back(to_json(s));
    j["objects"] = std::move(objs);
    return j;
}

GtFrame gt_frame_from_json(const Json& j) {
    GtFrame frame;
    frame.frame_index = j.at("frame_index").get<int>();
    frame.timestamp = j.at("timestamp").get<double>();
    for (const Json& o : j.at("objects")) {
        frame.objects.push_back(gt_object_from_json(o));
    }
    return frame;
}

Json to_json(const TrackOutput& out) {
    Json j;
    j["track_id"] = out.track_id;
    j["class_id"] = out.class_id;
    j["box"] = to_json(out.box);
    j["velocity"] = vec3_to_json(out.velocity);
    j["score"] = out.score;
    return j;
}

TrackOutput track_output_from_json(const Json& j) {
    TrackOutput out;
    out.track_id = j.at("track_id").get<int>();
    out.class_id = j.at("class_id").get<int>();
    out.box = box3d_from_json(j.at("box"));
    out.velocity = vec3_from_json(j.at("velocity"));
    out.score = j.at("score").get<double>();
    return out;
}

Json to_json(const Assignment& assignment) {
    Json j;
    j["detection_to_track"] = assignment.detection_to_track;
    j["track_to_detections"] = assignment.track_to_detections;
    return j;
}

Assignment assignment_from_json(const Json& j) {
    Assignment assignment;
    assignment.detection_to_track =
        j.at("detection_to_track").get<std::vector<int>>();
    assignment.track_to_detections =
        j.at("track_to_detections").get<std::vector<std::vector<int>>>();
    return assignment;
}

std::string to_string(DistanceMetric metric) {
    switch (metric) {
        case DistanceMetric::kMahalanobis: return "mahalanobis";
        case DistanceMetric::kGiou2D: return "giou2d";
        case DistanceMetric::kGiou3D: return "giou3d";
    }
    throw std::invalid_argument("unknown distance metric value");
}

DistanceMetric distance_metric_from_string(const std::string& name) {
    if (name == "mahalanobis") return DistanceMetric::kMahalanobis;
    if (name == "giou2d") return DistanceMetric::kGiou2D;
    if (name == "giou3d") return DistanceMetric::kGiou3D;
    throw std::invalid_argument(
        "unknown distance_metric '" + name +
        "' (expected mahalanobis, giou2d or giou3d)");
}

std::string to_string(AssociationMethod method) {
    switch (method) {
        case AssociationMethod::kFota: return "fota";
        case AssociationMethod::kKuhnMunkres: return "km";
    }
    throw std::invalid_argument("unknown association value");
}

AssociationMethod association_from_string(const std::string& name) {
    if (name == "fota") return AssociationMethod::kFota;
    if (name == "km") return AssociationMethod::kKuhnMunkres;
    throw std::invalid_argument("unknown association '" + name +
                                "' (expected fota or km)");
}

Json to_json(const TrackerConfig& config) {
    Json j;
    j["distance_metric"] = to_string(config.distance_metric);
    j["gate_threshold"] = config.gate_threshold;
    j["association"] = to_string(config.association);
    Json fota;
    fota["gamma"] = config.fota.gamma;
    fota["max_iters"] = config.fota.max_iters;
    fota["tol"] = config.fota.tol;
    fota["min_mass"] = config.fota.min_mass;
    j["fota"] = std::move(fota);
    Json life;
    life["confirm_hits"] = config.lifecycle.confirm_hits;
    life["max_misses"] = config.lifecycle.max_misses;
    life["rebirth_window_frames"] = config.lifecycle.rebirth_window_frames;
    j["lifecycle"] = std::move(life);
    Json kalman;
    kalman["process_noise"] = vector_to_json(config.kalman.process_noise);
    kalman["measurement_noise"] =
        vector_to_json(config.kalman.measurement_noise);
    kalman["initial_velocity_var"] = config.kalman.initial_velocity_var;
    j["kalman"] = std::move(kalman);
    return j;
}

TrackerConfig tracker_config_from_json(const Json& j) {
    TrackerConfig config;
    config.distance_metric =
        distance_metric_from_string(j.at("distance_metric").get<std::string>());
    config.gate_threshold = j.at("gate_threshold").get<double>();
    config.association =
        association_from_string(j.at("association").get<std::string>());
    const Json& fota = j.at("fota");
    config.fota.gamma = fota.at("gamma").get<double>();
    config.fota.max_iters = fota.at("max_iters").get<int>();
    config.fota.tol = fota.at("tol").get<double>();
    config.fota.min_mass = fota.at("min_mass").get<double>();
    const Json& life = j.at("lifecycle");
    config.lifecycle.confirm_hits = life.at("confirm_hits").get<int>();
    config.lifecycle.max_misses = life.at("max_misses").get<int>();
    config.lifecycle.rebirth_window_frames =
        life.at("rebirth_window_frames").get<int>();
    const Json& kalman = j.at("kalman");
    const Eigen::VectorXd process = vector_from_json(kalman.at("process_noise"));
    if (process.size() != config.kalman.process_noise.size()) {
        throw std::invalid_argument("kalman.process_noise must have " +
                                    std::to_string(config.kalman.process_noise.size()) +
                                    " entries");
    }
    config.kalman.process_noise = process;
    const Eigen::VectorXd meas =
        vector_from_json(kalman.at("measurement_noise"));
    if (meas.size() != config.kalman.measurement_noise.size()) {
        throw std::invalid_argument("kalman.measurement_noise must have " +
                                    std::to_string(config.kalman.measurement_noise.size()) +
                                    " entries");
    }
    config.kalman.measurement_noise = meas;
    config.kalman.initial_velocity_var =
        kalman.at("initial_velocity_var").get<double>();
    return config;
}

Json to_json(const FrameResult& result) {
    Json j;
    j["frame_index"] = result.frame_index;
    Json outs = Json::array();
    for (const TrackOutput& o : result.outputs) outs.push_back(to_json(o));
    j["outputs"] = std::move(outs);
    j["assignment"] = to_json(result.assignment);
    Json diag;
    diag["num_births"] = result.diagnostics.num_births;
    diag["num_deaths"] = result.diagnostics.num_deaths;
    diag["num_rebirths"] = result.diagnostics.num_rebirths;
    diag["solver_iterations"] = result.diagnostics.solver_iterations;
    diag["marginal_error"] = result.diagnostics.marginal_error;
    j["diagnostics"] = std::move(diag);
    return j;
}

FrameResult frame_result_from_json(const Json& j) {
    FrameResult result;
    result.frame_index = j.at("frame_index").get<int>();
    for (const Json& o : j.at("outputs")) {
        result.outputs.push_back(track_output_from_json(o));
    }
    result.assignment = assignment_from_json(j.at("assignment"));
    const Json& diag = j.at("diagnostics");
    result.diagnostics.num_births = diag.at("num_births").get<int>();
    result.diagnostics.num_deaths = diag.at("num_deaths").get<int>();
    result.diagnostics.num_rebirths = diag.at("num_rebirths").get<int>();
    result.diagnostics.solver_iterations = diag.at("solver_iterations").get<int>();
    result.diagnostics.marginal_error = diag.at("marginal_error").get<double>();
    return result;
}

Json to_json(const MetricReport& report) {
    Json j;
    j["amota"] = report.amota;
    j["amotp"] = report.amotp;
    j["motar"] = report.motar;
    j["mota"] = report.mota;
    j["motp"] = report.motp;
    j["recall"] = report.recall;
    j["mt"] = report.mt;
    j["ml"] = report.ml;
    j["ids"] = report.ids;
    j["frag"] = report.frag;
    j["fp"] = report.fp;
    j["fn"] = report.fn;
    j["gt_total"] = report.gt_total;
    j["fps"] = report.fps;
    Json per_class = Json::array();
    for (const ClassBreakdown& c : report.per_class) {
        Json cj;
        cj["class_id"] = c.class_id;
        cj["mota"] = c.mota;
        cj["ids"] = c.ids;
        cj["fp"] = c.fp;
        cj["fn"] = c.fn;
        cj["gt_total"] = c.gt_total;
        per_class.push_back(std::move(cj));
    }
    j["per_class"] = std::move(per_class);
    return j;
}

Json to_json(const TransportProblem& problem) {
    Json j;
    j["cost"] = matrix_to_json(problem.cost);
    j["p"] = vector_to_json(problem.p);
    j["q"] = vector_to_json(problem.q);
    j["s"] = problem.s;
    j["epsilon"] = problem.epsilon;
    j["gamma"] = problem.gamma;
    j["max_iters"] = problem.max_iters;
    j["tol"] = problem.tol;
    return j;
}

TransportProblem transport_problem_from_json(const Json& j) {
    TransportProblem problem;
    problem.cost = matrix_from_json(j.at("cost"));
    problem.p = vector_from_json(j.at("p"));
    problem.q = vector_from_json(j.at("q"));
    problem.s = j.contains("s") ? j.at("s").get<double>()
                                : default_s(problem.p, problem.q);
    problem.epsilon = j.value("epsilon", 0.0);
    problem.gamma = j.value("gamma", 0.1);
    problem.max_iters = j.value("max_iters", 50);
    problem.tol = j.value("tol", 1e-6);
    return problem;
}

Json to_json(const TransportPlan& plan) {
    Json j;
    j["plan"] = matrix_to_json(plan.plan);
    j["iterations_used"] = plan.iterations_used;
    j["marginal_error"] = plan.marginal_error;
    j["converged"] = plan.converged;
    return j;
}

Json to_json(const GroundTruthTrack& gt) {
    Json j;
    j["track_id"] = gt.track_id;
    j["class_id"] = gt.class_id;
    j["box_t"] = to_json(gt.box_t);
    j["visible_t"] = gt.visible_t;
    j["visible_prev"] = gt.visible_prev;
    return j;
}

GroundTruthTrack ground_truth_track_from_json(const Json& j) {
    GroundTruthTrack gt;
    gt.track_id = j.at("track_id").get<std::int64_t>();
    gt.class_id = j.at("class_id").get<int>();
    gt.box_t = box3d_from_json(j.at("box_t"));
    gt.visible_t = j.at("visible_t").get<bool>();
    gt.visible_prev = j.at("visible_prev").get<bool>();
    return gt;
}

Json to_json(const QueryPrediction& pred) {
    Json j;
    j["box"] = to_json(pred.box);
    j["class_probs"] = vector_to_json(pred.class_probs);
    j["is_track_query"] = pred.is_track_query;
    j["prev_track_id"] = pred.prev_track_id;
    return j;
}

QueryPrediction query_prediction_from_json(const Json& j) {
    QueryPrediction pred;
    pred.box = box3d_from_json(j.at("box"));
    pred.class_probs = vector_from_json(j.at("class_probs"));
    pred.is_track_query = j.value("is_track_query", false);
    pred.prev_track_id = j.value("prev_track_id", std::int64_t{-1});
    return pred;
}

LossWeights loss_weights_from_json(const Json& j) {
    LossWeights w;
    w.lambda_l1 = j.value("lambda_l1", 5.0);
    w.lambda_giou = j.value("lambda_giou", 2.0);
    w.scene_scale = j.value("scene_scale", 1.0);
    return w;
}

void write_jsonl(const std::string& path, const std::string& kind,
                 const Json& config, const std::vector<Json>& payloads) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    Json header;
    header["schema_version"] = 1;
    header["kind"] = kind;
    header["config"] = config;
    out << header.dump() << '\n';
    for (const Json& line : payloads) out << line.dump() << '\n';
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + path);
}

namespace {

[[noreturn]] void line_error(const std::string& path, std::size_t line_no,
                             const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::vector<Json> read_jsonl(const std::string& path, const std::string& kind,
                             Json* config_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) line_error(path, 1, "missing header line");
    Json header;
    try {
        header = Json::parse(line);
    } catch (const std::exception& e) {
        line_error(path, 1, e.what());
    }
    if (!header.is_object() || !header.contains("schema_version") ||
        !header.contains("kind") || !header.contains("config")) {
        line_error(path, 1,
                   "header must carry schema_version, kind and config");
    }
    if (header["schema_version"] != 1) {
        line_error(path, 1, "unsupported schema_version");
    }
    if (header["kind"] != kind) {
        line_error(path, 1, "expected kind '" + kind + "'");
    }
    *config_out = header["config"];
    std::vector<Json> lines;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) line_error(path, line_no, "empty line");
        try {
            lines.push_back(Json::parse(line));
        } catch (const std::exception& e) {
            line_error(path, line_no, e.what());
        }
    }
    return lines;
}

namespace {

std::string schema_check_impl(const Json& doc, const Json& schema,
                              const std::string& path) {
    if (schema.contains("type")) {
        const std::string want = schema.at("type").get<std::string>();
        bool ok = false;
        if (want == "object") ok = doc.is_object();
        else if (want == "array") ok = doc.is_array();
        else if (want == "string") ok = doc.is_string();
        else if (want == "number") ok = doc.is_number();
        else if (want == "integer") ok = doc.is_number_integer();
        else if (want == "boolean") ok = doc.is_boolean();
        else if (want == "null") ok = doc.is_null();
        if (!ok) return path + ": expected type " + want;
    }
    if (schema.contains("enum")) {
        bool found = false;
        for (const Json& candidate : schema.at("enum")) {
            if (doc == candidate) { found = true; break; }
        }
        if (!found) return path + ": value not in enum";
    }
    if (doc.is_object()) {
        if (schema.contains("required")) {
            for (const Json& key : schema.at("required")) {
                if (!doc.contains(key.get<std::string>())) {
                    return path + ": missing required key '" +
                           key.get<std::string>() + "'";
                }
            }
        }
        if (schema.contains("properties")) {
            for (const auto& [key, sub] : schema.at("properties").items()) {
                if (doc.contains(key)) {
                    const std::string err =
                        schema_check_impl(doc.at(key), sub, path + "/" + key);
                    if (!err.empty()) return err;
                }
            }
        }
    }
    if (doc.is_array() && schema.contains("items")) {
        const Json& items = schema.at("items");
        for (std::size_t i = 0; i < doc.size(); ++i) {
            const std::string err = schema_check_impl(
                doc[i], items, path + "/" + std::to_string(i));
            if (!err.empty()) return err;
        }
    }
    return "";
}

}  // namespace

std::string schema_check(const Json& doc, const Json& schema) {
    return schema_check_impl(doc, schema, "$");
}

}  // namespace mcmot
