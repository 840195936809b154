// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//
// JSON wire format for every persisted type. Keys are emitted in fixed
// (insertion) order and doubles round-trip exactly, so serializing the same
// value twice yields identical bytes; files produced under a fixed seed are
// byte-reproducible.

#pragma once

#include <mcmot/metrics.hpp>
#include <mcmot/model.hpp>
#include <mcmot/scenario.hpp>
#include <mcmot/setloss.hpp>
#include <mcmot/tracker.hpp>

#include <json.hpp>

#include <string>

namespace mcmot {

using Json = nlohmann::ordered_json;

Json to_json(const Box3D& box);
Box3D box3d_from_json(const Json& j);

Json to_json(const Detection& det);
Detection detection_from_json(const Json& j);

Json to_json(const CameraModel& cam);
CameraModel camera_from_json(const Json& j);

Json to_json(const FrameBundle& frame);
FrameBundle frame_bundle_from_json(const Json& j);

Json to_json(const ScenarioConfig& config);
ScenarioConfig scenario_config_from_json(const Json& j);

Json to_json(const GtObjectState& state);
GtObjectState gt_object_from_json(const Json& j);

Json to_json(const GtFrame& frame);
GtFrame gt_frame_from_json(const Json& j);

Json to_json(const TrackOutput& out);
TrackOutput track_output_from_json(const Json& j);

Json to_json(const Assignment& assignment);
Assignment assignment_from_json(const Json& j);

/// Wire names for the tracker enums: "mahalanobis" | "giou2d" | "giou3d"
/// and "fota" | "km". The *_from_string parsers throw std::invalid_argument
/// listing the accepted values.
std::string to_string(DistanceMetric metric);
DistanceMetric distance_metric_from_string(const std::string& name);
std::string to_string(AssociationMethod method);
AssociationMethod association_from_string(const std::string& name);

Json to_json(const TrackerConfig& config);
TrackerConfig tracker_config_from_json(const Json& j);

Json to_json(const FrameResult& result);
FrameResult frame_result_from_json(const Json& j);

Json to_json(const MetricReport& report);

Json to_json(const TransportProblem& problem);
TransportProblem transport_problem_from_json(const Json& j);

Json to_json(const TransportPlan& plan);

Json to_json(const GroundTruthTrack& gt);
GroundTruthTrack ground_truth_track_from_json(const Json& j);

Json to_json(const QueryPrediction& pred);
QueryPrediction query_prediction_from_json(const Json& j);

LossWeights loss_weights_from_json(const Json& j);

/// Writes a JSON Lines artifact: line 1 is the header {schema_version,
/// kind, config}, each further line one payload object. Throws
/// std::runtime_error on I/O failure. All scenario and tracker result files
/// share this layout.
void write_jsonl(const std::string& path, const std::string& kind,
                 const Json& config, const std::vector<Json>& payloads);

/// Reads a file written by write_jsonl, checking schema_version and kind.
/// Every failure throws std::runtime_error naming the file and 1-based
/// line. The header config is returned through config_out.
std::vector<Json> read_jsonl(const std::string& path, const std::string& kind,
                             Json* config_out);

/// Structural check of `doc` against a schema document supporting the
/// subset {type, properties, required, items, enum} of JSON Schema used by
/// the schemas shipped under docs/schemas/. Returns an empty string when
/// valid, else a human-readable path + reason for the first violation.
std::string schema_check(const Json& doc, const Json& schema);

}  // namespace mcmot
