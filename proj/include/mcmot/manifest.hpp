// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//
// Run manifests: config snapshot, SHA-256 digests of inputs and outputs and
// per-stage wall-clock timings, written next to result files so any run can
// be verified by recomputing the digests. Timings live only here; result
// files stay byte-reproducible.

#pragma once

#include <mcmot/serialization.hpp>

#include <string>
#include <utility>
#include <vector>

namespace mcmot {

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// Digest of a file's contents; throws std::runtime_error on I/O failure.
std::string sha256_file(const std::string& path);

struct RunManifest {
    std::string tool_version;
    std::string command;
    Json config;  // full effective configuration after flag overrides
    std::vector<std::pair<std::string, std::string>> inputs;   // path -> digest
    std::vector<std::pair<std::string, std::string>> outputs;  // path -> digest
    std::vector<std::pair<std::string, double>> timings_sec;   // stage -> wall s
};

Json to_json(const RunManifest& manifest);

void write_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace mcmot
