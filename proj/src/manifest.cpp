// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0

#include <mcmot/manifest.hpp>

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace mcmot {

namespace {

struct CtxDeleter {
    void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

std::string finish_hex(EVP_MD_CTX* ctx) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx, digest.data(), &len) != 1) {
        throw std::runtime_error("sha256: digest finalization failed");
    }
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        char buf[3];
        std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

std::unique_ptr<EVP_MD_CTX, CtxDeleter> make_sha256_ctx() {
    std::unique_ptr<EVP_MD_CTX, CtxDeleter> ctx(EVP_MD_CTX_new());
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256: context init failed");
    }
    return ctx;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
    auto ctx = make_sha256_ctx();
    if (EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1) {
        throw std::runtime_error("sha256: update failed");
    }
    return finish_hex(ctx.get());
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("sha256: cannot open " + path);
    auto ctx = make_sha256_ctx();
    std::array<char, 1 << 16> buf;
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const std::streamsize got = in.gcount();
        if (got > 0 &&
            EVP_DigestUpdate(ctx.get(), buf.data(),
                             static_cast<std::size_t>(got)) != 1) {
            throw std::runtime_error("sha256: update failed");
        }
    }
    if (in.bad()) throw std::runtime_error("sha256: read error on " + path);
    return finish_hex(ctx.get());
}

Json to_json(const RunManifest& manifest) {
    Json j;
    j["tool_version"] = manifest.tool_version;
    j["command"] = manifest.command;
    j["config"] = manifest.config;
    Json inputs = Json::array();
    for (const auto& [path, digest] : manifest.inputs) {
        Json e;
        e["path"] = path;
        e["sha256"] = digest;
        inputs.push_back(std::move(e));
    }
    j["inputs"] = std::move(inputs);
    Json outputs = Json::array();
    for (const auto& [path, digest] : manifest.outputs) {
        Json e;
        e["path"] = path;
        e["sha256"] = digest;
        outputs.push_back(std::move(e));
    }
    j["outputs"] = std::move(outputs);
    Json timings = Json::array();
    for (const auto& [stage, seconds] : manifest.timings_sec) {
        Json e;
        e["stage"] = stage;
        e["seconds"] = seconds;
        timings.push_back(std::move(e));
    }
    j["timings_sec"] = std::move(timings);
    return j;
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << to_json(manifest).dump(2) << '\n';
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace mcmot
