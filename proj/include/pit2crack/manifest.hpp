#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pit2crack/errors.hpp"
#include "pit2crack/rng.hpp"

namespace p2c {

constexpr const char* kToolName = "pit2crack";
constexpr const char* kToolVersion = "0.1.0";

/// FNV-1a 64-bit content digest, reported as 16 hex digits. Used to make
/// run outputs comparable across reruns; not a cryptographic hash.
inline std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001B3ull;
    }
    return h;
}

inline std::string fnv1a64_hex(std::span<const std::uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(bytes);
    std::string out(16, '0');
    for (int k = 15; k >= 0; --k) {
        out[k] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

inline std::string fnv1a64_hex(std::string_view text) {
    return fnv1a64_hex(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

inline std::string digest_file(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    return fnv1a64_hex(std::span<const std::uint8_t>(bytes));
}

/// Record of one CLI run: resolved configuration, seeds, and digests of
/// every input and output file. The timestamp and wall time are the only
/// fields allowed to differ between identical reruns.
struct RunManifest {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    std::vector<std::uint64_t> seeds;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, digest
    std::vector<std::pair<std::string, std::string>> outputs; // path, digest
    double wall_time_s = 0.0;

    void add_input(const std::string& path) { inputs.emplace_back(path, digest_file(path)); }
    void add_output(const std::string& path) { outputs.emplace_back(path, digest_file(path)); }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["tool"] = kToolName;
        j["version"] = kToolVersion;
        j["command"] = command;
        j["config"] = config;
        j["seeds"] = seeds;
        j["rng"] = {{"algorithm", SplitMix64::kAlgorithm}, {"version", SplitMix64::kVersion}};
        j["inputs"] = nlohmann::json::array();
        for (const auto& [path, digest] : inputs)
            j["inputs"].push_back({{"path", path}, {"fnv1a64", digest}});
        j["outputs"] = nlohmann::json::array();
        for (const auto& [path, digest] : outputs)
            j["outputs"].push_back({{"path", path}, {"fnv1a64", digest}});
        j["digest_algorithm"] = "fnv1a64";
        j["wall_time_s"] = wall_time_s;
        j["timestamp_utc"] = timestamp_utc();
        return j;
    }

    static std::string timestamp_utc() {
        const std::time_t now = std::time(nullptr);
        std::tm tm{};
        gmtime_r(&now, &tm);
        char buf[32];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }
};

} // namespace p2c
