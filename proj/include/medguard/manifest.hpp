#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "medguard/crypto/sha256.hpp"

namespace medguard {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Write via a sibling temp file and rename, so outputs are never torn.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
        out << content;
        if (!out) throw std::runtime_error("short write to '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

inline std::string sha256_file_hex(const std::string& path) { return sha256_hex(read_file(path)); }

// Reproducibility record: re-running a command with identical inputs and
// seed must reproduce identical output digests.
class ManifestBuilder {
public:
    explicit ManifestBuilder(std::string command)
        : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

    void set_seed(std::uint64_t seed) { seed_ = seed; }
    void set_config(nlohmann::json config) { config_ = std::move(config); }
    void add_input(const std::string& path) { inputs_[path] = sha256_file_hex(path); }
    void add_output(const std::string& path) { outputs_[path] = sha256_file_hex(path); }

    nlohmann::json build() const {
        const auto elapsed =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_);
        return {{"command", command_}, {"seed", seed_},     {"config", config_},
                {"inputs", inputs_},   {"outputs", outputs_}, {"duration_ms", elapsed.count()}};
    }

    void write(const std::string& path) const { write_file_atomic(path, build().dump(2) + "\n"); }

private:
    std::string command_;
    std::uint64_t seed_ = 0;
    nlohmann::json config_ = nlohmann::json::object();
    std::map<std::string, std::string> inputs_;
    std::map<std::string, std::string> outputs_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace medguard
