#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace joaicl {

// Disk cache for remote responses: one JSON file per key plus an append-only
// index. Writes go through a temp file and an atomic rename, so a crashed
// run never leaves a half-written entry behind.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir);

    std::optional<nlohmann::json> get(const std::string& key);
    void put(const std::string& key, const nlohmann::json& value);

    std::uint64_t hits() const { return hits_; }
    std::uint64_t misses() const { return misses_; }
    std::size_t entry_count() const;
    std::uint64_t total_bytes() const;
    void clear();
    const std::filesystem::path& dir() const { return dir_; }

    // 256-bit hex key over the fields that define a segment prediction.
    static std::string segment_key(const std::string& agent_id, const std::string& model,
                                   const std::string& locale, int k_shot,
                                   const std::string& issue_text, const std::string& kind,
                                   const std::string& segment_text);

    // Generic key for a full request payload (chat completions, embeddings).
    static std::string request_key(const nlohmann::json& payload);

private:
    std::filesystem::path entry_path(const std::string& key) const;

    std::filesystem::path dir_;
    mutable std::mutex mutex_;
    std::uint64_t hits_ = 0;
    std::uint64_t misses_ = 0;
    std::uint64_t tmp_counter_ = 0;
};

} // namespace joaicl
