#include "joaicl/cache.hpp"

#include <chrono>
#include <fstream>
#include <unistd.h>

#include "joaicl/errors.hpp"
#include "joaicl/sha256.hpp"

namespace joaicl {

namespace {

std::string now_iso_utc() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool is_hex_key(const std::string& key) {
    if (key.size() != 64) return false;
    for (char c : key)
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    return true;
}

} // namespace

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path ResponseCache::entry_path(const std::string& key) const {
    return dir_ / (key + ".json");
}

std::optional<nlohmann::json> ResponseCache::get(const std::string& key) {
    std::lock_guard<std::mutex> lock(mutex_);
    std::ifstream in(entry_path(key), std::ios::binary);
    if (!in) {
        ++misses_;
        return std::nullopt;
    }
    nlohmann::json entry;
    try {
        in >> entry;
    } catch (const nlohmann::json::exception&) {
        ++misses_; // treat a corrupt entry as absent
        return std::nullopt;
    }
    ++hits_;
    return entry.contains("value") ? entry["value"] : entry;
}

void ResponseCache::put(const std::string& key, const nlohmann::json& value) {
    std::lock_guard<std::mutex> lock(mutex_);
    nlohmann::json entry;
    entry["key"] = key;
    entry["created_at"] = now_iso_utc();
    entry["value"] = value;

    std::filesystem::path tmp =
        dir_ / ("tmp." + std::to_string(::getpid()) + "." + std::to_string(tmp_counter_++));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cache: cannot write " + tmp.string());
        out << entry.dump();
        out.flush();
        if (!out) throw Error("cache: write failed " + tmp.string());
    }
    std::filesystem::rename(tmp, entry_path(key));

    std::ofstream index(dir_ / "index.jsonl", std::ios::binary | std::ios::app);
    nlohmann::json line;
    line["key"] = key;
    line["created_at"] = entry["created_at"];
    index << line.dump() << '\n';
}

std::size_t ResponseCache::entry_count() const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::size_t n = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir_)) {
        if (e.is_regular_file() && is_hex_key(e.path().stem().string()) &&
            e.path().extension() == ".json")
            ++n;
    }
    return n;
}

std::uint64_t ResponseCache::total_bytes() const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::uint64_t bytes = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir_)) {
        if (e.is_regular_file()) bytes += e.file_size();
    }
    return bytes;
}

void ResponseCache::clear() {
    std::lock_guard<std::mutex> lock(mutex_);
    for (const auto& e : std::filesystem::directory_iterator(dir_)) {
        if (e.is_regular_file()) std::filesystem::remove(e.path());
    }
    hits_ = 0;
    misses_ = 0;
}

std::string ResponseCache::segment_key(const std::string& agent_id, const std::string& model,
                                       const std::string& locale, int k_shot,
                                       const std::string& issue_text, const std::string& kind,
                                       const std::string& segment_text) {
    return sha256_hex_fields(
        {agent_id, model, locale, std::to_string(k_shot), issue_text, kind, segment_text});
}

std::string ResponseCache::request_key(const nlohmann::json& payload) {
    return sha256_hex(payload.dump());
}

} // namespace joaicl
