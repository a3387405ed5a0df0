#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>

#include "joaicl/corpus.hpp"

namespace joaicl::test {

inline std::filesystem::path source_dir() {
    return std::filesystem::path(JOAICL_SOURCE_DIR);
}

inline std::filesystem::path fixture_corpus_path() {
    return source_dir() / "fixtures" / "fixture_corpus.jsonl";
}

inline std::filesystem::path goldens_dir() {
    return source_dir() / "goldens";
}

// Fresh directory under the build tree's temp area, unique per call.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("joaicl_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
}

} // namespace joaicl::test
