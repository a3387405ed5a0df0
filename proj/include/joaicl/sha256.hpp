#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace joaicl {

// Minimal SHA-256, used for cache keys and prompt content hashes. Keys must
// be stable across platforms and runs, which rules out std::hash.
class Sha256 {
public:
    Sha256();
    void update(const void* data, std::size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }
    std::array<std::uint8_t, 32> digest();

private:
    void process_block(const std::uint8_t* block);

    std::array<std::uint32_t, 8> state_;
    std::array<std::uint8_t, 64> buffer_;
    std::uint64_t total_len_ = 0;
    std::size_t buffer_len_ = 0;
};

std::string sha256_hex(std::string_view data);

// Collision-free key over an ordered field tuple: every field is
// length-prefixed before hashing so no concatenation ambiguity exists.
std::string sha256_hex_fields(const std::vector<std::string>& fields);

} // namespace joaicl
