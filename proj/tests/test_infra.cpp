#include <doctest.h>

#include "joaicl/cache.hpp"
#include "joaicl/sha256.hpp"
#include "joaicl/utf8.hpp"
#include "support/helpers.hpp"

using namespace joaicl;

TEST_SUITE("utf8") {
    TEST_CASE("length counts code points") {
        CHECK(utf8::length("") == 0);
        CHECK(utf8::length("abc") == 3);
        CHECK(utf8::length("한겨레") == 3);
        CHECK(utf8::length("a한b") == 3);
        CHECK(utf8::length("“x”") == 3);
    }

    TEST_CASE("substr by code points") {
        std::string s = "ab한글cd";
        CHECK(utf8::substr(s, 0, 2) == "ab");
        CHECK(utf8::substr(s, 2, 4) == "한글");
        CHECK(utf8::substr(s, 4, 6) == "cd");
        CHECK(utf8::substr(s, 0, 6) == s);
        CHECK(utf8::substr(s, 5, 99) == "d");
    }

    TEST_CASE("non_space_count") {
        CHECK(utf8::non_space_count(" a b ") == 2);
        CHECK(utf8::non_space_count("　한 ") == 1);
        CHECK(utf8::non_space_count("") == 0);
    }

    TEST_CASE("ascii_lower leaves multibyte intact") {
        CHECK(utf8::ascii_lower("AbC한") == "abc한");
    }
}

TEST_SUITE("sha256") {
    TEST_CASE("known vectors") {
        CHECK(sha256_hex("") ==
              "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
        CHECK(sha256_hex("abc") ==
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
              "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
    }

    TEST_CASE("multi-block input") {
        std::string big(1000, 'a');
        Sha256 h;
        h.update(big);
        auto d = h.digest();
        CHECK(d.size() == 32);
        CHECK(sha256_hex(big) != sha256_hex(big + "a"));
    }

    TEST_CASE("field tuples avoid concatenation collisions") {
        CHECK(sha256_hex_fields({"ab", "c"}) != sha256_hex_fields({"a", "bc"}));
        CHECK(sha256_hex_fields({"a", "b"}) == sha256_hex_fields({"a", "b"}));
    }
}

TEST_SUITE("cache") {
    TEST_CASE("miss then hit") {
        test::TempDir dir("cache");
        ResponseCache cache(dir.path());
        CHECK_FALSE(cache.get("0000").has_value());
        CHECK(cache.misses() == 1);
        nlohmann::json v = {{"raw", "x"}, {"label", "neutral"}};
        std::string key = ResponseCache::segment_key("a", "m", "ko", 0, "issue", "lead", "text");
        cache.put(key, v);
        auto hit = cache.get(key);
        REQUIRE(hit.has_value());
        CHECK((*hit)["label"] == "neutral");
        CHECK(cache.hits() == 1);
        CHECK(cache.entry_count() == 1);
        CHECK(cache.total_bytes() > 0);
    }

    TEST_CASE("segment key is stable and sensitive to every field") {
        std::string base = ResponseCache::segment_key("a", "m", "ko", 0, "i", "lead", "t");
        CHECK(base == ResponseCache::segment_key("a", "m", "ko", 0, "i", "lead", "t"));
        CHECK(base.size() == 64);
        CHECK(base != ResponseCache::segment_key("b", "m", "ko", 0, "i", "lead", "t"));
        CHECK(base != ResponseCache::segment_key("a", "n", "ko", 0, "i", "lead", "t"));
        CHECK(base != ResponseCache::segment_key("a", "m", "en", 0, "i", "lead", "t"));
        CHECK(base != ResponseCache::segment_key("a", "m", "ko", 6, "i", "lead", "t"));
        CHECK(base != ResponseCache::segment_key("a", "m", "ko", 0, "j", "lead", "t"));
        CHECK(base != ResponseCache::segment_key("a", "m", "ko", 0, "i", "headline", "t"));
        CHECK(base != ResponseCache::segment_key("a", "m", "ko", 0, "i", "lead", "u"));
    }

    TEST_CASE("clear empties the directory") {
        test::TempDir dir("cache_clear");
        ResponseCache cache(dir.path());
        cache.put(std::string(64, '0'), nlohmann::json{{"raw", 1}});
        CHECK(cache.entry_count() == 1);
        cache.clear();
        CHECK(cache.entry_count() == 0);
    }

    TEST_CASE("index is append-only") {
        test::TempDir dir("cache_index");
        ResponseCache cache(dir.path());
        cache.put(std::string(64, 'a'), nlohmann::json{{"v", 1}});
        cache.put(std::string(64, 'b'), nlohmann::json{{"v", 2}});
        std::string index = test::read_file(dir.path() / "index.jsonl");
        CHECK(std::count(index.begin(), index.end(), '\n') == 2);
    }
}
