#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "joaicl/prompter.hpp"

namespace joaicl {

struct ChatMessage {
    std::string role;
    std::string content;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 1.0;
    int max_tokens = 100;
    std::optional<std::uint64_t> seed;
};

// Wire shape: { "model", "messages": [{"role","content"}...], "temperature",
// "max_tokens", "seed"? } -> { "choices": [ { "message": { "content" } } ] }.
nlohmann::ordered_json chat_request_to_wire(const ChatRequest& req);
std::string chat_content_from_wire(const nlohmann::json& response);

ChatRequest chat_request_from_bundle(const PromptBundle& bundle, const std::string& model,
                                     double temperature, int max_tokens,
                                     std::optional<std::uint64_t> seed);

struct HttpOptions {
    int timeout_ms = 10000;
    int max_retries = 3;
    int backoff_base_ms = 250; // doubles per attempt: 250/500/1000
};

// POSTs JSON and returns the parsed JSON response. Retries transport errors
// and 5xx with exponential backoff, then throws NetworkError; malformed
// response JSON throws UnparseableLabel. `api_key_env` names the env var
// whose value, when set, is sent as a bearer token.
nlohmann::json http_post_json(const std::string& endpoint, const nlohmann::json& body,
                              const HttpOptions& options, const char* api_key_env);

class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
    virtual std::string id() const = 0;
};

class HttpLlmClient : public LlmClient {
public:
    HttpLlmClient(std::string endpoint, HttpOptions options = {});
    std::string complete(const ChatRequest& request) override;
    std::string id() const override { return "http:" + endpoint_; }

private:
    std::string endpoint_;
    HttpOptions options_;
};

// Offline stand-in: answers with the majority stance among the tag
// attributes of the final user message, Neutral on ties or when no tags are
// present. Pure function of the request, so runs replay byte-identically.
class MajorityMockLlm : public LlmClient {
public:
    explicit MajorityMockLlm(const LocaleBundle& locale);
    std::string complete(const ChatRequest& request) override;
    std::string id() const override { return "mock"; }

private:
    LocaleBundle locale_;
};

} // namespace joaicl
