#include "joaicl/llm.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "joaicl/errors.hpp"

namespace joaicl {

nlohmann::ordered_json chat_request_to_wire(const ChatRequest& req) {
    nlohmann::ordered_json j;
    j["model"] = req.model;
    nlohmann::ordered_json msgs = nlohmann::ordered_json::array();
    for (const ChatMessage& m : req.messages) {
        nlohmann::ordered_json jm;
        jm["role"] = m.role;
        jm["content"] = m.content;
        msgs.push_back(jm);
    }
    j["messages"] = msgs;
    j["temperature"] = req.temperature;
    j["max_tokens"] = req.max_tokens;
    if (req.seed) j["seed"] = *req.seed;
    return j;
}

std::string chat_content_from_wire(const nlohmann::json& response) {
    if (!response.contains("choices") || !response["choices"].is_array() ||
        response["choices"].empty())
        throw UnparseableLabel("chat response has no choices");
    const auto& choice = response["choices"][0];
    if (!choice.contains("message") || !choice["message"].contains("content") ||
        !choice["message"]["content"].is_string())
        throw UnparseableLabel("chat response choice has no message content");
    return choice["message"]["content"].get<std::string>();
}

ChatRequest chat_request_from_bundle(const PromptBundle& bundle, const std::string& model,
                                     double temperature, int max_tokens,
                                     std::optional<std::uint64_t> seed) {
    ChatRequest req;
    req.model = model;
    req.messages.push_back({"system", bundle.system});
    for (const auto& [user, assistant] : bundle.few_shot_turns) {
        req.messages.push_back({"user", user});
        req.messages.push_back({"assistant", assistant});
    }
    req.messages.push_back({"user", bundle.user});
    req.temperature = temperature;
    req.max_tokens = max_tokens;
    req.seed = seed;
    return req;
}

namespace {

struct SplitUrl {
    std::string base; // scheme://host:port
    std::string path; // /v1/...
};

SplitUrl split_url(const std::string& endpoint) {
    std::size_t scheme = endpoint.find("://");
    if (scheme == std::string::npos)
        throw ValidationError("endpoint must carry a scheme: " + endpoint);
    std::size_t path = endpoint.find('/', scheme + 3);
    if (path == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path), endpoint.substr(path)};
}

} // namespace

nlohmann::json http_post_json(const std::string& endpoint, const nlohmann::json& body,
                              const HttpOptions& options, const char* api_key_env) {
    SplitUrl url = split_url(endpoint);
    std::string payload = body.dump();
    std::string last_error;

    for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
        if (attempt > 0) {
            int delay = options.backoff_base_ms << (attempt - 1);
            std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }
        httplib::Client client(url.base);
        client.set_connection_timeout(0, options.timeout_ms * 1000);
        client.set_read_timeout(options.timeout_ms / 1000, (options.timeout_ms % 1000) * 1000);
        httplib::Headers headers;
        if (api_key_env) {
            if (const char* key = std::getenv(api_key_env); key && *key)
                headers.emplace("Authorization", std::string("Bearer ") + key);
        }
        httplib::Result res = client.Post(url.path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status >= 400)
            throw NetworkError("POST " + endpoint + " failed: HTTP " +
                               std::to_string(res->status) + " " + res->body.substr(0, 200));
        try {
            return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            throw UnparseableLabel("malformed JSON from " + endpoint + ": " + e.what());
        }
    }
    throw NetworkError("POST " + endpoint + " failed after " +
                       std::to_string(options.max_retries + 1) + " attempts (" + last_error +
                       ")");
}

HttpLlmClient::HttpLlmClient(std::string endpoint, HttpOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {}

std::string HttpLlmClient::complete(const ChatRequest& request) {
    nlohmann::json response =
        http_post_json(endpoint_, chat_request_to_wire(request), options_, "JOAICL_LLM_API_KEY");
    return chat_content_from_wire(response);
}

MajorityMockLlm::MajorityMockLlm(const LocaleBundle& locale) : locale_(locale) {}

std::string MajorityMockLlm::complete(const ChatRequest& request) {
    const std::string* user = nullptr;
    for (const ChatMessage& m : request.messages)
        if (m.role == "user") user = &m.content;
    if (!user) return locale_.word_for(StanceLabel::Neutral);

    std::array<std::size_t, 3> counts{};
    for (StanceLabel label : kAllStances) {
        std::string needle = "=\"" + locale_.word_for(label) + "\"";
        std::size_t pos = user->find(needle);
        while (pos != std::string::npos) {
            ++counts[static_cast<std::size_t>(label)];
            pos = user->find(needle, pos + needle.size());
        }
    }
    std::size_t best = 0;
    bool tie = false;
    for (std::size_t i = 1; i < 3; ++i) {
        if (counts[i] > counts[best]) {
            best = i;
            tie = false;
        } else if (counts[i] == counts[best]) {
            tie = true;
        }
    }
    if (counts[best] == 0 || tie) return locale_.word_for(StanceLabel::Neutral);
    return locale_.word_for(static_cast<StanceLabel>(best));
}

} // namespace joaicl
