#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "joaicl/cache.hpp"
#include "joaicl/llm.hpp"
#include "joaicl/prediction.hpp"

namespace joaicl {

enum class AgentKind { Oracle, RemoteLLM, RemoteClassifier };

std::string_view to_string(AgentKind kind);
AgentKind agent_kind_from_string(std::string_view s);

struct AgentConfig {
    AgentKind kind = AgentKind::Oracle;
    std::string endpoint;              // remote kinds only
    std::string model;                 // backend model identifier
    std::string locale = "ko";
    int k_shot = 0;                    // RemoteLLM only; 0 or 6 in practice
    std::filesystem::path cache_dir;   // empty disables the disk cache
    int timeout_ms = 10000;
    int max_retries = 3;
    int backoff_base_ms = 250;
    bool default_neutral_on_unparseable = false;

    void validate() const;
};

// Per-article context an agent may need: the target issue plus, for the
// oracle, the gold annotation.
struct SegmentContext {
    std::string issue_text;
    const ArticleAnnotation* gold = nullptr;
};

class SegmentAgent {
public:
    virtual ~SegmentAgent() = default;
    virtual std::string agent_id() const = 0;
    virtual SegmentPrediction predict(const SegmentContext& ctx, const SegmentSpan& segment) = 0;
};

// Classifier wire contract: the client ships the raw (issue, kind, text)
// triple; the service owns tokenization and pairing.
nlohmann::ordered_json classifier_request(const std::string& issue_text, SegmentKind kind,
                                          const std::string& segment_text);

// A labeled example for segment-level few-shot prompting.
struct SegmentShot {
    SegmentKind kind = SegmentKind::Quotation;
    std::string issue_text;
    std::string text;
    StanceLabel label = StanceLabel::Neutral;
};

PromptBundle llm_segment_prompt(const std::string& issue_text, SegmentKind kind,
                                const std::string& segment_text, const LocaleBundle& locale,
                                const std::vector<SegmentShot>& few_shots);

// `llm_override` substitutes the HTTP client behind a RemoteLLM agent
// (used by tests and the mock CLI path).
std::unique_ptr<SegmentAgent> make_agent(const AgentConfig& config,
                                         std::shared_ptr<ResponseCache> cache = nullptr,
                                         std::shared_ptr<LlmClient> llm_override = nullptr,
                                         std::vector<SegmentShot> segment_shots = {});

enum class ErrorPolicy { FailFast, Collect };

struct BatchError {
    std::size_t index = 0;
    std::string message;
};

struct SegmentBatch {
    std::vector<std::optional<SegmentPrediction>> predictions; // input order
    std::vector<BatchError> errors;
};

// Labels a batch with at most `parallelism` outstanding calls. Output order
// always equals input order.
SegmentBatch predict_segments(SegmentAgent& agent, const SegmentContext& ctx,
                              const std::vector<SegmentSpan>& segments, int parallelism,
                              ErrorPolicy policy = ErrorPolicy::FailFast);

} // namespace joaicl
