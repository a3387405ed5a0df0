#include "joaicl/agents.hpp"

#include <atomic>
#include <thread>

#include "joaicl/sha256.hpp"

namespace joaicl {

std::string_view to_string(AgentKind kind) {
    switch (kind) {
    case AgentKind::Oracle: return "oracle";
    case AgentKind::RemoteLLM: return "llm";
    case AgentKind::RemoteClassifier: return "classifier";
    }
    return "oracle";
}

AgentKind agent_kind_from_string(std::string_view s) {
    if (s == "oracle") return AgentKind::Oracle;
    if (s == "llm") return AgentKind::RemoteLLM;
    if (s == "classifier") return AgentKind::RemoteClassifier;
    throw ValidationError("unknown agent kind \"" + std::string(s) +
                          "\" (expected oracle|llm|classifier)");
}

void AgentConfig::validate() const {
    if (kind == AgentKind::Oracle && !endpoint.empty())
        throw ValidationError("oracle agent takes no endpoint");
    if (kind != AgentKind::Oracle && endpoint.empty())
        throw ValidationError("remote agent requires an endpoint");
    if (k_shot != 0 && kind != AgentKind::RemoteLLM)
        throw ValidationError("k_shot is only meaningful for the llm agent");
    if (k_shot < 0) throw ValidationError("k_shot must be >= 0");
    if (max_retries < 0) throw ValidationError("max_retries must be >= 0");
}

nlohmann::ordered_json classifier_request(const std::string& issue_text, SegmentKind kind,
                                          const std::string& segment_text) {
    nlohmann::ordered_json j;
    j["issue"] = issue_text;
    j["segment_kind"] = std::string(to_string(kind));
    j["text"] = segment_text;
    return j;
}

PromptBundle llm_segment_prompt(const std::string& issue_text, SegmentKind kind,
                                const std::string& segment_text, const LocaleBundle& locale,
                                const std::vector<SegmentShot>& few_shots) {
    auto render_user = [&](const std::string& issue, SegmentKind k, const std::string& text) {
        return locale.issue_label + ": " + issue + "\n" + locale.tag_for(k) + ": " + text;
    };
    std::vector<FewShotExample> shots;
    for (const SegmentShot& s : few_shots) {
        FewShotExample shot;
        shot.gold = s.label;
        shot.user_turn = render_user(s.issue_text, s.kind, s.text);
        shot.assistant_turn = locale.word_for(s.label);
        shots.push_back(std::move(shot));
    }

    PromptBundle bundle;
    bundle.system = locale.segment_system_prompt;
    for (const FewShotExample& s : shots)
        bundle.few_shot_turns.emplace_back(s.user_turn, s.assistant_turn);
    bundle.user = render_user(issue_text, kind, segment_text);
    bundle.locale_id = locale.id;
    bundle.cot = false;
    bundle.k_shot = static_cast<int>(shots.size());

    std::vector<std::string> fields = {bundle.system};
    for (const auto& [u, a] : bundle.few_shot_turns) {
        fields.push_back(u);
        fields.push_back(a);
    }
    fields.push_back(bundle.user);
    fields.push_back(bundle.locale_id);
    fields.push_back("0");
    fields.push_back(std::to_string(bundle.k_shot));
    bundle.content_hash = sha256_hex_fields(fields);
    return bundle;
}

namespace {

class OracleAgent : public SegmentAgent {
public:
    std::string agent_id() const override { return "oracle"; }

    SegmentPrediction predict(const SegmentContext& ctx, const SegmentSpan& segment) override {
        if (segment.text.empty())
            throw ValidationError("predict_segment: segment text must be non-empty");
        if (!ctx.gold)
            throw OracleMissingAnnotation("oracle agent needs a gold annotation");
        const ArticleAnnotation& gold = *ctx.gold;
        StanceLabel label;
        switch (segment.kind) {
        case SegmentKind::Headline:
            label = gold.headline_stance;
            break;
        case SegmentKind::Lead:
            label = gold.lead_stance;
            break;
        case SegmentKind::Conclusion:
            if (!gold.conclusion_stance)
                throw OracleMissingAnnotation("gold annotation has no conclusion stance");
            label = *gold.conclusion_stance;
            break;
        case SegmentKind::Quotation: {
            const auto* loc = std::get_if<QuotationLoc>(&segment.location);
            if (!loc) throw OracleMissingAnnotation("quotation segment lacks a span location");
            const QuotationAnnotation* match = nullptr;
            for (const QuotationAnnotation& q : gold.quotations) {
                if (q.char_start == loc->char_start && q.char_end == loc->char_end) {
                    match = &q;
                    break;
                }
            }
            if (!match)
                throw OracleMissingAnnotation(
                    "no gold quotation annotation at span [" + std::to_string(loc->char_start) +
                    "," + std::to_string(loc->char_end) + ")");
            label = match->stance;
            break;
        }
        default:
            throw OracleMissingAnnotation("unhandled segment kind");
        }
        return {segment, label, std::nullopt, agent_id()};
    }
};

// Shared plumbing for the two remote agents: cache in front of the wire.
class RemoteAgentBase : public SegmentAgent {
public:
    RemoteAgentBase(AgentConfig config, std::shared_ptr<ResponseCache> cache)
        : config_(std::move(config)), cache_(std::move(cache)) {
        if (!config_.cache_dir.empty() && !cache_)
            cache_ = std::make_shared<ResponseCache>(config_.cache_dir);
    }

    SegmentPrediction predict(const SegmentContext& ctx, const SegmentSpan& segment) override {
        if (segment.text.empty())
            throw ValidationError("predict_segment: segment text must be non-empty");
        std::string key;
        if (cache_) {
            key = ResponseCache::segment_key(agent_id(), config_.model, config_.locale,
                                             config_.k_shot, ctx.issue_text,
                                             std::string(to_string(segment.kind)), segment.text);
            if (auto hit = cache_->get(key)) return from_cached(*hit, segment);
        }
        CallResult result = call_backend(ctx, segment);
        if (cache_) {
            nlohmann::json value;
            value["raw"] = result.raw;
            value["label"] = std::string(to_string(result.label));
            if (result.confidence) value["confidence"] = *result.confidence;
            cache_->put(key, value);
        }
        return {segment, result.label, result.confidence, agent_id()};
    }

protected:
    struct CallResult {
        std::string raw;
        StanceLabel label;
        std::optional<double> confidence;
    };

    virtual CallResult call_backend(const SegmentContext& ctx, const SegmentSpan& segment) = 0;

    HttpOptions http_options() const {
        return {config_.timeout_ms, config_.max_retries, config_.backoff_base_ms};
    }

    StanceLabel parse_or_default(const std::string& text, const LocaleBundle& locale) {
        try {
            return parse_article_stance(text, locale, /*cot=*/false);
        } catch (const NoLabelFound& e) {
            if (config_.default_neutral_on_unparseable) return StanceLabel::Neutral;
            throw UnparseableLabel(e.what());
        } catch (const AmbiguousLabel& e) {
            if (config_.default_neutral_on_unparseable) return StanceLabel::Neutral;
            throw UnparseableLabel(e.what());
        }
    }

    AgentConfig config_;

private:
    SegmentPrediction from_cached(const nlohmann::json& value, const SegmentSpan& segment) {
        std::optional<double> confidence;
        if (value.contains("confidence")) confidence = value["confidence"].get<double>();
        return {segment, stance_from_string(value["label"].get<std::string>()), confidence,
                agent_id()};
    }

    std::shared_ptr<ResponseCache> cache_;
};

class RemoteClassifierAgent : public RemoteAgentBase {
public:
    using RemoteAgentBase::RemoteAgentBase;

    std::string agent_id() const override { return "classifier:" + config_.model; }

protected:
    CallResult call_backend(const SegmentContext& ctx, const SegmentSpan& segment) override {
        nlohmann::json response =
            http_post_json(config_.endpoint,
                           classifier_request(ctx.issue_text, segment.kind, segment.text),
                           http_options(), "JOAICL_LLM_API_KEY");
        if (!response.contains("label") || !response["label"].is_string())
            throw UnparseableLabel("classifier response lacks a string 'label' field");
        StanceLabel label;
        try {
            label = stance_from_string(response["label"].get<std::string>());
        } catch (const ValidationError& e) {
            if (config_.default_neutral_on_unparseable)
                label = StanceLabel::Neutral;
            else
                throw UnparseableLabel(e.what());
        }
        std::optional<double> confidence;
        if (response.contains("confidence") && !response["confidence"].is_null()) {
            if (!response["confidence"].is_number())
                throw UnparseableLabel("classifier confidence is not numeric");
            double c = response["confidence"].get<double>();
            if (c < 0.0 || c > 1.0)
                throw UnparseableLabel("classifier confidence outside [0,1]: " +
                                       std::to_string(c));
            confidence = c;
        }
        return {response.dump(), label, confidence};
    }
};

class RemoteLlmAgent : public RemoteAgentBase {
public:
    RemoteLlmAgent(AgentConfig config, std::shared_ptr<ResponseCache> cache,
                   std::shared_ptr<LlmClient> llm, std::vector<SegmentShot> shots)
        : RemoteAgentBase(std::move(config), std::move(cache)),
          llm_(std::move(llm)),
          shots_(std::move(shots)) {
        if (!llm_) llm_ = std::make_shared<HttpLlmClient>(config_.endpoint, http_options());
        // keep the cache key honest: k_shot reflects the shots actually sent
        if (static_cast<int>(shots_.size()) > config_.k_shot)
            shots_.resize(static_cast<std::size_t>(config_.k_shot));
        config_.k_shot = static_cast<int>(shots_.size());
    }

    std::string agent_id() const override { return "llm:" + config_.model; }

protected:
    CallResult call_backend(const SegmentContext& ctx, const SegmentSpan& segment) override {
        const LocaleBundle& locale = get_locale(config_.locale);
        PromptBundle bundle =
            llm_segment_prompt(ctx.issue_text, segment.kind, segment.text, locale, shots_);
        ChatRequest request = chat_request_from_bundle(bundle, config_.model,
                                                       /*temperature=*/1.0,
                                                       /*max_tokens=*/100, std::nullopt);
        std::string content = llm_->complete(request);
        return {content, parse_or_default(content, locale), std::nullopt};
    }

private:
    std::shared_ptr<LlmClient> llm_;
    std::vector<SegmentShot> shots_;
};

} // namespace

std::unique_ptr<SegmentAgent> make_agent(const AgentConfig& config,
                                         std::shared_ptr<ResponseCache> cache,
                                         std::shared_ptr<LlmClient> llm_override,
                                         std::vector<SegmentShot> segment_shots) {
    config.validate();
    switch (config.kind) {
    case AgentKind::Oracle:
        return std::make_unique<OracleAgent>();
    case AgentKind::RemoteClassifier:
        return std::make_unique<RemoteClassifierAgent>(config, std::move(cache));
    case AgentKind::RemoteLLM:
        return std::make_unique<RemoteLlmAgent>(config, std::move(cache),
                                                std::move(llm_override),
                                                std::move(segment_shots));
    }
    throw ValidationError("unhandled agent kind");
}

SegmentBatch predict_segments(SegmentAgent& agent, const SegmentContext& ctx,
                              const std::vector<SegmentSpan>& segments, int parallelism,
                              ErrorPolicy policy) {
    if (parallelism < 1) throw ValidationError("predict_segments: parallelism must be >= 1");
    SegmentBatch batch;
    batch.predictions.resize(segments.size());
    if (segments.empty()) return batch;

    std::vector<std::optional<BatchError>> slot_errors(segments.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};

    auto worker = [&]() {
        while (true) {
            if (policy == ErrorPolicy::FailFast && abort.load()) return;
            std::size_t i = next.fetch_add(1);
            if (i >= segments.size()) return;
            try {
                batch.predictions[i] = agent.predict(ctx, segments[i]);
            } catch (const std::exception& e) {
                slot_errors[i] = BatchError{i, e.what()};
                if (policy == ErrorPolicy::FailFast) abort.store(true);
            }
        }
    };

    int n_threads = std::min<int>(parallelism, static_cast<int>(segments.size()));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
    }

    for (const auto& err : slot_errors)
        if (err) batch.errors.push_back(*err);
    if (policy == ErrorPolicy::FailFast && !batch.errors.empty())
        throw Error("segment prediction failed at index " +
                    std::to_string(batch.errors.front().index) + ": " +
                    batch.errors.front().message);
    return batch;
}

} // namespace joaicl
