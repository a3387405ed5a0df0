#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "joaicl/agents.hpp"
#include "joaicl/analysis.hpp"
#include "joaicl/cache.hpp"
#include "joaicl/corpus.hpp"
#include "joaicl/llm.hpp"
#include "joaicl/retrieval.hpp"

namespace joaicl {

struct RunConfig {
    AgentConfig agent;
    std::string llm_endpoint;   // empty when the LLM client is injected
    std::string llm_model = "mock";
    std::string locale = "ko";
    bool cot = false;
    int k_shot = 0;
    double temperature = 1.0;
    int max_tokens = 0;         // 0 resolves to 1000 (CoT) / 100
    std::vector<std::uint64_t> seeds = {42, 43, 44, 45, 46, 47, 48, 49, 50, 51};
    std::set<SegmentKind> ablation_set;
    bool random_segment_control = false;
    int parallelism = 4;
    std::set<Genre> eval_genres = {Genre::Analysis, Genre::Opinion};
    double failure_budget = 0.01;
    std::size_t prompt_char_limit = 200000;

    int resolved_max_tokens() const { return max_tokens > 0 ? max_tokens : (cot ? 1000 : 100); }
    void validate() const;
};

// Collaborators an experiment needs beyond the config. The train corpus and
// embedder are only required for k_shot > 0.
struct ExperimentEnv {
    SegmentAgent* agent = nullptr;
    LlmClient* llm = nullptr;
    ResponseCache* llm_cache = nullptr;
    EmbedProvider* embedder = nullptr;
    const Corpus* train = nullptr;
};

struct ArticlePrediction {
    std::string article_id;
    StanceLabel predicted = StanceLabel::Neutral;
    std::string raw_response;
    std::string prompt_hash;
    std::vector<SegmentPrediction> segments_used;
    double latency_ms = 0;
};

struct SeedMetrics {
    std::uint64_t seed = 0;
    MetricsReport metrics;
};

struct RunReport {
    std::vector<SeedMetrics> per_seed;
    MeanStderr accuracy;
    MeanStderr macro_f1;
    std::array<MeanStderr, 3> class_f1;
    ConfusionMatrix confusion; // summed over seeds
    nlohmann::ordered_json config_snapshot;
    std::vector<std::string> failures; // stage-tagged, deterministic order
    std::size_t n_evaluated = 0;
};

// Sentence spans over the canonical body: maximal stretches ending in
// '.', '?' or '!' (optionally followed by a closing quote) before
// whitespace or end of text. Offsets are code points, whitespace-trimmed.
std::vector<QuoteRange> split_sentences(std::string_view text);

// Control condition: sentences sampled without replacement until their
// cumulative length reaches the journalism-segment total.
std::vector<SegmentSpan> random_segment_spans(const Article& article, std::uint64_t seed);

// extract -> predict -> tag -> prompt -> complete -> parse, one article.
ArticlePrediction predict_article(const AnnotatedArticle& article, const RunConfig& cfg,
                                  const ExperimentEnv& env, std::uint64_t seed,
                                  int segment_parallelism = 1);

// One pass per seed over the eval-genre articles, metrics aggregated as
// mean +- stderr. Deterministic for a warm cache and fixed seed list.
RunReport run_experiment(const Corpus& test, const RunConfig& cfg, const ExperimentEnv& env);

struct AblationReports {
    RunReport full;
    std::map<SegmentKind, RunReport> without;
};

// The full model plus four runs that each drop one segment kind's tags.
AblationReports run_ablations(const Corpus& test, const RunConfig& cfg,
                              const ExperimentEnv& env);

nlohmann::ordered_json report_to_json(const RunReport& report);
nlohmann::ordered_json prediction_to_json(const ArticlePrediction& prediction);

} // namespace joaicl
