#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "joaicl/corpus.hpp"
#include "joaicl/llm.hpp"
#include "joaicl/prompter.hpp"

namespace joaicl {

struct EmbeddingVector {
    std::vector<float> values;
    std::string provider_id;

    std::size_t dim() const { return values.size(); }
};

class EmbedProvider {
public:
    virtual ~EmbedProvider() = default;
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
    virtual std::string id() const = 0;
    virtual std::size_t dim() const = 0;
};

// Offline test provider: hashed character n-gram projection into a fixed
// dimension. Stable across platforms and runs.
class HashedNgramProvider : public EmbedProvider {
public:
    explicit HashedNgramProvider(std::size_t dim = 64);
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    std::string id() const override;
    std::size_t dim() const override { return dim_; }

private:
    std::size_t dim_;
};

// Wire contract: POST { "model", "texts": [...] } -> { "vectors": [[...]] }.
// Bearer token from JOAICL_EMBED_API_KEY.
class HttpEmbedProvider : public EmbedProvider {
public:
    HttpEmbedProvider(std::string endpoint, std::string model, std::size_t dim,
                      HttpOptions options = {});
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    std::string id() const override { return model_; }
    std::size_t dim() const override { return dim_; }

private:
    std::string endpoint_;
    std::string model_;
    std::size_t dim_;
    HttpOptions options_;
};

double cosine(std::span<const float> a, std::span<const float> b);
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

enum class StanceMode { Off, OneHot };

struct RecConfig {
    double lambda_div = 0.3;  // weight on the redundancy term
    double alpha_text = 0.5;  // text share of candidate-candidate similarity
    std::vector<int> k_values = {5, 10};
    int pool_size = 20;
    StanceMode stance_mode = StanceMode::Off;

    void validate() const;
};

struct RecCandidate {
    std::string id;
    EmbeddingVector vec;
    std::optional<StanceLabel> stance; // required iff stance_mode == OneHot
};

std::array<double, 3> one_hot(StanceLabel label);

// Greedy re-ranking: the first pick is pure relevance; afterwards
// score(d) = (1-lambda)*cos(d,query) - lambda*max_{s in selected} simdd(d,s),
// where simdd mixes in stance equality under OneHot. Ties go to the smaller
// candidate id. Returns a permutation of all candidate ids.
std::vector<std::string> mmr_rerank(const EmbeddingVector& query,
                                    const std::vector<RecCandidate>& candidates,
                                    const RecConfig& cfg);

// Text fed to the embedding provider for an article: issue, headline and
// body joined, truncated to 2,000 code points.
std::string embedding_text(const Article& article);

// Top-k train articles by cosine similarity, rendered as few-shot examples.
// Ties break deterministically by score, then a seed-salted hash of the id.
std::vector<FewShotExample> select_few_shot(const AnnotatedArticle& query,
                                            const Corpus& train, int k, std::uint64_t seed,
                                            EmbedProvider& provider,
                                            const LocaleBundle& locale,
                                            const std::set<SegmentKind>& ablation_set);

} // namespace joaicl
