#include "joaicl/retrieval.hpp"

#include <algorithm>
#include <cmath>

#include "joaicl/sha256.hpp"
#include "joaicl/utf8.hpp"

namespace joaicl {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = kFnvOffset) {
    for (unsigned char c : s) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

} // namespace

HashedNgramProvider::HashedNgramProvider(std::size_t dim) : dim_(dim) {
    if (dim_ == 0) throw ValidationError("embedding dim must be positive");
}

std::string HashedNgramProvider::id() const {
    return "hashed-ngram-" + std::to_string(dim_);
}

std::vector<EmbeddingVector> HashedNgramProvider::embed(const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const std::string& text : texts) {
        std::vector<float> v(dim_, 0.0f);
        // code-point boundaries once, then 1/2/3-grams over them
        std::vector<std::size_t> bounds;
        std::size_t pos = 0;
        bounds.push_back(0);
        while (pos < text.size()) {
            utf8::decode(text, pos);
            bounds.push_back(pos);
        }
        std::size_t n_cps = bounds.size() - 1;
        for (std::size_t n = 1; n <= 3; ++n) {
            if (n_cps + 1 < n + 1) break;
            for (std::size_t i = 0; i + n <= n_cps; ++i) {
                std::string_view gram(text.data() + bounds[i], bounds[i + n] - bounds[i]);
                std::uint64_t h = fnv1a(gram, fnv1a("n" + std::to_string(n)));
                std::size_t bucket = h % dim_;
                // unigrams accumulate unsigned so the norm stays positive
                float sign = (n == 1) ? 1.0f : ((h >> 63) ? -1.0f : 1.0f);
                v[bucket] += sign;
            }
        }
        double norm = 0.0;
        for (float x : v) norm += double(x) * double(x);
        if (norm == 0.0 && !text.empty()) v[fnv1a(text) % dim_] = 1.0f;
        norm = 0.0;
        for (float x : v) norm += double(x) * double(x);
        if (norm > 0.0) {
            float inv = float(1.0 / std::sqrt(norm));
            for (float& x : v) x *= inv;
        }
        out.push_back({std::move(v), id()});
    }
    return out;
}

HttpEmbedProvider::HttpEmbedProvider(std::string endpoint, std::string model, std::size_t dim,
                                     HttpOptions options)
    : endpoint_(std::move(endpoint)), model_(std::move(model)), dim_(dim), options_(options) {}

std::vector<EmbeddingVector> HttpEmbedProvider::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) return {};
    nlohmann::ordered_json body;
    body["model"] = model_;
    body["texts"] = texts;
    nlohmann::json response = http_post_json(endpoint_, body, options_, "JOAICL_EMBED_API_KEY");
    if (!response.contains("vectors") || !response["vectors"].is_array() ||
        response["vectors"].size() != texts.size())
        throw NetworkError("embedding response must carry one vector per input text");
    std::vector<EmbeddingVector> out;
    std::size_t expected = 0;
    for (const auto& jv : response["vectors"]) {
        EmbeddingVector v;
        v.provider_id = model_;
        for (const auto& x : jv) v.values.push_back(x.get<float>());
        if (expected == 0) expected = v.values.size();
        if (v.values.size() != expected || (dim_ != 0 && v.values.size() != dim_))
            throw NetworkError("embedding dim mismatch across batch");
        out.push_back(std::move(v));
    }
    return out;
}

double cosine(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size())
        throw ValidationError("cosine: dimension mismatch (" + std::to_string(a.size()) +
                              " vs " + std::to_string(b.size()) + ")");
    if (a.empty()) throw ValidationError("cosine: empty vectors");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += double(a[i]) * double(b[i]);
        na += double(a[i]) * double(a[i]);
        nb += double(b[i]) * double(b[i]);
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    return cosine(std::span<const float>(a.values), std::span<const float>(b.values));
}

void RecConfig::validate() const {
    if (lambda_div < 0.0 || lambda_div > 1.0)
        throw ValidationError("lambda_div must lie in [0,1]");
    if (alpha_text < 0.0 || alpha_text > 1.0)
        throw ValidationError("alpha_text must lie in [0,1]");
    if (pool_size < 1) throw ValidationError("pool_size must be >= 1");
    for (int k : k_values)
        if (k < 1) throw ValidationError("K values must be >= 1");
}

std::array<double, 3> one_hot(StanceLabel label) {
    std::array<double, 3> v{};
    v[static_cast<std::size_t>(label)] = 1.0;
    return v;
}

std::vector<std::string> mmr_rerank(const EmbeddingVector& query,
                                    const std::vector<RecCandidate>& candidates,
                                    const RecConfig& cfg) {
    cfg.validate();
    if (candidates.empty()) throw ValidationError("mmr_rerank: empty candidate set");
    const std::size_t n = candidates.size();
    for (const RecCandidate& c : candidates) {
        if (cfg.stance_mode == StanceMode::OneHot && !c.stance)
            throw ValidationError("mmr_rerank: candidate \"" + c.id +
                                  "\" lacks a stance in one-hot mode");
    }

    std::vector<double> relevance(n);
    for (std::size_t i = 0; i < n; ++i) relevance[i] = cosine(query, candidates[i].vec);

    auto simdd = [&](std::size_t i, std::size_t j) {
        double text_sim = cosine(candidates[i].vec, candidates[j].vec);
        if (cfg.stance_mode == StanceMode::Off) return text_sim;
        double same = (*candidates[i].stance == *candidates[j].stance) ? 1.0 : 0.0;
        return cfg.alpha_text * text_sim + (1.0 - cfg.alpha_text) * same;
    };

    std::vector<bool> selected(n, false);
    std::vector<double> max_sim(n, 0.0); // max simdd to the selected set
    std::vector<std::string> order;
    order.reserve(n);

    for (std::size_t step = 0; step < n; ++step) {
        std::ptrdiff_t best = -1;
        double best_score = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (selected[i]) continue;
            double score = (step == 0)
                               ? relevance[i]
                               : (1.0 - cfg.lambda_div) * relevance[i] -
                                     cfg.lambda_div * max_sim[i];
            if (best < 0 || score > best_score ||
                (score == best_score && candidates[i].id < candidates[std::size_t(best)].id)) {
                best = std::ptrdiff_t(i);
                best_score = score;
            }
        }
        std::size_t pick = std::size_t(best);
        selected[pick] = true;
        order.push_back(candidates[pick].id);
        for (std::size_t i = 0; i < n; ++i) {
            if (!selected[i]) max_sim[i] = std::max(max_sim[i], simdd(i, pick));
        }
    }
    return order;
}

std::string embedding_text(const Article& article) {
    std::string text = article.issue_text + "\n" + article.headline + "\n" +
                       article.canonical_body();
    constexpr std::size_t kMaxCps = 2000;
    if (utf8::length(text) > kMaxCps)
        text = std::string(utf8::substr(text, 0, kMaxCps));
    return text;
}

std::vector<FewShotExample> select_few_shot(const AnnotatedArticle& query,
                                            const Corpus& train, int k, std::uint64_t seed,
                                            EmbedProvider& provider,
                                            const LocaleBundle& locale,
                                            const std::set<SegmentKind>& ablation_set) {
    if (k < 0) throw ValidationError("select_few_shot: k must be >= 0");
    if (k == 0) return {};
    std::vector<const AnnotatedArticle*> pool;
    for (const AnnotatedArticle& a : train.articles())
        if (a.annotation) pool.push_back(&a);
    if (static_cast<std::size_t>(k) > pool.size())
        throw ValidationError("select_few_shot: k=" + std::to_string(k) +
                              " exceeds annotated train size " + std::to_string(pool.size()));

    std::vector<std::string> texts;
    texts.push_back(embedding_text(query.article));
    for (const AnnotatedArticle* a : pool) texts.push_back(embedding_text(a->article));
    std::vector<EmbeddingVector> vecs = provider.embed(texts);

    struct Scored {
        double score;
        std::string salt;
        const AnnotatedArticle* article;
    };
    std::vector<Scored> scored;
    scored.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        std::string salt =
            sha256_hex_fields({pool[i]->article.id, std::to_string(seed)});
        scored.push_back({cosine(vecs[0], vecs[i + 1]), std::move(salt), pool[i]});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.salt != b.salt) return a.salt < b.salt;
        return a.article->article.id < b.article->article.id;
    });

    std::vector<FewShotExample> shots;
    for (int i = 0; i < k; ++i)
        shots.push_back(render_few_shot(*scored[std::size_t(i)].article, locale, ablation_set));
    return shots;
}

} // namespace joaicl
