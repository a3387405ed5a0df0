#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "joaicl/corpus.hpp"
#include "joaicl/retrieval.hpp"

namespace joaicl {

struct ConfusionMatrix {
    // counts[gold][pred]
    std::array<std::array<std::uint64_t, 3>, 3> counts{};

    std::uint64_t total() const;
    std::uint64_t trace() const;
    ConfusionMatrix& operator+=(const ConfusionMatrix& other);
};

ConfusionMatrix confusion(std::span<const StanceLabel> gold, std::span<const StanceLabel> pred);

struct ClassMetrics {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
};

struct MetricsReport {
    double accuracy = 0;
    std::array<ClassMetrics, 3> per_class{};
    double macro_f1 = 0;
    std::uint64_t n = 0;
};

MetricsReport metrics(const ConfusionMatrix& cm);

struct MeanStderr {
    double mean = 0;
    double stderr_ = 0; // sample stddev / sqrt(n); 0 when n == 1
};

MeanStderr mean_stderr(std::span<const double> values);

// Nominal-distance Krippendorff over an items x raters table with missing
// ratings allowed. Items with fewer than two ratings are excluded.
double krippendorff_alpha_nominal(
    const std::vector<std::vector<std::optional<StanceLabel>>>& ratings);

// Association strength of an r x c contingency table; zero-marginal rows and
// columns are dropped first.
double cramers_v(const std::vector<std::vector<std::uint64_t>>& table);

enum class Leaning { Progressive, Moderate, Conservative };

std::string_view to_string(Leaning leaning);
Leaning leaning_from_string(std::string_view s);

// Per-issue mapping from stance label to political category.
struct LeaningMap {
    std::map<std::string, std::array<Leaning, 3>> by_issue;

    Leaning lookup(const std::string& issue_id, StanceLabel stance) const;
    static LeaningMap from_json_file(const std::filesystem::path& path);
};

struct RecommendedArticle {
    std::string article_id;
    std::string issue_id;
    StanceLabel stance = StanceLabel::Neutral;
};

// Entropy of the leaning distribution over recommended articles, natural
// log; normalized divides by ln 3 so the range is [0,1].
double diversity_entropy(std::span<const RecommendedArticle> recommended,
                         const LeaningMap& leanings, bool normalized = true);

// Fraction of the top-k sharing the seed article's issue.
double precision_at_k(std::span<const RecommendedArticle> recommended,
                      const std::string& seed_issue_id, int k);

enum class RecMethod { Retriever, Mmr, MmrStance };

std::string_view to_string(RecMethod method);

struct RecRow {
    RecMethod method = RecMethod::Retriever;
    int k = 0;
    double diversity = 0;
    double precision = 0;
};

struct RecSimulationResult {
    std::vector<RecRow> rows; // one per (method, K), averaged over seeds
    std::vector<std::string> warnings;
};

// Retrieval + re-ranking simulation: per seed article, the pool_size most
// similar candidates are re-ranked by each method and scored at each K.
RecSimulationResult simulate_recommendation(const Corpus& pool,
                                            const std::vector<std::string>& seed_ids,
                                            const RecConfig& cfg,
                                            const std::map<std::string, StanceLabel>& stances,
                                            const LeaningMap& leanings,
                                            EmbedProvider& provider);

struct OutletMeta {
    std::map<std::string, Leaning> leaning_by_outlet;

    static OutletMeta from_json_file(const std::filesystem::path& path);
};

struct BiasInput {
    std::string article_id;
    std::string outlet;
    std::string issue_id;
    StanceLabel predicted = StanceLabel::Neutral;
};

struct BiasRow {
    std::string outlet;
    std::string issue_id;
    std::string leaning; // "progressive" | "moderate" | "conservative" | "unknown"
    double frac_supportive = 0;
    double frac_oppositional = 0;
    std::uint64_t n = 0;
};

struct BiasReport {
    std::vector<BiasRow> rows;
};

// Per (outlet, issue) fractions of predicted supportive / oppositional
// stances. An empty `issues` filter keeps every issue; outlets without
// metadata fall into the "unknown" group.
BiasReport bias_report(std::span<const BiasInput> predictions, const OutletMeta& outlets,
                       const std::vector<std::string>& issues);

std::string bias_report_csv(const BiasReport& report);
std::string bias_report_svg(const BiasReport& report);

// Shortest round-trip decimal form, shared by the CSV/JSON writers.
std::string fmt_double(double value);

} // namespace joaicl
