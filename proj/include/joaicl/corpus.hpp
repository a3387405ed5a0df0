#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "joaicl/errors.hpp"

namespace joaicl {

// The three-way stance label used at every annotation level.
enum class StanceLabel { Supportive, Neutral, Oppositional };

constexpr std::array<StanceLabel, 3> kAllStances = {
    StanceLabel::Supportive, StanceLabel::Neutral, StanceLabel::Oppositional};

std::string_view to_string(StanceLabel label);
StanceLabel stance_from_string(std::string_view s);

enum class Genre { StraightNews, Analysis, Opinion, Other };

std::string_view to_string(Genre genre);
Genre genre_from_string(std::string_view s);

// Only analysis and opinion pieces carry stance annotations.
bool genre_carries_annotation(Genre genre);

struct Article {
    std::string id;
    std::string outlet;
    std::string published_date; // ISO-8601 date, YYYY-MM-DD
    std::string issue_id;
    std::string issue_text;
    std::string headline;
    std::vector<std::string> body_paragraphs;
    Genre genre = Genre::Analysis;

    // Paragraphs joined by "\n\n". Every character offset in the toolkit
    // indexes this string, in code points.
    std::string canonical_body() const;
};

// Half-open [char_start, char_end) code-point span into the canonical body.
struct QuotationAnnotation {
    std::size_t char_start = 0;
    std::size_t char_end = 0;
    StanceLabel stance = StanceLabel::Neutral;

    bool operator==(const QuotationAnnotation&) const = default;
};

struct ArticleAnnotation {
    StanceLabel article_stance = StanceLabel::Neutral;
    StanceLabel headline_stance = StanceLabel::Neutral;
    StanceLabel lead_stance = StanceLabel::Neutral;
    std::optional<StanceLabel> conclusion_stance; // absent iff <2 paragraphs
    std::vector<QuotationAnnotation> quotations;  // sorted, non-overlapping

    bool operator==(const ArticleAnnotation&) const = default;
};

struct AnnotatedArticle {
    Article article;
    std::optional<ArticleAnnotation> annotation;
};

// Immutable after construction; safe to share read-only across threads.
class Corpus {
public:
    Corpus() = default;

    // Validates every invariant (unique ids, spans in bounds, genre rules)
    // and builds the issue index. Throws ValidationError on the first
    // violation; `origin` names the source in error messages.
    static Corpus from_articles(std::vector<AnnotatedArticle> articles,
                                const std::string& origin = "<memory>");

    const std::vector<AnnotatedArticle>& articles() const { return articles_; }
    const std::map<std::string, std::vector<std::string>>& issue_index() const {
        return issue_index_;
    }
    std::size_t size() const { return articles_.size(); }
    bool empty() const { return articles_.empty(); }
    const AnnotatedArticle* find(std::string_view id) const;

private:
    std::vector<AnnotatedArticle> articles_;
    std::map<std::string, std::vector<std::string>> issue_index_;
};

struct StatSummary {
    double min = 0;
    double mean = 0;
    double median = 0;
    double max = 0;
};

struct CorpusStats {
    std::size_t n_articles = 0;
    std::size_t n_annotated = 0;
    std::array<std::size_t, 3> label_counts{}; // article_stance, by StanceLabel
    std::size_t n_issues = 0;
    StatSummary chars;      // canonical-body length in code points, all articles
    StatSummary quotations; // gold quotation count, annotated articles
};

// Annotation levels at which a label distribution can be taken.
enum class AnnotationLevel { Article, Headline, Lead, Conclusion, Quotation };

std::string_view to_string(AnnotationLevel level);

// One JSON object per line, UTF-8. Errors carry the path and line number.
Corpus load_corpus(const std::filesystem::path& path);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Serialization of a single record, exposed for round-trip tests.
std::string record_to_json_line(const AnnotatedArticle& a);
AnnotatedArticle record_from_json_line(const std::string& line,
                                       const std::string& where);

struct FractionSplit {
    double test_fraction = 0.5;
    std::uint64_t seed = 42;
};

struct ExplicitSplit {
    std::vector<std::string> train_issues;
    std::vector<std::string> test_issues;
};

using SplitSpec = std::variant<FractionSplit, ExplicitSplit>;

// Partition by issue: the two sides never share an issue and together hold
// every article of the input, in input order.
std::pair<Corpus, Corpus> split_by_issue(const Corpus& corpus, const SplitSpec& spec);

CorpusStats compute_stats(const Corpus& corpus);

// Percentages per stance label at the given level, summing to 100 over the
// labels present. Absent conclusions are excluded from the denominator.
std::array<double, 3> label_distribution(const Corpus& corpus, AnnotationLevel level);

} // namespace joaicl
