#include "joaicl/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "joaicl/utf8.hpp"

namespace joaicl {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(StanceLabel label) {
    switch (label) {
    case StanceLabel::Supportive: return "supportive";
    case StanceLabel::Neutral: return "neutral";
    case StanceLabel::Oppositional: return "oppositional";
    }
    return "neutral";
}

StanceLabel stance_from_string(std::string_view s) {
    if (s == "supportive") return StanceLabel::Supportive;
    if (s == "neutral") return StanceLabel::Neutral;
    if (s == "oppositional") return StanceLabel::Oppositional;
    throw ValidationError("unknown stance label \"" + std::string(s) +
                          "\" (expected supportive|neutral|oppositional)");
}

std::string_view to_string(Genre genre) {
    switch (genre) {
    case Genre::StraightNews: return "straight_news";
    case Genre::Analysis: return "analysis";
    case Genre::Opinion: return "opinion";
    case Genre::Other: return "other";
    }
    return "other";
}

Genre genre_from_string(std::string_view s) {
    if (s == "straight_news") return Genre::StraightNews;
    if (s == "analysis") return Genre::Analysis;
    if (s == "opinion") return Genre::Opinion;
    if (s == "other") return Genre::Other;
    throw ValidationError("unknown genre \"" + std::string(s) +
                          "\" (expected straight_news|analysis|opinion|other)");
}

bool genre_carries_annotation(Genre genre) {
    return genre == Genre::Analysis || genre == Genre::Opinion;
}

std::string Article::canonical_body() const {
    std::string body;
    for (std::size_t i = 0; i < body_paragraphs.size(); ++i) {
        if (i > 0) body += "\n\n";
        body += body_paragraphs[i];
    }
    return body;
}

namespace {

bool is_iso_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    auto digits = [&](std::size_t from, std::size_t to) {
        for (std::size_t i = from; i < to; ++i)
            if (s[i] < '0' || s[i] > '9') return false;
        return true;
    };
    if (!digits(0, 4) || !digits(5, 7) || !digits(8, 10)) return false;
    int month = (s[5] - '0') * 10 + (s[6] - '0');
    int day = (s[8] - '0') * 10 + (s[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

void validate_record(const AnnotatedArticle& a, const std::string& where) {
    const Article& art = a.article;
    auto fail = [&](const std::string& msg) {
        throw ValidationError(where + ": " + msg);
    };
    if (art.id.empty()) fail("field 'id' must be non-empty");
    if (art.headline.empty()) fail("field 'headline' must be non-empty");
    if (art.issue_text.empty()) fail("field 'issue_text' must be non-empty");
    if (art.issue_id.empty()) fail("field 'issue_id' must be non-empty");
    if (!is_iso_date(art.published_date))
        fail("field 'published_date' must be an ISO-8601 date (YYYY-MM-DD), got \"" +
             art.published_date + "\"");
    if (art.body_paragraphs.empty()) fail("field 'body_paragraphs' must hold at least one paragraph");
    for (std::size_t i = 0; i < art.body_paragraphs.size(); ++i) {
        if (art.body_paragraphs[i].empty())
            fail("body_paragraphs[" + std::to_string(i) + "] is empty");
    }
    if (a.annotation) {
        if (!genre_carries_annotation(art.genre))
            fail("genre '" + std::string(to_string(art.genre)) + "' does not carry stance annotations");
        const ArticleAnnotation& ann = *a.annotation;
        bool multi_paragraph = art.body_paragraphs.size() >= 2;
        if (ann.conclusion_stance.has_value() != multi_paragraph)
            fail(multi_paragraph
                     ? "field 'annotation.conclusion_stance' required for multi-paragraph articles"
                     : "field 'annotation.conclusion_stance' must be absent for 1-paragraph articles");
        std::string body = art.canonical_body();
        std::size_t body_len = utf8::length(body);
        std::size_t prev_end = 0;
        for (std::size_t i = 0; i < ann.quotations.size(); ++i) {
            const QuotationAnnotation& q = ann.quotations[i];
            std::string field = "annotation.quotations[" + std::to_string(i) + "]";
            if (q.char_start >= q.char_end)
                fail(field + ": char_start must be < char_end");
            if (q.char_end > body_len)
                fail(field + ": span [" + std::to_string(q.char_start) + "," +
                     std::to_string(q.char_end) + ") exceeds body length " +
                     std::to_string(body_len));
            if (i > 0 && q.char_start < prev_end)
                fail(field + ": spans must be sorted by char_start and non-overlapping");
            prev_end = q.char_end;
        }
    }
}

StanceLabel stance_field(const ordered_json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_string())
        throw ValidationError(where + ": field '" + key + "' must be a string stance label");
    try {
        return stance_from_string(j[key].get<std::string>());
    } catch (const ValidationError& e) {
        throw ValidationError(where + ": field '" + key + "': " + e.what());
    }
}

std::string string_field(const ordered_json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_string())
        throw ValidationError(where + ": missing string field '" + key + "'");
    return j[key].get<std::string>();
}

void reject_unknown_keys(const ordered_json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ValidationError(where + ": unknown field '" + it.key() + "'");
    }
}

} // namespace

Corpus Corpus::from_articles(std::vector<AnnotatedArticle> articles, const std::string& origin) {
    Corpus c;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < articles.size(); ++i) {
        std::string where = origin + ", record " + std::to_string(i + 1);
        validate_record(articles[i], where);
        const std::string& id = articles[i].article.id;
        if (!seen.insert(id).second)
            throw ValidationError(where + ": duplicate article id \"" + id + "\"");
    }
    for (const AnnotatedArticle& a : articles)
        c.issue_index_[a.article.issue_id].push_back(a.article.id);
    c.articles_ = std::move(articles);
    return c;
}

const AnnotatedArticle* Corpus::find(std::string_view id) const {
    for (const AnnotatedArticle& a : articles_)
        if (a.article.id == id) return &a;
    return nullptr;
}

std::string_view to_string(AnnotationLevel level) {
    switch (level) {
    case AnnotationLevel::Article: return "article";
    case AnnotationLevel::Headline: return "headline";
    case AnnotationLevel::Lead: return "lead";
    case AnnotationLevel::Conclusion: return "conclusion";
    case AnnotationLevel::Quotation: return "quotation";
    }
    return "article";
}

AnnotatedArticle record_from_json_line(const std::string& line, const std::string& where) {
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(where + ": malformed JSON: " + e.what());
    }
    if (!j.is_object()) throw ValidationError(where + ": record must be a JSON object");
    reject_unknown_keys(j,
                        {"id", "outlet", "published_date", "issue_id", "issue_text", "genre",
                         "headline", "body_paragraphs", "annotation"},
                        where);

    AnnotatedArticle a;
    a.article.id = string_field(j, "id", where);
    a.article.outlet = string_field(j, "outlet", where);
    a.article.published_date = string_field(j, "published_date", where);
    a.article.issue_id = string_field(j, "issue_id", where);
    a.article.issue_text = string_field(j, "issue_text", where);
    try {
        a.article.genre = genre_from_string(string_field(j, "genre", where));
    } catch (const ValidationError& e) {
        throw ValidationError(where + ": field 'genre': " + e.what());
    }
    a.article.headline = string_field(j, "headline", where);
    if (!j.contains("body_paragraphs") || !j["body_paragraphs"].is_array())
        throw ValidationError(where + ": field 'body_paragraphs' must be an array of strings");
    for (const auto& p : j["body_paragraphs"]) {
        if (!p.is_string())
            throw ValidationError(where + ": field 'body_paragraphs' must hold only strings");
        a.article.body_paragraphs.push_back(p.get<std::string>());
    }
    if (j.contains("annotation") && !j["annotation"].is_null()) {
        const ordered_json& ja = j["annotation"];
        if (!ja.is_object()) throw ValidationError(where + ": field 'annotation' must be an object");
        reject_unknown_keys(ja,
                            {"article_stance", "headline_stance", "lead_stance",
                             "conclusion_stance", "quotations"},
                            where + ", annotation");
        ArticleAnnotation ann;
        ann.article_stance = stance_field(ja, "article_stance", where);
        ann.headline_stance = stance_field(ja, "headline_stance", where);
        ann.lead_stance = stance_field(ja, "lead_stance", where);
        if (ja.contains("conclusion_stance") && !ja["conclusion_stance"].is_null())
            ann.conclusion_stance = stance_field(ja, "conclusion_stance", where);
        if (ja.contains("quotations")) {
            if (!ja["quotations"].is_array())
                throw ValidationError(where + ": field 'annotation.quotations' must be an array");
            for (std::size_t qi = 0; qi < ja["quotations"].size(); ++qi) {
                const auto& jq = ja["quotations"][qi];
                std::string qwhere =
                    where + ", annotation.quotations[" + std::to_string(qi) + "]";
                if (!jq.is_object()) throw ValidationError(qwhere + ": must be an object");
                reject_unknown_keys(jq, {"char_start", "char_end", "stance"}, qwhere);
                if (!jq.contains("char_start") || !jq["char_start"].is_number_unsigned())
                    throw ValidationError(qwhere + ": field 'char_start' must be a non-negative integer");
                if (!jq.contains("char_end") || !jq["char_end"].is_number_unsigned())
                    throw ValidationError(qwhere + ": field 'char_end' must be a non-negative integer");
                QuotationAnnotation q;
                q.char_start = jq["char_start"].get<std::size_t>();
                q.char_end = jq["char_end"].get<std::size_t>();
                q.stance = stance_field(jq, "stance", qwhere);
                ann.quotations.push_back(q);
            }
        }
        a.annotation = std::move(ann);
    }
    return a;
}

std::string record_to_json_line(const AnnotatedArticle& a) {
    ordered_json j;
    j["id"] = a.article.id;
    j["outlet"] = a.article.outlet;
    j["published_date"] = a.article.published_date;
    j["issue_id"] = a.article.issue_id;
    j["issue_text"] = a.article.issue_text;
    j["genre"] = std::string(to_string(a.article.genre));
    j["headline"] = a.article.headline;
    j["body_paragraphs"] = a.article.body_paragraphs;
    if (a.annotation) {
        ordered_json ja;
        ja["article_stance"] = std::string(to_string(a.annotation->article_stance));
        ja["headline_stance"] = std::string(to_string(a.annotation->headline_stance));
        ja["lead_stance"] = std::string(to_string(a.annotation->lead_stance));
        if (a.annotation->conclusion_stance)
            ja["conclusion_stance"] = std::string(to_string(*a.annotation->conclusion_stance));
        ordered_json quotes = ordered_json::array();
        for (const QuotationAnnotation& q : a.annotation->quotations) {
            ordered_json jq;
            jq["char_start"] = q.char_start;
            jq["char_end"] = q.char_end;
            jq["stance"] = std::string(to_string(q.stance));
            quotes.push_back(jq);
        }
        ja["quotations"] = quotes;
        j["annotation"] = ja;
    }
    return j.dump();
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open corpus file: " + path.string());
    std::vector<AnnotatedArticle> articles;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::string where = path.string() + ":" + std::to_string(line_no);
        AnnotatedArticle a = record_from_json_line(line, where);
        validate_record(a, where);
        articles.push_back(std::move(a));
    }
    return Corpus::from_articles(std::move(articles), path.string());
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open path for writing: " + path.string());
    for (const AnnotatedArticle& a : corpus.articles()) {
        out << record_to_json_line(a) << '\n';
    }
    out.flush();
    if (!out) throw ValidationError("write failed: " + path.string());
}

std::pair<Corpus, Corpus> split_by_issue(const Corpus& corpus, const SplitSpec& spec) {
    std::set<std::string> test_issues;
    if (const FractionSplit* f = std::get_if<FractionSplit>(&spec)) {
        std::vector<std::string> issues;
        for (const auto& [issue, ids] : corpus.issue_index()) issues.push_back(issue);
        if (issues.size() < 2)
            throw ValidationError("fraction-based split needs at least 2 issues, corpus has " +
                                  std::to_string(issues.size()));
        if (f->test_fraction <= 0.0 || f->test_fraction >= 1.0)
            throw ValidationError("test_fraction must lie in (0,1)");
        std::mt19937_64 rng(f->seed);
        std::shuffle(issues.begin(), issues.end(), rng);
        auto n_test = static_cast<std::size_t>(std::llround(f->test_fraction * double(issues.size())));
        n_test = std::clamp<std::size_t>(n_test, 1, issues.size() - 1);
        test_issues.insert(issues.begin(), issues.begin() + static_cast<std::ptrdiff_t>(n_test));
    } else {
        const ExplicitSplit& e = std::get<ExplicitSplit>(spec);
        std::set<std::string> train(e.train_issues.begin(), e.train_issues.end());
        for (const std::string& issue : e.test_issues) {
            if (train.count(issue))
                throw ValidationError("issue \"" + issue + "\" appears in both explicit lists");
            test_issues.insert(issue);
        }
        for (const std::string& issue : e.train_issues)
            if (!corpus.issue_index().count(issue))
                throw ValidationError("train issue \"" + issue + "\" not present in corpus");
        for (const std::string& issue : e.test_issues)
            if (!corpus.issue_index().count(issue))
                throw ValidationError("test issue \"" + issue + "\" not present in corpus");
        for (const auto& [issue, ids] : corpus.issue_index())
            if (!train.count(issue) && !test_issues.count(issue))
                throw ValidationError("issue \"" + issue +
                                      "\" is covered by neither explicit list");
    }

    std::vector<AnnotatedArticle> train_articles, test_articles;
    for (const AnnotatedArticle& a : corpus.articles()) {
        if (test_issues.count(a.article.issue_id))
            test_articles.push_back(a);
        else
            train_articles.push_back(a);
    }
    return {Corpus::from_articles(std::move(train_articles)),
            Corpus::from_articles(std::move(test_articles))};
}

namespace {

StatSummary summarize(std::vector<double> values) {
    StatSummary s;
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    s.min = values.front();
    s.max = values.back();
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / double(values.size());
    std::size_t n = values.size();
    s.median = (n % 2 == 1) ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
    return s;
}

} // namespace

CorpusStats compute_stats(const Corpus& corpus) {
    if (corpus.empty()) throw ValidationError("compute_stats: corpus is empty");
    CorpusStats stats;
    stats.n_articles = corpus.size();
    stats.n_issues = corpus.issue_index().size();
    std::vector<double> char_lens, quote_counts;
    for (const AnnotatedArticle& a : corpus.articles()) {
        char_lens.push_back(double(utf8::length(a.article.canonical_body())));
        if (a.annotation) {
            ++stats.n_annotated;
            ++stats.label_counts[static_cast<std::size_t>(a.annotation->article_stance)];
            quote_counts.push_back(double(a.annotation->quotations.size()));
        }
    }
    stats.chars = summarize(std::move(char_lens));
    stats.quotations = summarize(std::move(quote_counts));
    return stats;
}

std::array<double, 3> label_distribution(const Corpus& corpus, AnnotationLevel level) {
    std::array<std::size_t, 3> counts{};
    for (const AnnotatedArticle& a : corpus.articles()) {
        if (!a.annotation) continue;
        const ArticleAnnotation& ann = *a.annotation;
        switch (level) {
        case AnnotationLevel::Article:
            ++counts[static_cast<std::size_t>(ann.article_stance)];
            break;
        case AnnotationLevel::Headline:
            ++counts[static_cast<std::size_t>(ann.headline_stance)];
            break;
        case AnnotationLevel::Lead:
            ++counts[static_cast<std::size_t>(ann.lead_stance)];
            break;
        case AnnotationLevel::Conclusion:
            if (ann.conclusion_stance)
                ++counts[static_cast<std::size_t>(*ann.conclusion_stance)];
            break;
        case AnnotationLevel::Quotation:
            for (const QuotationAnnotation& q : ann.quotations)
                ++counts[static_cast<std::size_t>(q.stance)];
            break;
        }
    }
    std::size_t total = counts[0] + counts[1] + counts[2];
    if (total == 0)
        throw ValidationError("label_distribution: no labels present at level '" +
                              std::string(to_string(level)) + "'");
    std::array<double, 3> pct{};
    for (std::size_t i = 0; i < 3; ++i) pct[i] = 100.0 * double(counts[i]) / double(total);
    return pct;
}

} // namespace joaicl
