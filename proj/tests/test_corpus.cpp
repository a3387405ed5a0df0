#include <doctest.h>

#include <set>

#include "joaicl/corpus.hpp"
#include "joaicl/utf8.hpp"
#include "support/gen.hpp"
#include "support/helpers.hpp"

using namespace joaicl;

namespace {

AnnotatedArticle tiny_article(const std::string& id, const std::string& issue,
                              StanceLabel stance, std::size_t n_paras = 2) {
    AnnotatedArticle a;
    a.article.id = id;
    a.article.outlet = "Outlet";
    a.article.published_date = "2024-01-01";
    a.article.issue_id = issue;
    a.article.issue_text = "Issue " + issue;
    a.article.genre = Genre::Analysis;
    a.article.headline = "Headline " + id;
    for (std::size_t p = 0; p < n_paras; ++p)
        a.article.body_paragraphs.push_back("Paragraph " + std::to_string(p) + " of " + id + ".");
    ArticleAnnotation ann;
    ann.article_stance = stance;
    ann.headline_stance = stance;
    ann.lead_stance = stance;
    if (n_paras >= 2) ann.conclusion_stance = stance;
    a.annotation = ann;
    return a;
}

} // namespace

TEST_SUITE("corpus") {
    TEST_CASE("labels serialize to the exact lowercase strings") {
        CHECK(to_string(StanceLabel::Supportive) == "supportive");
        CHECK(to_string(StanceLabel::Neutral) == "neutral");
        CHECK(to_string(StanceLabel::Oppositional) == "oppositional");
        CHECK(stance_from_string("supportive") == StanceLabel::Supportive);
        CHECK_THROWS_AS(stance_from_string("positive"), ValidationError);
        CHECK_THROWS_AS(stance_from_string("Supportive"), ValidationError);
    }

    TEST_CASE("empty file loads as an empty corpus") {
        test::TempDir dir("corpus_empty");
        test::write_file(dir.path() / "empty.jsonl", "");
        Corpus c = load_corpus(dir.path() / "empty.jsonl");
        CHECK(c.size() == 0);
        SUBCASE("and saves back to an empty file") {
            save_corpus(c, dir.path() / "out.jsonl");
            CHECK(test::read_file(dir.path() / "out.jsonl").empty());
        }
    }

    TEST_CASE("one valid record round-trips byte-identically") {
        test::TempDir dir("corpus_one");
        AnnotatedArticle a = tiny_article("a1", "i1", StanceLabel::Supportive);
        std::string line = record_to_json_line(a) + "\n";
        test::write_file(dir.path() / "one.jsonl", line);
        Corpus c = load_corpus(dir.path() / "one.jsonl");
        save_corpus(c, dir.path() / "copy.jsonl");
        CHECK(test::read_file(dir.path() / "copy.jsonl") == line);
    }

    TEST_CASE("unknown stance string reports field and line") {
        test::TempDir dir("corpus_bad");
        AnnotatedArticle good = tiny_article("a1", "i1", StanceLabel::Neutral);
        std::string bad = record_to_json_line(good);
        std::size_t at = bad.find("\"article_stance\":\"neutral\"");
        REQUIRE(at != std::string::npos);
        bad.replace(at, 27, "\"article_stance\":\"positive\"");
        test::write_file(dir.path() / "bad.jsonl",
                         record_to_json_line(good) + "\n" + bad + "\n");
        try {
            load_corpus(dir.path() / "bad.jsonl");
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            std::string what = e.what();
            CHECK(what.find(":2") != std::string::npos);           // line number
            CHECK(what.find("article_stance") != std::string::npos); // field
            CHECK(what.find("positive") != std::string::npos);
        }
    }

    TEST_CASE("duplicate ids are fatal") {
        std::vector<AnnotatedArticle> two = {tiny_article("x", "i1", StanceLabel::Neutral),
                                             tiny_article("x", "i2", StanceLabel::Neutral)};
        CHECK_THROWS_AS(Corpus::from_articles(std::move(two)), ValidationError);
    }

    TEST_CASE("span out of bounds is fatal") {
        AnnotatedArticle a = tiny_article("a1", "i1", StanceLabel::Neutral);
        a.annotation->quotations.push_back({0, 100000, StanceLabel::Neutral});
        std::vector<AnnotatedArticle> v = {a};
        CHECK_THROWS_AS(Corpus::from_articles(std::move(v)), ValidationError);
    }

    TEST_CASE("conclusion stance must match paragraph count") {
        AnnotatedArticle a = tiny_article("a1", "i1", StanceLabel::Neutral, 1);
        a.annotation->conclusion_stance = StanceLabel::Neutral; // invalid for 1 paragraph
        std::vector<AnnotatedArticle> v = {a};
        CHECK_THROWS_AS(Corpus::from_articles(std::move(v)), ValidationError);
    }

    TEST_CASE("unicode quotes survive save byte-exactly") {
        test::TempDir dir("corpus_unicode");
        AnnotatedArticle a = tiny_article("u1", "i1", StanceLabel::Neutral);
        a.article.body_paragraphs[0] = "단체들은 “실질적 종식 기대”라고 밝혔다.";
        a.annotation->quotations.push_back({5, 14, StanceLabel::Supportive});
        std::vector<AnnotatedArticle> v = {a};
        Corpus c = Corpus::from_articles(std::move(v));
        save_corpus(c, dir.path() / "u.jsonl");
        std::string bytes = test::read_file(dir.path() / "u.jsonl");
        CHECK(bytes.find("“실질적 종식 기대”") != std::string::npos);
        Corpus back = load_corpus(dir.path() / "u.jsonl");
        CHECK(back.articles()[0].article.body_paragraphs[0] ==
              a.article.body_paragraphs[0]);
    }

    TEST_CASE("load-save fixpoint on the bundled fixture") {
        test::TempDir dir("corpus_fixture");
        Corpus c = load_corpus(test::fixture_corpus_path());
        REQUIRE(c.size() == 12);
        save_corpus(c, dir.path() / "fix.jsonl");
        CHECK(test::read_file(dir.path() / "fix.jsonl") ==
              test::read_file(test::fixture_corpus_path()));
    }

    TEST_CASE("round-trip property on random corpora") {
        test::TempDir dir("corpus_prop");
        for (std::uint64_t seed : {11u, 22u, 33u, 44u}) {
            test::ArticleGen gen(seed);
            Corpus c = gen.corpus(25);
            save_corpus(c, dir.path() / "c.jsonl");
            Corpus back = load_corpus(dir.path() / "c.jsonl");
            REQUIRE(back.size() == c.size());
            for (std::size_t i = 0; i < c.size(); ++i) {
                CHECK(record_to_json_line(back.articles()[i]) ==
                      record_to_json_line(c.articles()[i]));
            }
            save_corpus(back, dir.path() / "c2.jsonl");
            CHECK(test::read_file(dir.path() / "c.jsonl") ==
                  test::read_file(dir.path() / "c2.jsonl"));
        }
    }

    TEST_CASE("split_by_issue: two issues at 0.5 puts one issue per side") {
        std::vector<AnnotatedArticle> v = {tiny_article("a", "i1", StanceLabel::Neutral),
                                           tiny_article("b", "i2", StanceLabel::Neutral),
                                           tiny_article("c", "i1", StanceLabel::Neutral)};
        Corpus c = Corpus::from_articles(std::move(v));
        auto [train, test_] = split_by_issue(c, FractionSplit{0.5, 42});
        CHECK(train.issue_index().size() == 1);
        CHECK(test_.issue_index().size() == 1);
        CHECK(train.size() + test_.size() == 3);
    }

    TEST_CASE("split_by_issue is deterministic per seed and disjoint") {
        test::ArticleGen gen(7);
        Corpus c = gen.corpus(40);
        for (std::uint64_t seed : {1u, 2u, 3u, 42u}) {
            auto [tr1, te1] = split_by_issue(c, FractionSplit{0.4, seed});
            auto [tr2, te2] = split_by_issue(c, FractionSplit{0.4, seed});
            CHECK(tr1.size() == tr2.size());
            for (std::size_t i = 0; i < tr1.size(); ++i)
                CHECK(tr1.articles()[i].article.id == tr2.articles()[i].article.id);
            CHECK(tr1.size() + te1.size() == c.size());
            std::set<std::string> train_issues, test_issues;
            for (const auto& a : tr1.articles()) train_issues.insert(a.article.issue_id);
            for (const auto& a : te1.articles()) test_issues.insert(a.article.issue_id);
            for (const auto& issue : train_issues) CHECK(test_issues.count(issue) == 0);
        }
    }

    TEST_CASE("split_by_issue explicit lists") {
        Corpus c = load_corpus(test::fixture_corpus_path());
        ExplicitSplit spec;
        spec.train_issues = {"med-quota-2024", "short-sell-ban-2023"};
        spec.test_issues = {"dog-meat-ban-2024", "min-wage-2022"};
        auto [train, test_] = split_by_issue(c, spec);
        CHECK(train.size() == 6);
        CHECK(test_.size() == 6);

        SUBCASE("overlapping lists rejected") {
            ExplicitSplit bad = spec;
            bad.test_issues.push_back("med-quota-2024");
            CHECK_THROWS_AS(split_by_issue(c, bad), ValidationError);
        }
        SUBCASE("absent issue rejected") {
            ExplicitSplit bad = spec;
            bad.test_issues.push_back("no-such-issue");
            CHECK_THROWS_AS(split_by_issue(c, bad), ValidationError);
        }
        SUBCASE("uncovered issue rejected") {
            ExplicitSplit bad = spec;
            bad.train_issues.pop_back();
            CHECK_THROWS_AS(split_by_issue(c, bad), ValidationError);
        }
    }

    TEST_CASE("compute_stats on the fixture matches the reference counts") {
        Corpus c = load_corpus(test::fixture_corpus_path());
        CorpusStats s = compute_stats(c);
        CHECK(s.n_articles == 12);
        CHECK(s.n_annotated == 12);
        CHECK(s.n_issues == 4);
        CHECK(s.label_counts[0] == 4);
        CHECK(s.label_counts[1] == 4);
        CHECK(s.label_counts[2] == 4);
        CHECK(s.chars.min == 108);
        CHECK(s.chars.mean == doctest::Approx(262.9166666666667).epsilon(1e-12));
        CHECK(s.chars.median == 175.0);
        CHECK(s.chars.max == 720);
        CHECK(s.quotations.min == 0);
        CHECK(s.quotations.mean == doctest::Approx(25.0 / 12.0).epsilon(1e-12));
        CHECK(s.quotations.median == 2.0);
        CHECK(s.quotations.max == 5);
    }

    TEST_CASE("single-article stats degenerate to that article") {
        AnnotatedArticle a = tiny_article("solo", "i1", StanceLabel::Supportive, 1);
        a.article.body_paragraphs = {std::string(100, 'x')};
        a.annotation->conclusion_stance.reset();
        std::vector<AnnotatedArticle> v = {a};
        CorpusStats s = compute_stats(Corpus::from_articles(std::move(v)));
        CHECK(s.chars.min == 100);
        CHECK(s.chars.mean == 100);
        CHECK(s.chars.median == 100);
        CHECK(s.chars.max == 100);
        CHECK(s.quotations.max == 0);
        CHECK(s.quotations.mean == 0);
    }

    TEST_CASE("stats on empty corpus is an error") {
        CHECK_THROWS_AS(compute_stats(Corpus{}), ValidationError);
    }

    TEST_CASE("count fields add up across a split") {
        Corpus c = load_corpus(test::fixture_corpus_path());
        auto [train, test_] = split_by_issue(c, FractionSplit{0.5, 9});
        CorpusStats whole = compute_stats(c);
        CorpusStats a = compute_stats(train);
        CorpusStats b = compute_stats(test_);
        CHECK(a.n_articles + b.n_articles == whole.n_articles);
        CHECK(a.n_annotated + b.n_annotated == whole.n_annotated);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(a.label_counts[i] + b.label_counts[i] == whole.label_counts[i]);
    }

    TEST_CASE("label_distribution on the fixture") {
        Corpus c = load_corpus(test::fixture_corpus_path());
        auto article = label_distribution(c, AnnotationLevel::Article);
        CHECK(article[0] == doctest::Approx(100.0 / 3).epsilon(1e-12));
        CHECK(article[0] + article[1] + article[2] == doctest::Approx(100.0).epsilon(1e-9));
        auto lead = label_distribution(c, AnnotationLevel::Lead);
        CHECK(lead[0] == doctest::Approx(100.0 * 4 / 12).epsilon(1e-12));
        CHECK(lead[1] == doctest::Approx(100.0 * 5 / 12).epsilon(1e-12));
        CHECK(lead[2] == doctest::Approx(100.0 * 3 / 12).epsilon(1e-12));
        auto conclusion = label_distribution(c, AnnotationLevel::Conclusion);
        CHECK(conclusion[0] == 0.0);
        CHECK(conclusion[1] == doctest::Approx(100.0 * 9 / 11).epsilon(1e-12));
        CHECK(conclusion[2] == doctest::Approx(100.0 * 2 / 11).epsilon(1e-12));
        auto quotation = label_distribution(c, AnnotationLevel::Quotation);
        CHECK(quotation[0] == doctest::Approx(40.0).epsilon(1e-12));
        CHECK(quotation[1] == doctest::Approx(12.0).epsilon(1e-12));
        CHECK(quotation[2] == doctest::Approx(48.0).epsilon(1e-12));
    }

    TEST_CASE("one supportive article gives a 100/0/0 distribution") {
        std::vector<AnnotatedArticle> v = {tiny_article("a", "i", StanceLabel::Supportive)};
        auto dist = label_distribution(Corpus::from_articles(std::move(v)),
                                       AnnotationLevel::Article);
        CHECK(dist[0] == 100.0);
        CHECK(dist[1] == 0.0);
        CHECK(dist[2] == 0.0);
    }

    TEST_CASE("gold quotation substrings are non-empty") {
        Corpus c = load_corpus(test::fixture_corpus_path());
        for (const auto& a : c.articles()) {
            if (!a.annotation) continue;
            std::string body = a.article.canonical_body();
            for (const auto& q : a.annotation->quotations) {
                std::string_view text = utf8::substr(body, q.char_start, q.char_end);
                CHECK(!text.empty());
            }
        }
    }
}
