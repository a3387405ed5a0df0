#include "joaicl/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

namespace joaicl {

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t t = 0;
    for (const auto& row : counts)
        for (std::uint64_t c : row) t += c;
    return t;
}

std::uint64_t ConfusionMatrix::trace() const {
    return counts[0][0] + counts[1][1] + counts[2][2];
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) counts[i][j] += other.counts[i][j];
    return *this;
}

ConfusionMatrix confusion(std::span<const StanceLabel> gold, std::span<const StanceLabel> pred) {
    if (gold.size() != pred.size())
        throw ValidationError("confusion: gold and pred lengths differ (" +
                              std::to_string(gold.size()) + " vs " +
                              std::to_string(pred.size()) + ")");
    if (gold.empty()) throw ValidationError("confusion: empty input");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < gold.size(); ++i)
        ++cm.counts[static_cast<std::size_t>(gold[i])][static_cast<std::size_t>(pred[i])];
    return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
    MetricsReport report;
    report.n = cm.total();
    if (report.n == 0) throw ValidationError("metrics: empty confusion matrix");
    report.accuracy = double(cm.trace()) / double(report.n);
    double f1_sum = 0;
    for (std::size_t c = 0; c < 3; ++c) {
        std::uint64_t tp = cm.counts[c][c];
        std::uint64_t fp = 0, fn = 0;
        for (std::size_t r = 0; r < 3; ++r) {
            if (r == c) continue;
            fp += cm.counts[r][c];
            fn += cm.counts[c][r];
        }
        ClassMetrics& m = report.per_class[c];
        m.precision = (tp + fp == 0) ? 0.0 : double(tp) / double(tp + fp);
        m.recall = (tp + fn == 0) ? 0.0 : double(tp) / double(tp + fn);
        m.f1 = (m.precision + m.recall == 0.0)
                   ? 0.0
                   : 2.0 * m.precision * m.recall / (m.precision + m.recall);
        f1_sum += m.f1;
    }
    report.macro_f1 = f1_sum / 3.0;
    return report;
}

MeanStderr mean_stderr(std::span<const double> values) {
    if (values.empty()) throw ValidationError("mean_stderr: empty input");
    MeanStderr out;
    double sum = 0;
    for (double v : values) sum += v;
    out.mean = sum / double(values.size());
    if (values.size() == 1) {
        out.stderr_ = 0;
        return out;
    }
    double ss = 0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    double sample_var = ss / double(values.size() - 1);
    out.stderr_ = std::sqrt(sample_var) / std::sqrt(double(values.size()));
    return out;
}

double krippendorff_alpha_nominal(
    const std::vector<std::vector<std::optional<StanceLabel>>>& ratings) {
    // coincidence matrix over ordered pairs within each unit
    std::array<std::array<double, 3>, 3> coincidence{};
    double n_total = 0;
    std::size_t pairable_units = 0;
    for (const auto& unit : ratings) {
        std::vector<StanceLabel> present;
        for (const auto& r : unit)
            if (r) present.push_back(*r);
        std::size_t m = present.size();
        if (m < 2) continue;
        ++pairable_units;
        double w = 1.0 / double(m - 1);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                if (i == j) continue;
                coincidence[static_cast<std::size_t>(present[i])]
                           [static_cast<std::size_t>(present[j])] += w;
            }
        }
        n_total += double(m);
    }
    if (pairable_units < 2)
        throw ValidationError("krippendorff_alpha_nominal: needs >= 2 items with >= 2 ratings");

    double disagree = 0;
    std::array<double, 3> margins{};
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t k = 0; k < 3; ++k) {
            margins[c] += coincidence[c][k];
            if (c != k) disagree += coincidence[c][k];
        }
    }
    double observed = disagree / n_total;
    if (observed == 0.0) return 1.0; // zero observed disagreement
    double expected_pairs = 0;
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t k = 0; k < 3; ++k)
            if (c != k) expected_pairs += margins[c] * margins[k];
    double expected = expected_pairs / (n_total * (n_total - 1.0));
    if (expected == 0.0)
        throw ValidationError("krippendorff_alpha_nominal: no pairable value variation");
    return 1.0 - observed / expected;
}

double cramers_v(const std::vector<std::vector<std::uint64_t>>& table) {
    if (table.empty()) throw ValidationError("cramers_v: empty table");
    std::size_t n_cols = table.front().size();
    for (const auto& row : table)
        if (row.size() != n_cols) throw ValidationError("cramers_v: ragged table");

    // drop zero rows/columns before anything else
    std::vector<std::size_t> rows, cols;
    for (std::size_t r = 0; r < table.size(); ++r) {
        std::uint64_t sum = 0;
        for (std::uint64_t v : table[r]) sum += v;
        if (sum > 0) rows.push_back(r);
    }
    for (std::size_t c = 0; c < n_cols; ++c) {
        std::uint64_t sum = 0;
        for (const auto& row : table) sum += row[c];
        if (sum > 0) cols.push_back(c);
    }
    if (rows.size() < 2 || cols.size() < 2)
        throw ValidationError("cramers_v: table degenerates to a single row or column");

    double n = 0;
    std::vector<double> row_sum(rows.size(), 0), col_sum(cols.size(), 0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            double v = double(table[rows[i]][cols[j]]);
            row_sum[i] += v;
            col_sum[j] += v;
            n += v;
        }
    }
    double chi2 = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            double expected = row_sum[i] * col_sum[j] / n;
            double diff = double(table[rows[i]][cols[j]]) - expected;
            chi2 += diff * diff / expected;
        }
    }
    double k = double(std::min(rows.size(), cols.size()));
    double v = std::sqrt(chi2 / (n * (k - 1.0)));
    return std::min(v, 1.0); // guard the float edge just above 1
}

std::string_view to_string(Leaning leaning) {
    switch (leaning) {
    case Leaning::Progressive: return "progressive";
    case Leaning::Moderate: return "moderate";
    case Leaning::Conservative: return "conservative";
    }
    return "moderate";
}

Leaning leaning_from_string(std::string_view s) {
    if (s == "progressive") return Leaning::Progressive;
    if (s == "moderate") return Leaning::Moderate;
    if (s == "conservative") return Leaning::Conservative;
    throw ValidationError("unknown leaning \"" + std::string(s) +
                          "\" (expected progressive|moderate|conservative)");
}

Leaning LeaningMap::lookup(const std::string& issue_id, StanceLabel stance) const {
    auto it = by_issue.find(issue_id);
    if (it == by_issue.end())
        throw ValidationError("leaning map does not cover issue \"" + issue_id + "\"");
    return it->second[static_cast<std::size_t>(stance)];
}

LeaningMap LeaningMap::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open leaning map: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": malformed JSON: " + e.what());
    }
    LeaningMap map;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_object())
            throw ValidationError(path.string() + ": issue \"" + it.key() +
                                  "\" must map stances to leanings");
        std::array<Leaning, 3> entry{};
        for (StanceLabel stance : kAllStances) {
            std::string key(to_string(stance));
            if (!it.value().contains(key) || !it.value()[key].is_string())
                throw ValidationError(path.string() + ": issue \"" + it.key() +
                                      "\" lacks a leaning for stance '" + key + "'");
            entry[static_cast<std::size_t>(stance)] =
                leaning_from_string(it.value()[key].get<std::string>());
        }
        map.by_issue[it.key()] = entry;
    }
    return map;
}

double diversity_entropy(std::span<const RecommendedArticle> recommended,
                         const LeaningMap& leanings, bool normalized) {
    if (recommended.empty()) throw ValidationError("diversity_entropy: empty recommendation");
    std::array<double, 3> counts{};
    for (const RecommendedArticle& r : recommended)
        counts[static_cast<std::size_t>(leanings.lookup(r.issue_id, r.stance))] += 1.0;
    double total = counts[0] + counts[1] + counts[2];
    double h = 0;
    for (double c : counts) {
        if (c <= 0) continue;
        double p = c / total;
        h -= p * std::log(p);
    }
    return normalized ? h / std::log(3.0) : h;
}

double precision_at_k(std::span<const RecommendedArticle> recommended,
                      const std::string& seed_issue_id, int k) {
    if (k < 1) throw ValidationError("precision_at_k: k must be >= 1");
    if (recommended.empty()) throw ValidationError("precision_at_k: empty recommendation");
    std::size_t top = std::min<std::size_t>(std::size_t(k), recommended.size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < top; ++i)
        if (recommended[i].issue_id == seed_issue_id) ++hits;
    return double(hits) / double(top);
}

std::string_view to_string(RecMethod method) {
    switch (method) {
    case RecMethod::Retriever: return "retriever";
    case RecMethod::Mmr: return "mmr";
    case RecMethod::MmrStance: return "mmr_stance";
    }
    return "retriever";
}

RecSimulationResult simulate_recommendation(const Corpus& pool,
                                            const std::vector<std::string>& seed_ids,
                                            const RecConfig& cfg,
                                            const std::map<std::string, StanceLabel>& stances,
                                            const LeaningMap& leanings,
                                            EmbedProvider& provider) {
    cfg.validate();
    if (seed_ids.empty()) throw ValidationError("simulate_recommendation: no seed articles");
    if (pool.empty()) throw ValidationError("simulate_recommendation: empty pool");

    RecSimulationResult result;

    // one embedding pass over the pool
    std::vector<const AnnotatedArticle*> pool_articles;
    std::vector<std::string> texts;
    for (const AnnotatedArticle& a : pool.articles()) {
        pool_articles.push_back(&a);
        texts.push_back(embedding_text(a.article));
    }
    std::vector<EmbeddingVector> pool_vecs = provider.embed(texts);

    auto stance_of = [&](const std::string& id) {
        auto it = stances.find(id);
        if (it == stances.end())
            throw ValidationError("stance source does not cover article \"" + id + "\"");
        return it->second;
    };

    struct Acc {
        double diversity = 0;
        double precision = 0;
    };
    std::map<std::pair<int, int>, Acc> acc; // (method, K) -> sums

    for (const std::string& seed_id : seed_ids) {
        const AnnotatedArticle* seed = pool.find(seed_id);
        if (!seed)
            throw ValidationError("seed article \"" + seed_id + "\" not found in pool corpus");
        std::vector<EmbeddingVector> seed_vec =
            provider.embed({embedding_text(seed->article)});

        struct ScoredIdx {
            double score;
            std::size_t idx;
        };
        std::vector<ScoredIdx> scored;
        for (std::size_t i = 0; i < pool_articles.size(); ++i) {
            if (pool_articles[i]->article.id == seed_id) continue;
            scored.push_back({cosine(seed_vec[0], pool_vecs[i]), i});
        }
        std::sort(scored.begin(), scored.end(), [&](const ScoredIdx& a, const ScoredIdx& b) {
            if (a.score != b.score) return a.score > b.score;
            return pool_articles[a.idx]->article.id < pool_articles[b.idx]->article.id;
        });
        if (scored.size() < std::size_t(cfg.pool_size)) {
            result.warnings.push_back("pool for seed \"" + seed_id + "\" holds only " +
                                      std::to_string(scored.size()) + " candidates (< " +
                                      std::to_string(cfg.pool_size) + ")");
        }
        std::size_t take = std::min<std::size_t>(std::size_t(cfg.pool_size), scored.size());

        std::vector<RecCandidate> candidates;
        std::map<std::string, const AnnotatedArticle*> by_id;
        for (std::size_t i = 0; i < take; ++i) {
            const AnnotatedArticle* a = pool_articles[scored[i].idx];
            candidates.push_back(
                {a->article.id, pool_vecs[scored[i].idx], stance_of(a->article.id)});
            by_id[a->article.id] = a;
        }

        auto to_recommended = [&](const std::vector<std::string>& ids) {
            std::vector<RecommendedArticle> recs;
            for (const std::string& id : ids)
                recs.push_back({id, by_id.at(id)->article.issue_id, stance_of(id)});
            return recs;
        };

        std::map<int, std::vector<RecommendedArticle>> ranked;
        {
            std::vector<std::string> ids;
            for (const RecCandidate& c : candidates) ids.push_back(c.id);
            ranked[int(RecMethod::Retriever)] = to_recommended(ids);
        }
        {
            RecConfig plain = cfg;
            plain.stance_mode = StanceMode::Off;
            ranked[int(RecMethod::Mmr)] = to_recommended(mmr_rerank(seed_vec[0], candidates, plain));
        }
        {
            RecConfig stanceful = cfg;
            stanceful.stance_mode = StanceMode::OneHot;
            ranked[int(RecMethod::MmrStance)] =
                to_recommended(mmr_rerank(seed_vec[0], candidates, stanceful));
        }

        for (const auto& [method, recs] : ranked) {
            for (int k : cfg.k_values) {
                std::size_t top = std::min<std::size_t>(std::size_t(k), recs.size());
                std::vector<RecommendedArticle> head(recs.begin(),
                                                     recs.begin() + std::ptrdiff_t(top));
                Acc& a = acc[{method, k}];
                a.diversity += diversity_entropy(head, leanings, true);
                a.precision += precision_at_k(head, seed->article.issue_id, k);
            }
        }
    }

    for (const auto& [key, sums] : acc) {
        RecRow row;
        row.method = static_cast<RecMethod>(key.first);
        row.k = key.second;
        row.diversity = sums.diversity / double(seed_ids.size());
        row.precision = sums.precision / double(seed_ids.size());
        result.rows.push_back(row);
    }
    std::sort(result.rows.begin(), result.rows.end(), [](const RecRow& a, const RecRow& b) {
        if (a.method != b.method) return int(a.method) < int(b.method);
        return a.k < b.k;
    });
    return result;
}

OutletMeta OutletMeta::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open outlet metadata: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": malformed JSON: " + e.what());
    }
    OutletMeta meta;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_string())
            throw ValidationError(path.string() + ": outlet \"" + it.key() +
                                  "\" must map to a leaning string");
        meta.leaning_by_outlet[it.key()] = leaning_from_string(it.value().get<std::string>());
    }
    return meta;
}

BiasReport bias_report(std::span<const BiasInput> predictions, const OutletMeta& outlets,
                       const std::vector<std::string>& issues) {
    std::set<std::string> filter(issues.begin(), issues.end());
    struct Key {
        std::string outlet, issue;
        bool operator<(const Key& o) const {
            return outlet != o.outlet ? outlet < o.outlet : issue < o.issue;
        }
    };
    struct Counts {
        std::uint64_t supportive = 0, oppositional = 0, total = 0;
    };
    std::map<Key, Counts> grouped;
    for (const BiasInput& p : predictions) {
        if (!filter.empty() && !filter.count(p.issue_id)) continue;
        Counts& c = grouped[{p.outlet, p.issue_id}];
        ++c.total;
        if (p.predicted == StanceLabel::Supportive) ++c.supportive;
        if (p.predicted == StanceLabel::Oppositional) ++c.oppositional;
    }
    BiasReport report;
    for (const auto& [key, c] : grouped) {
        if (c.total == 0) continue;
        BiasRow row;
        row.outlet = key.outlet;
        row.issue_id = key.issue;
        auto it = outlets.leaning_by_outlet.find(key.outlet);
        row.leaning =
            it == outlets.leaning_by_outlet.end() ? "unknown" : std::string(to_string(it->second));
        row.n = c.total;
        row.frac_supportive = double(c.supportive) / double(c.total);
        row.frac_oppositional = double(c.oppositional) / double(c.total);
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string fmt_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

} // namespace

std::string bias_report_csv(const BiasReport& report) {
    std::string out = "outlet,issue_id,leaning,n,frac_supportive,frac_oppositional\n";
    for (const BiasRow& row : report.rows) {
        out += csv_quote(row.outlet) + "," + csv_quote(row.issue_id) + "," + row.leaning + "," +
               std::to_string(row.n) + "," + fmt_double(row.frac_supportive) + "," +
               fmt_double(row.frac_oppositional) + "\n";
    }
    return out;
}

std::string bias_report_svg(const BiasReport& report) {
    constexpr double kSize = 480, kMargin = 56, kPlot = kSize - 2 * kMargin;
    auto x_of = [&](double frac) { return kMargin + frac * kPlot; };
    auto y_of = [&](double frac) { return kSize - kMargin - frac * kPlot; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           fmt_double(kSize + 170) + "\" height=\"" + fmt_double(kSize) + "\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + fmt_double(kSize + 170) + "\" height=\"" +
           fmt_double(kSize) + "\" fill=\"white\"/>\n";
    // axes
    svg += "<line x1=\"" + fmt_double(kMargin) + "\" y1=\"" + fmt_double(kSize - kMargin) +
           "\" x2=\"" + fmt_double(kSize - kMargin) + "\" y2=\"" +
           fmt_double(kSize - kMargin) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fmt_double(kMargin) + "\" y1=\"" + fmt_double(kMargin) + "\" x2=\"" +
           fmt_double(kMargin) + "\" y2=\"" + fmt_double(kSize - kMargin) +
           "\" stroke=\"black\"/>\n";
    for (double tick : {0.0, 0.5, 1.0}) {
        svg += "<text x=\"" + fmt_double(x_of(tick) - 8) + "\" y=\"" +
               fmt_double(kSize - kMargin + 20) + "\" font-size=\"12\">" + fmt_double(tick) +
               "</text>\n";
        svg += "<text x=\"" + fmt_double(kMargin - 34) + "\" y=\"" + fmt_double(y_of(tick) + 4) +
               "\" font-size=\"12\">" + fmt_double(tick) + "</text>\n";
    }
    svg += "<text x=\"" + fmt_double(kSize / 2 - 50) + "\" y=\"" + fmt_double(kSize - 12) +
           "\" font-size=\"13\">fraction supportive</text>\n";
    svg += "<text x=\"14\" y=\"" + fmt_double(kSize / 2 + 60) +
           "\" font-size=\"13\" transform=\"rotate(-90 14 " + fmt_double(kSize / 2 + 60) +
           ")\">fraction oppositional</text>\n";

    auto text_escape = [](const std::string& s) {
        std::string out;
        for (char c : s) {
            if (c == '&') out += "&amp;";
            else if (c == '<') out += "&lt;";
            else if (c == '>') out += "&gt;";
            else out.push_back(c);
        }
        return out;
    };
    auto shape_for = [&](const std::string& leaning, double x, double y,
                         const std::string& title) {
        std::string t = "<title>" + text_escape(title) + "</title>";
        if (leaning == "progressive")
            return "<circle cx=\"" + fmt_double(x) + "\" cy=\"" + fmt_double(y) +
                   "\" r=\"6\" fill=\"#2166ac\" fill-opacity=\"0.8\">" + t + "</circle>\n";
        if (leaning == "conservative")
            return "<path d=\"M " + fmt_double(x) + " " + fmt_double(y - 7) + " L " +
                   fmt_double(x - 6.5) + " " + fmt_double(y + 5) + " L " + fmt_double(x + 6.5) +
                   " " + fmt_double(y + 5) + " Z\" fill=\"#b2182b\" fill-opacity=\"0.8\">" + t +
                   "</path>\n";
        if (leaning == "moderate")
            return "<rect x=\"" + fmt_double(x - 5.5) + "\" y=\"" + fmt_double(y - 5.5) +
                   "\" width=\"11\" height=\"11\" fill=\"#4d4d4d\" fill-opacity=\"0.8\">" + t +
                   "</rect>\n";
        return "<rect x=\"" + fmt_double(x - 5) + "\" y=\"" + fmt_double(y - 5) +
               "\" width=\"10\" height=\"10\" transform=\"rotate(45 " + fmt_double(x) + " " +
               fmt_double(y) + ")\" fill=\"#999999\" fill-opacity=\"0.8\">" + t + "</rect>\n";
    };

    for (const BiasRow& row : report.rows) {
        svg += shape_for(row.leaning, x_of(row.frac_supportive), y_of(row.frac_oppositional),
                         row.outlet + " / " + row.issue_id + " (n=" + std::to_string(row.n) + ")");
    }

    // legend
    double lx = kSize + 10, ly = kMargin;
    const char* entries[4][2] = {{"progressive", "circle"},
                                 {"moderate", "square"},
                                 {"conservative", "triangle"},
                                 {"unknown", "diamond"}};
    for (int i = 0; i < 4; ++i) {
        svg += shape_for(entries[i][0], lx + 8, ly + 24.0 * i, entries[i][0]);
        svg += "<text x=\"" + fmt_double(lx + 22) + "\" y=\"" + fmt_double(ly + 24.0 * i + 4) +
               "\" font-size=\"12\">" + entries[i][0] + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace joaicl
