#include "joaicl/inference.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <random>
#include <thread>

#include "joaicl/utf8.hpp"

namespace joaicl {

void RunConfig::validate() const {
    agent.validate();
    if (seeds.empty()) throw ValidationError("run config: seed list must be non-empty");
    if (temperature < 0) throw ValidationError("run config: temperature must be >= 0");
    if (k_shot < 0) throw ValidationError("run config: k_shot must be >= 0");
    if (parallelism < 1) throw ValidationError("run config: parallelism must be >= 1");
    if (failure_budget < 0 || failure_budget > 1)
        throw ValidationError("run config: failure_budget must lie in [0,1]");
    if (eval_genres.empty()) throw ValidationError("run config: eval_genres must be non-empty");
}

std::vector<QuoteRange> split_sentences(std::string_view text) {
    // decode once; work over code points
    std::vector<char32_t> cps;
    std::size_t pos = 0;
    while (pos < text.size()) cps.push_back(utf8::decode(text, pos));

    auto is_terminator = [](char32_t c) { return c == U'.' || c == U'?' || c == U'!'; };
    auto is_closing_quote = [](char32_t c) {
        return c == U'"' || c == U'”' || c == U'\'' || c == U'’';
    };

    std::vector<QuoteRange> sentences;
    std::size_t start = 0;
    std::size_t i = 0;
    auto flush = [&](std::size_t end) {
        while (start < end && utf8::is_space(cps[start])) ++start;
        std::size_t e = end;
        while (e > start && utf8::is_space(cps[e - 1])) --e;
        if (e > start) sentences.push_back({start, e});
        start = end;
    };
    while (i < cps.size()) {
        if (is_terminator(cps[i])) {
            std::size_t j = i + 1;
            while (j < cps.size() && is_closing_quote(cps[j])) ++j;
            if (j >= cps.size() || utf8::is_space(cps[j])) {
                flush(j);
                i = j;
                continue;
            }
        }
        ++i;
    }
    flush(cps.size());
    return sentences;
}

std::vector<SegmentSpan> random_segment_spans(const Article& article, std::uint64_t seed) {
    std::string body = article.canonical_body();
    std::vector<QuoteRange> sentences = split_sentences(body);
    if (sentences.empty()) sentences.push_back({0, utf8::length(body)});

    std::size_t target = 0;
    for (const SegmentSpan& s : extract_segments(article)) target += utf8::length(s.text);

    std::vector<std::size_t> order(sentences.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::size_t> picked;
    std::size_t total = 0;
    for (std::size_t idx : order) {
        picked.push_back(idx);
        total += sentences[idx].char_end - sentences[idx].char_start;
        if (total >= target) break; // the crossing sentence is kept
    }
    std::sort(picked.begin(), picked.end());

    std::vector<SegmentSpan> spans;
    std::size_t ordinal = 0;
    for (std::size_t idx : picked) {
        const QuoteRange& r = sentences[idx];
        spans.push_back({SegmentKind::Quotation,
                         std::string(utf8::substr(body, r.char_start, r.char_end)),
                         QuotationLoc{r.char_start, r.char_end}, ordinal++});
    }
    return spans;
}

namespace {

std::string stage_tagged(const char* stage, const std::string& id, const std::string& what) {
    return std::string("[") + stage + "] article " + id + ": " + what;
}

} // namespace

ArticlePrediction predict_article(const AnnotatedArticle& article, const RunConfig& cfg,
                                  const ExperimentEnv& env, std::uint64_t seed,
                                  int segment_parallelism) {
    cfg.validate();
    if (!env.agent || !env.llm)
        throw ValidationError("predict_article: experiment env lacks an agent or LLM client");
    const LocaleBundle& locale = get_locale(cfg.locale);
    auto t0 = std::chrono::steady_clock::now();

    std::vector<SegmentSpan> segments;
    try {
        segments = cfg.random_segment_control
                       ? random_segment_spans(article.article, seed)
                       : extract_segments(article.article);
    } catch (const std::exception& e) {
        throw Error(stage_tagged("segment", article.article.id, e.what()));
    }

    SegmentContext ctx{article.article.issue_text,
                       article.annotation ? &*article.annotation : nullptr};
    SegmentBatch batch;
    try {
        batch = predict_segments(*env.agent, ctx, segments, segment_parallelism,
                                 ErrorPolicy::FailFast);
    } catch (const std::exception& e) {
        throw Error(stage_tagged("agent", article.article.id, e.what()));
    }
    std::vector<SegmentPrediction> predictions;
    for (const auto& p : batch.predictions)
        if (p) predictions.push_back(*p);

    TaggedArticle tagged;
    PromptBundle bundle;
    try {
        tagged = tag_article(article.article, predictions, cfg.ablation_set, locale);
        std::vector<FewShotExample> shots;
        if (cfg.k_shot > 0) {
            if (!env.embedder || !env.train)
                throw ValidationError("k_shot > 0 needs a train corpus and an embedder");
            shots = select_few_shot(article, *env.train, cfg.k_shot, seed, *env.embedder,
                                    locale, cfg.ablation_set);
        }
        bundle = build_prompt(tagged, article.article.issue_text, locale, cfg.cot, shots);
        std::size_t prompt_cps = utf8::length(bundle.system) + utf8::length(bundle.user);
        for (const auto& [u, a] : bundle.few_shot_turns)
            prompt_cps += utf8::length(u) + utf8::length(a);
        if (prompt_cps > cfg.prompt_char_limit)
            throw ValidationError("rendered prompt exceeds the character limit (" +
                                  std::to_string(prompt_cps) + " > " +
                                  std::to_string(cfg.prompt_char_limit) + ")");
    } catch (const std::exception& e) {
        throw Error(stage_tagged("prompt", article.article.id, e.what()));
    }

    ChatRequest request = chat_request_from_bundle(bundle, cfg.llm_model, cfg.temperature,
                                                   cfg.resolved_max_tokens(), seed);
    std::string content;
    try {
        bool cached = false;
        std::string key;
        if (env.llm_cache) {
            key = ResponseCache::request_key(chat_request_to_wire(request));
            if (auto hit = env.llm_cache->get(key)) {
                content = hit->get<std::string>();
                cached = true;
            }
        }
        if (!cached) {
            content = env.llm->complete(request);
            if (env.llm_cache) env.llm_cache->put(key, content);
        }
    } catch (const std::exception& e) {
        throw Error(stage_tagged("llm", article.article.id, e.what()));
    }

    ArticlePrediction out;
    out.article_id = article.article.id;
    try {
        out.predicted = parse_article_stance(content, locale, cfg.cot);
    } catch (const std::exception& e) {
        throw Error(stage_tagged("parse", article.article.id, e.what()));
    }
    out.raw_response = content;
    out.prompt_hash = bundle.content_hash;
    out.segments_used = std::move(predictions);
    out.latency_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return out;
}

namespace {

nlohmann::ordered_json config_snapshot(const RunConfig& cfg) {
    // Paths and parallelism stay out: reports must be byte-identical at any
    // parallelism and across hosts.
    nlohmann::ordered_json j;
    j["agent_kind"] = std::string(to_string(cfg.agent.kind));
    j["agent_model"] = cfg.agent.model;
    j["llm_model"] = cfg.llm_model;
    j["locale"] = cfg.locale;
    j["cot"] = cfg.cot;
    j["k_shot"] = cfg.k_shot;
    j["temperature"] = cfg.temperature;
    j["max_tokens"] = cfg.resolved_max_tokens();
    j["seeds"] = cfg.seeds;
    std::vector<std::string> ablated;
    for (SegmentKind kind : cfg.ablation_set) ablated.push_back(std::string(to_string(kind)));
    j["ablation_set"] = ablated;
    j["random_segment_control"] = cfg.random_segment_control;
    std::vector<std::string> genres;
    for (Genre g : cfg.eval_genres) genres.push_back(std::string(to_string(g)));
    j["eval_genres"] = genres;
    j["failure_budget"] = cfg.failure_budget;
    return j;
}

} // namespace

RunReport run_experiment(const Corpus& test, const RunConfig& cfg, const ExperimentEnv& env) {
    cfg.validate();
    std::vector<const AnnotatedArticle*> eval_set;
    for (const AnnotatedArticle& a : test.articles()) {
        if (!cfg.eval_genres.count(a.article.genre)) continue;
        if (!a.annotation)
            throw ValidationError("run_experiment: eval-genre article \"" + a.article.id +
                                  "\" lacks a gold article stance");
        eval_set.push_back(&a);
    }
    if (eval_set.empty())
        throw ValidationError("run_experiment: no articles in the evaluation genres");

    RunReport report;
    report.config_snapshot = config_snapshot(cfg);
    std::size_t budget =
        static_cast<std::size_t>(cfg.failure_budget * double(eval_set.size()));

    for (std::uint64_t seed : cfg.seeds) {
        std::vector<std::optional<ArticlePrediction>> results(eval_set.size());
        std::vector<std::optional<std::string>> errors(eval_set.size());
        std::atomic<std::size_t> next{0};

        auto worker = [&]() {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= eval_set.size()) return;
                try {
                    results[i] = predict_article(*eval_set[i], cfg, env, seed, 1);
                } catch (const std::exception& e) {
                    errors[i] = e.what();
                }
            }
        };
        int n_threads = std::min<int>(cfg.parallelism, int(eval_set.size()));
        if (n_threads <= 1) {
            worker();
        } else {
            std::vector<std::thread> threads;
            for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
            for (std::thread& t : threads) t.join();
        }

        std::vector<StanceLabel> gold, pred;
        std::size_t seed_failures = 0;
        for (std::size_t i = 0; i < eval_set.size(); ++i) {
            if (errors[i]) {
                ++seed_failures;
                report.failures.push_back("seed " + std::to_string(seed) + " " + *errors[i]);
                continue;
            }
            gold.push_back(eval_set[i]->annotation->article_stance);
            pred.push_back(results[i]->predicted);
        }
        if (seed_failures > budget)
            throw RunAborted("seed " + std::to_string(seed) + ": " +
                             std::to_string(seed_failures) + " failures exceed the budget of " +
                             std::to_string(budget) + " (" +
                             (report.failures.empty() ? std::string("?")
                                                      : report.failures.back()) +
                             ")");
        ConfusionMatrix cm = confusion(gold, pred);
        report.confusion += cm;
        report.per_seed.push_back({seed, metrics(cm)});
    }

    std::vector<double> accs, f1s;
    std::array<std::vector<double>, 3> class_f1s;
    for (const SeedMetrics& s : report.per_seed) {
        accs.push_back(s.metrics.accuracy);
        f1s.push_back(s.metrics.macro_f1);
        for (std::size_t c = 0; c < 3; ++c) class_f1s[c].push_back(s.metrics.per_class[c].f1);
    }
    report.accuracy = mean_stderr(accs);
    report.macro_f1 = mean_stderr(f1s);
    for (std::size_t c = 0; c < 3; ++c) report.class_f1[c] = mean_stderr(class_f1s[c]);
    report.n_evaluated = eval_set.size();
    return report;
}

AblationReports run_ablations(const Corpus& test, const RunConfig& cfg,
                              const ExperimentEnv& env) {
    AblationReports out;
    out.full = run_experiment(test, cfg, env);
    for (SegmentKind kind : kAllSegmentKinds) {
        RunConfig ablated = cfg;
        ablated.ablation_set.insert(kind);
        out.without[kind] = run_experiment(test, ablated, env);
    }
    return out;
}

namespace {

nlohmann::ordered_json metrics_to_json(const MetricsReport& m) {
    nlohmann::ordered_json j;
    j["accuracy"] = m.accuracy;
    j["macro_f1"] = m.macro_f1;
    nlohmann::ordered_json per_class;
    for (StanceLabel label : kAllStances) {
        const ClassMetrics& cm = m.per_class[static_cast<std::size_t>(label)];
        nlohmann::ordered_json jc;
        jc["precision"] = cm.precision;
        jc["recall"] = cm.recall;
        jc["f1"] = cm.f1;
        per_class[std::string(to_string(label))] = jc;
    }
    j["per_class"] = per_class;
    j["n"] = m.n;
    return j;
}

nlohmann::ordered_json mean_stderr_to_json(const MeanStderr& m) {
    nlohmann::ordered_json j;
    j["mean"] = m.mean;
    j["stderr"] = m.stderr_;
    return j;
}

} // namespace

nlohmann::ordered_json report_to_json(const RunReport& report) {
    nlohmann::ordered_json j;
    j["config"] = report.config_snapshot;
    nlohmann::ordered_json per_seed = nlohmann::ordered_json::array();
    for (const SeedMetrics& s : report.per_seed) {
        nlohmann::ordered_json js;
        js["seed"] = s.seed;
        js["metrics"] = metrics_to_json(s.metrics);
        per_seed.push_back(js);
    }
    j["per_seed"] = per_seed;
    nlohmann::ordered_json agg;
    agg["accuracy"] = mean_stderr_to_json(report.accuracy);
    agg["macro_f1"] = mean_stderr_to_json(report.macro_f1);
    nlohmann::ordered_json class_f1;
    for (StanceLabel label : kAllStances)
        class_f1[std::string(to_string(label))] =
            mean_stderr_to_json(report.class_f1[static_cast<std::size_t>(label)]);
    agg["class_f1"] = class_f1;
    j["aggregate"] = agg;
    nlohmann::ordered_json cm = nlohmann::ordered_json::array();
    for (const auto& row : report.confusion.counts) cm.push_back(row);
    j["confusion"] = cm;
    j["n_evaluated"] = report.n_evaluated;
    j["failures"] = report.failures;
    return j;
}

nlohmann::ordered_json prediction_to_json(const ArticlePrediction& p) {
    nlohmann::ordered_json j;
    j["article_id"] = p.article_id;
    j["predicted"] = std::string(to_string(p.predicted));
    j["raw_response"] = p.raw_response;
    j["prompt_hash"] = p.prompt_hash;
    nlohmann::ordered_json segments = nlohmann::ordered_json::array();
    for (const SegmentPrediction& s : p.segments_used) {
        nlohmann::ordered_json js;
        js["kind"] = std::string(to_string(s.segment.kind));
        js["ordinal"] = s.segment.ordinal;
        js["label"] = std::string(to_string(s.label));
        if (s.confidence) js["confidence"] = *s.confidence;
        js["agent_id"] = s.agent_id;
        segments.push_back(js);
    }
    j["segments_used"] = segments;
    j["latency_ms"] = p.latency_ms;
    return j;
}

} // namespace joaicl
