#include "joaicl/prompter.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>

#include <json.hpp>

#include "joaicl/sha256.hpp"
#include "joaicl/utf8.hpp"

namespace joaicl {

namespace {

LocaleBundle make_english() {
    LocaleBundle b;
    b.id = "en";
    b.tag_names = {"Headline", "Lead", "Conclusion", "Quotation"};
    b.stance_attr = "stance";
    b.label_words = {"Supportive", "Neutral", "Oppositional"};
    b.issue_label = "Issue";
    b.headline_label = "Headline";
    b.article_label = "Article";
    b.system_prompt =
        "Stance detection is the task of determining the expressed or implied opinion, or "
        "stance, of a statement toward a certain, specified target. You are given an issue and "
        "a news article about that issue. Your task is to classify the article's stance toward "
        "the given issue as one of the following: supportive, neutral, or oppositional.\n"
        "\n"
        "The criteria for each label are as follows:\n"
        "- Supportive: The article shows a favorable tone toward the issue, emphasizes quotes "
        "in support of the issue, and predominantly uses positive or optimistic language.\n"
        "- Neutral: The article maintains an objective tone, balances quotes from both "
        "supportive and critical perspectives, and uses neutral language.\n"
        "- Oppositional: The article shows a skeptical tone toward the issue, emphasizes "
        "quotes that criticize the issue, and predominantly uses negative or pessimistic "
        "language.\n"
        "\n"
        "Additional information is provided on the stance of the headline, lead, conclusion, "
        "and quotes regarding the issue.\n"
        "Each segment is marked with XML tags, and the final stance should be determined by "
        "taking into account the detailed stance labels of each part.";
    b.cot_suffix =
        "Reason step by step about the tone, the quoted sources, and the per-segment stance "
        "labels before deciding. Then give your final answer on its own last line in the "
        "form:\n"
        "Stance: <Supportive|Neutral|Oppositional>";
    b.segment_system_prompt =
        "Stance detection is the task of determining the expressed or implied opinion, or "
        "stance, of a statement toward a certain, specified target. You are given an issue and "
        "one structural segment of a news article about that issue: its headline, lead "
        "paragraph, concluding paragraph, or a direct quotation. Classify the segment's stance "
        "toward the issue as one of the following: supportive, neutral, or oppositional. "
        "Answer with exactly one of these labels.";
    return b;
}

LocaleBundle make_korean() {
    LocaleBundle b;
    b.id = "ko";
    b.tag_names = {"제목", "도입부", "결론부", "직접인용구"};
    b.stance_attr = "입장";
    b.label_words = {"지지적", "중립적", "비판적"};
    b.issue_label = "이슈";
    b.headline_label = "제목";
    b.article_label = "기사";
    b.system_prompt =
        "입장 분류는 특정 대상에 대한 텍스트의 명시적 또는 묵시적인, 의견이나 입장을 결정하는 "
        "작업입니다. 이슈와 뉴스 기사가 제공되며, 당신의 임무는 주어진 이슈에 대한 뉴스 기사의 "
        "입장을 지지적, 중립적 혹은 비판적 중 하나로 분류하는 것입니다.\n"
        "\n"
        "각 라벨의 판단 기준은 다음과 같습니다:\n"
        "- 지지적: 이슈에 대해 호의적인 논조, 옹호하는 입장의 인용문을 중심으로 배치하며, "
        "긍정적·낙관적 어조가 지배적인 경우\n"
        "- 중립적: 이슈에 대해 객관적인 논조, 옹호하거나 비판하는 입장의 인용문을 균형 있게 "
        "배치하며, 중립적 어조를 사용하는 경우\n"
        "- 비판적: 이슈에 대해 회의적인 논조, 비판하는 입장의 인용문을 중심으로 배치하며, "
        "부정적·비관적 어조가 지배적인 경우\n"
        "\n"
        "추가 정보로 이슈에 대한 제목, 도입부, 결론부, 직접인용구의 입장 정보가 각각 "
        "제공됩니다.\n"
        "각 위치는 XML 태그로 표시되며, 세부 라벨 정보를 함께 고려하여 최종 입장을 결정하세요.";
    b.cot_suffix =
        "기사 논조, 인용된 발언, 각 구간의 입장 라벨을 단계별로 검토한 뒤, 마지막 줄에 다음 "
        "형식으로 최종 답을 제시하세요:\n"
        "입장: <지지적|중립적|비판적>";
    b.segment_system_prompt =
        "입장 분류는 특정 대상에 대한 텍스트의 명시적 또는 묵시적인 의견이나 입장을 결정하는 "
        "작업입니다. 이슈와 해당 이슈를 다룬 뉴스 기사의 한 구간(제목, 도입부, 결론부 또는 "
        "직접인용구)이 제공됩니다. 주어진 이슈에 대한 구간의 입장을 지지적, 중립적 혹은 비판적 "
        "중 하나로 분류하세요. 반드시 이 세 라벨 중 하나로만 답하세요.";
    return b;
}

std::map<std::string, LocaleBundle>& locale_registry() {
    static std::map<std::string, LocaleBundle> registry = {{"en", make_english()},
                                                           {"ko", make_korean()}};
    return registry;
}

std::mutex& locale_mutex() {
    static std::mutex m;
    return m;
}

void validate_bundle(const LocaleBundle& b) {
    if (b.id.empty()) throw ValidationError("locale bundle: empty id");
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j)
            if (b.tag_names[i] == b.tag_names[j])
                throw ValidationError("locale bundle '" + b.id + "': tag names must be distinct");
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
            if (b.label_words[i] == b.label_words[j])
                throw ValidationError("locale bundle '" + b.id + "': label words must be distinct");
}

std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string open_tag(const LocaleBundle& loc, SegmentKind kind, StanceLabel label) {
    return "<" + loc.tag_for(kind) + " " + loc.stance_attr + "=\"" + loc.word_for(label) + "\">";
}

std::string close_tag(const LocaleBundle& loc, SegmentKind kind) {
    return "</" + loc.tag_for(kind) + ">";
}

// Canonical ordering so the output depends only on the prediction set.
bool location_less(const SegmentPrediction& a, const SegmentPrediction& b) {
    if (a.segment.kind != b.segment.kind) return a.segment.kind < b.segment.kind;
    if (a.segment.kind == SegmentKind::Quotation) {
        const auto& qa = std::get<QuotationLoc>(a.segment.location);
        const auto& qb = std::get<QuotationLoc>(b.segment.location);
        return qa.char_start < qb.char_start;
    }
    return false;
}

} // namespace

const LocaleBundle& english_locale() { return get_locale("en"); }
const LocaleBundle& korean_locale() { return get_locale("ko"); }

const LocaleBundle& get_locale(const std::string& id) {
    std::lock_guard<std::mutex> lock(locale_mutex());
    auto it = locale_registry().find(id);
    if (it == locale_registry().end())
        throw ValidationError("unknown locale \"" + id + "\" (built-ins: en, ko)");
    return it->second;
}

void register_locale(LocaleBundle bundle) {
    validate_bundle(bundle);
    std::lock_guard<std::mutex> lock(locale_mutex());
    locale_registry()[bundle.id] = std::move(bundle);
}

LocaleBundle locale_from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open locale file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": malformed JSON: " + e.what());
    }
    auto str = [&](const char* key) -> std::string {
        if (!j.contains(key) || !j[key].is_string())
            throw ValidationError(path.string() + ": missing string field '" + std::string(key) + "'");
        return j[key].get<std::string>();
    };
    auto arr = [&](const char* key, std::size_t n) {
        if (!j.contains(key) || !j[key].is_array() || j[key].size() != n)
            throw ValidationError(path.string() + ": field '" + std::string(key) + "' must be an array of " +
                                  std::to_string(n) + " strings");
        std::vector<std::string> out;
        for (const auto& v : j[key]) {
            if (!v.is_string())
                throw ValidationError(path.string() + ": field '" + std::string(key) +
                                      "' must hold only strings");
            out.push_back(v.get<std::string>());
        }
        return out;
    };
    LocaleBundle b;
    b.id = str("id");
    auto tags = arr("tag_names", 4);
    std::copy(tags.begin(), tags.end(), b.tag_names.begin());
    b.stance_attr = str("stance_attr");
    auto words = arr("label_words", 3);
    std::copy(words.begin(), words.end(), b.label_words.begin());
    b.issue_label = str("issue_label");
    b.headline_label = str("headline_label");
    b.article_label = str("article_label");
    b.system_prompt = str("system_prompt");
    b.cot_suffix = str("cot_suffix");
    b.segment_system_prompt = str("segment_system_prompt");
    validate_bundle(b);
    return b;
}

TaggedArticle tag_article(const Article& article,
                          const std::vector<SegmentPrediction>& predictions,
                          const std::set<SegmentKind>& ablation_set,
                          const LocaleBundle& locale) {
    const std::string body = article.canonical_body();
    const std::size_t body_len = utf8::length(body);

    // dedupe and validate against the article
    std::optional<SegmentPrediction> headline_pred, lead_pred, conclusion_pred;
    std::vector<SegmentPrediction> quote_preds;
    auto conflict = [](const SegmentPrediction& a, const SegmentPrediction& b) {
        return a.label != b.label;
    };
    for (const SegmentPrediction& p : predictions) {
        switch (p.segment.kind) {
        case SegmentKind::Headline: {
            if (!std::holds_alternative<HeadlineLoc>(p.segment.location) ||
                p.segment.text != article.headline)
                throw ValidationError("tag_article: headline prediction does not match article");
            if (headline_pred && conflict(*headline_pred, p))
                throw ValidationError("tag_article: conflicting headline predictions");
            headline_pred = p;
            break;
        }
        case SegmentKind::Lead: {
            const auto* loc = std::get_if<ParagraphLoc>(&p.segment.location);
            if (!loc || loc->paragraph_index != 0 ||
                p.segment.text != article.body_paragraphs.front())
                throw ValidationError("tag_article: lead prediction does not match article");
            if (lead_pred && conflict(*lead_pred, p))
                throw ValidationError("tag_article: conflicting lead predictions");
            lead_pred = p;
            break;
        }
        case SegmentKind::Conclusion: {
            const auto* loc = std::get_if<ParagraphLoc>(&p.segment.location);
            std::size_t last = article.body_paragraphs.size() - 1;
            if (!loc || article.body_paragraphs.size() < 2 || loc->paragraph_index != last ||
                p.segment.text != article.body_paragraphs[last])
                throw ValidationError("tag_article: conclusion prediction does not match article");
            if (conclusion_pred && conflict(*conclusion_pred, p))
                throw ValidationError("tag_article: conflicting conclusion predictions");
            conclusion_pred = p;
            break;
        }
        case SegmentKind::Quotation: {
            const auto* loc = std::get_if<QuotationLoc>(&p.segment.location);
            if (!loc || loc->char_start >= loc->char_end || loc->char_end > body_len ||
                p.segment.text != utf8::substr(body, loc->char_start, loc->char_end))
                throw ValidationError("tag_article: quotation prediction does not match article");
            quote_preds.push_back(p);
            break;
        }
        }
    }
    std::sort(quote_preds.begin(), quote_preds.end(), location_less);
    for (std::size_t i = 0; i + 1 < quote_preds.size(); ++i) {
        const auto& a = std::get<QuotationLoc>(quote_preds[i].segment.location);
        const auto& b = std::get<QuotationLoc>(quote_preds[i + 1].segment.location);
        if (a.char_start == b.char_start && a.char_end == b.char_end) {
            if (quote_preds[i].label != quote_preds[i + 1].label)
                throw ValidationError("tag_article: conflicting quotation predictions");
            quote_preds.erase(quote_preds.begin() + static_cast<std::ptrdiff_t>(i + 1));
            --i;
        } else if (b.char_start < a.char_end) {
            throw ValidationError("tag_article: overlapping quotation predictions");
        }
    }

    TaggedArticle out;
    out.ablated_kinds = ablation_set;

    if (headline_pred && !ablation_set.count(SegmentKind::Headline)) {
        out.headline_tagged = open_tag(locale, SegmentKind::Headline, headline_pred->label) +
                              xml_escape(article.headline) +
                              close_tag(locale, SegmentKind::Headline);
    } else {
        out.headline_tagged = article.headline;
    }

    bool tag_quotes = !quote_preds.empty() && !ablation_set.count(SegmentKind::Quotation);
    bool tag_lead = lead_pred && !ablation_set.count(SegmentKind::Lead);
    bool tag_conclusion = conclusion_pred && !ablation_set.count(SegmentKind::Conclusion);

    // paragraph boundaries in code points over the canonical body
    std::vector<std::pair<std::size_t, std::size_t>> para_ranges;
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < article.body_paragraphs.size(); ++i) {
        std::size_t len = utf8::length(article.body_paragraphs[i]);
        para_ranges.emplace_back(cursor, cursor + len);
        cursor += len + 2; // the "\n\n" separator
    }

    // every quotation must sit inside a single paragraph to nest cleanly
    std::vector<std::vector<const SegmentPrediction*>> quotes_by_para(para_ranges.size());
    if (tag_quotes) {
        for (const SegmentPrediction& q : quote_preds) {
            const auto& loc = std::get<QuotationLoc>(q.segment.location);
            bool placed = false;
            for (std::size_t i = 0; i < para_ranges.size(); ++i) {
                if (loc.char_start >= para_ranges[i].first && loc.char_end <= para_ranges[i].second) {
                    quotes_by_para[i].push_back(&q);
                    placed = true;
                    break;
                }
            }
            if (!placed)
                throw ValidationError(
                    "tag_article: quotation span crosses a paragraph boundary");
        }
    }

    std::string body_out;
    std::size_t last_para = article.body_paragraphs.size() - 1;
    for (std::size_t i = 0; i < article.body_paragraphs.size(); ++i) {
        if (i > 0) body_out += "\n\n";
        const std::string& para = article.body_paragraphs[i];
        const SegmentPrediction* wrapper = nullptr;
        SegmentKind wrapper_kind = SegmentKind::Lead;
        if (i == 0 && tag_lead) {
            wrapper = &*lead_pred;
            wrapper_kind = SegmentKind::Lead;
        } else if (i == last_para && i > 0 && tag_conclusion) {
            wrapper = &*conclusion_pred;
            wrapper_kind = SegmentKind::Conclusion;
        }
        const auto& quotes = quotes_by_para[i];
        if (!wrapper && quotes.empty()) {
            body_out += para;
            continue;
        }
        std::string content;
        std::size_t pos = para_ranges[i].first;
        auto emit_plain = [&](std::size_t from, std::size_t to) {
            std::string_view chunk = utf8::substr(body, from, to);
            content += wrapper ? xml_escape(chunk) : std::string(chunk);
        };
        for (const SegmentPrediction* q : quotes) {
            const auto& loc = std::get<QuotationLoc>(q->segment.location);
            emit_plain(pos, loc.char_start);
            content += open_tag(locale, SegmentKind::Quotation, q->label);
            content += xml_escape(utf8::substr(body, loc.char_start, loc.char_end));
            content += close_tag(locale, SegmentKind::Quotation);
            pos = loc.char_end;
        }
        emit_plain(pos, para_ranges[i].second);
        if (wrapper) {
            body_out += open_tag(locale, wrapper_kind, wrapper->label);
            body_out += content;
            body_out += close_tag(locale, wrapper_kind);
        } else {
            body_out += content;
        }
    }
    out.body_tagged = body_out;
    return out;
}

std::string strip_tags(const std::string& tagged, const LocaleBundle& locale) {
    std::string out;
    out.reserve(tagged.size());
    int depth = 0;
    std::size_t i = 0;
    const std::size_t n = tagged.size();

    auto try_open = [&](std::size_t pos) -> std::size_t {
        for (const std::string& tag : locale.tag_names) {
            std::string prefix = "<" + tag + " " + locale.stance_attr + "=\"";
            if (tagged.compare(pos, prefix.size(), prefix) != 0) continue;
            std::size_t q = tagged.find('"', pos + prefix.size());
            if (q == std::string::npos || q + 1 >= n || tagged[q + 1] != '>') continue;
            return q + 2;
        }
        return pos;
    };
    auto try_close = [&](std::size_t pos) -> std::size_t {
        for (const std::string& tag : locale.tag_names) {
            std::string token = "</" + tag + ">";
            if (tagged.compare(pos, token.size(), token) == 0) return pos + token.size();
        }
        return pos;
    };

    while (i < n) {
        char c = tagged[i];
        if (c == '<') {
            if (std::size_t next = try_open(i); next != i) {
                ++depth;
                i = next;
                continue;
            }
            if (std::size_t next = try_close(i); next != i) {
                if (depth > 0) --depth;
                i = next;
                continue;
            }
            out.push_back(c);
            ++i;
            continue;
        }
        if (depth > 0 && c == '&') {
            if (tagged.compare(i, 5, "&amp;") == 0) {
                out.push_back('&');
                i += 5;
                continue;
            }
            if (tagged.compare(i, 4, "&lt;") == 0) {
                out.push_back('<');
                i += 4;
                continue;
            }
            if (tagged.compare(i, 4, "&gt;") == 0) {
                out.push_back('>');
                i += 4;
                continue;
            }
        }
        out.push_back(c);
        ++i;
    }
    return out;
}

PromptBundle build_prompt(const TaggedArticle& tagged, const std::string& issue_text,
                          const LocaleBundle& locale, bool cot,
                          const std::vector<FewShotExample>& few_shots) {
    PromptBundle bundle;
    bundle.system = locale.system_prompt;
    if (cot) bundle.system += "\n\n" + locale.cot_suffix;
    for (const FewShotExample& shot : few_shots)
        bundle.few_shot_turns.emplace_back(shot.user_turn, shot.assistant_turn);
    bundle.user = locale.issue_label + ": " + issue_text + "\n\n" + locale.headline_label +
                  ": " + tagged.headline_tagged + "\n\n" + locale.article_label + ": " +
                  tagged.body_tagged;
    bundle.locale_id = locale.id;
    bundle.cot = cot;
    bundle.k_shot = static_cast<int>(few_shots.size());

    std::vector<std::string> fields = {bundle.system};
    for (const auto& [u, a] : bundle.few_shot_turns) {
        fields.push_back(u);
        fields.push_back(a);
    }
    fields.push_back(bundle.user);
    fields.push_back(bundle.locale_id);
    fields.push_back(cot ? "1" : "0");
    fields.push_back(std::to_string(bundle.k_shot));
    bundle.content_hash = sha256_hex_fields(fields);
    return bundle;
}

StanceLabel parse_article_stance(const std::string& llm_text, const LocaleBundle& locale,
                                 bool cot) {
    if (llm_text.empty()) throw NoLabelFound("empty response");
    std::string haystack = utf8::ascii_lower(llm_text);

    struct Hit {
        StanceLabel label;
        std::size_t last_pos;
    };
    std::vector<Hit> hits;
    for (StanceLabel label : kAllStances) {
        std::string needle = utf8::ascii_lower(locale.word_for(label));
        std::size_t last = std::string::npos;
        std::size_t pos = haystack.find(needle);
        while (pos != std::string::npos) {
            last = pos;
            pos = haystack.find(needle, pos + 1);
        }
        if (last != std::string::npos) hits.push_back({label, last});
    }
    if (hits.empty())
        throw NoLabelFound("no stance label word found in response: " +
                           llm_text.substr(0, 200));
    if (!cot) {
        if (hits.size() > 1)
            throw AmbiguousLabel("multiple stance label words found in non-CoT response");
        return hits.front().label;
    }
    std::sort(hits.begin(), hits.end(),
              [](const Hit& a, const Hit& b) { return a.last_pos > b.last_pos; });
    if (hits.size() > 1 && hits[0].last_pos == hits[1].last_pos)
        throw AmbiguousLabel("two stance label words tie for the final position");
    return hits.front().label;
}

std::vector<SegmentPrediction> predictions_from_annotation(const AnnotatedArticle& a,
                                                           const std::string& agent_id) {
    if (!a.annotation)
        throw OracleMissingAnnotation("article \"" + a.article.id + "\" has no gold annotation");
    const ArticleAnnotation& ann = *a.annotation;
    const Article& art = a.article;
    std::string body = art.canonical_body();

    std::vector<SegmentPrediction> preds;
    preds.push_back({{SegmentKind::Headline, art.headline, HeadlineLoc{}, 0},
                     ann.headline_stance,
                     std::nullopt,
                     agent_id});
    preds.push_back({{SegmentKind::Lead, art.body_paragraphs.front(), ParagraphLoc{0}, 0},
                     ann.lead_stance,
                     std::nullopt,
                     agent_id});
    if (ann.conclusion_stance) {
        std::size_t last = art.body_paragraphs.size() - 1;
        preds.push_back(
            {{SegmentKind::Conclusion, art.body_paragraphs[last], ParagraphLoc{last}, 0},
             *ann.conclusion_stance,
             std::nullopt,
             agent_id});
    }
    std::size_t ordinal = 0;
    for (const QuotationAnnotation& q : ann.quotations) {
        preds.push_back({{SegmentKind::Quotation,
                          std::string(utf8::substr(body, q.char_start, q.char_end)),
                          QuotationLoc{q.char_start, q.char_end}, ordinal++},
                         q.stance,
                         std::nullopt,
                         agent_id});
    }
    return preds;
}

FewShotExample render_few_shot(const AnnotatedArticle& a, const LocaleBundle& locale,
                               const std::set<SegmentKind>& ablation_set) {
    if (!a.annotation)
        throw OracleMissingAnnotation("few-shot example \"" + a.article.id +
                                      "\" has no gold annotation");
    TaggedArticle tagged =
        tag_article(a.article, predictions_from_annotation(a, "gold"), ablation_set, locale);
    FewShotExample shot;
    shot.article_id = a.article.id;
    shot.gold = a.annotation->article_stance;
    shot.user_turn = locale.issue_label + ": " + a.article.issue_text + "\n\n" +
                     locale.headline_label + ": " + tagged.headline_tagged + "\n\n" +
                     locale.article_label + ": " + tagged.body_tagged;
    shot.assistant_turn = locale.word_for(a.annotation->article_stance);
    return shot;
}

} // namespace joaicl
