#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "joaicl/corpus.hpp"
#include "joaicl/prediction.hpp"
#include "joaicl/segmenter.hpp"

namespace joaicl {

// Everything language-specific: tag names, attribute name, label words,
// section labels, and the instruction texts. New languages load from JSON.
struct LocaleBundle {
    std::string id;                          // "en", "ko", ...
    std::array<std::string, 4> tag_names;    // indexed by SegmentKind
    std::string stance_attr;                 // attribute carrying the label
    std::array<std::string, 3> label_words;  // indexed by StanceLabel
    std::string issue_label;
    std::string headline_label;
    std::string article_label;
    std::string system_prompt;
    std::string cot_suffix;
    std::string segment_system_prompt;

    const std::string& tag_for(SegmentKind kind) const {
        return tag_names[static_cast<std::size_t>(kind)];
    }
    const std::string& word_for(StanceLabel label) const {
        return label_words[static_cast<std::size_t>(label)];
    }
};

const LocaleBundle& english_locale();
const LocaleBundle& korean_locale();

// Resolves "en"/"ko" plus any bundle registered at runtime.
const LocaleBundle& get_locale(const std::string& id);
LocaleBundle locale_from_json_file(const std::filesystem::path& path);
void register_locale(LocaleBundle bundle);

struct TaggedArticle {
    std::string headline_tagged;
    std::string body_tagged;
    std::set<SegmentKind> ablated_kinds;
};

struct PromptBundle {
    std::string system;
    std::vector<std::pair<std::string, std::string>> few_shot_turns; // (user, assistant)
    std::string user;
    std::string locale_id;
    bool cot = false;
    int k_shot = 0;
    std::string content_hash;
};

struct FewShotExample {
    std::string article_id;
    StanceLabel gold = StanceLabel::Neutral;
    std::string user_turn;
    std::string assistant_turn;
};

// Wraps each predicted, non-ablated segment in <Tag stance="Word">...</Tag>.
// Quotation tags nest inside the lead/conclusion tags when their spans fall
// in those paragraphs. '<', '>' and '&' are escaped inside tagged regions
// only. Throws ValidationError when a prediction does not reference a
// segment of this article.
TaggedArticle tag_article(const Article& article,
                          const std::vector<SegmentPrediction>& predictions,
                          const std::set<SegmentKind>& ablation_set,
                          const LocaleBundle& locale);

// Inverse of the tagging grammar: removes tags and unescapes their content.
std::string strip_tags(const std::string& tagged, const LocaleBundle& locale);

PromptBundle build_prompt(const TaggedArticle& tagged, const std::string& issue_text,
                          const LocaleBundle& locale, bool cot,
                          const std::vector<FewShotExample>& few_shots);

// Maps an LLM response back onto a label. Non-CoT responses must contain
// exactly one distinct label word; CoT responses resolve to the label word
// occurring last.
StanceLabel parse_article_stance(const std::string& llm_text, const LocaleBundle& locale,
                                 bool cot);

// Renders a gold-tagged train article as a few-shot turn pair.
FewShotExample render_few_shot(const AnnotatedArticle& a, const LocaleBundle& locale,
                               const std::set<SegmentKind>& ablation_set);

// Gold annotations expressed as segment predictions (the oracle view).
std::vector<SegmentPrediction> predictions_from_annotation(const AnnotatedArticle& a,
                                                           const std::string& agent_id);

} // namespace joaicl
