#include "joaicl/segmenter.hpp"

#include "joaicl/utf8.hpp"

namespace joaicl {

std::string_view to_string(SegmentKind kind) {
    switch (kind) {
    case SegmentKind::Headline: return "headline";
    case SegmentKind::Lead: return "lead";
    case SegmentKind::Conclusion: return "conclusion";
    case SegmentKind::Quotation: return "quotation";
    }
    return "headline";
}

SegmentKind segment_kind_from_string(std::string_view s) {
    if (s == "headline") return SegmentKind::Headline;
    if (s == "lead") return SegmentKind::Lead;
    if (s == "conclusion") return SegmentKind::Conclusion;
    if (s == "quotation") return SegmentKind::Quotation;
    throw ValidationError("unknown segment kind \"" + std::string(s) + "\"");
}

std::vector<QuoteRange> extract_quotations(std::string_view text) {
    enum class State { Outside, InStraight, InCurly };
    State state = State::Outside;

    std::vector<QuoteRange> out;
    std::size_t byte = 0;
    std::size_t cp = 0;
    std::size_t open_cp = 0; // first code point of the inner text

    auto close_at = [&](std::size_t end_cp) {
        std::string_view inner = utf8::substr(text, open_cp, end_cp);
        if (utf8::non_space_count(inner) >= 2) out.push_back({open_cp, end_cp});
        state = State::Outside;
    };

    while (byte < text.size()) {
        char32_t c = utf8::decode(text, byte);
        switch (state) {
        case State::Outside:
            if (c == U'"') {
                state = State::InStraight;
                open_cp = cp + 1;
            } else if (c == U'“') {
                state = State::InCurly;
                open_cp = cp + 1;
            }
            // a lone closing curly quote outside any pair is ignored
            break;
        case State::InStraight:
            if (c == U'"') close_at(cp);
            break;
        case State::InCurly:
            if (c == U'”') close_at(cp);
            break;
        }
        ++cp;
    }
    // unmatched opener at end of text: ignored
    return out;
}

std::vector<SegmentSpan> extract_segments(const Article& article) {
    std::vector<SegmentSpan> spans;
    spans.push_back({SegmentKind::Headline, article.headline, HeadlineLoc{}, 0});
    spans.push_back({SegmentKind::Lead, article.body_paragraphs.front(), ParagraphLoc{0}, 0});
    if (article.body_paragraphs.size() >= 2) {
        std::size_t last = article.body_paragraphs.size() - 1;
        spans.push_back({SegmentKind::Conclusion, article.body_paragraphs[last],
                         ParagraphLoc{last}, 0});
    }
    std::string body = article.canonical_body();
    std::size_t ordinal = 0;
    for (const QuoteRange& q : extract_quotations(body)) {
        spans.push_back({SegmentKind::Quotation,
                         std::string(utf8::substr(body, q.char_start, q.char_end)),
                         QuotationLoc{q.char_start, q.char_end}, ordinal++});
    }
    return spans;
}

} // namespace joaicl
