#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "joaicl/corpus.hpp"

namespace joaicl {

// The four structural segments a news article is read through.
enum class SegmentKind { Headline, Lead, Conclusion, Quotation };

constexpr std::array<SegmentKind, 4> kAllSegmentKinds = {
    SegmentKind::Headline, SegmentKind::Lead, SegmentKind::Conclusion,
    SegmentKind::Quotation};

std::string_view to_string(SegmentKind kind);
SegmentKind segment_kind_from_string(std::string_view s);

struct HeadlineLoc {
    bool operator==(const HeadlineLoc&) const = default;
};
struct ParagraphLoc {
    std::size_t paragraph_index = 0;
    bool operator==(const ParagraphLoc&) const = default;
};
// Code-point span into the canonical body, delimiters excluded.
struct QuotationLoc {
    std::size_t char_start = 0;
    std::size_t char_end = 0;
    bool operator==(const QuotationLoc&) const = default;
};

using SegmentLocation = std::variant<HeadlineLoc, ParagraphLoc, QuotationLoc>;

struct SegmentSpan {
    SegmentKind kind = SegmentKind::Headline;
    std::string text;
    SegmentLocation location;
    std::size_t ordinal = 0; // index among spans of the same kind

    bool operator==(const SegmentSpan&) const = default;
};

struct QuoteRange {
    std::size_t char_start = 0;
    std::size_t char_end = 0;
    bool operator==(const QuoteRange&) const = default;
};

// Inner spans of double-quoted stretches, in document order. Straight quotes
// pair by scan order; curly quotes pair U+201C with U+201D. No nesting;
// quotes with fewer than 2 non-whitespace code points are dropped; an
// unmatched opener is ignored. Offsets are code points into `text`.
std::vector<QuoteRange> extract_quotations(std::string_view text);

// One Headline, one Lead (paragraph 0), one Conclusion (last paragraph, only
// when the article has >= 2 paragraphs), then every body quotation in
// document order. Total on valid articles.
std::vector<SegmentSpan> extract_segments(const Article& article);

} // namespace joaicl
