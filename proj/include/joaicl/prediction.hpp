#pragma once

#include <optional>
#include <string>

#include "joaicl/corpus.hpp"
#include "joaicl/segmenter.hpp"

namespace joaicl {

// A (segment, label) pair produced by an agent; the information injected
// into article-level prompts.
struct SegmentPrediction {
    SegmentSpan segment;
    StanceLabel label = StanceLabel::Neutral;
    std::optional<double> confidence; // in [0,1] when present
    std::string agent_id;

    bool operator==(const SegmentPrediction&) const = default;
};

} // namespace joaicl
