#pragma once

#include <string>
#include <vector>

#include "sectk/session.hpp"

namespace sectk {

// Why a word got its speaker: positive temporal overlap, or nearest segment
// boundary when nothing overlaps.
enum class AssignRule { Overlap, Nearest };

struct AssignRecord {
    std::string speaker;
    AssignRule rule = AssignRule::Overlap;
    double seconds = 0.0;  // overlap duration, or boundary gap for Nearest
};

using ReconcileTrace = std::vector<AssignRecord>;

// Picks the speaker with the biggest summed overlap across its segments;
// falls back to the smallest boundary distance when nothing overlaps.
// Ties: earliest segment start, then lexicographically smaller label.
AssignRecord assign_speaker(const Word& word, const std::vector<SpeakerSegment>& segments);

std::pair<TaggedTranscript, ReconcileTrace> reconcile(const std::vector<Word>& words,
                                                      const std::vector<SpeakerSegment>& segments,
                                                      const std::string& session_id = "session");

}  // namespace sectk
