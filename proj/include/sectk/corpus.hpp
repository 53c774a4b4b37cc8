#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sectk/session.hpp"

namespace sectk {

// Stand-in for conversational corpora: alternating-speaker dialogs over a
// built-in vocabulary, with turn-initial cue words so boundaries carry a
// lexical signal.
struct SyntheticDialogSpec {
    int sessions = 100;
    int speakers_per_session = 2;
    int mean_turn_len = 20;
    int min_turns = 6;
    int max_turns = 24;
    double p_cue_start = 0.9;
    uint64_t seed = 0;

    void validate() const;
};

std::vector<TaggedTranscript> generate_corpus(const SyntheticDialogSpec& spec);

}  // namespace sectk
