#include "sectk/corpus.hpp"

#include <algorithm>

#include "sectk/errors.hpp"
#include "sectk/rng.hpp"

namespace sectk {

namespace {

// Turn openers. Placed at turn starts with probability p_cue_start, which is
// what makes simulated boundary shifts recoverable from text alone.
const char* kCueWords[] = {
    "yeah", "well", "so", "okay", "right", "um", "oh", "hmm", "no", "yes",
    "look", "listen", "honestly", "anyway", "actually", "sure", "exactly", "wait",
};

const char* kContentWords[] = {
    "i", "you", "we", "they", "he", "she", "it", "the", "a", "that", "this", "those", "my",
    "your", "our", "their", "think", "know", "mean", "want", "need", "like", "said", "told",
    "asked", "went", "came", "got", "made", "took", "saw", "heard", "found", "left", "kept",
    "started", "stopped", "tried", "worked", "played", "moved", "called", "talked", "walked",
    "time", "day", "week", "year", "night", "morning", "house", "home", "school", "work",
    "job", "money", "car", "road", "town", "city", "place", "people", "family", "friend",
    "kids", "mother", "father", "brother", "sister", "dog", "cat", "music", "radio", "game",
    "show", "movie", "book", "story", "news", "weather", "food", "dinner", "coffee", "water",
    "good", "bad", "big", "small", "old", "new", "long", "short", "early", "late", "happy",
    "hard", "easy", "nice", "fine", "great", "little", "much", "many", "some", "more", "most",
    "really", "pretty", "very", "always", "never", "sometimes", "usually", "maybe", "probably",
    "about", "after", "before", "because", "with", "without", "around", "between", "through",
    "and", "but", "or", "if", "when", "where", "what", "who", "how", "why", "then", "there",
    "here", "down", "back", "over", "again", "still", "just", "only", "even", "also", "too",
    "thing", "things", "stuff", "part", "kind", "sort", "way", "side", "end", "point", "fact",
    "doing", "going", "saying", "getting", "making", "looking", "thinking", "talking",
};

}  // namespace

void SyntheticDialogSpec::validate() const {
    if (sessions < 1) throw ValidationError("dialog spec: sessions must be >= 1");
    if (speakers_per_session != 2) throw ValidationError("dialog spec: only 2 speakers per session supported");
    if (mean_turn_len < 2) throw ValidationError("dialog spec: mean_turn_len must be >= 2");
    if (min_turns < 2 || max_turns < min_turns) throw ValidationError("dialog spec: bad turn-count range");
    if (p_cue_start < 0.0 || p_cue_start > 1.0) throw ValidationError("dialog spec: bad p_cue_start");
}

std::vector<TaggedTranscript> generate_corpus(const SyntheticDialogSpec& spec) {
    spec.validate();
    constexpr std::size_t kCues = sizeof(kCueWords) / sizeof(kCueWords[0]);
    constexpr std::size_t kContent = sizeof(kContentWords) / sizeof(kContentWords[0]);

    // Turn lengths uniform on [mean/2, 3*mean/2]; integer endpoints keep the
    // empirical mean at mean_turn_len.
    int lo = std::max(2, spec.mean_turn_len / 2);
    int hi = spec.mean_turn_len + (spec.mean_turn_len - lo);

    std::vector<TaggedTranscript> corpus;
    corpus.reserve(spec.sessions);
    for (int s = 0; s < spec.sessions; ++s) {
        Rng rng = Rng::substream(spec.seed, static_cast<uint64_t>(s));
        TaggedTranscript session;
        session.session_id = "synth-" + std::to_string(s);
        int turns = static_cast<int>(rng.next_int(spec.min_turns, spec.max_turns));
        for (int t = 0; t < turns; ++t) {
            std::string speaker = (t % 2 == 0) ? "spk1" : "spk2";
            int len = static_cast<int>(rng.next_int(lo, hi));
            for (int i = 0; i < len; ++i) {
                std::string word;
                if (i == 0 && rng.bernoulli(spec.p_cue_start))
                    word = kCueWords[rng.next_below(kCues)];
                else
                    word = kContentWords[rng.next_below(kContent)];
                session.words.push_back({word, speaker});
            }
        }
        corpus.push_back(std::move(session));
    }
    return corpus;
}

}  // namespace sectk
