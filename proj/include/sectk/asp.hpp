#pragma once

#include <map>
#include <string>
#include <vector>

#include "sectk/g2p.hpp"

namespace sectk {

// One observed ASR confusion: reference word -> hypothesized word.
struct ErrorPair {
    std::string ref_word;
    std::string hyp_word;
    std::size_t count = 1;
};

struct AlternateCandidate {
    std::string word;
    double score = 0.0;
};

// Statistics-driven stand-in for the neural alternate-spelling model: ranked
// word-level confusions plus a phoneme confusion matrix for unseen words.
struct ConfusionLexicon {
    static constexpr const char* kGap = "<gap>";

    // ref word -> alternates ranked by score (nonincreasing), then lexicographically.
    std::map<std::string, std::vector<AlternateCandidate>> entries;
    // phone -> (phone or kGap) -> probability; rows sum to 1 over observed targets.
    std::map<std::string, std::map<std::string, double>> confusions;
    PronunciationLexicon pronunciations;
};

// `ref_word<TAB>hyp_word<TAB>count` lines.
std::vector<ErrorPair> parse_error_pairs(const std::string& content);

// Keeps a pair iff phoneme edit distance / max(len_ref, len_hyp) <= max_ratio.
std::vector<ErrorPair> phonetic_filter(const std::vector<ErrorPair>& pairs,
                                       const PronunciationLexicon& pronunciations,
                                       double max_ratio = 0.5);

double phonetic_distance_ratio(const std::string& ref_word, const std::string& hyp_word,
                               const PronunciationLexicon& pronunciations);

ConfusionLexicon build_confusion_lexicon(const std::vector<ErrorPair>& filtered_pairs,
                                         const PronunciationLexicon& pronunciations);

// Top-k lexicon alternates; unseen words get candidates synthesized from
// single phoneme confusions. Deterministic, duplicate-free, never the input.
std::vector<AlternateCandidate> generate_alternates(const std::string& word,
                                                    const ConfusionLexicon& lexicon, std::size_t k = 3);

// Line-based snapshot with an embedded format version.
std::string serialize_lexicon(const ConfusionLexicon& lexicon);
ConfusionLexicon parse_lexicon(const std::string& content);

struct GeneratorEval {
    double generator_bleu = 0.0;
    double identity_bleu = 0.0;
};

// BLEU over character word pieces between reference alternates and top-1
// predictions, alongside the identity baseline.
GeneratorEval evaluate_generator(const ConfusionLexicon& lexicon, const std::vector<ErrorPair>& test_pairs);

}  // namespace sectk
