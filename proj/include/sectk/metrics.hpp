#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "sectk/session.hpp"

namespace sectk {

enum class OpKind { Correct, Substitution, Insertion, Deletion };

struct AlignmentOp {
    OpKind kind = OpKind::Correct;
    // -1 when the side does not participate (insertions have no ref index,
    // deletions no hyp index).
    int ref_index = -1;
    int hyp_index = -1;
};

struct AlignmentCounts {
    std::size_t correct = 0;       // C
    std::size_t substitutions = 0; // S
    std::size_t insertions = 0;    // I
    std::size_t deletions = 0;     // D
    std::size_t correct_wrong_tag = 0;      // C_IS
    std::size_t substitution_wrong_tag = 0; // S_IS
};

// Partial bijection hypothesis speaker -> reference speaker.
using SpeakerMapping = std::map<std::string, std::string>;

enum class ErrorType { A, B, C };

// One taxonomy finding inside a reference turn.
struct TypedError {
    ErrorType kind = ErrorType::A;
    std::size_t turn_begin = 0;
    std::size_t turn_end = 0;
    std::vector<std::size_t> wrong_word_indices;  // reference indices
};

struct WderResult {
    double rate = 0.0;
    AlignmentCounts counts;
    SpeakerMapping mapping;
};

struct CpWerResult {
    double rate = 0.0;
    std::size_t errors = 0;
    std::size_t ref_words = 0;
};

// Minimal unit-cost edit alignment; backtrace prefers
// correct > substitution > deletion > insertion.
std::vector<AlignmentOp> align(const std::vector<std::string>& ref, const std::vector<std::string>& hyp);

std::size_t edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Bijection maximizing agreement over correct+substituted pairs, solved by
// exact linear assignment on the speaker co-occurrence matrix.
SpeakerMapping map_speakers(const std::vector<AlignmentOp>& alignment,
                            const std::vector<std::string>& ref_tags,
                            const std::vector<std::string>& hyp_tags);

// WDER = (S_IS + C_IS) / (S + C) under the optimal speaker mapping.
WderResult wder(const TaggedTranscript& ref, const TaggedTranscript& hyp);

// Concatenated minimum-permutation WER. Exhaustive bijections for <= 8
// speakers, exact assignment on the edit-distance cost matrix otherwise.
CpWerResult cpwer(const TaggedTranscript& ref, const TaggedTranscript& hyp);

// Corpus-level BLEU, orders 1..4 with uniform weights and brevity penalty.
// Orders with zero clipped matches over the corpus are dropped from the
// geometric mean; zero unigram matches score 0.
double bleu(const std::vector<std::vector<std::string>>& references,
            const std::vector<std::vector<std::string>>& hypotheses);

// Per reference turn: type c when every aligned word is mis-tagged, type b
// for boundary-touching mis-tag runs, type a for interior runs.
std::vector<TypedError> classify_errors(const TaggedTranscript& ref, const TaggedTranscript& hyp);

}  // namespace sectk
