#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sectk/rng.hpp"

namespace sectk {

struct SimConfig {
    double p_word_sub = 0.1;
    // Number of simulated speaker errors: 0, 1 or 2.
    double p_zero = 0.40;
    double p_one = 0.48;
    double p_two = 0.12;
    int max_shift = 3;
    uint64_t seed = 0;

    void validate() const;
};

// Corrupted window paired with its reference tags; all sequences are
// token-aligned. Speaker indices are 0/1.
struct TrainingExample {
    std::vector<std::string> tokens;
    std::vector<int> input_tags;
    std::vector<int> target_tags;
};

// 3-best alternates for a word; empty result leaves the word unchanged.
using AlternateFn = std::function<std::vector<std::string>(const std::string&)>;

// Boundary-shift corruption for two-speaker windows, prefix/suffix split for
// single-speaker windows. At most two errors, at distinct sites; never
// leaves a represented speaker without tokens.
std::vector<int> simulate_speaker_errors(const std::vector<int>& tags, const SimConfig& config, Rng& rng);

// Each token independently replaced with probability p_word_sub by a random
// pick from the generator's alternates.
std::vector<std::string> simulate_word_errors(const std::vector<std::string>& tokens,
                                              const AlternateFn& alternates, const SimConfig& config,
                                              Rng& rng);

// Window of reference (token, speaker-index) pairs -> corrupted example.
TrainingExample make_training_example(const std::vector<std::string>& tokens,
                                      const std::vector<int>& reference_tags, const SimConfig& config,
                                      const AlternateFn& alternates, Rng& rng);

}  // namespace sectk
