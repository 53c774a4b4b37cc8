#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sectk/errorsim.hpp"
#include "sectk/metrics.hpp"
#include "sectk/model.hpp"
#include "sectk/session.hpp"

namespace sectk {

// Position between words i-1 and i where the speaker tag changes.
using ChangePoint = std::size_t;

struct Window {
    std::size_t begin = 0;  // half-open token span [begin, end)
    std::size_t end = 0;
    std::size_t boundary = 0;
    std::string left_speaker;
    std::string right_speaker;
};

struct CorrectionConfig {
    int context_limit = 18;
    int min_side_words = 1;
    // Training schedule.
    int stage1_steps = 300;
    int stage2_steps = 700;
    int batch_size = 32;
    double mean_window_len = 30.0;
    double p_single_speaker_window = 0.3;
    double validation_fraction = 0.1;
    int eval_interval = 100;
    double lr = 1e-3;
    uint64_t seed = 0;
};

// One applied window: old/new tags over [begin, begin + old_tags.size()).
struct ChangeRecord {
    std::string session;
    std::size_t boundary = 0;
    std::size_t begin = 0;
    std::vector<std::string> old_tags;
    std::vector<std::string> new_tags;
};

std::vector<ChangePoint> find_change_points(const TaggedTranscript& transcript);

// Up to `context_limit` words per side, truncated at the adjacent change
// points, so the window holds exactly two speaker runs.
Window extract_window(const TaggedTranscript& transcript, ChangePoint change_point,
                      const CorrectionConfig& config);

// Per-token 0/1 (left/right speaker) predictions for one window.
using TagPredictor =
    std::function<std::vector<int>(const std::vector<std::string>& tokens, const std::vector<int>& input_tags)>;

// Left-to-right single pass over the change points of the input; each window
// reads the partially corrected tag sequence. Word texts never change.
std::pair<TaggedTranscript, std::vector<ChangeRecord>> correct(const TaggedTranscript& transcript,
                                                               const TagPredictor& predictor,
                                                               const CorrectionConfig& config);

std::pair<TaggedTranscript, std::vector<ChangeRecord>> correct(const TaggedTranscript& transcript,
                                                               const SecModel& model,
                                                               const Vocabulary& vocab,
                                                               const CorrectionConfig& config);

// Windowed corruption of a whole session: speaker errors simulated around
// each change point (single-speaker sessions at their edges), word errors
// over the full token stream.
TaggedTranscript corrupt_session(const TaggedTranscript& transcript, const SimConfig& sim,
                                 const AlternateFn& alternates, const CorrectionConfig& config, Rng& rng);

struct TrainingMetrics {
    int step = 0;
    int stage = 1;
    double loss = 0.0;
    double validation_wder = 0.0;
};

struct TrainResult {
    SecModel model;
    Vocabulary vocab;
    std::vector<TrainingMetrics> history;
    double best_validation_wder = 0.0;
};

// Two-stage schedule: head-only with frozen backbone, then the full model.
// Returns the parameters with the best validation WDER.
TrainResult train_sec(const std::vector<TaggedTranscript>& corpus, const SimConfig& sim,
                      const CorrectionConfig& config, EncoderConfig encoder,
                      const AlternateFn& alternates = nullptr);

struct CorrectionReport {
    double wder_before = 0.0, wder_after = 0.0;
    std::size_t wder_errors_before = 0, wder_errors_after = 0, wder_denominator = 0;
    double cpwer_before = 0.0, cpwer_after = 0.0;
    std::size_t cpwer_errors_before = 0, cpwer_errors_after = 0, cpwer_denominator = 0;
    // Type a/b/c counts, before and after.
    std::size_t type_counts_before[3] = {0, 0, 0};
    std::size_t type_counts_after[3] = {0, 0, 0};
    std::vector<ChangeRecord> changes;
};

// Paired-by-session-id scoring before and after correction.
CorrectionReport evaluate_correction(const std::vector<TaggedTranscript>& refs,
                                     const std::vector<TaggedTranscript>& hyps, const SecModel& model,
                                     const Vocabulary& vocab, const CorrectionConfig& config);

}  // namespace sectk
