#include "sectk/corrector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "sectk/errors.hpp"

namespace sectk {

std::vector<ChangePoint> find_change_points(const TaggedTranscript& transcript) {
    std::vector<ChangePoint> cps;
    for (std::size_t i = 1; i < transcript.words.size(); ++i)
        if (transcript.words[i].speaker != transcript.words[i - 1].speaker) cps.push_back(i);
    return cps;
}

namespace {

Window window_from_tags(const std::vector<std::string>& tags, std::size_t cp, int context_limit) {
    std::size_t prev = 0, next = tags.size();
    for (std::size_t i = cp; i-- > 1;) {
        if (tags[i] != tags[i - 1]) {
            prev = i;
            break;
        }
    }
    for (std::size_t i = cp + 1; i < tags.size(); ++i) {
        if (tags[i] != tags[i - 1]) {
            next = i;
            break;
        }
    }
    Window w;
    w.boundary = cp;
    w.begin = std::max(prev, cp >= static_cast<std::size_t>(context_limit) ? cp - context_limit : 0);
    w.end = std::min(next, cp + context_limit);
    w.left_speaker = tags[cp - 1];
    w.right_speaker = tags[cp];
    return w;
}

std::vector<std::string> tags_of(const TaggedTranscript& t) {
    std::vector<std::string> tags;
    tags.reserve(t.words.size());
    for (const auto& w : t.words) tags.push_back(w.speaker);
    return tags;
}

}  // namespace

Window extract_window(const TaggedTranscript& transcript, ChangePoint change_point,
                      const CorrectionConfig& config) {
    if (change_point == 0 || change_point >= transcript.words.size())
        throw ValidationError("extract_window: boundary index out of range");
    auto tags = tags_of(transcript);
    if (tags[change_point] == tags[change_point - 1])
        throw ValidationError("extract_window: no speaker change at the given index");
    return window_from_tags(tags, change_point, config.context_limit);
}

std::pair<TaggedTranscript, std::vector<ChangeRecord>> correct(const TaggedTranscript& transcript,
                                                               const TagPredictor& predictor,
                                                               const CorrectionConfig& config) {
    TaggedTranscript out = transcript;
    std::vector<ChangeRecord> changes;
    std::vector<std::string> tags = tags_of(transcript);

    // Change points are detected once on the input; windows read the
    // partially corrected tags.
    for (ChangePoint cp : find_change_points(transcript)) {
        if (tags[cp] == tags[cp - 1]) continue;  // boundary no longer exists
        Window w = window_from_tags(tags, cp, config.context_limit);

        std::vector<std::string> tokens;
        std::vector<int> input_tags;
        tokens.reserve(w.end - w.begin);
        for (std::size_t i = w.begin; i < w.end; ++i) {
            tokens.push_back(out.words[i].text);
            input_tags.push_back(i < cp ? 0 : 1);
        }
        std::vector<int> predicted = predictor(tokens, input_tags);
        if (predicted.size() != tokens.size())
            throw ValidationError("correct: predictor output length mismatch");

        std::vector<std::string> old_tags(tags.begin() + w.begin, tags.begin() + w.end);
        std::vector<std::string> new_tags(old_tags.size());
        for (std::size_t i = 0; i < new_tags.size(); ++i)
            new_tags[i] = predicted[i] == 0 ? w.left_speaker : w.right_speaker;
        if (new_tags == old_tags) continue;

        for (std::size_t i = 0; i < new_tags.size(); ++i) tags[w.begin + i] = new_tags[i];
        ChangeRecord rec;
        rec.session = transcript.session_id;
        rec.boundary = cp;
        rec.begin = w.begin;
        rec.old_tags = std::move(old_tags);
        rec.new_tags = std::move(new_tags);
        changes.push_back(std::move(rec));
    }

    for (std::size_t i = 0; i < tags.size(); ++i) out.words[i].speaker = tags[i];
    return {std::move(out), std::move(changes)};
}

std::pair<TaggedTranscript, std::vector<ChangeRecord>> correct(const TaggedTranscript& transcript,
                                                               const SecModel& model,
                                                               const Vocabulary& vocab,
                                                               const CorrectionConfig& config) {
    TagPredictor predictor = [&model, &vocab](const std::vector<std::string>& tokens,
                                              const std::vector<int>& input_tags) {
        std::vector<int> ids(tokens.size());
        for (std::size_t i = 0; i < tokens.size(); ++i) ids[i] = vocab.id(tokens[i]);
        nn::Value logits = model.forward(ids, input_tags);
        std::vector<int> out(tokens.size());
        std::size_t agree = 0;
        for (std::size_t i = 0; i < out.size(); ++i) {
            Eigen::Index cls = 0;
            logits->value.row(static_cast<Eigen::Index>(i)).maxCoeff(&cls);
            out[i] = static_cast<int>(cls);
            if (out[i] == input_tags[i]) ++agree;
        }
        // The training loss is permutation invariant, so the raw classes
        // carry no fixed left/right meaning; resolve the ambiguity toward
        // the labeling closer to the input (corrections are sparse).
        if (2 * agree < out.size())
            for (int& t : out) t = 1 - t;
        return out;
    };
    return correct(transcript, predictor, config);
}

TaggedTranscript corrupt_session(const TaggedTranscript& transcript, const SimConfig& sim,
                                 const AlternateFn& alternates, const CorrectionConfig& config, Rng& rng) {
    TaggedTranscript out = transcript;
    if (out.words.empty()) return out;
    std::vector<std::string> tags = tags_of(out);

    auto cps = find_change_points(transcript);
    if (cps.empty()) {
        // Single-speaker session: prefix/suffix splits to a synthetic label.
        std::vector<int> idx(tags.size(), 0);
        std::vector<int> corrupted = simulate_speaker_errors(idx, sim, rng);
        for (std::size_t i = 0; i < tags.size(); ++i)
            if (corrupted[i] != 0) tags[i] = tags[i] + "_sim";
    } else {
        for (ChangePoint cp : cps) {
            if (tags[cp] == tags[cp - 1]) continue;
            Window w = window_from_tags(tags, cp, config.context_limit);
            std::vector<int> idx(w.end - w.begin);
            for (std::size_t i = w.begin; i < w.end; ++i) idx[i - w.begin] = i < cp ? 0 : 1;
            std::vector<int> corrupted = simulate_speaker_errors(idx, sim, rng);
            for (std::size_t i = 0; i < idx.size(); ++i)
                tags[w.begin + i] = corrupted[i] == 0 ? w.left_speaker : w.right_speaker;
        }
    }

    std::vector<std::string> tokens;
    tokens.reserve(out.words.size());
    for (const auto& w : out.words) tokens.push_back(w.text);
    tokens = simulate_word_errors(tokens, alternates, sim, rng);
    for (std::size_t i = 0; i < out.words.size(); ++i) {
        out.words[i].text = tokens[i];
        out.words[i].speaker = tags[i];
    }
    return out;
}

namespace {

struct WindowSampler {
    const std::vector<TaggedTranscript>* sessions;
    std::vector<std::vector<Turn>> turns;
    std::vector<std::size_t> with_junctions;  // session indices with >= 2 turns
    double deficit = 0.0;

    explicit WindowSampler(const std::vector<TaggedTranscript>& corpus) : sessions(&corpus) {
        turns.reserve(corpus.size());
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            turns.push_back(turns_of(corpus[i]));
            if (turns.back().size() >= 2) with_junctions.push_back(i);
        }
    }

    // (tokens, reference 0/1 tags); mean length steered toward the target by
    // deficit feedback.
    std::pair<std::vector<std::string>, std::vector<int>> sample(const CorrectionConfig& config, Rng& rng) {
        const int limit = config.context_limit;
        int want = static_cast<int>(std::lround(config.mean_window_len + deficit));
        want = std::clamp(want, 4, 2 * limit);

        bool single = rng.bernoulli(config.p_single_speaker_window) || with_junctions.empty();
        std::vector<std::string> tokens;
        std::vector<int> tags;

        if (single) {
            // Random span inside one turn.
            std::size_t si = rng.next_below(sessions->size());
            const auto& session = (*sessions)[si];
            const auto& ts = turns[si];
            const Turn& t = ts[rng.next_below(ts.size())];
            int len = std::min<int>(want, static_cast<int>(t.size()));
            std::size_t offset = t.begin + rng.next_below(t.size() - len + 1);
            for (std::size_t i = offset; i < offset + static_cast<std::size_t>(len); ++i) {
                tokens.push_back(session.words[i].text);
                tags.push_back(0);
            }
        } else {
            std::size_t si = with_junctions[rng.next_below(with_junctions.size())];
            const auto& session = (*sessions)[si];
            const auto& ts = turns[si];
            std::size_t j = rng.next_below(ts.size() - 1);
            const Turn& left = ts[j];
            const Turn& right = ts[j + 1];
            // The boundary position inside the window must vary the way it
            // does at inference (truncation at adjacent change points makes
            // the sides asymmetric), so draw the left side uniformly and let
            // the right side fill toward the target length.
            int left_cap = std::min(limit, static_cast<int>(left.size()));
            int right_cap = std::min(limit, static_cast<int>(right.size()));
            int left_len = 1 + static_cast<int>(rng.next_below(static_cast<uint64_t>(left_cap)));
            int right_len = std::clamp(want - left_len, 1, right_cap);
            for (std::size_t i = left.end - left_len; i < left.end; ++i) {
                tokens.push_back(session.words[i].text);
                tags.push_back(0);
            }
            for (std::size_t i = right.begin; i < right.begin + static_cast<std::size_t>(right_len); ++i) {
                tokens.push_back(session.words[i].text);
                tags.push_back(1);
            }
        }

        deficit += config.mean_window_len - static_cast<double>(tokens.size());
        deficit = std::clamp(deficit, -4.0 * config.context_limit, 4.0 * config.context_limit);
        return {std::move(tokens), std::move(tags)};
    }
};

struct AggregateWder {
    std::size_t errors = 0;
    std::size_t denom = 0;
    double rate() const { return denom == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(denom); }
};

AggregateWder aggregate_wder(const std::vector<TaggedTranscript>& refs,
                             const std::vector<TaggedTranscript>& hyps) {
    AggregateWder agg;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        WderResult r = wder(refs[i], hyps[i]);
        agg.errors += r.counts.correct_wrong_tag + r.counts.substitution_wrong_tag;
        agg.denom += r.counts.correct + r.counts.substitutions;
    }
    return agg;
}

std::vector<Eigen::MatrixXd> snapshot_params(const SecModel& model) {
    std::vector<Eigen::MatrixXd> snap;
    for (const auto& p : model.all_params()) snap.push_back(p->value);
    return snap;
}

void restore_params(SecModel& model, const std::vector<Eigen::MatrixXd>& snap) {
    auto params = model.all_params();
    for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = snap[i];
}

}  // namespace

TrainResult train_sec(const std::vector<TaggedTranscript>& corpus, const SimConfig& sim,
                      const CorrectionConfig& config, EncoderConfig encoder,
                      const AlternateFn& alternates) {
    if (corpus.empty()) throw ValidationError("train_sec: empty corpus");

    bool any_junction = false;
    for (const auto& session : corpus)
        if (turns_of(session).size() >= 2) any_junction = true;
    if (!any_junction) throw ValidationError("train_sec: corpus has no two-speaker junctions");

    // Deterministic split: trailing sessions are the validation set.
    std::size_t val_count =
        std::min(corpus.size() - 1,
                 std::max<std::size_t>(1, static_cast<std::size_t>(
                                              std::lround(config.validation_fraction * corpus.size()))));
    std::vector<TaggedTranscript> train_set(corpus.begin(), corpus.end() - val_count);
    std::vector<TaggedTranscript> val_refs(corpus.end() - val_count, corpus.end());

    std::vector<std::string> vocab_words;
    for (const auto& session : train_set)
        for (const auto& w : session.words) vocab_words.push_back(w.text);
    Vocabulary vocab(vocab_words);
    encoder.vocab_size = vocab.size();
    if (encoder.max_len < 2 * config.context_limit) encoder.max_len = 2 * config.context_limit;
    encoder.seed = config.seed;

    SecModel model(encoder);
    Adam optimizer(AdamConfig{.lr = config.lr});

    // Fixed corrupted validation inputs, shared by every evaluation.
    std::vector<TaggedTranscript> val_hyps;
    {
        Rng val_rng = Rng::substream(config.seed, 0xA11DA7AULL);
        for (const auto& session : val_refs)
            val_hyps.push_back(corrupt_session(session, sim, alternates, config, val_rng));
    }

    WindowSampler sampler(train_set);
    Rng rng = Rng::substream(config.seed, 1);

    TrainResult result{std::move(model), std::move(vocab), {}, std::numeric_limits<double>::infinity()};
    std::vector<Eigen::MatrixXd> best;

    auto evaluate = [&](int step, int stage, double loss) {
        std::vector<TaggedTranscript> corrected;
        corrected.reserve(val_hyps.size());
        for (const auto& hyp : val_hyps)
            corrected.push_back(correct(hyp, result.model, result.vocab, config).first);
        double v = aggregate_wder(val_refs, corrected).rate();
        result.history.push_back({step, stage, loss, v});
        if (v < result.best_validation_wder) {
            result.best_validation_wder = v;
            best = snapshot_params(result.model);
        }
    };

    int total_steps = config.stage1_steps + config.stage2_steps;
    double running_loss = 0.0;
    for (int step = 1; step <= total_steps; ++step) {
        bool frozen = step <= config.stage1_steps;
        std::vector<TrainingExample> batch;
        batch.reserve(config.batch_size);
        for (int b = 0; b < config.batch_size; ++b) {
            auto [tokens, tags] = sampler.sample(config, rng);
            batch.push_back(make_training_example(tokens, tags, sim, alternates, rng));
        }
        running_loss = train_step(result.model, result.vocab, batch, optimizer, frozen);
        bool stage_end = step == config.stage1_steps || step == total_steps;
        if (step % config.eval_interval == 0 || stage_end) evaluate(step, frozen ? 1 : 2, running_loss);
    }
    if (result.history.empty()) evaluate(total_steps, 2, running_loss);
    if (!best.empty()) restore_params(result.model, best);
    return result;
}

CorrectionReport evaluate_correction(const std::vector<TaggedTranscript>& refs,
                                     const std::vector<TaggedTranscript>& hyps, const SecModel& model,
                                     const Vocabulary& vocab, const CorrectionConfig& config) {
    std::map<std::string, const TaggedTranscript*> by_id;
    for (const auto& r : refs) by_id[r.session_id] = &r;
    if (by_id.size() != refs.size()) throw ValidationError("evaluate_correction: duplicate reference ids");

    std::vector<TaggedTranscript> ordered_refs, corrected;
    CorrectionReport report;
    for (const auto& hyp : hyps) {
        auto it = by_id.find(hyp.session_id);
        if (it == by_id.end())
            throw ValidationError("evaluate_correction: unpaired session '" + hyp.session_id + "'");
        ordered_refs.push_back(*it->second);
        auto [fixed, changes] = correct(hyp, model, vocab, config);
        corrected.push_back(std::move(fixed));
        report.changes.insert(report.changes.end(), changes.begin(), changes.end());
    }
    if (ordered_refs.size() != refs.size())
        throw ValidationError("evaluate_correction: unpaired reference sessions");

    AggregateWder before = aggregate_wder(ordered_refs, hyps);
    AggregateWder after = aggregate_wder(ordered_refs, corrected);
    report.wder_before = before.rate();
    report.wder_after = after.rate();
    report.wder_errors_before = before.errors;
    report.wder_errors_after = after.errors;
    report.wder_denominator = before.denom;

    std::size_t cp_before = 0, cp_after = 0, cp_denom = 0;
    for (std::size_t i = 0; i < ordered_refs.size(); ++i) {
        CpWerResult b = cpwer(ordered_refs[i], hyps[i]);
        CpWerResult a = cpwer(ordered_refs[i], corrected[i]);
        cp_before += b.errors;
        cp_after += a.errors;
        cp_denom += b.ref_words;
        for (const auto& e : classify_errors(ordered_refs[i], hyps[i]))
            ++report.type_counts_before[static_cast<int>(e.kind)];
        for (const auto& e : classify_errors(ordered_refs[i], corrected[i]))
            ++report.type_counts_after[static_cast<int>(e.kind)];
    }
    report.cpwer_errors_before = cp_before;
    report.cpwer_errors_after = cp_after;
    report.cpwer_denominator = cp_denom;
    report.cpwer_before = static_cast<double>(cp_before) / static_cast<double>(cp_denom);
    report.cpwer_after = static_cast<double>(cp_after) / static_cast<double>(cp_denom);
    return report;
}

}  // namespace sectk
