#include "sectk/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "sectk/assignment.hpp"
#include "sectk/errors.hpp"

namespace sectk {

std::vector<AlignmentOp> align(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
    const std::size_t m = ref.size(), n = hyp.size();
    std::vector<std::vector<unsigned>> dp(m + 1, std::vector<unsigned>(n + 1, 0));
    for (std::size_t i = 0; i <= m; ++i) dp[i][0] = static_cast<unsigned>(i);
    for (std::size_t j = 0; j <= n; ++j) dp[0][j] = static_cast<unsigned>(j);
    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t j = 1; j <= n; ++j) {
            unsigned diag = dp[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0u : 1u);
            dp[i][j] = std::min({diag, dp[i - 1][j] + 1, dp[i][j - 1] + 1});
        }
    }

    // Backtrace, preferring correct > substitution > deletion > insertion.
    std::vector<AlignmentOp> ops;
    std::size_t i = m, j = n;
    while (i > 0 || j > 0) {
        if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && dp[i][j] == dp[i - 1][j - 1]) {
            ops.push_back({OpKind::Correct, static_cast<int>(i - 1), static_cast<int>(j - 1)});
            --i, --j;
        } else if (i > 0 && j > 0 && dp[i][j] == dp[i - 1][j - 1] + 1 && ref[i - 1] != hyp[j - 1]) {
            ops.push_back({OpKind::Substitution, static_cast<int>(i - 1), static_cast<int>(j - 1)});
            --i, --j;
        } else if (i > 0 && dp[i][j] == dp[i - 1][j] + 1) {
            ops.push_back({OpKind::Deletion, static_cast<int>(i - 1), -1});
            --i;
        } else {
            ops.push_back({OpKind::Insertion, -1, static_cast<int>(j - 1)});
            --j;
        }
    }
    std::reverse(ops.begin(), ops.end());
    return ops;
}

std::size_t edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    const std::size_t m = a.size(), n = b.size();
    std::vector<std::size_t> prev(n + 1), cur(n + 1);
    std::iota(prev.begin(), prev.end(), std::size_t{0});
    for (std::size_t i = 1; i <= m; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= n; ++j) {
            std::size_t diag = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({diag, prev[j] + 1, cur[j - 1] + 1});
        }
        std::swap(prev, cur);
    }
    return prev[n];
}

SpeakerMapping map_speakers(const std::vector<AlignmentOp>& alignment,
                            const std::vector<std::string>& ref_tags,
                            const std::vector<std::string>& hyp_tags) {
    std::set<std::string> ref_set, hyp_set;
    for (const auto& t : ref_tags) ref_set.insert(t);
    for (const auto& t : hyp_tags) hyp_set.insert(t);
    std::vector<std::string> ref_labels(ref_set.begin(), ref_set.end());
    std::vector<std::string> hyp_labels(hyp_set.begin(), hyp_set.end());
    std::map<std::string, int> ref_idx, hyp_idx;
    for (std::size_t i = 0; i < ref_labels.size(); ++i) ref_idx[ref_labels[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < hyp_labels.size(); ++i) hyp_idx[hyp_labels[i]] = static_cast<int>(i);

    std::vector<std::vector<double>> weight(hyp_labels.size(), std::vector<double>(ref_labels.size(), 0.0));
    for (const auto& op : alignment) {
        if (op.kind != OpKind::Correct && op.kind != OpKind::Substitution) continue;
        weight[hyp_idx.at(hyp_tags[op.hyp_index])][ref_idx.at(ref_tags[op.ref_index])] += 1.0;
    }

    std::vector<int> match = solve_max_assignment(weight);
    SpeakerMapping mapping;
    for (std::size_t h = 0; h < hyp_labels.size(); ++h) {
        // zero co-occurrence carries no evidence, leave the label unmapped
        if (match[h] >= 0 && weight[h][match[h]] > 0.0)
            mapping[hyp_labels[h]] = ref_labels[match[h]];
    }
    return mapping;
}

namespace {

std::vector<std::string> texts_of(const TaggedTranscript& t) {
    std::vector<std::string> out;
    out.reserve(t.words.size());
    for (const auto& w : t.words) out.push_back(w.text);
    return out;
}

std::vector<std::string> tags_of(const TaggedTranscript& t) {
    std::vector<std::string> out;
    out.reserve(t.words.size());
    for (const auto& w : t.words) out.push_back(w.speaker);
    return out;
}

}  // namespace

WderResult wder(const TaggedTranscript& ref, const TaggedTranscript& hyp) {
    auto ref_texts = texts_of(ref), hyp_texts = texts_of(hyp);
    auto ref_tags = tags_of(ref), hyp_tags = tags_of(hyp);
    auto ops = align(ref_texts, hyp_texts);

    WderResult result;
    result.mapping = map_speakers(ops, ref_tags, hyp_tags);

    for (const auto& op : ops) {
        switch (op.kind) {
            case OpKind::Insertion: ++result.counts.insertions; continue;
            case OpKind::Deletion: ++result.counts.deletions; continue;
            case OpKind::Correct: ++result.counts.correct; break;
            case OpKind::Substitution: ++result.counts.substitutions; break;
        }
        auto it = result.mapping.find(hyp_tags[op.hyp_index]);
        bool tag_ok = it != result.mapping.end() && it->second == ref_tags[op.ref_index];
        if (!tag_ok) {
            if (op.kind == OpKind::Correct)
                ++result.counts.correct_wrong_tag;
            else
                ++result.counts.substitution_wrong_tag;
        }
    }

    std::size_t denom = result.counts.correct + result.counts.substitutions;
    if (denom == 0) throw NumericalError("wder undefined: no correct or substituted words (S + C == 0)");
    result.rate =
        static_cast<double>(result.counts.correct_wrong_tag + result.counts.substitution_wrong_tag) /
        static_cast<double>(denom);
    return result;
}

namespace {

// Total cost of the best stream bijection on the padded square matrix, by
// exhaustive permutation enumeration.
double best_permutation_cost(const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += cost[i][perm[i]];
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace

CpWerResult cpwer(const TaggedTranscript& ref, const TaggedTranscript& hyp) {
    if (ref.words.empty()) throw NumericalError("cpwer undefined: empty reference");

    std::map<std::string, std::vector<std::string>> ref_streams, hyp_streams;
    for (const auto& w : ref.words) ref_streams[w.speaker].push_back(w.text);
    for (const auto& w : hyp.words) hyp_streams[w.speaker].push_back(w.text);

    std::vector<std::vector<std::string>> refs, hyps;
    for (auto& [label, stream] : ref_streams) refs.push_back(std::move(stream));
    for (auto& [label, stream] : hyp_streams) hyps.push_back(std::move(stream));

    const std::size_t n = std::max(refs.size(), hyps.size());
    // Padded square matrix: unmatched streams cost their full length.
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i < refs.size() && j < hyps.size())
                cost[i][j] = static_cast<double>(edit_distance(refs[i], hyps[j]));
            else if (i < refs.size())
                cost[i][j] = static_cast<double>(refs[i].size());
            else if (j < hyps.size())
                cost[i][j] = static_cast<double>(hyps[j].size());
        }
    }

    double total;
    if (n <= 8) {
        total = best_permutation_cost(cost);
    } else {
        std::vector<int> match = solve_assignment(cost);
        total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += cost[i][match[i]];
    }

    CpWerResult result;
    result.errors = static_cast<std::size_t>(std::llround(total));
    result.ref_words = ref.words.size();
    result.rate = total / static_cast<double>(result.ref_words);
    return result;
}

double bleu(const std::vector<std::vector<std::string>>& references,
            const std::vector<std::vector<std::string>>& hypotheses) {
    if (references.size() != hypotheses.size())
        throw ValidationError("bleu: reference/hypothesis corpus size mismatch");
    if (hypotheses.empty()) throw NumericalError("bleu undefined: empty corpus");

    constexpr int kMaxOrder = 4;
    std::array<double, kMaxOrder> matched{}, total{};
    std::size_t ref_len = 0, hyp_len = 0;

    for (std::size_t p = 0; p < references.size(); ++p) {
        const auto& ref = references[p];
        const auto& hyp = hypotheses[p];
        ref_len += ref.size();
        hyp_len += hyp.size();
        for (int n = 1; n <= kMaxOrder; ++n) {
            auto ngrams = [n](const std::vector<std::string>& toks) {
                std::map<std::vector<std::string>, int> counts;
                if (static_cast<int>(toks.size()) < n) return counts;
                for (std::size_t i = 0; i + n <= toks.size(); ++i)
                    ++counts[std::vector<std::string>(toks.begin() + i, toks.begin() + i + n)];
                return counts;
            };
            auto ref_counts = ngrams(ref);
            auto hyp_counts = ngrams(hyp);
            for (const auto& [gram, count] : hyp_counts) {
                total[n - 1] += count;
                auto it = ref_counts.find(gram);
                if (it != ref_counts.end()) matched[n - 1] += std::min(count, it->second);
            }
        }
    }

    if (hyp_len == 0) return 0.0;
    if (matched[0] == 0) return 0.0;

    // Orders with zero clipped matches over the whole corpus are dropped
    // (short segments leave higher orders undefined).
    double log_sum = 0.0;
    int used = 0;
    for (int n = 0; n < kMaxOrder; ++n) {
        if (matched[n] == 0 || total[n] == 0) continue;
        log_sum += std::log(matched[n] / total[n]);
        ++used;
    }
    double brevity = hyp_len >= ref_len
                         ? 1.0
                         : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
    return brevity * std::exp(log_sum / used);
}

std::vector<TypedError> classify_errors(const TaggedTranscript& ref, const TaggedTranscript& hyp) {
    auto ref_texts = texts_of(ref), hyp_texts = texts_of(hyp);
    auto ref_tags = tags_of(ref), hyp_tags = tags_of(hyp);
    auto ops = align(ref_texts, hyp_texts);
    auto mapping = map_speakers(ops, ref_tags, hyp_tags);

    // Per reference word: 0 = unaligned, 1 = correctly tagged, 2 = mis-tagged.
    std::vector<int> state(ref.words.size(), 0);
    for (const auto& op : ops) {
        if (op.kind != OpKind::Correct && op.kind != OpKind::Substitution) continue;
        auto it = mapping.find(hyp_tags[op.hyp_index]);
        bool tag_ok = it != mapping.end() && it->second == ref_tags[op.ref_index];
        state[op.ref_index] = tag_ok ? 1 : 2;
    }

    std::vector<TypedError> errors;
    for (const auto& turn : turns_of(ref)) {
        std::size_t aligned = 0, wrong = 0;
        for (std::size_t i = turn.begin; i < turn.end; ++i) {
            if (state[i] != 0) ++aligned;
            if (state[i] == 2) ++wrong;
        }
        if (aligned == 0 || wrong == 0) continue;

        if (wrong == aligned) {
            TypedError e;
            e.kind = ErrorType::C;
            e.turn_begin = turn.begin;
            e.turn_end = turn.end;
            for (std::size_t i = turn.begin; i < turn.end; ++i)
                if (state[i] == 2) e.wrong_word_indices.push_back(i);
            errors.push_back(std::move(e));
            continue;
        }

        // Maximal runs of mis-tagged words; boundary-touching runs are type b,
        // interior runs type a.
        std::size_t i = turn.begin;
        while (i < turn.end) {
            if (state[i] != 2) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < turn.end && state[j] == 2) ++j;
            TypedError e;
            e.turn_begin = turn.begin;
            e.turn_end = turn.end;
            for (std::size_t k = i; k < j; ++k) e.wrong_word_indices.push_back(k);
            e.kind = (i == turn.begin || j == turn.end) ? ErrorType::B : ErrorType::A;
            errors.push_back(std::move(e));
            i = j;
        }
    }
    return errors;
}

}  // namespace sectk
