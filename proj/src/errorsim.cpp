#include "sectk/errorsim.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sectk/errors.hpp"

namespace sectk {

void SimConfig::validate() const {
    if (std::abs(p_zero + p_one + p_two - 1.0) > 1e-9)
        throw ValidationError("sim config: error-count probabilities must sum to 1");
    if (p_word_sub < 0.0 || p_word_sub > 1.0)
        throw ValidationError("sim config: p_word_sub outside [0, 1]");
    if (max_shift < 1) throw ValidationError("sim config: max_shift must be >= 1");
}

namespace {

std::vector<std::size_t> change_points(const std::vector<int>& tags) {
    std::vector<std::size_t> cps;
    for (std::size_t i = 1; i < tags.size(); ++i)
        if (tags[i] != tags[i - 1]) cps.push_back(i);
    return cps;
}

// Shift the boundary at `cp` by up to `want` words in a random direction,
// clamped so neither adjacent run empties. Boundaries other than `cp` are
// never touched.
void shift_boundary(std::vector<int>& tags, std::size_t cp, int want, Rng& rng) {
    auto cps = change_points(tags);
    std::size_t prev = 0, next = tags.size();
    for (std::size_t c : cps) {
        if (c < cp) prev = c;
        if (c > cp && next == tags.size()) next = c;
    }
    int room_left = static_cast<int>(cp - prev) - 1;   // shrink the left run
    int room_right = static_cast<int>(next - cp) - 1;  // shrink the right run

    bool go_right = rng.bernoulli(0.5);
    if (go_right && room_right == 0) go_right = false;
    if (!go_right && room_left == 0) go_right = true;
    if (go_right && room_right == 0) return;  // no room either way

    if (go_right) {
        int d = std::min(want, room_right);
        for (int i = 0; i < d; ++i) tags[cp + i] = tags[cp - 1];
    } else {
        int d = std::min(want, room_left);
        for (int i = 0; i < d; ++i) tags[cp - 1 - i] = tags[cp];
    }
}

}  // namespace

std::vector<int> simulate_speaker_errors(const std::vector<int>& tags, const SimConfig& config, Rng& rng) {
    config.validate();
    std::set<int> distinct(tags.begin(), tags.end());
    if (distinct.size() > 2) throw ValidationError("speaker error simulation supports at most 2 speakers");

    double u = rng.next_double();
    int k = u < config.p_zero ? 0 : (u < config.p_zero + config.p_one ? 1 : 2);
    std::vector<int> out = tags;
    if (k == 0 || tags.size() < 2) return out;

    if (distinct.size() == 2) {
        auto cps = change_points(out);
        // Distinct sites: pick up to k different change points.
        std::vector<std::size_t> sites = cps;
        for (std::size_t i = sites.size(); i > 1; --i)
            std::swap(sites[i - 1], sites[rng.next_below(i)]);
        sites.resize(std::min<std::size_t>(k, sites.size()));
        for (std::size_t cp : sites) {
            int d = static_cast<int>(rng.next_int(1, config.max_shift));
            shift_boundary(out, cp, d, rng);
        }
        return out;
    }

    // Single speaker: split a prefix and/or suffix off to a second speaker.
    int current = tags[0];
    int other = current == 0 ? 1 : 0;
    bool do_prefix, do_suffix;
    if (k == 2) {
        do_prefix = do_suffix = true;
    } else {
        do_prefix = rng.bernoulli(0.5);
        do_suffix = !do_prefix;
    }
    int remaining = static_cast<int>(out.size()) - 1;  // the original speaker keeps >= 1 token
    if (do_prefix && remaining > 0) {
        int d = std::min(static_cast<int>(rng.next_int(1, config.max_shift)), remaining);
        for (int i = 0; i < d; ++i) out[i] = other;
        remaining -= d;
    }
    if (do_suffix && remaining > 0) {
        int d = std::min(static_cast<int>(rng.next_int(1, config.max_shift)), remaining);
        for (int i = 0; i < d; ++i) out[out.size() - 1 - i] = other;
    }
    return out;
}

std::vector<std::string> simulate_word_errors(const std::vector<std::string>& tokens,
                                              const AlternateFn& alternates, const SimConfig& config,
                                              Rng& rng) {
    config.validate();
    std::vector<std::string> out = tokens;
    for (auto& token : out) {
        if (!rng.bernoulli(config.p_word_sub)) continue;
        std::vector<std::string> alts = alternates ? alternates(token) : std::vector<std::string>{};
        if (alts.empty()) continue;
        token = alts[rng.next_below(alts.size())];
    }
    return out;
}

TrainingExample make_training_example(const std::vector<std::string>& tokens,
                                      const std::vector<int>& reference_tags, const SimConfig& config,
                                      const AlternateFn& alternates, Rng& rng) {
    if (tokens.size() != reference_tags.size())
        throw ValidationError("training example: token/tag length mismatch");
    TrainingExample example;
    example.target_tags = reference_tags;
    example.input_tags = simulate_speaker_errors(reference_tags, config, rng);
    example.tokens = simulate_word_errors(tokens, alternates, config, rng);
    return example;
}

}  // namespace sectk
