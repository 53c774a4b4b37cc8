#include "doctest.h"
#include "sectk/errors.hpp"
#include "sectk/reconcile.hpp"
#include "sectk/rng.hpp"

using namespace sectk;

namespace {
Word word(double start, double end) { return {"w", start, end, std::nullopt}; }
}  // namespace

TEST_CASE("max overlap wins") {
    std::vector<SpeakerSegment> segs = {{"spk1", 0.0, 2.2}, {"spk2", 2.2, 5.0}};
    AssignRecord record = assign_speaker(word(2.0, 2.5), segs);
    CHECK(record.speaker == "spk2");  // 0.3 vs 0.2
    CHECK(record.rule == AssignRule::Overlap);
    CHECK(record.seconds == doctest::Approx(0.3));
}

TEST_CASE("nearest distance when nothing overlaps") {
    std::vector<SpeakerSegment> segs = {{"spk1", 0.0, 2.0}, {"spk2", 3.0, 4.0}};
    AssignRecord record = assign_speaker(word(10.0, 10.4), segs);
    CHECK(record.speaker == "spk2");  // gap 6.0 vs 8.0
    CHECK(record.rule == AssignRule::Nearest);
    CHECK(record.seconds == doctest::Approx(6.0));
}

TEST_CASE("overlap tie broken by earliest segment start") {
    std::vector<SpeakerSegment> segs = {{"spk2", 1.5, 3.0}, {"spk1", 0.0, 1.5}};
    AssignRecord record = assign_speaker(word(1.0, 2.0), segs);
    CHECK(record.speaker == "spk1");  // both overlap 0.5; spk1's segment starts first
}

TEST_CASE("overlap aggregates across a speaker's segments") {
    // spk1 overlaps 0.2 + 0.2 across two segments, spk2 overlaps 0.3 once.
    std::vector<SpeakerSegment> segs = {
        {"spk1", 0.0, 1.2}, {"spk2", 1.2, 1.5}, {"spk1", 1.5, 1.7}, {"spk2", 1.7, 9.9}};
    AssignRecord record = assign_speaker(word(1.0, 1.7), segs);
    CHECK(record.speaker == "spk1");
    CHECK(record.seconds == doctest::Approx(0.4));
}

TEST_CASE("empty segment list is a configuration error") {
    CHECK_THROWS_AS(assign_speaker(word(0.0, 1.0), {}), ConfigError);
}

TEST_CASE("words inside distinct segments take those speakers") {
    std::vector<SpeakerSegment> segs = {{"a", 0.0, 1.0}, {"b", 1.0, 2.0}, {"c", 2.0, 3.0}};
    std::vector<Word> words = {word(0.1, 0.5), word(1.2, 1.8), word(2.1, 2.4)};
    auto [transcript, trace] = reconcile(words, segs, "s");
    REQUIRE(transcript.words.size() == 3);
    CHECK(transcript.words[0].speaker == "a");
    CHECK(transcript.words[1].speaker == "b");
    CHECK(transcript.words[2].speaker == "c");
    CHECK(trace.size() == 3);
}

TEST_CASE("straddling word matches brute-force overlap oracle") {
    std::vector<SpeakerSegment> segs = {{"spk1", 0.0, 3.0}, {"spk2", 3.0, 6.0}};
    std::vector<Word> words = {word(0.2, 0.8), word(1.0, 1.6), word(2.0, 2.9),
                               word(2.9, 3.4),  // straddles: 0.1 vs 0.4 -> spk2
                               word(3.6, 4.2), word(5.0, 5.8)};
    auto [transcript, trace] = reconcile(words, segs, "s");
    for (std::size_t i = 0; i < words.size(); ++i) {
        // Hand-enumerable oracle: clip the word against each segment.
        double best = -1.0;
        std::string best_speaker;
        for (const auto& seg : segs) {
            double ov = std::min(words[i].end, seg.end) - std::max(words[i].start, seg.start);
            if (ov > best) {
                best = ov;
                best_speaker = seg.speaker;
            }
        }
        CHECK(transcript.words[i].speaker == best_speaker);
    }
    CHECK(transcript.words[3].speaker == "spk2");
}

TEST_CASE("assignments are translation invariant") {
    Rng rng(7);
    for (int iter = 0; iter < 20; ++iter) {
        std::vector<SpeakerSegment> segs;
        double t = 0.0;
        for (int s = 0; s < 4; ++s) {
            double len = 0.5 + rng.next_double() * 2.0;
            segs.push_back({s % 2 ? "a" : "b", t, t + len});
            t += len + rng.next_double();
        }
        std::vector<Word> words;
        double wt = rng.next_double() * t;
        for (int w = 0; w < 8; ++w) {
            double len = 0.1 + rng.next_double() * 0.6;
            words.push_back(word(wt, wt + len));
            wt += len + rng.next_double() * 0.5;
        }
        auto [base, trace1] = reconcile(words, segs, "s");

        const double shift = 1000.0;
        for (auto& s : segs) {
            s.start += shift;
            s.end += shift;
        }
        for (auto& w : words) {
            w.start += shift;
            w.end += shift;
        }
        auto [shifted, trace2] = reconcile(words, segs, "s");
        for (std::size_t i = 0; i < words.size(); ++i)
            CHECK(base.words[i].speaker == shifted.words[i].speaker);
    }
}

TEST_CASE("word texts and count preserved") {
    std::vector<SpeakerSegment> segs = {{"a", 0.0, 10.0}};
    std::vector<Word> words = {{"alpha", 0.0, 1.0, std::nullopt}, {"beta", 1.0, 2.0, std::nullopt}};
    auto [transcript, trace] = reconcile(words, segs, "s");
    REQUIRE(transcript.words.size() == 2);
    CHECK(transcript.words[0].text == "alpha");
    CHECK(transcript.words[1].text == "beta");
    CHECK(transcript.speaker_set() == std::vector<std::string>{"a"});
}
