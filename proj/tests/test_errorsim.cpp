#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "sectk/errors.hpp"
#include "sectk/errorsim.hpp"

using namespace sectk;

namespace {

std::vector<int> tags(int zeros, int ones) {
    std::vector<int> t(zeros, 0);
    t.insert(t.end(), ones, 1);
    return t;
}

// Boundary positions of a 0/1 tag sequence.
std::vector<std::size_t> boundaries(const std::vector<int>& t) {
    std::vector<std::size_t> b;
    for (std::size_t i = 1; i < t.size(); ++i)
        if (t[i] != t[i - 1]) b.push_back(i);
    return b;
}

SimConfig forced(double p0, double p1, double p2, uint64_t seed) {
    SimConfig c;
    c.p_zero = p0;
    c.p_one = p1;
    c.p_two = p2;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("config invariants validated") {
    SimConfig bad = forced(0.5, 0.5, 0.5, 0);
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = forced(0.4, 0.48, 0.12, 0);
    bad.p_word_sub = 1.5;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = forced(0.4, 0.48, 0.12, 0);
    bad.max_shift = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("zero-error draw returns tags unchanged") {
    SimConfig c = forced(1.0, 0.0, 0.0, 5);
    Rng rng(5);
    auto t = tags(8, 6);
    CHECK(simulate_speaker_errors(t, c, rng) == t);
}

TEST_CASE("single error shifts the boundary without emptying a side") {
    SimConfig c = forced(0.0, 1.0, 0.0, 0);
    for (uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(seed);
        auto out = simulate_speaker_errors(tags(8, 6), c, rng);
        REQUIRE(out.size() == 14);
        auto b = boundaries(out);
        REQUIRE(b.size() == 1);         // still two runs
        CHECK(out.front() == 0);        // run order preserved
        CHECK(out.back() == 1);
        CHECK(b[0] != 8);               // d >= 1: the boundary must move
        CHECK(std::abs(static_cast<long>(b[0]) - 8) <= c.max_shift);
    }
}

TEST_CASE("boundary shifted right by 2 reproduces the two-extra-words shape") {
    SimConfig c = forced(0.0, 1.0, 0.0, 0);
    bool seen = false;
    for (uint64_t seed = 0; seed < 400 && !seen; ++seed) {
        Rng rng(seed);
        seen = simulate_speaker_errors(tags(8, 6), c, rng) == tags(10, 4);
    }
    CHECK(seen);
}

TEST_CASE("single-speaker window splits a prefix or suffix") {
    SimConfig c = forced(0.0, 1.0, 0.0, 0);
    bool saw_suffix_1 = false;
    for (uint64_t seed = 0; seed < 400; ++seed) {
        Rng rng(seed);
        auto out = simulate_speaker_errors(std::vector<int>(10, 0), c, rng);
        REQUIRE(out.size() == 10);
        auto b = boundaries(out);
        REQUIRE(b.size() == 1);  // exactly one split
        CHECK(std::count(out.begin(), out.end(), 0) >= 1);
        CHECK(std::count(out.begin(), out.end(), 1) >= 1);
        CHECK((out.front() == 1 || out.back() == 1));  // prefix or suffix became the new speaker
        if (out == tags(9, 1)) saw_suffix_1 = true;
    }
    CHECK(saw_suffix_1);  // the d=1 suffix split shape
}

TEST_CASE("two errors hit distinct sites") {
    SimConfig c = forced(0.0, 0.0, 1.0, 0);
    std::vector<int> t = tags(6, 5);
    t.insert(t.end(), 6, 0);  // 0^6 1^5 0^6: two change points
    for (uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        auto out = simulate_speaker_errors(t, c, rng);
        REQUIRE(out.size() == t.size());
        auto b = boundaries(out);
        CHECK(b.size() == 2);
        CHECK(b[0] != 6);
        CHECK(b[1] != 11);
    }
}

TEST_CASE("more than two distinct speakers rejected") {
    SimConfig c = forced(0.4, 0.48, 0.12, 0);
    Rng rng(0);
    CHECK_THROWS_AS(simulate_speaker_errors({0, 1, 2}, c, rng), ValidationError);
}

TEST_CASE("word errors: probability endpoints") {
    SimConfig c = forced(0.4, 0.48, 0.12, 0);
    AlternateFn prime = [](const std::string& w) { return std::vector<std::string>{w + "x"}; };
    std::vector<std::string> tokens = {"a", "b", "c"};

    c.p_word_sub = 0.0;
    Rng r0(1);
    CHECK(simulate_word_errors(tokens, prime, c, r0) == tokens);

    c.p_word_sub = 1.0;
    Rng r1(1);
    CHECK(simulate_word_errors(tokens, prime, c, r1) == std::vector<std::string>{"ax", "bx", "cx"});

    Rng r2(1);  // no alternates -> unchanged even at p = 1
    CHECK(simulate_word_errors(tokens, nullptr, c, r2) == tokens);
}

TEST_CASE("determinism across runs") {
    SimConfig c = forced(0.4, 0.48, 0.12, 77);
    AlternateFn alt = [](const std::string& w) {
        return std::vector<std::string>{w + "1", w + "2", w + "3"};
    };
    std::vector<std::string> tokens(20, "word");
    std::vector<int> t = tags(12, 8);
    Rng a(42), b(42);
    TrainingExample ea = make_training_example(tokens, t, c, alt, a);
    TrainingExample eb = make_training_example(tokens, t, c, alt, b);
    CHECK(ea.tokens == eb.tokens);
    CHECK(ea.input_tags == eb.input_tags);
    CHECK(ea.target_tags == eb.target_tags);
}

TEST_CASE("training example preserves lengths and reference targets") {
    SimConfig c = forced(0.4, 0.48, 0.12, 3);
    std::vector<std::string> tokens(15, "tok");
    std::vector<int> t = tags(7, 8);
    for (uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        TrainingExample e = make_training_example(tokens, t, c, nullptr, rng);
        CHECK(e.tokens.size() == tokens.size());
        CHECK(e.input_tags.size() == tokens.size());
        CHECK(e.target_tags == t);
        for (int tag : e.input_tags) CHECK((tag == 0 || tag == 1));
    }
}

TEST_CASE("error-count frequencies track the configured distribution") {
    SimConfig c = forced(0.40, 0.48, 0.12, 11);
    int counts[3] = {0, 0, 0};
    const int trials = 20000;
    std::vector<int> t = tags(10, 10);
    t.insert(t.end(), 10, 0);
    for (int i = 0; i < trials; ++i) {
        Rng rng = Rng::substream(11, static_cast<uint64_t>(i));
        auto out = simulate_speaker_errors(t, c, rng);
        std::size_t moved = 0;
        auto b = boundaries(out);
        if (b[0] != 10) ++moved;
        if (b[1] != 20) ++moved;
        ++counts[moved];
    }
    CHECK(std::abs(counts[0] / double(trials) - 0.40) < 0.015);
    CHECK(std::abs(counts[1] / double(trials) - 0.48) < 0.015);
    CHECK(std::abs(counts[2] / double(trials) - 0.12) < 0.015);
}
