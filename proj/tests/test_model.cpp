#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "sectk/errors.hpp"
#include "sectk/model.hpp"
#include "sectk/rng.hpp"

using namespace sectk;

namespace {

EncoderConfig tiny_config(int vocab_size) {
    EncoderConfig c;
    c.vocab_size = vocab_size;
    c.d_model = 16;
    c.heads = 2;
    c.backbone_layers = 1;
    c.head_layers = 1;
    c.ff_dim = 32;
    c.max_len = 64;
    c.seed = 7;
    return c;
}

std::string temp_path(const std::string& tag) {
    return (std::filesystem::temp_directory_path() / ("sectk-test-" + tag + ".ckpt")).string();
}

}  // namespace

TEST_CASE("vocabulary: known words, hashed fallback, persistence") {
    Vocabulary v({"hello", "world"}, 64);
    CHECK(v.size() == 66);
    CHECK(v.id("hello") != v.id("world"));
    CHECK(v.id("hello") < 2 + 64);
    int unseen = v.id("zebra");
    CHECK(unseen == v.id("zebra"));  // stable hashing
    Vocabulary w = Vocabulary::parse(v.serialize());
    CHECK(w.fingerprint() == v.fingerprint());
    CHECK(w.id("zebra") == unseen);
    Vocabulary other({"hello", "worlds"}, 64);
    CHECK(other.fingerprint() != v.fingerprint());
}

TEST_CASE("config validation") {
    EncoderConfig c = tiny_config(10);
    c.d_model = 15;  // not divisible by heads
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = tiny_config(10);
    c.num_speakers = 5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("forward shape contract and determinism") {
    SecModel model(tiny_config(20));
    std::vector<int> tokens = {1, 5, 9, 2, 2, 7};
    std::vector<int> tags = {0, 0, 0, 1, 1, 1};
    nn::Value logits = model.forward(tokens, tags);
    CHECK(logits->value.rows() == 6);
    CHECK(logits->value.cols() == 2);
    CHECK(logits->value.allFinite());
    nn::Value again = model.forward(tokens, tags);
    CHECK((logits->value - again->value).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(model.forward(tokens, {0, 1}), ValidationError);
}

TEST_CASE("uniform logits give exactly ln 2 for two speakers") {
    nn::Value logits = nn::constant(Eigen::MatrixXd::Zero(5, 2));
    nn::Value loss = perm_invariant_ce(logits, {0, 1, 0, 1, 0}, 2);
    CHECK(std::abs(loss->value(0, 0) - std::log(2.0)) < 1e-9);
}

TEST_CASE("perfectly swapped logits reach near-zero loss") {
    std::vector<int> targets = {0, 1, 1, 0};
    Eigen::MatrixXd m(4, 2);
    for (int i = 0; i < 4; ++i) {
        int swapped = 1 - targets[i];
        m(i, swapped) = 50.0;
        m(i, 1 - swapped) = -50.0;
    }
    nn::Value loss = perm_invariant_ce(nn::constant(m), targets, 2);
    CHECK(loss->value(0, 0) < 1e-9);
}

TEST_CASE("3-token hand computation picks the smaller permutation CE") {
    Eigen::MatrixXd m(3, 2);
    m << 2.0, 0.0, 1.0, 3.0, 0.5, 0.5;
    std::vector<int> targets = {0, 1, 0};
    auto ce = [&](bool swap) {
        double total = 0.0;
        for (int i = 0; i < 3; ++i) {
            int t = swap ? 1 - targets[i] : targets[i];
            double z = std::exp(m(i, 0)) + std::exp(m(i, 1));
            total += -(m(i, t) - std::log(z));
        }
        return total / 3.0;
    };
    double expected = std::min(ce(false), ce(true));
    nn::Value loss = perm_invariant_ce(nn::constant(m), targets, 2);
    CHECK(loss->value(0, 0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("relabeling invariance and identity upper bound") {
    Rng rng(13);
    for (int iter = 0; iter < 50; ++iter) {
        int len = 3 + static_cast<int>(rng.next_below(8));
        Eigen::MatrixXd m(len, 2);
        std::vector<int> targets(len), flipped(len);
        for (int i = 0; i < len; ++i) {
            m(i, 0) = rng.next_double() * 8.0 - 4.0;
            m(i, 1) = rng.next_double() * 8.0 - 4.0;
            targets[i] = static_cast<int>(rng.next_below(2));
            flipped[i] = 1 - targets[i];
        }
        nn::Value logits = nn::constant(m);
        double a = perm_invariant_ce(logits, targets, 2)->value(0, 0);
        double b = perm_invariant_ce(logits, flipped, 2)->value(0, 0);
        CHECK(std::abs(a - b) < 1e-12);
        // identity-permutation CE is an upper bound
        double identity = nn::nll(nn::log_softmax_rows(logits), targets)->value(0, 0);
        CHECK(a <= identity + 1e-12);
    }
}

TEST_CASE("frozen backbone stays bit-identical; lr 0 changes nothing") {
    Vocabulary vocab({"a", "b", "c"}, 16);
    SecModel model(tiny_config(vocab.size()));
    std::vector<TrainingExample> batch = {
        {{"a", "b", "c", "a"}, {0, 0, 1, 1}, {0, 1, 1, 1}},
        {{"b", "b", "a", "c"}, {0, 1, 1, 1}, {0, 0, 1, 1}},
    };

    std::vector<Eigen::MatrixXd> backbone_before, head_before;
    for (const auto& p : model.backbone_params()) backbone_before.push_back(p->value);
    for (const auto& p : model.head_params()) head_before.push_back(p->value);

    Adam frozen_opt;
    train_step(model, vocab, batch, frozen_opt, true);
    auto backbone = model.backbone_params();
    for (std::size_t i = 0; i < backbone.size(); ++i)
        CHECK((backbone[i]->value - backbone_before[i]).cwiseAbs().maxCoeff() == 0.0);
    bool head_moved = false;
    auto head = model.head_params();
    for (std::size_t i = 0; i < head.size(); ++i)
        if ((head[i]->value - head_before[i]).cwiseAbs().maxCoeff() > 0.0) head_moved = true;
    CHECK(head_moved);

    SecModel zero_lr(tiny_config(vocab.size()));
    std::vector<Eigen::MatrixXd> before;
    for (const auto& p : zero_lr.all_params()) before.push_back(p->value);
    Adam opt({0.0, 0.9, 0.999, 1e-8});
    train_step(zero_lr, vocab, batch, opt, false);
    auto params = zero_lr.all_params();
    for (std::size_t i = 0; i < params.size(); ++i)
        CHECK((params[i]->value - before[i]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("small memorization run drives the loss down") {
    Vocabulary vocab({"go", "stop", "left", "right", "up", "down"}, 16);
    SecModel model(tiny_config(vocab.size()));
    Rng rng(5);
    std::vector<TrainingExample> batch;
    const char* words[] = {"go", "stop", "left", "right", "up", "down"};
    for (int i = 0; i < 20; ++i) {
        TrainingExample e;
        int len = 6 + static_cast<int>(rng.next_below(5));
        int boundary = 2 + static_cast<int>(rng.next_below(static_cast<uint64_t>(len - 3)));
        for (int j = 0; j < len; ++j) {
            e.tokens.push_back(words[rng.next_below(6)]);
            e.target_tags.push_back(j < boundary ? 0 : 1);
            e.input_tags.push_back(e.target_tags.back());
        }
        // shift the input boundary by one
        e.input_tags[boundary - 1] = 1;
        batch.push_back(std::move(e));
    }
    Adam opt;
    double loss = 1e9;
    for (int step = 0; step < 250; ++step) loss = train_step(model, vocab, batch, opt, false);
    CHECK(loss < 0.05);
}

TEST_CASE("checkpoint round trip and mismatch rejection") {
    Vocabulary vocab({"x", "y"}, 16);
    SecModel model(tiny_config(vocab.size()));
    std::string path = temp_path("roundtrip");
    model.save(path, vocab.fingerprint(), 42);

    uint64_t step = 0;
    SecModel loaded = SecModel::load(path, vocab.fingerprint(), &step);
    CHECK(step == 42);
    std::vector<int> tokens = {0, 1, 2, 3};
    std::vector<int> tags = {0, 0, 1, 1};
    Eigen::MatrixXd a = model.forward(tokens, tags)->value;
    Eigen::MatrixXd b = loaded.forward(tokens, tags)->value;
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(SecModel::load(path, vocab.fingerprint() + 1), ConfigError);
    std::remove(path.c_str());
}

TEST_CASE("adam flags non-finite gradients") {
    nn::Value p = nn::parameter(Eigen::MatrixXd::Ones(1, 1));
    p->ensure_grad();
    p->grad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    Adam opt;
    CHECK_THROWS_AS(opt.step({p}), NumericalError);
}
