#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sectk/errorsim.hpp"
#include "sectk/tensor.hpp"

namespace sectk {

// Word-level vocabulary with hashed fallback buckets for unseen words.
class Vocabulary {
  public:
    static constexpr int kDefaultHashBuckets = 1 << 15;

    Vocabulary() = default;
    explicit Vocabulary(const std::vector<std::string>& words, int hash_buckets = kDefaultHashBuckets);

    int id(const std::string& word) const;
    int size() const { return static_cast<int>(known_.size()) + hash_buckets_; }
    uint64_t fingerprint() const;

    std::string serialize() const;
    static Vocabulary parse(const std::string& content);

  private:
    std::map<std::string, int> known_;
    int hash_buckets_ = kDefaultHashBuckets;
};

struct EncoderConfig {
    int vocab_size = 0;
    int d_model = 128;
    int heads = 4;
    int backbone_layers = 2;
    int head_layers = 2;
    int ff_dim = 256;
    int max_len = 512;
    int num_speakers = 2;
    uint64_t seed = 0;

    void validate() const;
    bool operator==(const EncoderConfig&) const = default;
};

namespace nn {

struct TransformerLayer {
    Value wq, bq, wk, bk, wv, bv, wo, bo;
    Value ln1_gain, ln1_bias, ln2_gain, ln2_bias;
    Value ff_w1, ff_b1, ff_w2, ff_b2;
};

}  // namespace nn

// Non-autoregressive speaker tagger: token + speaker-tag embeddings with
// sinusoidal positions, a backbone encoder stack (the stand-in for a
// pretrained LM), a head encoder stack, and a per-token classifier.
class SecModel {
  public:
    explicit SecModel(const EncoderConfig& config);

    // [len x num_speakers] logits.
    nn::Value forward(const std::vector<int>& tokens, const std::vector<int>& input_tags) const;

    // Group "backbone" = embeddings + backbone stack (frozen in stage 1);
    // group "head" = head stack + classifier.
    std::vector<nn::Value> backbone_params() const;
    std::vector<nn::Value> head_params() const;
    std::vector<nn::Value> all_params() const;
    std::vector<std::pair<std::string, nn::Value>> named_params() const;

    std::size_t parameter_count() const;
    const EncoderConfig& config() const { return config_; }

    void save(const std::string& path, uint64_t vocab_fingerprint, uint64_t step) const;
    // Throws ConfigError on config or vocabulary mismatch.
    static SecModel load(const std::string& path, uint64_t expected_vocab_fingerprint, uint64_t* step = nullptr);

  private:
    EncoderConfig config_;
    nn::Value token_emb_, spk_emb_;
    Eigen::MatrixXd positional_;
    std::vector<nn::TransformerLayer> backbone_, head_;
    nn::Value final_ln_gain_, final_ln_bias_, cls_w_, cls_b_;

    nn::Value encode_layer(const nn::TransformerLayer& layer, nn::Value x) const;
};

// Minimum over speaker permutations of the mean token cross-entropy.
// Exhaustive enumeration; num_speakers <= 4.
nn::Value perm_invariant_ce(const nn::Value& logits, const std::vector<int>& target_tags, int num_speakers);

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

class Adam {
  public:
    explicit Adam(AdamConfig config = {}) : config_(config) {}

    // One update over `params` from their accumulated grads, then zeroes the
    // grads. Throws NumericalError on non-finite gradients.
    void step(const std::vector<nn::Value>& params);

    uint64_t steps() const { return t_; }

  private:
    AdamConfig config_;
    uint64_t t_ = 0;
    std::map<nn::Node*, std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> moments_;
};

// One Adam update on a batch; backbone group excluded when frozen. Returns
// the mean batch loss. Throws NumericalError on non-finite loss.
double train_step(SecModel& model, const Vocabulary& vocab, const std::vector<TrainingExample>& batch,
                  Adam& optimizer, bool freeze_backbone);

}  // namespace sectk
