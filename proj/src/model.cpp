#include "sectk/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "sectk/errors.hpp"
#include "sectk/rng.hpp"

namespace sectk {

namespace {

uint64_t fnv1a(const std::string& s, uint64_t h = 0xCBF29CE484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

double sample_normal(Rng& rng) {
    // Box-Muller; one value per draw keeps the stream layout simple.
    double u1 = std::max(rng.next_double(), 1e-12);
    double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, double stddev, Rng& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = stddev * sample_normal(rng);
    return m;
}

}  // namespace

Vocabulary::Vocabulary(const std::vector<std::string>& words, int hash_buckets)
    : hash_buckets_(hash_buckets) {
    for (const auto& w : words) known_.emplace(w, 0);
    int next = 0;
    for (auto& [word, id] : known_) id = next++;
}

int Vocabulary::id(const std::string& word) const {
    auto it = known_.find(word);
    if (it != known_.end()) return it->second;
    return static_cast<int>(known_.size()) +
           static_cast<int>(fnv1a(word) % static_cast<uint64_t>(hash_buckets_));
}

uint64_t Vocabulary::fingerprint() const {
    uint64_t h = fnv1a("sectk-vocab");
    h = fnv1a(std::to_string(hash_buckets_), h);
    for (const auto& [word, id] : known_) h = fnv1a(word, h);
    return h;
}

std::string Vocabulary::serialize() const {
    std::ostringstream out;
    out << "sectk-vocab 1\nbuckets\t" << hash_buckets_ << '\n';
    for (const auto& [word, id] : known_) out << word << '\n';
    return out.str();
}

Vocabulary Vocabulary::parse(const std::string& content) {
    std::istringstream iss(content);
    std::string line;
    if (!std::getline(iss, line) || line != "sectk-vocab 1")
        throw ParseError("vocabulary: missing or unsupported version header");
    if (!std::getline(iss, line) || line.rfind("buckets\t", 0) != 0)
        throw ParseError("vocabulary: missing buckets record");
    std::vector<std::string> words;
    int buckets = std::stoi(line.substr(8));
    while (std::getline(iss, line))
        if (!line.empty()) words.push_back(line);
    return Vocabulary(words, buckets);
}

void EncoderConfig::validate() const {
    if (vocab_size < 1) throw ConfigError("encoder config: vocab_size must be >= 1");
    if (d_model < 1 || heads < 1 || ff_dim < 1 || max_len < 1)
        throw ConfigError("encoder config: all dims must be >= 1");
    if (d_model % heads != 0) throw ConfigError("encoder config: d_model must be divisible by heads");
    if (num_speakers < 2 || num_speakers > 4)
        throw ConfigError("encoder config: num_speakers must be in [2, 4]");
    if (backbone_layers < 0 || head_layers < 1)
        throw ConfigError("encoder config: need head_layers >= 1");
}

namespace {

nn::TransformerLayer make_layer(int d_model, int ff_dim, Rng& rng) {
    using nn::parameter;
    double std_attn = 1.0 / std::sqrt(static_cast<double>(d_model));
    nn::TransformerLayer l;
    l.wq = parameter(random_matrix(d_model, d_model, std_attn, rng));
    l.bq = parameter(Eigen::MatrixXd::Zero(1, d_model));
    l.wk = parameter(random_matrix(d_model, d_model, std_attn, rng));
    l.bk = parameter(Eigen::MatrixXd::Zero(1, d_model));
    l.wv = parameter(random_matrix(d_model, d_model, std_attn, rng));
    l.bv = parameter(Eigen::MatrixXd::Zero(1, d_model));
    l.wo = parameter(random_matrix(d_model, d_model, std_attn, rng));
    l.bo = parameter(Eigen::MatrixXd::Zero(1, d_model));
    l.ln1_gain = parameter(Eigen::MatrixXd::Ones(1, d_model));
    l.ln1_bias = parameter(Eigen::MatrixXd::Zero(1, d_model));
    l.ln2_gain = parameter(Eigen::MatrixXd::Ones(1, d_model));
    l.ln2_bias = parameter(Eigen::MatrixXd::Zero(1, d_model));
    l.ff_w1 = parameter(random_matrix(d_model, ff_dim, std_attn, rng));
    l.ff_b1 = parameter(Eigen::MatrixXd::Zero(1, ff_dim));
    l.ff_w2 = parameter(random_matrix(ff_dim, d_model, 1.0 / std::sqrt(static_cast<double>(ff_dim)), rng));
    l.ff_b2 = parameter(Eigen::MatrixXd::Zero(1, d_model));
    return l;
}

void append_layer_params(const nn::TransformerLayer& l, std::vector<nn::Value>& out) {
    for (const auto& p : {l.wq, l.bq, l.wk, l.bk, l.wv, l.bv, l.wo, l.bo, l.ln1_gain, l.ln1_bias,
                          l.ln2_gain, l.ln2_bias, l.ff_w1, l.ff_b1, l.ff_w2, l.ff_b2})
        out.push_back(p);
}

}  // namespace

SecModel::SecModel(const EncoderConfig& config) : config_(config) {
    config_.validate();
    Rng rng(config_.seed ^ 0x5EC0DE1ULL);
    token_emb_ = nn::parameter(random_matrix(config_.vocab_size, config_.d_model, 0.02, rng));
    spk_emb_ = nn::parameter(random_matrix(config_.num_speakers, config_.d_model, 0.02, rng));

    positional_.resize(config_.max_len, config_.d_model);
    for (int pos = 0; pos < config_.max_len; ++pos) {
        for (int i = 0; i < config_.d_model; ++i) {
            double angle = pos / std::pow(10000.0, 2.0 * (i / 2) / config_.d_model);
            positional_(pos, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
        }
    }

    for (int i = 0; i < config_.backbone_layers; ++i)
        backbone_.push_back(make_layer(config_.d_model, config_.ff_dim, rng));
    for (int i = 0; i < config_.head_layers; ++i)
        head_.push_back(make_layer(config_.d_model, config_.ff_dim, rng));

    final_ln_gain_ = nn::parameter(Eigen::MatrixXd::Ones(1, config_.d_model));
    final_ln_bias_ = nn::parameter(Eigen::MatrixXd::Zero(1, config_.d_model));
    cls_w_ = nn::parameter(
        random_matrix(config_.d_model, config_.num_speakers, 1.0 / std::sqrt(config_.d_model), rng));
    cls_b_ = nn::parameter(Eigen::MatrixXd::Zero(1, config_.num_speakers));
}

nn::Value SecModel::encode_layer(const nn::TransformerLayer& l, nn::Value x) const {
    using namespace nn;
    const int d = config_.d_model;
    const int heads = config_.heads;
    const int dh = d / heads;

    // Pre-LN self-attention.
    Value h = layer_norm(x, l.ln1_gain, l.ln1_bias);
    Value q = add_rowwise(matmul(h, l.wq), l.bq);
    Value k = add_rowwise(matmul(h, l.wk), l.bk);
    Value v = add_rowwise(matmul(h, l.wv), l.bv);
    std::vector<Value> contexts;
    contexts.reserve(heads);
    for (int head = 0; head < heads; ++head) {
        Value qh = slice_cols(q, head * dh, dh);
        Value kh = slice_cols(k, head * dh, dh);
        Value vh = slice_cols(v, head * dh, dh);
        Value scores = scale(matmul_nt(qh, kh), 1.0 / std::sqrt(static_cast<double>(dh)));
        contexts.push_back(matmul(softmax_rows(scores), vh));
    }
    Value attn = add_rowwise(matmul(concat_cols(contexts), l.wo), l.bo);
    x = add(x, attn);

    // Pre-LN feed-forward.
    Value h2 = layer_norm(x, l.ln2_gain, l.ln2_bias);
    Value ff = add_rowwise(matmul(relu(add_rowwise(matmul(h2, l.ff_w1), l.ff_b1)), l.ff_w2), l.ff_b2);
    return add(x, ff);
}

nn::Value SecModel::forward(const std::vector<int>& tokens, const std::vector<int>& input_tags) const {
    using namespace nn;
    if (tokens.size() != input_tags.size())
        throw ValidationError("forward: token/tag length mismatch");
    if (tokens.empty()) throw ValidationError("forward: empty input");
    if (static_cast<int>(tokens.size()) > config_.max_len)
        throw ValidationError("forward: input longer than max_len");

    Value x = add(gather_rows(token_emb_, tokens), gather_rows(spk_emb_, input_tags));
    x = add(x, constant(positional_.topRows(static_cast<Eigen::Index>(tokens.size()))));
    for (const auto& layer : backbone_) x = encode_layer(layer, x);
    for (const auto& layer : head_) x = encode_layer(layer, x);
    x = layer_norm(x, final_ln_gain_, final_ln_bias_);
    return add_rowwise(matmul(x, cls_w_), cls_b_);
}

std::vector<nn::Value> SecModel::backbone_params() const {
    std::vector<nn::Value> out{token_emb_, spk_emb_};
    for (const auto& l : backbone_) append_layer_params(l, out);
    return out;
}

std::vector<nn::Value> SecModel::head_params() const {
    std::vector<nn::Value> out;
    for (const auto& l : head_) append_layer_params(l, out);
    out.push_back(final_ln_gain_);
    out.push_back(final_ln_bias_);
    out.push_back(cls_w_);
    out.push_back(cls_b_);
    return out;
}

std::vector<nn::Value> SecModel::all_params() const {
    auto out = backbone_params();
    auto head = head_params();
    out.insert(out.end(), head.begin(), head.end());
    return out;
}

std::vector<std::pair<std::string, nn::Value>> SecModel::named_params() const {
    std::vector<std::pair<std::string, nn::Value>> out;
    static const char* kLayerNames[] = {"wq", "bq", "wk", "bk", "wv", "bv", "wo", "bo",
                                        "ln1_gain", "ln1_bias", "ln2_gain", "ln2_bias",
                                        "ff_w1", "ff_b1", "ff_w2", "ff_b2"};
    out.emplace_back("token_emb", token_emb_);
    out.emplace_back("spk_emb", spk_emb_);
    auto add_stack = [&](const std::vector<nn::TransformerLayer>& stack, const std::string& prefix) {
        for (std::size_t i = 0; i < stack.size(); ++i) {
            std::vector<nn::Value> flat;
            append_layer_params(stack[i], flat);
            for (std::size_t j = 0; j < flat.size(); ++j)
                out.emplace_back(prefix + std::to_string(i) + "." + kLayerNames[j], flat[j]);
        }
    };
    add_stack(backbone_, "backbone.");
    add_stack(head_, "head.");
    out.emplace_back("final_ln_gain", final_ln_gain_);
    out.emplace_back("final_ln_bias", final_ln_bias_);
    out.emplace_back("cls_w", cls_w_);
    out.emplace_back("cls_b", cls_b_);
    return out;
}

std::size_t SecModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : all_params()) n += static_cast<std::size_t>(p->value.size());
    return n;
}

void SecModel::save(const std::string& path, uint64_t vocab_fingerprint, uint64_t step) const {
    nlohmann::json header = {
        {"format", "sectk-checkpoint"},
        {"version", 1},
        {"vocab_size", config_.vocab_size},
        {"d_model", config_.d_model},
        {"heads", config_.heads},
        {"backbone_layers", config_.backbone_layers},
        {"head_layers", config_.head_layers},
        {"ff_dim", config_.ff_dim},
        {"max_len", config_.max_len},
        {"num_speakers", config_.num_speakers},
        {"seed", config_.seed},
        {"vocab_fingerprint", vocab_fingerprint},
        {"step", step},
    };
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("checkpoint: cannot open '" + path + "' for writing");
    out << header.dump() << '\n';
    for (const auto& p : all_params()) {
        // Row-major little-endian doubles.
        for (Eigen::Index r = 0; r < p->value.rows(); ++r)
            for (Eigen::Index c = 0; c < p->value.cols(); ++c) {
                double v = p->value(r, c);
                out.write(reinterpret_cast<const char*>(&v), sizeof(v));
            }
    }
}

SecModel SecModel::load(const std::string& path, uint64_t expected_vocab_fingerprint, uint64_t* step) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("checkpoint: cannot open '" + path + "'");
    std::string header_line;
    std::getline(in, header_line);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_line);
    } catch (const std::exception&) {
        throw ParseError("checkpoint: malformed header");
    }
    if (header.value("format", "") != "sectk-checkpoint" || header.value("version", 0) != 1)
        throw ConfigError("checkpoint: unsupported format");
    if (header.at("vocab_fingerprint").get<uint64_t>() != expected_vocab_fingerprint)
        throw ConfigError("checkpoint: vocabulary mismatch");

    EncoderConfig config;
    config.vocab_size = header.at("vocab_size");
    config.d_model = header.at("d_model");
    config.heads = header.at("heads");
    config.backbone_layers = header.at("backbone_layers");
    config.head_layers = header.at("head_layers");
    config.ff_dim = header.at("ff_dim");
    config.max_len = header.at("max_len");
    config.num_speakers = header.at("num_speakers");
    config.seed = header.at("seed");

    SecModel model(config);
    for (const auto& p : model.all_params()) {
        for (Eigen::Index r = 0; r < p->value.rows(); ++r)
            for (Eigen::Index c = 0; c < p->value.cols(); ++c) {
                double v = 0.0;
                if (!in.read(reinterpret_cast<char*>(&v), sizeof(v)))
                    throw ParseError("checkpoint: truncated parameter payload");
                p->value(r, c) = v;
            }
    }
    if (step) *step = header.at("step").get<uint64_t>();
    return model;
}

nn::Value perm_invariant_ce(const nn::Value& logits, const std::vector<int>& target_tags,
                            int num_speakers) {
    if (num_speakers < 1 || num_speakers > 4)
        throw ValidationError("perm_invariant_ce: num_speakers must be in [1, 4]");
    if (static_cast<Eigen::Index>(target_tags.size()) != logits->value.rows())
        throw ValidationError("perm_invariant_ce: target/logit length mismatch");

    nn::Value logp = nn::log_softmax_rows(logits);
    std::vector<int> perm(num_speakers);
    std::iota(perm.begin(), perm.end(), 0);
    nn::Value best;
    do {
        std::vector<int> permuted(target_tags.size());
        for (std::size_t i = 0; i < target_tags.size(); ++i) permuted[i] = perm[target_tags[i]];
        nn::Value loss = nn::nll(logp, permuted);
        if (!best || loss->value(0, 0) < best->value(0, 0)) best = loss;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

void Adam::step(const std::vector<nn::Value>& params) {
    ++t_;
    double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    for (const auto& p : params) {
        if (!p->requires_grad) continue;
        p->ensure_grad();
        if (!p->grad.allFinite()) throw NumericalError("adam: non-finite gradient");
        auto [it, fresh] = moments_.try_emplace(p.get(), Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()),
                                                Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
        auto& [m, v] = it->second;
        m = config_.beta1 * m + (1.0 - config_.beta1) * p->grad;
        v = config_.beta2 * v + (1.0 - config_.beta2) * p->grad.cwiseProduct(p->grad);
        Eigen::ArrayXXd m_hat = m.array() / bc1;
        Eigen::ArrayXXd v_hat = v.array() / bc2;
        p->value.array() -= config_.lr * m_hat / (v_hat.sqrt() + config_.eps);
        p->grad.setZero();
    }
}

double train_step(SecModel& model, const Vocabulary& vocab, const std::vector<TrainingExample>& batch,
                  Adam& optimizer, bool freeze_backbone) {
    if (batch.empty()) throw ValidationError("train_step: empty batch");

    nn::Value total;
    for (const auto& example : batch) {
        std::vector<int> ids(example.tokens.size());
        for (std::size_t i = 0; i < example.tokens.size(); ++i) ids[i] = vocab.id(example.tokens[i]);
        nn::Value loss =
            perm_invariant_ce(model.forward(ids, example.input_tags), example.target_tags,
                              model.config().num_speakers);
        total = total ? nn::add(total, loss) : loss;
    }
    total = nn::scale(total, 1.0 / static_cast<double>(batch.size()));
    if (!std::isfinite(total->value(0, 0)))
        throw NumericalError("train_step: non-finite loss at optimizer step " +
                             std::to_string(optimizer.steps()));

    nn::backward(total);
    if (freeze_backbone) {
        for (const auto& p : model.backbone_params()) p->grad.setZero();
        optimizer.step(model.head_params());
    } else {
        optimizer.step(model.all_params());
    }
    return total->value(0, 0);
}

}  // namespace sectk
