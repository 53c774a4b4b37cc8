// sectk: speaker-tagged transcript toolkit.
//
// Subcommands: reconcile, score, classify, simulate, asp build|gen|eval,
// sec train|correct, generate-corpus, experiment.
// Exit codes: 0 success, 2 input/parse error, 3 validation error,
// 4 numerical failure.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sectk/asp.hpp"
#include "sectk/config.hpp"
#include "sectk/corpus.hpp"
#include "sectk/corrector.hpp"
#include "sectk/errors.hpp"
#include "sectk/metrics.hpp"
#include "sectk/model.hpp"
#include "sectk/reconcile.hpp"
#include "sectk/session.hpp"

namespace fs = std::filesystem;
using namespace sectk;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + path.string() + "' for writing");
    out << content;
}

TaggedTranscript load_session(const fs::path& path) {
    return parse_session(read_file(path), path.stem().string()).to_transcript();
}

// A corpus is either one session file or a directory of *.session files.
std::vector<TaggedTranscript> load_corpus(const fs::path& path) {
    std::vector<TaggedTranscript> corpus;
    if (fs::is_directory(path)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(path))
            if (entry.path().extension() == ".session") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) corpus.push_back(load_session(f));
    } else {
        corpus.push_back(load_session(path));
    }
    if (corpus.empty()) throw ParseError("no .session files under '" + path.string() + "'");
    return corpus;
}

std::string session_to_text(const TaggedTranscript& t) {
    SessionFile file;
    file.session_id = t.session_id;
    for (const auto& w : t.words) file.lines.push_back({w.speaker, w.text, std::nullopt, std::nullopt});
    return serialize_session(file);
}

void save_corpus(const std::vector<TaggedTranscript>& corpus, const fs::path& dir) {
    fs::create_directories(dir);
    for (const auto& session : corpus)
        write_file(dir / (session.session_id + ".session"), session_to_text(session));
}

// Paper-style "2.80 (7673/274398)" cell.
std::string xy_cell(double rate, std::size_t num, std::size_t den) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2) << rate * 100.0 << " (" << num << "/" << den << ")";
    return out.str();
}

struct ReportWriter {
    std::string format;  // "table" or "records"
    std::ostringstream table, records;

    void row(const std::string& metric, double rate, std::size_t num, std::size_t den) {
        table << std::left << std::setw(22) << metric << xy_cell(rate, num, den) << '\n';
        records << metric << ", " << std::fixed << std::setprecision(6) << rate << ", " << num << ", "
                << den << '\n';
    }

    void emit(std::ostream& os, const fs::path* out_dir) const {
        os << (format == "records" ? records.str() : table.str());
        if (out_dir) {
            write_file(*out_dir / "report.txt", table.str());
            write_file(*out_dir / "report.records", records.str());
        }
    }
};

AlternateFn alternates_from(const ConfusionLexicon* lexicon) {
    if (!lexicon) return nullptr;
    return [lexicon](const std::string& word) {
        std::vector<std::string> out;
        for (const auto& cand : generate_alternates(word, *lexicon)) out.push_back(cand.word);
        return out;
    };
}

std::string change_log_text(const std::vector<ChangeRecord>& changes) {
    std::ostringstream out;
    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + v[i];
        return s;
    };
    for (const auto& c : changes)
        out << c.session << '\t' << c.boundary << '\t' << join(c.old_tags) << '\t' << join(c.new_tags)
            << '\n';
    return out.str();
}

void write_manifest(const fs::path& dir, RunConfig config, uint64_t seed) {
    config.set("seed", std::to_string(seed));
    write_file(dir / "manifest.cfg", config.serialize());
}

SimConfig sim_from_config(const RunConfig& cfg, uint64_t seed) {
    SimConfig sim;
    sim.p_word_sub = cfg.get_double("simulate.p_word_sub", sim.p_word_sub);
    sim.p_zero = cfg.get_double("simulate.p_zero", sim.p_zero);
    sim.p_one = cfg.get_double("simulate.p_one", sim.p_one);
    sim.p_two = cfg.get_double("simulate.p_two", sim.p_two);
    sim.max_shift = static_cast<int>(cfg.get_int("simulate.max_shift", sim.max_shift));
    sim.seed = seed;
    sim.validate();
    return sim;
}

CorrectionConfig correction_from_config(const RunConfig& cfg, uint64_t seed) {
    CorrectionConfig c;
    c.context_limit = static_cast<int>(cfg.get_int("train.context_limit", c.context_limit));
    c.stage1_steps = static_cast<int>(cfg.get_int("train.stage1_steps", c.stage1_steps));
    c.stage2_steps = static_cast<int>(cfg.get_int("train.stage2_steps", c.stage2_steps));
    c.batch_size = static_cast<int>(cfg.get_int("train.batch_size", c.batch_size));
    c.mean_window_len = cfg.get_double("train.mean_window_len", c.mean_window_len);
    c.eval_interval = static_cast<int>(cfg.get_int("train.eval_interval", c.eval_interval));
    c.lr = cfg.get_double("train.lr", c.lr);
    c.validation_fraction = cfg.get_double("train.validation_fraction", c.validation_fraction);
    c.seed = seed;
    return c;
}

EncoderConfig encoder_from_config(const RunConfig& cfg) {
    EncoderConfig e;
    e.d_model = static_cast<int>(cfg.get_int("train.d_model", e.d_model));
    e.heads = static_cast<int>(cfg.get_int("train.heads", e.heads));
    e.backbone_layers = static_cast<int>(cfg.get_int("train.backbone_layers", e.backbone_layers));
    e.head_layers = static_cast<int>(cfg.get_int("train.head_layers", e.head_layers));
    e.ff_dim = static_cast<int>(cfg.get_int("train.ff_dim", e.ff_dim));
    return e;
}

struct SavedModel {
    SecModel model;
    Vocabulary vocab;
};

void save_model(const SecModel& model, const Vocabulary& vocab, const fs::path& dir) {
    fs::create_directories(dir);
    write_file(dir / "vocab.txt", vocab.serialize());
    model.save((dir / "model.ckpt").string(), vocab.fingerprint(), 0);
}

SavedModel load_model(const fs::path& dir) {
    Vocabulary vocab = Vocabulary::parse(read_file(dir / "vocab.txt"));
    SecModel model = SecModel::load((dir / "model.ckpt").string(), vocab.fingerprint());
    return {std::move(model), std::move(vocab)};
}

int run(int argc, char** argv) {
    CLI::App app{"speaker-tagged transcript toolkit"};
    app.require_subcommand(1);

    uint64_t seed = 0;
    std::string config_path, out_path, format = "table";
    app.add_option("--seed", seed, "global RNG seed")->capture_default_str();
    app.add_option("--config", config_path, "key = value config file");
    app.add_option("--out", out_path, "output file or directory");
    app.add_option("--format", format, "table or records")->check(CLI::IsMember({"table", "records"}));

    // reconcile
    auto* cmd_reconcile = app.add_subcommand("reconcile", "assign speakers to ASR words from RTTM segments");
    std::string words_path, rttm_path, words_format = "ctm";
    cmd_reconcile->add_option("words", words_path, "CTM or timed session file")->required();
    cmd_reconcile->add_option("rttm", rttm_path, "RTTM file")->required();
    cmd_reconcile->add_option("--words-format", words_format, "ctm or session")
        ->check(CLI::IsMember({"ctm", "session"}));

    // score
    auto* cmd_score = app.add_subcommand("score", "WDER / cpWER between reference and hypothesis sessions");
    std::string ref_path, hyp_path;
    std::vector<std::string> metrics_sel{"wder", "cpwer"};
    cmd_score->add_option("ref", ref_path, "reference session file or directory")->required();
    cmd_score->add_option("hyp", hyp_path, "hypothesis session file or directory")->required();
    cmd_score->add_option("--metrics", metrics_sel, "subset of {wder, cpwer}");

    // classify
    auto* cmd_classify = app.add_subcommand("classify", "type a/b/c speaker error taxonomy");
    cmd_classify->add_option("ref", ref_path, "reference session file")->required();
    cmd_classify->add_option("hyp", hyp_path, "hypothesis session file")->required();

    // simulate
    auto* cmd_simulate = app.add_subcommand("simulate", "corrupt sessions with synthetic errors");
    std::string corpus_path, lexicon_path;
    cmd_simulate->add_option("corpus", corpus_path, "session file or directory")->required();
    cmd_simulate->add_option("--lexicon", lexicon_path, "confusion lexicon for word errors");

    // asp build | gen | eval
    auto* cmd_asp = app.add_subcommand("asp", "alternate-spelling lexicon tools");
    cmd_asp->require_subcommand(1);
    std::string pairs_path, pron_path, word_arg;
    auto* asp_build = cmd_asp->add_subcommand("build", "build a phonetically filtered confusion lexicon");
    asp_build->add_option("pairs", pairs_path, "ref<TAB>hyp<TAB>count error pairs")->required();
    asp_build->add_option("--pronunciations", pron_path, "pronunciation lexicon");
    auto* asp_gen = cmd_asp->add_subcommand("gen", "3-best alternates for a word");
    asp_gen->add_option("lexicon", lexicon_path, "lexicon snapshot")->required();
    asp_gen->add_option("word", word_arg, "input word")->required();
    auto* asp_eval = cmd_asp->add_subcommand("eval", "BLEU of the lexicon generator vs identity");
    asp_eval->add_option("lexicon", lexicon_path, "lexicon snapshot")->required();
    asp_eval->add_option("pairs", pairs_path, "held-out error pairs")->required();

    // sec train | correct
    auto* cmd_sec = app.add_subcommand("sec", "speaker error corrector");
    cmd_sec->require_subcommand(1);
    std::string model_dir;
    auto* sec_train = cmd_sec->add_subcommand("train", "train the corrector on a reference corpus");
    sec_train->add_option("corpus", corpus_path, "session directory")->required();
    sec_train->add_option("--lexicon", lexicon_path, "confusion lexicon for word-error simulation");
    auto* sec_correct = cmd_sec->add_subcommand("correct", "apply a trained corrector");
    sec_correct->add_option("model", model_dir, "model directory (vocab.txt + model.ckpt)")->required();
    sec_correct->add_option("corpus", corpus_path, "session file or directory")->required();

    // generate-corpus
    auto* cmd_generate = app.add_subcommand("generate-corpus", "synthetic two-speaker dialog corpus");
    int gen_sessions = 100, gen_mean_turn = 20;
    cmd_generate->add_option("--sessions", gen_sessions, "number of sessions")->capture_default_str();
    cmd_generate->add_option("--mean-turn-len", gen_mean_turn, "mean words per turn")->capture_default_str();

    // experiment
    auto* cmd_experiment = app.add_subcommand("experiment", "generate -> corrupt -> train -> correct -> score");
    cmd_experiment->add_option("--report-only", model_dir, "skip training, use an existing model directory");

    CLI11_PARSE(app, argc, argv);

    RunConfig cfg;
    if (!config_path.empty()) cfg = RunConfig::load(config_path);
    if (cfg.has("seed") && seed == 0) seed = static_cast<uint64_t>(cfg.get_int("seed", 0));

    fs::path out_dir = out_path.empty() ? fs::path("sectk-out") : fs::path(out_path);

    if (*cmd_reconcile) {
        auto words = parse_words(read_file(words_path),
                                 words_format == "ctm" ? WordFormat::Ctm : WordFormat::SessionFile);
        auto segments = parse_rttm(read_file(rttm_path));
        auto [transcript, trace] = reconcile(words, segments, fs::path(words_path).stem().string());

        SessionFile session;
        session.session_id = transcript.session_id;
        for (std::size_t i = 0; i < words.size(); ++i)
            session.lines.push_back(
                {transcript.words[i].speaker, transcript.words[i].text, words[i].start, words[i].end});
        fs::create_directories(out_dir);
        write_file(out_dir / (transcript.session_id + ".session"), serialize_session(session));

        std::ostringstream trace_text;
        for (std::size_t i = 0; i < trace.size(); ++i)
            trace_text << i << '\t' << trace[i].speaker << '\t'
                       << (trace[i].rule == AssignRule::Overlap ? "overlap" : "nearest") << '\t'
                       << std::fixed << std::setprecision(3) << trace[i].seconds << '\n';
        write_file(out_dir / (transcript.session_id + ".trace"), trace_text.str());
        std::cout << "reconciled " << words.size() << " words -> "
                  << (out_dir / (transcript.session_id + ".session")).string() << '\n';
        return 0;
    }

    if (*cmd_score) {
        auto refs = load_corpus(ref_path);
        auto hyps = load_corpus(hyp_path);
        if (refs.size() != hyps.size()) throw ValidationError("score: ref/hyp corpus size mismatch");
        ReportWriter report{format};
        bool want_wder = std::count(metrics_sel.begin(), metrics_sel.end(), "wder") > 0;
        bool want_cpwer = std::count(metrics_sel.begin(), metrics_sel.end(), "cpwer") > 0;
        if (want_wder) {
            std::size_t err = 0, den = 0;
            for (std::size_t i = 0; i < refs.size(); ++i) {
                WderResult r = wder(refs[i], hyps[i]);
                err += r.counts.correct_wrong_tag + r.counts.substitution_wrong_tag;
                den += r.counts.correct + r.counts.substitutions;
            }
            report.row("wder", static_cast<double>(err) / static_cast<double>(den), err, den);
        }
        if (want_cpwer) {
            std::size_t err = 0, den = 0;
            for (std::size_t i = 0; i < refs.size(); ++i) {
                CpWerResult r = cpwer(refs[i], hyps[i]);
                err += r.errors;
                den += r.ref_words;
            }
            report.row("cpwer", static_cast<double>(err) / static_cast<double>(den), err, den);
        }
        report.emit(std::cout, out_path.empty() ? nullptr : &out_dir);
        return 0;
    }

    if (*cmd_classify) {
        auto refs = load_corpus(ref_path);
        auto hyps = load_corpus(hyp_path);
        if (refs.size() != hyps.size()) throw ValidationError("classify: ref/hyp corpus size mismatch");
        std::size_t counts[3] = {0, 0, 0};
        for (std::size_t i = 0; i < refs.size(); ++i)
            for (const auto& e : classify_errors(refs[i], hyps[i])) ++counts[static_cast<int>(e.kind)];
        std::cout << "type_a, " << counts[0] << "\ntype_b, " << counts[1] << "\ntype_c, " << counts[2]
                  << '\n';
        return 0;
    }

    if (*cmd_simulate) {
        auto corpus = load_corpus(corpus_path);
        SimConfig sim = sim_from_config(cfg, seed);
        CorrectionConfig correction = correction_from_config(cfg, seed);
        ConfusionLexicon lexicon;
        bool have_lexicon = !lexicon_path.empty();
        if (have_lexicon) lexicon = parse_lexicon(read_file(lexicon_path));
        AlternateFn alternates = alternates_from(have_lexicon ? &lexicon : nullptr);

        std::vector<TaggedTranscript> corrupted;
        std::ostringstream manifest;
        manifest << "seed = " << seed << "\n";
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            Rng rng = Rng::substream(seed, i);
            corrupted.push_back(corrupt_session(corpus[i], sim, alternates, correction, rng));
            std::size_t changed = 0;
            for (std::size_t w = 0; w < corpus[i].words.size(); ++w)
                if (corpus[i].words[w].speaker != corrupted.back().words[w].speaker) ++changed;
            manifest << corpus[i].session_id << ".tag_errors = " << changed << "\n";
        }
        save_corpus(corrupted, out_dir);
        write_file(out_dir / "simulate.manifest", manifest.str());
        std::cout << "corrupted " << corpus.size() << " sessions -> " << out_dir.string() << '\n';
        return 0;
    }

    if (*asp_build) {
        auto pairs = parse_error_pairs(read_file(pairs_path));
        PronunciationLexicon pron;
        if (!pron_path.empty()) pron = parse_pronunciation_lexicon(read_file(pron_path));
        auto filtered = phonetic_filter(pairs, pron);
        auto lexicon = build_confusion_lexicon(filtered, pron);
        fs::path out_file = out_path.empty() ? fs::path("lexicon.sectk") : fs::path(out_path);
        write_file(out_file, serialize_lexicon(lexicon));
        std::cout << "kept " << filtered.size() << "/" << pairs.size() << " pairs -> " << out_file.string()
                  << '\n';
        return 0;
    }

    if (*asp_gen) {
        auto lexicon = parse_lexicon(read_file(lexicon_path));
        for (const auto& cand : generate_alternates(word_arg, lexicon))
            std::cout << cand.word << ", " << std::fixed << std::setprecision(4) << cand.score << '\n';
        return 0;
    }

    if (*asp_eval) {
        auto lexicon = parse_lexicon(read_file(lexicon_path));
        auto pairs = parse_error_pairs(read_file(pairs_path));
        GeneratorEval eval = evaluate_generator(lexicon, pairs);
        std::cout << "identity, " << std::fixed << std::setprecision(4) << eval.identity_bleu << '\n'
                  << "lexicon, " << eval.generator_bleu << '\n';
        return 0;
    }

    if (*sec_train) {
        auto corpus = load_corpus(corpus_path);
        SimConfig sim = sim_from_config(cfg, seed);
        CorrectionConfig correction = correction_from_config(cfg, seed);
        EncoderConfig encoder = encoder_from_config(cfg);
        ConfusionLexicon lexicon;
        bool have_lexicon = !lexicon_path.empty();
        if (have_lexicon) lexicon = parse_lexicon(read_file(lexicon_path));

        TrainResult result =
            train_sec(corpus, sim, correction, encoder, alternates_from(have_lexicon ? &lexicon : nullptr));
        save_model(result.model, result.vocab, out_dir);
        std::ostringstream history;
        history << "step, stage, loss, validation_wder\n";
        for (const auto& m : result.history)
            history << m.step << ", " << m.stage << ", " << std::fixed << std::setprecision(6) << m.loss
                    << ", " << m.validation_wder << '\n';
        write_file(out_dir / "history.csv", history.str());
        write_manifest(out_dir, cfg, seed);
        std::cout << "best validation wder " << std::fixed << std::setprecision(4)
                  << result.best_validation_wder << " -> " << out_dir.string() << '\n';
        return 0;
    }

    if (*sec_correct) {
        SavedModel saved = load_model(model_dir);
        CorrectionConfig correction = correction_from_config(cfg, seed);
        auto corpus = load_corpus(corpus_path);
        std::vector<TaggedTranscript> fixed;
        std::vector<ChangeRecord> all_changes;
        for (const auto& session : corpus) {
            auto [corrected, changes] = correct(session, saved.model, saved.vocab, correction);
            fixed.push_back(std::move(corrected));
            all_changes.insert(all_changes.end(), changes.begin(), changes.end());
        }
        save_corpus(fixed, out_dir);
        write_file(out_dir / "changes.log", change_log_text(all_changes));
        std::cout << "corrected " << corpus.size() << " sessions, " << all_changes.size()
                  << " windows changed -> " << out_dir.string() << '\n';
        return 0;
    }

    if (*cmd_generate) {
        SyntheticDialogSpec spec;
        spec.sessions = gen_sessions;
        spec.mean_turn_len = gen_mean_turn;
        spec.seed = seed;
        auto corpus = generate_corpus(spec);
        save_corpus(corpus, out_dir);
        RunConfig manifest;
        manifest.set("sessions", std::to_string(spec.sessions));
        manifest.set("mean_turn_len", std::to_string(spec.mean_turn_len));
        write_manifest(out_dir, manifest, seed);
        std::cout << "generated " << corpus.size() << " sessions -> " << out_dir.string() << '\n';
        return 0;
    }

    if (*cmd_experiment) {
        SyntheticDialogSpec spec;
        spec.sessions = static_cast<int>(cfg.get_int("corpus.sessions", 200));
        spec.mean_turn_len = static_cast<int>(cfg.get_int("corpus.mean_turn_len", 24));
        spec.seed = seed;
        auto corpus = generate_corpus(spec);

        std::size_t holdout = static_cast<std::size_t>(cfg.get_int("eval.holdout_sessions", 20));
        holdout = std::min(holdout, corpus.size() / 2);
        std::vector<TaggedTranscript> train_part(corpus.begin(), corpus.end() - holdout);
        std::vector<TaggedTranscript> eval_refs(corpus.end() - holdout, corpus.end());

        SimConfig sim = sim_from_config(cfg, seed);
        CorrectionConfig correction = correction_from_config(cfg, seed);

        ConfusionLexicon lexicon;
        bool have_lexicon = !cfg.get("asp.lexicon").empty();
        if (have_lexicon) lexicon = parse_lexicon(read_file(cfg.get("asp.lexicon")));
        AlternateFn alternates = alternates_from(have_lexicon ? &lexicon : nullptr);

        std::vector<TaggedTranscript> eval_hyps;
        for (std::size_t i = 0; i < eval_refs.size(); ++i) {
            Rng rng = Rng::substream(seed ^ 0xE7A1ULL, i);
            eval_hyps.push_back(corrupt_session(eval_refs[i], sim, alternates, correction, rng));
        }

        SavedModel saved = [&]() -> SavedModel {
            if (!model_dir.empty()) return load_model(model_dir);
            TrainResult r = train_sec(train_part, sim, correction, encoder_from_config(cfg), alternates);
            return {std::move(r.model), std::move(r.vocab)};
        }();

        CorrectionReport rep = evaluate_correction(eval_refs, eval_hyps, saved.model, saved.vocab, correction);
        ReportWriter report{format};
        report.row("no-correction wder", rep.wder_before, rep.wder_errors_before, rep.wder_denominator);
        report.row("sec wder", rep.wder_after, rep.wder_errors_after, rep.wder_denominator);
        report.row("no-correction cpwer", rep.cpwer_before, rep.cpwer_errors_before, rep.cpwer_denominator);
        report.row("sec cpwer", rep.cpwer_after, rep.cpwer_errors_after, rep.cpwer_denominator);
        fs::create_directories(out_dir);
        report.emit(std::cout, &out_dir);
        save_model(saved.model, saved.vocab, out_dir / "model");
        write_file(out_dir / "changes.log", change_log_text(rep.changes));
        write_manifest(out_dir, cfg, seed);
        if (rep.wder_after > rep.wder_before)
            std::cout << "warning: corrected WDER regressed against the uncorrected baseline\n";
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 4;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
