// Python bindings for the transcript toolkit. Transcripts cross the boundary
// as lists of (word, speaker) pairs; heavier artifacts (models, lexicons) stay
// on disk and are referenced by path.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "sectk/asp.hpp"
#include "sectk/corpus.hpp"
#include "sectk/corrector.hpp"
#include "sectk/errors.hpp"
#include "sectk/metrics.hpp"
#include "sectk/model.hpp"
#include "sectk/reconcile.hpp"
#include "sectk/session.hpp"

namespace py = pybind11;
using namespace sectk;

namespace {

using PyTranscript = std::vector<std::pair<std::string, std::string>>;

TaggedTranscript from_pairs(const PyTranscript& pairs, const std::string& session_id) {
    TaggedTranscript t;
    t.session_id = session_id;
    for (const auto& [word, speaker] : pairs) t.words.push_back({word, speaker});
    return t;
}

PyTranscript to_pairs(const TaggedTranscript& t) {
    PyTranscript out;
    for (const auto& w : t.words) out.push_back({w.text, w.speaker});
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "speaker-tagged transcript toolkit";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def(
        "wder",
        [](const PyTranscript& ref, const PyTranscript& hyp) {
            WderResult r = wder(from_pairs(ref, "ref"), from_pairs(hyp, "hyp"));
            std::size_t errors = r.counts.correct_wrong_tag + r.counts.substitution_wrong_tag;
            std::size_t denom = r.counts.correct + r.counts.substitutions;
            return py::make_tuple(r.rate, errors, denom);
        },
        py::arg("ref"), py::arg("hyp"),
        "Word diarization error rate; returns (rate, errors, denominator).");

    m.def(
        "cpwer",
        [](const PyTranscript& ref, const PyTranscript& hyp) {
            CpWerResult r = cpwer(from_pairs(ref, "ref"), from_pairs(hyp, "hyp"));
            return py::make_tuple(r.rate, r.errors, r.ref_words);
        },
        py::arg("ref"), py::arg("hyp"),
        "Concatenated minimum-permutation WER; returns (rate, errors, ref_words).");

    m.def("bleu", &bleu, py::arg("references"), py::arg("hypotheses"),
          "Corpus BLEU over token sequences, orders 1-4.");

    m.def(
        "classify_errors",
        [](const PyTranscript& ref, const PyTranscript& hyp) {
            std::vector<std::tuple<std::string, std::size_t, std::size_t>> out;
            static const char* names[] = {"a", "b", "c"};
            for (const auto& e : classify_errors(from_pairs(ref, "ref"), from_pairs(hyp, "hyp")))
                out.push_back({names[static_cast<int>(e.kind)], e.turn_begin, e.turn_end});
            return out;
        },
        py::arg("ref"), py::arg("hyp"),
        "Speaker error taxonomy; returns [(type, turn_begin, turn_end), ...].");

    m.def(
        "reconcile",
        [](const std::vector<std::tuple<std::string, double, double>>& words,
           const std::vector<std::tuple<std::string, double, double>>& segments) {
            std::vector<Word> ws;
            for (const auto& [text, start, end] : words) ws.push_back({text, start, end, std::nullopt});
            std::vector<SpeakerSegment> segs;
            for (const auto& [speaker, start, end] : segments) segs.push_back({speaker, start, end});
            auto [transcript, trace] = reconcile(ws, segs, "session");
            return to_pairs(transcript);
        },
        py::arg("words"), py::arg("segments"),
        "Assign speakers to timed words [(text, start, end)] from segments "
        "[(speaker, start, end)]; returns [(word, speaker), ...].");

    m.def(
        "generate_corpus",
        [](int sessions, int mean_turn_len, uint64_t seed) {
            SyntheticDialogSpec spec;
            spec.sessions = sessions;
            spec.mean_turn_len = mean_turn_len;
            spec.seed = seed;
            std::vector<PyTranscript> out;
            for (const auto& session : generate_corpus(spec)) out.push_back(to_pairs(session));
            return out;
        },
        py::arg("sessions") = 10, py::arg("mean_turn_len") = 20, py::arg("seed") = 0,
        "Deterministic synthetic two-speaker dialogs.");

    m.def(
        "corrupt",
        [](const PyTranscript& transcript, uint64_t seed) {
            SimConfig sim;
            sim.seed = seed;
            CorrectionConfig cfg;
            Rng rng(seed);
            return to_pairs(corrupt_session(from_pairs(transcript, "s"), sim, nullptr, cfg, rng));
        },
        py::arg("transcript"), py::arg("seed") = 0,
        "Simulate speaker-tag errors around change points.");

    m.def(
        "generate_alternates",
        [](const std::string& word, const std::string& lexicon_path, std::size_t k) {
            std::ifstream in(lexicon_path);
            if (!in) throw ParseError("cannot open '" + lexicon_path + "'");
            std::ostringstream buf;
            buf << in.rdbuf();
            ConfusionLexicon lex = parse_lexicon(buf.str());
            std::vector<std::pair<std::string, double>> out;
            for (const auto& cand : generate_alternates(word, lex, k)) out.push_back({cand.word, cand.score});
            return out;
        },
        py::arg("word"), py::arg("lexicon_path"), py::arg("k") = 3,
        "Top-k alternate spellings from a lexicon snapshot on disk.");

    m.def(
        "correct",
        [](const PyTranscript& transcript, const std::string& model_dir) {
            std::ifstream vf(model_dir + "/vocab.txt");
            if (!vf) throw ParseError("cannot open '" + model_dir + "/vocab.txt'");
            std::ostringstream buf;
            buf << vf.rdbuf();
            Vocabulary vocab = Vocabulary::parse(buf.str());
            SecModel model = SecModel::load(model_dir + "/model.ckpt", vocab.fingerprint());
            CorrectionConfig cfg;
            auto [fixed, changes] = correct(from_pairs(transcript, "s"), model, vocab, cfg);
            return to_pairs(fixed);
        },
        py::arg("transcript"), py::arg("model_dir"),
        "Apply a trained speaker error corrector saved by `sectk sec train`.");
}
