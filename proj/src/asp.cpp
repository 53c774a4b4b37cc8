#include "sectk/asp.hpp"

#include <algorithm>
#include <sstream>

#include "sectk/errors.hpp"
#include "sectk/metrics.hpp"

namespace sectk {

std::vector<ErrorPair> parse_error_pairs(const std::string& content) {
    std::vector<ErrorPair> pairs;
    std::istringstream iss(content);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(iss, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream fields(line);
        ErrorPair pair;
        std::string count_field;
        if (!std::getline(fields, pair.ref_word, '\t') || !std::getline(fields, pair.hyp_word, '\t') ||
            !std::getline(fields, count_field, '\t'))
            throw ParseError("line " + std::to_string(lineno) + ": expected ref<TAB>hyp<TAB>count");
        try {
            pair.count = std::stoull(count_field);
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(lineno) + ": non-numeric count '" + count_field + "'");
        }
        if (pair.count == 0) throw ValidationError("line " + std::to_string(lineno) + ": zero count");
        if (pair.ref_word == pair.hyp_word)
            throw ValidationError("line " + std::to_string(lineno) + ": ref and hyp words are identical");
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

double phonetic_distance_ratio(const std::string& ref_word, const std::string& hyp_word,
                               const PronunciationLexicon& pronunciations) {
    PhonemeSeq ref = g2p(ref_word, pronunciations);
    PhonemeSeq hyp = g2p(hyp_word, pronunciations);
    std::size_t longest = std::max(ref.size(), hyp.size());
    if (longest == 0) return 0.0;
    return static_cast<double>(edit_distance(ref, hyp)) / static_cast<double>(longest);
}

std::vector<ErrorPair> phonetic_filter(const std::vector<ErrorPair>& pairs,
                                       const PronunciationLexicon& pronunciations, double max_ratio) {
    std::vector<ErrorPair> kept;
    for (const auto& pair : pairs) {
        if (phonetic_distance_ratio(pair.ref_word, pair.hyp_word, pronunciations) <= max_ratio)
            kept.push_back(pair);
    }
    return kept;
}

ConfusionLexicon build_confusion_lexicon(const std::vector<ErrorPair>& filtered_pairs,
                                         const PronunciationLexicon& pronunciations) {
    ConfusionLexicon lexicon;
    lexicon.pronunciations = pronunciations;

    std::map<std::string, std::map<std::string, std::size_t>> counts;
    std::map<std::string, std::map<std::string, std::size_t>> phone_counts;
    for (const auto& pair : filtered_pairs) {
        counts[pair.ref_word][pair.hyp_word] += pair.count;
        PhonemeSeq ref = g2p(pair.ref_word, pronunciations);
        PhonemeSeq hyp = g2p(pair.hyp_word, pronunciations);
        for (const auto& op : align(ref, hyp)) {
            switch (op.kind) {
                case OpKind::Correct:
                case OpKind::Substitution:
                    phone_counts[ref[op.ref_index]][hyp[op.hyp_index]] += pair.count;
                    break;
                case OpKind::Deletion:
                    phone_counts[ref[op.ref_index]][ConfusionLexicon::kGap] += pair.count;
                    break;
                case OpKind::Insertion:
                    break;  // no source phone
            }
        }
    }

    for (const auto& [word, alts] : counts) {
        std::size_t total = 0;
        for (const auto& [alt, c] : alts) total += c;
        std::vector<AlternateCandidate> ranked;
        for (const auto& [alt, c] : alts)
            ranked.push_back({alt, static_cast<double>(c) / static_cast<double>(total)});
        std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.word < b.word;
        });
        lexicon.entries.emplace(word, std::move(ranked));
    }

    // Add-one smoothing over the observed targets of each row.
    for (const auto& [phone, targets] : phone_counts) {
        std::size_t total = 0;
        for (const auto& [target, c] : targets) total += c;
        auto& row = lexicon.confusions[phone];
        for (const auto& [target, c] : targets)
            row[target] = static_cast<double>(c + 1) / static_cast<double>(total + targets.size());
    }
    return lexicon;
}

namespace {

std::string respell(const PhonemeSeq& phones) {
    std::string word;
    for (const auto& phone : phones) word += phone_to_grapheme(phone);
    return word;
}

}  // namespace

std::vector<AlternateCandidate> generate_alternates(const std::string& word,
                                                    const ConfusionLexicon& lexicon, std::size_t k) {
    if (k == 0) throw ValidationError("generate_alternates: k must be >= 1");

    auto it = lexicon.entries.find(word);
    if (it != lexicon.entries.end()) {
        std::vector<AlternateCandidate> out;
        for (const auto& cand : it->second) {
            if (cand.word == word) continue;
            out.push_back(cand);
            if (out.size() == k) break;
        }
        if (!out.empty()) return out;
    }

    // Unseen word: apply single phoneme confusions to its pronunciation and
    // map back to graphemes.
    PhonemeSeq phones;
    try {
        phones = g2p(word, lexicon.pronunciations);
    } catch (const ValidationError&) {
        return {};
    }

    std::vector<AlternateCandidate> candidates;
    for (std::size_t i = 0; i < phones.size(); ++i) {
        auto row = lexicon.confusions.find(phones[i]);
        if (row == lexicon.confusions.end()) continue;
        for (const auto& [target, prob] : row->second) {
            if (target == phones[i]) continue;
            PhonemeSeq variant = phones;
            if (target == ConfusionLexicon::kGap) {
                if (phones.size() < 2) continue;  // never empty the word
                variant.erase(variant.begin() + i);
            } else {
                variant[i] = target;
            }
            std::string spelled = respell(variant);
            if (spelled.empty() || spelled == word) continue;
            candidates.push_back({spelled, prob});
        }
    }

    std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.word < b.word;
    });
    std::vector<AlternateCandidate> out;
    for (const auto& cand : candidates) {
        bool dup = std::any_of(out.begin(), out.end(), [&](const auto& c) { return c.word == cand.word; });
        if (dup) continue;
        out.push_back(cand);
        if (out.size() == k) break;
    }
    return out;
}

std::string serialize_lexicon(const ConfusionLexicon& lexicon) {
    std::ostringstream out;
    out.precision(17);  // scores must survive the round trip exactly
    out << "sectk-lexicon 1\n";
    for (const auto& [word, alts] : lexicon.entries)
        for (const auto& cand : alts) out << "E\t" << word << '\t' << cand.word << '\t' << cand.score << '\n';
    for (const auto& [phone, row] : lexicon.confusions)
        for (const auto& [target, prob] : row) out << "M\t" << phone << '\t' << target << '\t' << prob << '\n';
    for (const auto& [word, phones] : lexicon.pronunciations) {
        out << "P\t" << word;
        for (const auto& phone : phones) out << '\t' << phone;
        out << '\n';
    }
    return out.str();
}

ConfusionLexicon parse_lexicon(const std::string& content) {
    std::istringstream iss(content);
    std::string line;
    if (!std::getline(iss, line) || line.rfind("sectk-lexicon 1", 0) != 0)
        throw ParseError("lexicon snapshot: missing or unsupported version header");

    ConfusionLexicon lexicon;
    std::size_t lineno = 1;
    while (std::getline(iss, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::vector<std::string> cols;
        std::string col;
        while (std::getline(fields, col, '\t')) cols.push_back(col);
        try {
            if (cols[0] == "E" && cols.size() == 4) {
                lexicon.entries[cols[1]].push_back({cols[2], std::stod(cols[3])});
            } else if (cols[0] == "M" && cols.size() == 4) {
                lexicon.confusions[cols[1]][cols[2]] = std::stod(cols[3]);
            } else if (cols[0] == "P" && cols.size() >= 3) {
                lexicon.pronunciations[cols[1]] = PhonemeSeq(cols.begin() + 2, cols.end());
            } else {
                throw ParseError("bad record");
            }
        } catch (const std::exception&) {
            throw ParseError("lexicon snapshot line " + std::to_string(lineno) + ": malformed record");
        }
    }
    return lexicon;
}

GeneratorEval evaluate_generator(const ConfusionLexicon& lexicon, const std::vector<ErrorPair>& test_pairs) {
    if (test_pairs.empty()) throw NumericalError("generator evaluation undefined: empty test set");

    auto char_tokens = [](const std::string& word) {
        std::vector<std::string> toks;
        for (char c : word) toks.emplace_back(1, c);
        return toks;
    };

    std::vector<std::vector<std::string>> refs, predicted, identity;
    for (const auto& pair : test_pairs) {
        refs.push_back(char_tokens(pair.hyp_word));
        auto alts = generate_alternates(pair.ref_word, lexicon);
        predicted.push_back(char_tokens(alts.empty() ? pair.ref_word : alts.front().word));
        identity.push_back(char_tokens(pair.ref_word));
    }

    GeneratorEval eval;
    eval.generator_bleu = bleu(refs, predicted);
    eval.identity_bleu = bleu(refs, identity);
    return eval;
}

}  // namespace sectk
