#include "sectk/g2p.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "sectk/errors.hpp"

namespace sectk {

namespace {

struct Rule {
    const char* graphemes;
    const char* phones;  // space-separated
};

// Longest-match-first digraph/trigraph rules, then single letters. Mid-word
// 'y' and word-final silent 'e' are handled separately below.
constexpr Rule kDigraphRules[] = {
    {"tch", "CH"}, {"igh", "AY"},  {"eigh", "EY"}, {"ough", "AO"}, {"sch", "S K"},
    {"ch", "CH"},  {"sh", "SH"},   {"th", "TH"},   {"ph", "F"},    {"wh", "W"},
    {"ck", "K"},   {"qu", "K W"},  {"ng", "NG"},   {"gh", "G"},    {"kn", "N"},
    {"wr", "R"},   {"ee", "IY"},   {"ea", "IY"},   {"oo", "UW"},   {"ou", "AW"},
    {"ow", "OW"},  {"ai", "EY"},   {"ay", "EY"},   {"ey", "EY"},   {"oa", "OW"},
    {"oi", "OY"},  {"oy", "OY"},   {"au", "AO"},   {"aw", "AO"},   {"ar", "AA R"},
    {"er", "ER"},  {"ir", "ER"},   {"ur", "ER"},   {"or", "AO R"}, {"ew", "UW"},
    {"ie", "IY"},  {"ss", "S"},    {"ll", "L"},    {"tt", "T"},    {"nn", "N"},
    {"mm", "M"},   {"pp", "P"},    {"rr", "R"},    {"dd", "D"},    {"bb", "B"},
    {"gg", "G"},   {"ff", "F"},    {"zz", "Z"},    {"cc", "K"},
};

constexpr Rule kLetterRules[] = {
    {"a", "AE"}, {"b", "B"},  {"c", "K"},  {"d", "D"},  {"e", "EH"}, {"f", "F"},
    {"g", "G"},  {"h", "HH"}, {"i", "IH"}, {"j", "JH"}, {"k", "K"},  {"l", "L"},
    {"m", "M"},  {"n", "N"},  {"o", "AA"}, {"p", "P"},  {"q", "K"},  {"r", "R"},
    {"s", "S"},  {"t", "T"},  {"u", "AH"}, {"v", "V"},  {"w", "W"},  {"x", "K S"},
    {"y", "Y"},  {"z", "Z"},
};

void emit(PhonemeSeq& out, const char* phones) {
    std::istringstream iss(phones);
    std::string p;
    while (iss >> p) out.push_back(p);
}

std::string strip_stress(const std::string& phone) {
    std::string out;
    for (char c : phone)
        if (!std::isdigit(static_cast<unsigned char>(c))) out.push_back(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

PronunciationLexicon parse_pronunciation_lexicon(const std::string& content) {
    PronunciationLexicon lex;
    std::istringstream iss(content);
    std::string line;
    while (std::getline(iss, line)) {
        if (line.empty() || line[0] == ';' || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string word;
        if (!(fields >> word)) continue;
        std::transform(word.begin(), word.end(), word.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        PhonemeSeq phones;
        std::string ph;
        while (fields >> ph) phones.push_back(strip_stress(ph));
        if (!phones.empty()) lex.emplace(std::move(word), std::move(phones));
    }
    return lex;
}

PhonemeSeq g2p_rules(const std::string& word) {
    std::string w;
    for (char c : word)
        if (std::isalpha(static_cast<unsigned char>(c)))
            w.push_back(std::tolower(static_cast<unsigned char>(c)));
    if (w.empty()) throw ValidationError("g2p: no alphabetic characters in '" + word + "'");

    // Word-final silent e after a consonant.
    if (w.size() > 2 && w.back() == 'e') {
        char prev = w[w.size() - 2];
        if (prev != 'a' && prev != 'e' && prev != 'i' && prev != 'o' && prev != 'u') w.pop_back();
    }

    PhonemeSeq out;
    std::size_t i = 0;
    while (i < w.size()) {
        bool matched = false;
        for (const Rule& rule : kDigraphRules) {
            std::size_t len = std::char_traits<char>::length(rule.graphemes);
            if (w.compare(i, len, rule.graphemes) == 0) {
                emit(out, rule.phones);
                i += len;
                matched = true;
                break;
            }
        }
        if (matched) continue;
        char c = w[i];
        if (c == 'y' && i > 0) {
            out.push_back("IH");  // mid-word y acts as a vowel
            ++i;
            continue;
        }
        for (const Rule& rule : kLetterRules) {
            if (rule.graphemes[0] == c) {
                emit(out, rule.phones);
                break;
            }
        }
        ++i;
    }
    return out;
}

PhonemeSeq g2p(const std::string& word, const PronunciationLexicon& lexicon) {
    auto it = lexicon.find(word);
    if (it != lexicon.end()) return it->second;
    return g2p_rules(word);
}

std::string phone_to_grapheme(const std::string& phone) {
    static const std::map<std::string, std::string> kSpelling = {
        {"AA", "o"},  {"AE", "a"},  {"AH", "u"},  {"AO", "au"}, {"AW", "ou"}, {"AY", "i"},
        {"B", "b"},   {"CH", "ch"}, {"D", "d"},   {"DH", "th"}, {"EH", "e"},  {"ER", "er"},
        {"EY", "ay"}, {"F", "f"},   {"G", "g"},   {"HH", "h"},  {"IH", "i"},  {"IY", "ee"},
        {"JH", "j"},  {"K", "k"},   {"L", "l"},   {"M", "m"},   {"N", "n"},   {"NG", "ng"},
        {"OW", "o"},  {"OY", "oy"}, {"P", "p"},   {"R", "r"},   {"S", "s"},   {"SH", "sh"},
        {"T", "t"},   {"TH", "th"}, {"UH", "oo"}, {"UW", "oo"}, {"V", "v"},   {"W", "w"},
        {"Y", "y"},   {"Z", "z"},   {"ZH", "zh"},
    };
    auto it = kSpelling.find(phone);
    return it != kSpelling.end() ? it->second : "";
}

}  // namespace sectk
