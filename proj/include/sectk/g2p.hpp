#pragma once

#include <map>
#include <string>
#include <vector>

namespace sectk {

// ARPAbet-style phone sequence, stress markers stripped.
using PhonemeSeq = std::vector<std::string>;

// `WORD PH1 PH2 ...` lines; word keys lowercased, stress digits removed.
using PronunciationLexicon = std::map<std::string, PhonemeSeq>;

PronunciationLexicon parse_pronunciation_lexicon(const std::string& content);

// Lexicon lookup with a deterministic rule-based letter-to-phone fallback.
PhonemeSeq g2p(const std::string& word, const PronunciationLexicon& lexicon);

// Rule-based conversion only (the fallback path).
PhonemeSeq g2p_rules(const std::string& word);

// Default grapheme for a phone, used to spell synthesized alternates.
std::string phone_to_grapheme(const std::string& phone);

}  // namespace sectk
