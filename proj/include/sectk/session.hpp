#pragma once

#include <optional>
#include <string>
#include <vector>

namespace sectk {

// An ASR word with timestamps. Text is normalized (lowercase, surrounding
// punctuation stripped except apostrophes).
struct Word {
    std::string text;
    double start = 0.0;
    double end = 0.0;
    std::optional<double> confidence;
};

// One diarization segment: who spoke during [start, end).
struct SpeakerSegment {
    std::string speaker;
    double start = 0.0;
    double end = 0.0;
};

struct TaggedWord {
    std::string text;
    std::string speaker;
};

// The central exchange format: an ordered word stream with speaker tags.
struct TaggedTranscript {
    std::string session_id;
    std::vector<TaggedWord> words;

    std::vector<std::string> speaker_set() const;
};

// Maximal same-speaker run; [begin, end) indexes into a TaggedTranscript.
struct Turn {
    std::string speaker;
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
};

// One line of a canonical session file. Timings are optional (text-only
// corpora carry none).
struct SessionLine {
    std::string speaker;
    std::string text;
    std::optional<double> start;
    std::optional<double> end;
};

struct SessionFile {
    std::string session_id;
    std::vector<SessionLine> lines;

    TaggedTranscript to_transcript() const;
};

// Lowercase and strip surrounding punctuation except apostrophes.
std::string normalize_token(const std::string& raw);

// CTM: `recording channel start duration word [confidence]`.
std::vector<Word> parse_ctm(const std::string& content);

// RTTM: 10-field records; only type=SPEAKER rows are consumed.
std::vector<SpeakerSegment> parse_rttm(const std::string& content);

// Canonical session file: `speaker<TAB>start<TAB>end<TAB>word` or the
// text-only variant `speaker<TAB>word`. UTF-8, newline-terminated records.
SessionFile parse_session(const std::string& content, const std::string& session_id);
std::string serialize_session(const SessionFile& session);

// Word-timing file in either supported format.
enum class WordFormat { Ctm, SessionFile };
std::vector<Word> parse_words(const std::string& content, WordFormat format);

// Maximal same-speaker runs; ranges partition [0, len).
std::vector<Turn> turns_of(const TaggedTranscript& transcript);

}  // namespace sectk
