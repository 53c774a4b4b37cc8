#include "sectk/session.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

#include "sectk/errors.hpp"

namespace sectk {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream iss(line);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t tab = line.find('\t', pos);
        if (tab == std::string::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, tab - pos));
        pos = tab + 1;
    }
    return out;
}

double parse_number(const std::string& s, std::size_t lineno, const char* what) {
    try {
        std::size_t consumed = 0;
        double v = std::stod(s, &consumed);
        if (consumed != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(lineno) + ": non-numeric " + what + " '" + s + "'");
    }
}

// Calls fn(line, lineno) for every non-empty line; lineno is 1-based.
template <typename Fn>
void for_each_line(const std::string& content, Fn fn) {
    std::size_t pos = 0;
    std::size_t lineno = 0;
    while (pos < content.size()) {
        std::size_t nl = content.find('\n', pos);
        std::string line = content.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? content.size() : nl + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        fn(line, lineno);
    }
}

bool keep_edge_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '\''; }

}  // namespace

std::string normalize_token(const std::string& raw) {
    std::size_t b = 0;
    std::size_t e = raw.size();
    while (b < e && !keep_edge_char(raw[b])) ++b;
    while (e > b && !keep_edge_char(raw[e - 1])) --e;
    std::string out = raw.substr(b, e - b);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string> TaggedTranscript::speaker_set() const {
    std::set<std::string> labels;
    for (const auto& w : words) labels.insert(w.speaker);
    return {labels.begin(), labels.end()};
}

TaggedTranscript SessionFile::to_transcript() const {
    TaggedTranscript t;
    t.session_id = session_id;
    t.words.reserve(lines.size());
    for (const auto& l : lines) t.words.push_back({l.text, l.speaker});
    return t;
}

std::vector<Word> parse_ctm(const std::string& content) {
    std::vector<Word> words;
    for_each_line(content, [&](const std::string& line, std::size_t lineno) {
        if (line[0] == ';') return;  // comment rows
        auto fields = split_ws(line);
        if (fields.size() < 5 || fields.size() > 6)
            throw ParseError("line " + std::to_string(lineno) + ": expected 5 or 6 CTM fields, got " +
                             std::to_string(fields.size()));
        Word w;
        w.start = parse_number(fields[2], lineno, "start");
        double dur = parse_number(fields[3], lineno, "duration");
        w.end = w.start + dur;
        w.text = normalize_token(fields[4]);
        if (w.text.empty())
            throw ParseError("line " + std::to_string(lineno) + ": empty word after normalization");
        if (fields.size() == 6) w.confidence = parse_number(fields[5], lineno, "confidence");
        if (dur < 0)
            throw ValidationError("line " + std::to_string(lineno) + ": negative duration");
        if (!words.empty() && w.start < words.back().start)
            throw ValidationError("line " + std::to_string(lineno) + ": decreasing start time");
        words.push_back(std::move(w));
    });
    return words;
}

std::vector<SpeakerSegment> parse_rttm(const std::string& content) {
    std::vector<SpeakerSegment> segments;
    for_each_line(content, [&](const std::string& line, std::size_t lineno) {
        auto fields = split_ws(line);
        if (fields.empty() || fields[0] != "SPEAKER") return;
        if (fields.size() < 8)
            throw ParseError("line " + std::to_string(lineno) + ": SPEAKER row needs >= 8 fields");
        SpeakerSegment seg;
        seg.start = parse_number(fields[3], lineno, "onset");
        double dur = parse_number(fields[4], lineno, "duration");
        if (dur <= 0)
            throw ValidationError("line " + std::to_string(lineno) + ": non-positive duration");
        seg.end = seg.start + dur;
        seg.speaker = fields[7];
        segments.push_back(std::move(seg));
    });
    return segments;
}

SessionFile parse_session(const std::string& content, const std::string& session_id) {
    SessionFile session;
    session.session_id = session_id;
    for_each_line(content, [&](const std::string& line, std::size_t lineno) {
        auto fields = split_tabs(line);
        SessionLine rec;
        if (fields.size() == 2) {
            rec.speaker = fields[0];
            rec.text = normalize_token(fields[1]);
        } else if (fields.size() == 4) {
            rec.speaker = fields[0];
            rec.start = parse_number(fields[1], lineno, "start");
            rec.end = parse_number(fields[2], lineno, "end");
            rec.text = normalize_token(fields[3]);
            if (*rec.end < *rec.start)
                throw ValidationError("line " + std::to_string(lineno) + ": end before start");
        } else {
            throw ParseError("line " + std::to_string(lineno) + ": expected 2 or 4 tab-separated fields");
        }
        if (rec.speaker.empty())
            throw ParseError("line " + std::to_string(lineno) + ": empty speaker label");
        if (rec.text.empty())
            throw ParseError("line " + std::to_string(lineno) + ": empty word");
        session.lines.push_back(std::move(rec));
    });
    return session;
}

std::string serialize_session(const SessionFile& session) {
    std::ostringstream out;
    out.precision(3);
    out << std::fixed;
    for (const auto& l : session.lines) {
        if (l.start && l.end) {
            out << l.speaker << '\t' << *l.start << '\t' << *l.end << '\t' << l.text << '\n';
        } else {
            out << l.speaker << '\t' << l.text << '\n';
        }
    }
    return out.str();
}

std::vector<Word> parse_words(const std::string& content, WordFormat format) {
    if (format == WordFormat::Ctm) return parse_ctm(content);
    SessionFile session = parse_session(content, "words");
    std::vector<Word> words;
    words.reserve(session.lines.size());
    for (std::size_t i = 0; i < session.lines.size(); ++i) {
        const auto& l = session.lines[i];
        if (!l.start || !l.end)
            throw ValidationError("record " + std::to_string(i + 1) + ": word-timing input requires timestamps");
        if (!words.empty() && *l.start < words.back().start)
            throw ValidationError("record " + std::to_string(i + 1) + ": decreasing start time");
        words.push_back({l.text, *l.start, *l.end, std::nullopt});
    }
    return words;
}

std::vector<Turn> turns_of(const TaggedTranscript& transcript) {
    std::vector<Turn> turns;
    std::size_t i = 0;
    while (i < transcript.words.size()) {
        std::size_t j = i + 1;
        while (j < transcript.words.size() && transcript.words[j].speaker == transcript.words[i].speaker) ++j;
        turns.push_back({transcript.words[i].speaker, i, j});
        i = j;
    }
    return turns;
}

}  // namespace sectk
