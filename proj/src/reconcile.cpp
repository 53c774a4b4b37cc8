#include "sectk/reconcile.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "sectk/errors.hpp"

namespace sectk {

namespace {

double overlap_seconds(const Word& w, const SpeakerSegment& s) {
    return std::max(0.0, std::min(w.end, s.end) - std::max(w.start, s.start));
}

double boundary_gap(const Word& w, const SpeakerSegment& s) {
    if (s.start > w.end) return s.start - w.end;
    if (w.start > s.end) return w.start - s.end;
    return 0.0;  // touching or contained
}

}  // namespace

AssignRecord assign_speaker(const Word& word, const std::vector<SpeakerSegment>& segments) {
    if (segments.empty()) throw ConfigError("assign_speaker: empty segment list");

    // Aggregate positive overlap per speaker; remember the earliest start of
    // a contributing segment for tie-breaking.
    std::map<std::string, std::pair<double, double>> per_speaker;  // label -> (overlap, earliest start)
    for (const auto& seg : segments) {
        double ov = overlap_seconds(word, seg);
        if (ov <= 0.0) continue;
        auto [it, fresh] = per_speaker.try_emplace(seg.speaker, ov, seg.start);
        if (!fresh) {
            it->second.first += ov;
            it->second.second = std::min(it->second.second, seg.start);
        }
    }

    if (!per_speaker.empty()) {
        const std::string* best = nullptr;
        double best_ov = -1.0;
        double best_start = std::numeric_limits<double>::infinity();
        for (const auto& [label, agg] : per_speaker) {
            auto [ov, start] = agg;
            bool wins = ov > best_ov || (ov == best_ov && start < best_start);
            // map iteration is label-sorted, so equal (ov, start) keeps the
            // lexicographically smaller label
            if (wins) {
                best = &label;
                best_ov = ov;
                best_start = start;
            }
        }
        return {*best, AssignRule::Overlap, best_ov};
    }

    // No positive overlap (includes zero-length words): nearest boundary.
    const SpeakerSegment* best = nullptr;
    double best_gap = std::numeric_limits<double>::infinity();
    for (const auto& seg : segments) {
        double gap = boundary_gap(word, seg);
        bool wins = !best || gap < best_gap || (gap == best_gap && seg.start < best->start) ||
                    (gap == best_gap && seg.start == best->start && seg.speaker < best->speaker);
        if (wins) {
            best = &seg;
            best_gap = gap;
        }
    }
    return {best->speaker, AssignRule::Nearest, best_gap};
}

std::pair<TaggedTranscript, ReconcileTrace> reconcile(const std::vector<Word>& words,
                                                      const std::vector<SpeakerSegment>& segments,
                                                      const std::string& session_id) {
    TaggedTranscript transcript;
    transcript.session_id = session_id;
    ReconcileTrace trace;
    transcript.words.reserve(words.size());
    trace.reserve(words.size());
    for (const auto& w : words) {
        AssignRecord rec = assign_speaker(w, segments);
        transcript.words.push_back({w.text, rec.speaker});
        trace.push_back(std::move(rec));
    }
    return {std::move(transcript), std::move(trace)};
}

}  // namespace sectk
