#pragma once

#include "contourlab/random.hpp"
#include "contourlab/rational.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace contourlab {

struct Note {
    int pitch = 60;  ///< MIDI semitones
    Rational duration{1};  ///< quarter notes, > 0

    friend bool operator==(const Note&, const Note&) = default;
};

/// A monophonic melody with explicit phrase-end markers.
struct Melody {
    std::string id;
    std::vector<Note> notes;
    std::vector<std::size_t> phrase_ends;  ///< inclusive note indices, strictly increasing
    std::optional<int> tonic;
    std::string source;

    /// Throws InputError when an invariant is violated.
    void validate() const;

    friend bool operator==(const Melody&, const Melody&) = default;
};

struct Phrase {
    std::string id;
    std::vector<Note> notes;
    std::optional<int> tonic;
    std::string source;

    std::size_t length() const noexcept { return notes.size(); }
    Rational duration() const;
    int final_pitch() const { return notes.back().pitch; }
    int initial_pitch() const { return notes.front().pitch; }
    std::vector<int> pitches() const;
};

/// Parses a single-spine monophonic kern document.
Melody parse_kern(std::string_view text, std::string id = {}, std::string source = {});

std::vector<Phrase> extract_phrases(const Melody& melody);

/// Cuts a melody into Poisson-length chunks and drops the first and final chunk.
std::vector<Phrase> random_segments(const Melody& melody, double lambda, Rng& rng);

struct AggregateSample {
    std::vector<Phrase> phrases;
    std::vector<std::string> warnings;  ///< sources with fewer phrases than requested
};

/// Balanced sample of `per_dataset` phrases from each dataset, shuffled.
AggregateSample aggregate_sample(const std::vector<std::vector<Phrase>>& datasets, std::size_t per_dataset,
                                 Rng& rng);

// Native JSONL format: one object per line with fields
// {id, pitches, durations, phrase_ends, tonic, source}; durations are decimal strings.
std::string melody_to_json_line(const Melody& melody);
Melody melody_from_json_line(std::string_view line);
void write_melodies(std::ostream& out, const std::vector<Melody>& melodies);
std::vector<Melody> read_melodies(std::istream& in);
std::vector<Melody> read_melodies(const std::filesystem::path& path);

/// Phrases are stored in the same schema, as single-phrase melodies.
Melody phrase_as_melody(const Phrase& phrase);
Phrase melody_as_phrase(const Melody& melody);
void write_phrases(std::ostream& out, const std::vector<Phrase>& phrases);
std::vector<Phrase> read_phrases(const std::filesystem::path& path);

/// Loads every *.krn (format "kern") or *.jsonl (format "jsonl") file below `dir`, sorted by path.
/// A plain file path is accepted as well.
std::vector<Melody> load_corpus(const std::filesystem::path& dir, std::string_view format);

}  // namespace contourlab
