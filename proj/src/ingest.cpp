#include "contourlab/ingest.hpp"

#include "contourlab/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace contourlab {

using ordered_json = nlohmann::ordered_json;

void Melody::validate() const {
    if (notes.empty()) throw InputError("melody '" + id + "' has no notes");
    for (const auto& note : notes) {
        if (note.duration <= Rational(0)) throw InputError("melody '" + id + "' has a non-positive duration");
        if (note.pitch < 0 || note.pitch > 127) throw InputError("melody '" + id + "' has pitch outside 0-127");
    }
    for (std::size_t i = 0; i < phrase_ends.size(); ++i) {
        if (i > 0 && phrase_ends[i] <= phrase_ends[i - 1])
            throw InputError("melody '" + id + "' phrase ends are not strictly increasing");
        if (phrase_ends[i] >= notes.size()) throw InputError("melody '" + id + "' phrase end out of range");
    }
    if (tonic && (*tonic < 0 || *tonic > 127)) throw InputError("melody '" + id + "' tonic outside 0-127");
}

Rational Phrase::duration() const {
    Rational total(0);
    for (const auto& note : notes) total += note.duration;
    return total;
}

std::vector<int> Phrase::pitches() const {
    std::vector<int> out;
    out.reserve(notes.size());
    for (const auto& note : notes) out.push_back(note.pitch);
    return out;
}

// ---------------------------------------------------------------------------
// kern

namespace {

int pitch_class(char letter) {
    switch (letter) {
        case 'c': return 0;
        case 'd': return 2;
        case 'e': return 4;
        case 'f': return 5;
        case 'g': return 7;
        case 'a': return 9;
        case 'b': return 11;
        default: return -1;
    }
}

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool is_pitch_letter(char c) { return pitch_class(lower(c)) >= 0; }

// Signifiers that carry no pitch or duration information in the supported subset
// (beams, articulations, ornaments, stem directions, editorial marks).
bool is_ignored_signifier(char c) {
    static constexpr std::string_view ignored = "()LJKk;'`~^vTtMmWwSsO$RoxXyYuU:&<>|\"\\/,?IiHhjZ";
    return ignored.find(c) != std::string_view::npos;
}

struct NoteToken {
    bool rest = false;
    int pitch = 0;
    Rational duration{0};
    bool phrase_end = false;
    bool tie_start = false;
    bool tie_continue = false;
    bool tie_end = false;
};

NoteToken parse_note_token(std::string_view token, std::size_t line) {
    NoteToken out;
    std::size_t i = 0;
    bool have_duration = false;
    std::int64_t reciprocal = 0;
    int dots = 0;
    char letter = 0;
    int letter_count = 0;
    int accidental = 0;

    while (i < token.size()) {
        const char c = token[i];
        if (c >= '0' && c <= '9') {
            if (have_duration) throw ParseError(line, "duplicate duration in token '" + std::string(token) + "'");
            have_duration = true;
            while (i < token.size() && token[i] >= '0' && token[i] <= '9') {
                reciprocal = reciprocal * 10 + (token[i] - '0');
                if (reciprocal > 1'000'000) throw ParseError(line, "unparsable duration in '" + std::string(token) + "'");
                ++i;
            }
            while (i < token.size() && token[i] == '.') {
                ++dots;
                ++i;
            }
            if (i < token.size() && token[i] == '%')
                throw ParseError(line, "unparsable duration in '" + std::string(token) + "'");
            continue;
        }
        if (is_pitch_letter(c)) {
            if (letter_count > 0 && c != letter)
                throw ParseError(line, "malformed pitch in token '" + std::string(token) + "'");
            letter = c;
            ++letter_count;
        } else if (c == 'r') {
            out.rest = true;
        } else if (c == '#') {
            ++accidental;
        } else if (c == '-') {
            --accidental;
        } else if (c == 'n') {
            // explicit natural
        } else if (c == '{') {
            // phrase start; boundaries are carried by '}'
        } else if (c == '}') {
            out.phrase_end = true;
        } else if (c == '[') {
            out.tie_start = true;
        } else if (c == '_') {
            out.tie_continue = true;
        } else if (c == ']') {
            out.tie_end = true;
        } else if (c == 'q' || c == 'Q' || c == 'P' || c == 'p') {
            throw ParseError(line, "grace notes are not supported: '" + std::string(token) + "'");
        } else if (!is_ignored_signifier(c)) {
            throw ParseError(line, "malformed pitch token '" + std::string(token) + "'");
        }
        ++i;
    }

    if (!have_duration) throw ParseError(line, "unparsable duration in '" + std::string(token) + "'");
    if (reciprocal == 0) throw ParseError(line, "zero duration in '" + std::string(token) + "'");
    // 4/r quarter notes, each dot adds half of the previous value.
    Rational base(4, reciprocal);
    Rational value = base;
    Rational add = base;
    for (int d = 0; d < dots; ++d) {
        add = add * Rational(1, 2);
        value += add;
    }
    out.duration = value;

    if (out.rest) {
        if (letter_count > 0) throw ParseError(line, "malformed token '" + std::string(token) + "'");
        return out;
    }
    if (letter_count == 0) throw ParseError(line, "malformed pitch token '" + std::string(token) + "'");
    const bool upper = letter >= 'A' && letter <= 'Z';
    const int octave = upper ? 4 - letter_count : 3 + letter_count;
    out.pitch = 12 * (octave + 1) + pitch_class(lower(letter)) + accidental;
    if (out.pitch < 0 || out.pitch > 127)
        throw ParseError(line, "pitch out of MIDI range in '" + std::string(token) + "'");
    return out;
}

std::optional<int> parse_tonic_interpretation(std::string_view body) {
    // body is the text between '*' and the trailing ':' ("G", "b-", "f#").
    if (body.empty() || !is_pitch_letter(body[0])) return std::nullopt;
    int pc = pitch_class(lower(body[0]));
    for (std::size_t i = 1; i < body.size(); ++i) {
        if (body[i] == '#') ++pc;
        else if (body[i] == '-') --pc;
        else return std::nullopt;
    }
    return 60 + ((pc % 12) + 12) % 12;
}

}  // namespace

Melody parse_kern(std::string_view text, std::string id, std::string source) {
    Melody melody;
    melody.id = std::move(id);
    melody.source = std::move(source);

    bool in_kern = false;
    bool tie_open = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (line.starts_with("!")) continue;
        if (line.find('\t') != std::string_view::npos)
            throw UnsupportedInput("line " + std::to_string(line_no) + ": multiple spines are not supported");

        if (line.starts_with("**")) {
            if (line != "**kern") throw UnsupportedInput("unsupported exclusive interpretation '" + std::string(line) + "'");
            in_kern = true;
            continue;
        }
        if (line.starts_with("*")) {
            if (line == "*-") break;
            if (line == "*^" || line == "*v" || line == "*+" || line == "*x")
                throw UnsupportedInput("line " + std::to_string(line_no) + ": spine manipulation is not supported");
            if (line.size() > 2 && line.back() == ':') {
                if (auto tonic = parse_tonic_interpretation(line.substr(1, line.size() - 2))) melody.tonic = tonic;
            }
            continue;
        }
        if (!in_kern) throw ParseError(line_no, "data before **kern header");
        if (line.starts_with("=") || line == ".") continue;
        if (line.find(' ') != std::string_view::npos)
            throw UnsupportedInput("line " + std::to_string(line_no) + ": chords are not supported");

        const NoteToken token = parse_note_token(line, line_no);
        if (token.rest) {
            if (token.phrase_end && !melody.notes.empty() &&
                (melody.phrase_ends.empty() || melody.phrase_ends.back() != melody.notes.size() - 1))
                melody.phrase_ends.push_back(melody.notes.size() - 1);
            continue;
        }

        const bool continues_tie = (token.tie_continue || token.tie_end) && tie_open && !melody.notes.empty() &&
                                   melody.notes.back().pitch == token.pitch;
        if (continues_tie) {
            melody.notes.back().duration += token.duration;
        } else {
            melody.notes.push_back(Note{token.pitch, token.duration});
        }
        tie_open = token.tie_start || token.tie_continue;
        if (token.phrase_end) {
            const std::size_t index = melody.notes.size() - 1;
            if (melody.phrase_ends.empty() || melody.phrase_ends.back() != index) melody.phrase_ends.push_back(index);
        }
    }

    if (melody.notes.empty()) throw ParseError(line_no, "document contains no notes");
    return melody;
}

// ---------------------------------------------------------------------------
// phrases and segments

namespace {

Phrase make_phrase(const Melody& melody, std::size_t begin, std::size_t end, std::string id, std::string source) {
    Phrase phrase;
    phrase.id = std::move(id);
    phrase.notes.assign(melody.notes.begin() + static_cast<std::ptrdiff_t>(begin),
                        melody.notes.begin() + static_cast<std::ptrdiff_t>(end));
    phrase.tonic = melody.tonic;
    phrase.source = std::move(source);
    return phrase;
}

}  // namespace

std::vector<Phrase> extract_phrases(const Melody& melody) {
    melody.validate();
    std::vector<Phrase> out;
    std::size_t begin = 0;
    for (std::size_t end : melody.phrase_ends) {
        out.push_back(make_phrase(melody, begin, end + 1, melody.id + "/" + std::to_string(out.size()), melody.source));
        begin = end + 1;
    }
    // Notes after the last marker (or the whole melody when there are none) form a final phrase.
    if (begin < melody.notes.size())
        out.push_back(make_phrase(melody, begin, melody.notes.size(), melody.id + "/" + std::to_string(out.size()),
                                  melody.source));
    return out;
}

std::vector<Phrase> random_segments(const Melody& melody, double lambda, Rng& rng) {
    if (!(lambda > 0)) throw InputError("segment lambda must be positive");
    melody.validate();
    const std::size_t n = melody.notes.size();
    std::vector<Phrase> out;
    if (n < 6) return out;

    std::vector<std::pair<std::size_t, std::size_t>> chunks;
    std::size_t pos = 0;
    while (pos < n) {
        const auto length = static_cast<std::size_t>(poisson_at_least(rng, lambda, 2));
        const std::size_t end = std::min(n, pos + length);
        chunks.emplace_back(pos, end);
        pos = end;
    }
    if (chunks.size() < 3) return out;
    for (std::size_t c = 1; c + 1 < chunks.size(); ++c) {
        out.push_back(make_phrase(melody, chunks[c].first, chunks[c].second,
                                  melody.id + "/seg" + std::to_string(c - 1), melody.source + "-segments"));
    }
    return out;
}

AggregateSample aggregate_sample(const std::vector<std::vector<Phrase>>& datasets, std::size_t per_dataset,
                                 Rng& rng) {
    AggregateSample out;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        const auto& dataset = datasets[d];
        std::vector<std::size_t> order(dataset.size());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        if (dataset.size() < per_dataset) {
            const std::string name = dataset.empty() ? "dataset " + std::to_string(d) : dataset.front().source;
            out.warnings.push_back(name + ": only " + std::to_string(dataset.size()) + " of " +
                                   std::to_string(per_dataset) + " phrases available");
        }
        const std::size_t take = std::min(per_dataset, dataset.size());
        for (std::size_t i = 0; i < take; ++i) out.phrases.push_back(dataset[order[i]]);
    }
    std::shuffle(out.phrases.begin(), out.phrases.end(), rng);
    return out;
}

// ---------------------------------------------------------------------------
// JSONL

std::string melody_to_json_line(const Melody& melody) {
    ordered_json j;
    j["id"] = melody.id;
    auto pitches = ordered_json::array();
    auto durations = ordered_json::array();
    for (const auto& note : melody.notes) {
        pitches.push_back(note.pitch);
        durations.push_back(note.duration.to_string());
    }
    j["pitches"] = std::move(pitches);
    j["durations"] = std::move(durations);
    j["phrase_ends"] = melody.phrase_ends;
    j["tonic"] = melody.tonic ? ordered_json(*melody.tonic) : ordered_json(nullptr);
    j["source"] = melody.source;
    return j.dump();
}

Melody melody_from_json_line(std::string_view line) {
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("invalid JSONL record: ") + e.what());
    }
    try {
        Melody melody;
        melody.id = j.at("id").get<std::string>();
        const auto& pitches = j.at("pitches");
        const auto& durations = j.at("durations");
        if (pitches.size() != durations.size()) throw InputError("pitches and durations differ in length");
        for (std::size_t i = 0; i < pitches.size(); ++i) {
            const auto& d = durations[i];
            Rational duration = d.is_string() ? Rational::parse(d.get<std::string>())
                                              : Rational::parse(d.dump());
            melody.notes.push_back(Note{pitches[i].get<int>(), duration});
        }
        melody.phrase_ends = j.value("phrase_ends", std::vector<std::size_t>{});
        if (j.contains("tonic") && !j["tonic"].is_null()) melody.tonic = j["tonic"].get<int>();
        melody.source = j.value("source", std::string{});
        melody.validate();
        return melody;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("invalid JSONL record: ") + e.what());
    }
}

void write_melodies(std::ostream& out, const std::vector<Melody>& melodies) {
    for (const auto& melody : melodies) out << melody_to_json_line(melody) << '\n';
}

std::vector<Melody> read_melodies(std::istream& in) {
    std::vector<Melody> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(melody_from_json_line(line));
        } catch (const InputError& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return out;
}

std::vector<Melody> read_melodies(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return read_melodies(in);
}

Melody phrase_as_melody(const Phrase& phrase) {
    Melody melody;
    melody.id = phrase.id;
    melody.notes = phrase.notes;
    melody.tonic = phrase.tonic;
    melody.source = phrase.source;
    return melody;
}

Phrase melody_as_phrase(const Melody& melody) {
    Phrase phrase;
    phrase.id = melody.id;
    phrase.notes = melody.notes;
    phrase.tonic = melody.tonic;
    phrase.source = melody.source;
    return phrase;
}

void write_phrases(std::ostream& out, const std::vector<Phrase>& phrases) {
    for (const auto& phrase : phrases) out << melody_to_json_line(phrase_as_melody(phrase)) << '\n';
}

std::vector<Phrase> read_phrases(const std::filesystem::path& path) {
    std::vector<Phrase> out;
    for (const auto& melody : read_melodies(path)) out.push_back(melody_as_phrase(melody));
    return out;
}

std::vector<Melody> load_corpus(const std::filesystem::path& dir, std::string_view format) {
    namespace fs = std::filesystem;
    if (format != "kern" && format != "jsonl") throw InputError("unknown corpus format '" + std::string(format) + "'");
    const std::string extension = format == "kern" ? ".krn" : ".jsonl";

    std::vector<fs::path> files;
    if (fs::is_regular_file(dir)) {
        files.push_back(dir);
    } else if (fs::is_directory(dir)) {
        for (const auto& entry : fs::recursive_directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().extension() == extension) files.push_back(entry.path());
        std::sort(files.begin(), files.end());
    } else {
        throw InputError("corpus path does not exist: " + dir.string());
    }

    std::vector<Melody> out;
    for (const auto& file : files) {
        if (format == "jsonl") {
            auto melodies = read_melodies(file);
            out.insert(out.end(), std::make_move_iterator(melodies.begin()), std::make_move_iterator(melodies.end()));
            continue;
        }
        std::ifstream in(file);
        if (!in) throw InputError("cannot open " + file.string());
        std::stringstream buffer;
        buffer << in.rdbuf();
        const std::string source = fs::is_directory(dir) ? dir.filename().string() : file.parent_path().filename().string();
        try {
            out.push_back(parse_kern(buffer.str(), file.stem().string(), source));
        } catch (const ParseError& e) {
            throw ParseError(e.line(), file.string() + ": " + e.detail());
        }
    }
    return out;
}

}  // namespace contourlab
