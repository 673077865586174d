#include "contourlab/error.hpp"
#include "contourlab/ingest.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

using namespace contourlab;

namespace {

std::vector<int> pitches_of(const Melody& m) {
    std::vector<int> out;
    for (const auto& n : m.notes) out.push_back(n.pitch);
    return out;
}

std::vector<Rational> durations_of(const Melody& m) {
    std::vector<Rational> out;
    for (const auto& n : m.notes) out.push_back(n.duration);
    return out;
}

Melody melody_of(std::vector<int> pitches, std::vector<std::size_t> ends = {}) {
    Melody m;
    m.id = "m";
    m.source = "test";
    for (int p : pitches) m.notes.push_back({p, Rational(1)});
    m.phrase_ends = std::move(ends);
    return m;
}

const std::string fixture_dir = std::string(CONTOURLAB_SOURCE_DIR) + "/data/fixtures";

}  // namespace

TEST(ParseKern, PhraseOfThreeNotes) {
    const auto m = parse_kern("**kern\n{8c\n8d\n4e}\n*-\n");
    EXPECT_EQ(pitches_of(m), (std::vector<int>{60, 62, 64}));
    EXPECT_EQ(durations_of(m), (std::vector<Rational>{Rational(1, 2), Rational(1, 2), Rational(1)}));
    EXPECT_EQ(m.phrase_ends, (std::vector<std::size_t>{2}));
}

TEST(ParseKern, RestIsDropped) {
    const auto m = parse_kern("**kern\n4r\n{4c\n4c}\n*-\n");
    EXPECT_EQ(pitches_of(m), (std::vector<int>{60, 60}));
    EXPECT_EQ(m.phrase_ends, (std::vector<std::size_t>{1}));
}

TEST(ParseKern, OctaveDoubling) {
    const auto m = parse_kern("**kern\n4cc\n*-\n");
    EXPECT_EQ(pitches_of(m), (std::vector<int>{72}));
    EXPECT_TRUE(m.phrase_ends.empty());
}

TEST(ParseKern, PitchConventionAndAccidentals) {
    // Doubled capitals share one octave: CC..BB is C2..B2.
    const auto m = parse_kern("**kern\n4C\n4CC\n4a\n4b-\n4f#\n4e--\n4g##\n4BB-\n*-\n");
    EXPECT_EQ(pitches_of(m), (std::vector<int>{48, 36, 69, 70, 66, 62, 69, 46}));
}

TEST(ParseKern, DotsAndTriplets) {
    const auto m = parse_kern("**kern\n4.c\n8..d\n12e\n2.f\n*-\n");
    EXPECT_EQ(durations_of(m), (std::vector<Rational>{Rational(3, 2), Rational(7, 8), Rational(1, 3), Rational(3)}));
}

TEST(ParseKern, TiesMergeDurations) {
    const auto m = parse_kern("**kern\n{[4g\n=\n4g]\n4a}\n*-\n");
    EXPECT_EQ(pitches_of(m), (std::vector<int>{67, 69}));
    EXPECT_EQ(m.notes[0].duration, Rational(2));
    EXPECT_EQ(m.phrase_ends, (std::vector<std::size_t>{1}));
}

TEST(ParseKern, TonicFromInterpretation) {
    EXPECT_EQ(parse_kern("**kern\n*k[f#]\n*G:\n4g\n*-\n").tonic, 67);
    EXPECT_EQ(parse_kern("**kern\n*e-:\n4g\n*-\n").tonic, 63);
    EXPECT_FALSE(parse_kern("**kern\n4g\n*-\n").tonic.has_value());
}

TEST(ParseKern, CommentsBarlinesAndUnknownInterpretationsIgnored) {
    const auto m = parse_kern("!!!OTL: x\n**kern\n*clefG2\n*M3/4\n! local\n4c\n=1\n.\n4d\n==\n*-\n");
    EXPECT_EQ(pitches_of(m), (std::vector<int>{60, 62}));
}

TEST(ParseKern, ClosingMarkerOnRestEndsPreviousNote) {
    const auto m = parse_kern("**kern\n{4c\n4d\n4r}\n{4e\n4f}\n*-\n");
    EXPECT_EQ(m.phrase_ends, (std::vector<std::size_t>{1, 3}));
}

TEST(ParseKern, ErrorsCarryLineNumbers) {
    try {
        parse_kern("**kern\n4c\n4x\n*-\n");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW(parse_kern("**kern\n0c\n*-\n"), ParseError);
    EXPECT_THROW(parse_kern("**kern\nc\n*-\n"), ParseError);
    EXPECT_THROW(parse_kern("**kern\n8qc\n*-\n"), ParseError);
}

TEST(ParseKern, MultipleSpinesUnsupported) {
    EXPECT_THROW(parse_kern("**kern\t**kern\n4c\t4e\n*-\t*-\n"), UnsupportedInput);
    EXPECT_THROW(parse_kern("**kern\n4c 4e\n*-\n"), UnsupportedInput);
}

TEST(ExtractPhrases, SplitsAtEnds) {
    const auto phrases = extract_phrases(melody_of({60, 62, 64, 65, 67, 69}, {2, 5}));
    ASSERT_EQ(phrases.size(), 2u);
    EXPECT_EQ(phrases[0].length(), 3u);
    EXPECT_EQ(phrases[1].length(), 3u);
    EXPECT_EQ(phrases[1].final_pitch(), 69);
    EXPECT_EQ(phrases[0].source, "test");
}

TEST(ExtractPhrases, NoEndsGivesWholeMelody) {
    const auto phrases = extract_phrases(melody_of({60, 62, 64, 65}));
    ASSERT_EQ(phrases.size(), 1u);
    EXPECT_EQ(phrases[0].length(), 4u);
}

TEST(ExtractPhrases, ConservesNotesOnFixtures) {
    const auto melodies = load_corpus(fixture_dir + "/kern", "kern");
    ASSERT_EQ(melodies.size(), 20u);
    for (const auto& m : melodies) {
        std::vector<Note> joined;
        for (const auto& p : extract_phrases(m)) {
            EXPECT_EQ(p.tonic, m.tonic);
            joined.insert(joined.end(), p.notes.begin(), p.notes.end());
        }
        EXPECT_EQ(joined, m.notes) << m.id;
    }
}

TEST(RandomSegments, ShortMelodyGivesNothing) {
    Rng rng(1);
    EXPECT_TRUE(random_segments(melody_of({60, 62, 64, 65}), 3.0, rng).empty());
}

TEST(RandomSegments, DeterministicContiguousAndInterior) {
    std::vector<int> pitches(30);
    std::iota(pitches.begin(), pitches.end(), 40);
    const auto m = melody_of(pitches);
    Rng a(9), b(9);
    const auto first = random_segments(m, 6.0, a);
    const auto second = random_segments(m, 6.0, b);
    ASSERT_FALSE(first.empty());
    ASSERT_EQ(first.size(), second.size());
    for (std::size_t i = 0; i < first.size(); ++i) EXPECT_EQ(first[i].notes, second[i].notes);

    // Pitches are the note index + 40, so contiguity and interior position are visible.
    EXPECT_GT(first.front().notes.front().pitch, 40);
    EXPECT_LT(first.back().notes.back().pitch, 69);
    for (std::size_t i = 0; i < first.size(); ++i) {
        EXPECT_GE(first[i].length(), 2u);
        EXPECT_EQ(first[i].source, "test-segments");
        for (std::size_t j = 1; j < first[i].notes.size(); ++j)
            EXPECT_EQ(first[i].notes[j].pitch, first[i].notes[j - 1].pitch + 1);
        if (i > 0) EXPECT_EQ(first[i].notes.front().pitch, first[i - 1].notes.back().pitch + 1);
    }
}

TEST(RandomSegments, MeanMatchesTruncatedPoisson) {
    // E[L | L >= 2] for Poisson(6).
    const double lambda = 6.0;
    const double p0 = std::exp(-lambda);
    const double p1 = lambda * p0;
    const double expected = (lambda - p1) / (1.0 - p0 - p1);

    const auto melodies = load_corpus(fixture_dir + "/kern", "kern");
    std::size_t count = 0;
    double total = 0.0;
    for (std::uint64_t seed = 0; count < 10000; ++seed) {
        Rng rng(seed);
        for (const auto& m : melodies)
            for (const auto& s : random_segments(m, lambda, rng)) {
                total += static_cast<double>(s.length());
                ++count;
            }
    }
    EXPECT_NEAR(total / static_cast<double>(count), expected, 0.5);
}

TEST(AggregateSample, BalancedCounts) {
    std::vector<std::vector<Phrase>> datasets(9);
    for (std::size_t d = 0; d < datasets.size(); ++d)
        for (int i = 0; i < 150; ++i)
            datasets[d].push_back(Phrase{"d" + std::to_string(d) + "/" + std::to_string(i), {{60, Rational(1)}}, {},
                                         "src" + std::to_string(d)});
    Rng rng(3);
    const auto sample = aggregate_sample(datasets, 100, rng);
    EXPECT_EQ(sample.phrases.size(), 900u);
    EXPECT_TRUE(sample.warnings.empty());
    std::map<std::string, int> per_source;
    std::set<std::string> ids;
    for (const auto& p : sample.phrases) {
        per_source[p.source]++;
        ids.insert(p.id);
    }
    EXPECT_EQ(ids.size(), 900u);
    for (const auto& [source, n] : per_source) EXPECT_EQ(n, 100) << source;
}

TEST(AggregateSample, ClampsWithWarningAndIsDeterministic) {
    std::vector<std::vector<Phrase>> datasets(1);
    for (int i = 0; i < 40; ++i) datasets[0].push_back(Phrase{std::to_string(i), {{60, Rational(1)}}, {}, "small"});
    Rng a(5), b(5);
    const auto first = aggregate_sample(datasets, 100, a);
    const auto second = aggregate_sample(datasets, 100, b);
    EXPECT_EQ(first.phrases.size(), 40u);
    EXPECT_EQ(first.warnings.size(), 1u);
    for (std::size_t i = 0; i < first.phrases.size(); ++i) EXPECT_EQ(first.phrases[i].id, second.phrases[i].id);
}

TEST(Jsonl, RoundTripFixtures) {
    const auto melodies = load_corpus(fixture_dir + "/kern", "kern");
    std::stringstream buffer;
    write_melodies(buffer, melodies);
    const auto back = read_melodies(buffer);
    ASSERT_EQ(back.size(), melodies.size());
    for (std::size_t i = 0; i < melodies.size(); ++i) EXPECT_EQ(back[i], melodies[i]);
}

TEST(Jsonl, FieldsAndDecimalDurations) {
    Melody m = melody_of({60, 62});
    m.notes[1].duration = Rational(3, 4);
    m.phrase_ends = {1};
    m.tonic = 60;
    EXPECT_EQ(melody_to_json_line(m),
              R"({"id":"m","pitches":[60,62],"durations":["1","0.75"],"phrase_ends":[1],"tonic":60,"source":"test"})");
}

TEST(Jsonl, RejectsInvalidRecords) {
    EXPECT_THROW(melody_from_json_line(R"({"id":"x","pitches":[60],"durations":["0"],"phrase_ends":[],"tonic":null,"source":""})"),
                 Error);
    EXPECT_THROW(melody_from_json_line(R"({"id":"x","pitches":[60,61],"durations":["1","1"],"phrase_ends":[1,0],"tonic":null,"source":""})"),
                 Error);
    EXPECT_THROW(melody_from_json_line("not json"), Error);
}

TEST(LoadCorpus, ChantJsonl) {
    const auto melodies = load_corpus(fixture_dir + "/chant", "jsonl");
    EXPECT_EQ(melodies.size(), 12u);
    for (const auto& m : melodies) {
        EXPECT_TRUE(m.tonic.has_value());
        EXPECT_FALSE(m.phrase_ends.empty());
    }
}
