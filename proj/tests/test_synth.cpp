#include "contourlab/error.hpp"
#include "contourlab/synth.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace contourlab;

namespace {

Phrase phrase_of(std::vector<int> pitches) {
    Phrase p;
    for (int v : pitches) p.notes.push_back(Note{v, Rational(1)});
    return p;
}

std::vector<Phrase> walk_corpus() {
    std::vector<Phrase> out;
    Rng rng(3);
    std::uniform_int_distribution<int> step(-2, 2), len(6, 14);
    for (int i = 0; i < 300; ++i) {
        std::vector<int> p(static_cast<std::size_t>(len(rng)));
        int x = 60 + step(rng);
        for (auto& v : p) v = x = std::clamp(x + step(rng), 52, 72);
        out.push_back(phrase_of(p));
    }
    return out;
}

}  // namespace

TEST(Markov, AlternatingExample) {
    const auto model = fit_markov({phrase_of({60, 62, 60, 62})});
    ASSERT_EQ(model.states, (std::vector<int>{60, 62}));
    EXPECT_DOUBLE_EQ(model.transition(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(model.transition(1, 0), 1.0);
    EXPECT_DOUBLE_EQ(model.length_lambda, 4.0);
}

TEST(Markov, LengthLambdaIsMeanLength) {
    const auto model = fit_markov({phrase_of({60, 61, 62, 63}), phrase_of({60, 61, 62, 63, 64, 65}),
                                   phrase_of({60, 61, 62, 63, 64, 65, 66, 67})});
    EXPECT_DOUBLE_EQ(model.length_lambda, 6.0);
    EXPECT_THROW(fit_markov({}), FitError);
}

TEST(Markov, StateIndexTiesGoLow) {
    const auto model = fit_markov({phrase_of({60, 64, 60, 64})});
    EXPECT_EQ(model.state_index(62), 0u);
    EXPECT_EQ(model.state_index(63), 1u);
    EXPECT_EQ(model.state_index(10), 0u);
}

TEST(Markov, RefitRecoversTransitions) {
    const auto corpus = walk_corpus();
    const auto model = fit_markov(corpus);
    Rng rng(5);
    const auto sample = sample_uniform(model, 20000, rng);
    const auto refit = fit_markov(sample);
    for (std::size_t r = 0; r < model.states.size(); ++r) {
        const auto rr = refit.state_index(model.states[r]);
        if (refit.states[rr] != model.states[r]) continue;
        for (std::size_t c = 0; c < model.states.size(); ++c) {
            const auto cc = refit.state_index(model.states[c]);
            if (refit.states[cc] != model.states[c]) continue;
            const double expected = model.transition(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            const double got = refit.transition(static_cast<Eigen::Index>(rr), static_cast<Eigen::Index>(cc));
            // Rarely visited rows are noisy; compare the ones with real support.
            if (expected > 0.05) EXPECT_NEAR(got, expected, 0.02 + 0.1 * expected) << r << "," << c;
        }
    }
}

TEST(Sample, SupportLengthAndDeterminism) {
    const auto corpus = walk_corpus();
    const auto model = fit_markov(corpus);
    Rng a(7), b(7);
    const auto first = sample_uniform(model, 5000, a);
    const auto second = sample_uniform(model, 5000, b);
    ASSERT_EQ(first.size(), 5000u);
    const std::set<int> states(model.states.begin(), model.states.end());
    double total = 0.0;
    for (std::size_t i = 0; i < first.size(); ++i) {
        EXPECT_EQ(first[i].pitches(), second[i].pitches());
        EXPECT_GE(first[i].length(), 4u);
        total += static_cast<double>(first[i].length());
        for (const auto& n : first[i].notes) {
            EXPECT_TRUE(states.count(n.pitch));
            EXPECT_EQ(n.duration, Rational(1));
        }
        for (std::size_t j = 0; j + 1 < first[i].notes.size(); ++j) {
            const auto r = model.state_index(first[i].notes[j].pitch);
            const auto c = model.state_index(first[i].notes[j + 1].pitch);
            EXPECT_GT(model.transition(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)), 0.0);
        }
    }
    // Truncated-Poisson mean for lambda near 10, truncation at 4.
    double mass = 0.0, weighted = 0.0, term = std::exp(-model.length_lambda);
    for (int k = 0; k < 200; ++k) {
        if (k >= 4) {
            mass += term;
            weighted += k * term;
        }
        term *= model.length_lambda / (k + 1);
    }
    EXPECT_NEAR(total / 5000.0, weighted / mass, 0.2);
    Rng c(7);
    EXPECT_THROW(sample_uniform(model, 0, c), InputError);
}

TEST(Clustered, PlantedStructure) {
    const auto model = fit_markov(walk_corpus());
    Rng rng(9);
    const auto uniform = sample_uniform(model, 25000, rng);
    const ClusterOptions options;
    const auto sample = make_clustered(uniform, options, rng);
    ASSERT_EQ(sample.phrases.size(), 1000u);
    std::vector<std::size_t> per_label(5, 0);
    for (auto l : sample.labels) ++per_label[l];
    for (auto c : per_label) EXPECT_EQ(c, 200u);
    std::set<std::size_t> distinct(sample.pool_index.begin(), sample.pool_index.end());
    EXPECT_EQ(distinct.size(), 1000u);

    // Mean pairwise cosine-space distance within clusters vs between them.
    const Matrix emb = cosine_embedding(sample.phrases, options.samples, options.cosine_coefficients);
    double within = 0.0, between = 0.0;
    std::size_t n_within = 0, n_between = 0;
    for (Eigen::Index i = 0; i < emb.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < emb.rows(); ++j) {
            const double d = (emb.row(i) - emb.row(j)).norm();
            if (sample.labels[static_cast<std::size_t>(i)] == sample.labels[static_cast<std::size_t>(j)]) {
                within += d;
                ++n_within;
            } else {
                between += d;
                ++n_between;
            }
        }
    }
    EXPECT_GE((between / static_cast<double>(n_between)) / (within / static_cast<double>(n_within)), 2.0);
}

TEST(Clustered, KeepEqualsPoolKeepsEverything) {
    const auto model = fit_markov(walk_corpus());
    Rng rng(10);
    const auto uniform = sample_uniform(model, 200, rng);
    ClusterOptions options;
    options.pool = 200;
    options.keep = 200;
    const auto sample = make_clustered(uniform, options, rng);
    ASSERT_EQ(sample.phrases.size(), 200u);
    for (std::size_t i = 0; i < 200; ++i) EXPECT_EQ(sample.pool_index[i], i);
    options.keep = 300;
    EXPECT_THROW(make_clustered(uniform, options, rng), InputError);
    options.pool = 500;
    EXPECT_THROW(make_clustered(uniform, options, rng), InputError);
}
