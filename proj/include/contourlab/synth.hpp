#pragma once

#include "contourlab/contour.hpp"
#include "contourlab/ingest.hpp"
#include "contourlab/matrix.hpp"
#include "contourlab/random.hpp"
#include "contourlab/typology.hpp"

#include <vector>

namespace contourlab {

/// First-order pitch Markov chain with Poisson phrase lengths and a binomial initial pitch.
struct MarkovModel {
    std::vector<int> states;  ///< sorted pitches
    Matrix transition;        ///< row-stochastic, states x states
    int initial_n = 0;
    double initial_p = 0.5;
    double length_lambda = 1.0;
    int min_length = 4;

    std::size_t state_index(int pitch) const;  ///< nearest state, lower pitch on ties
    void validate() const;
};

MarkovModel fit_markov(const std::vector<Phrase>& phrases);

/// Unit-duration pitch walks; per-contour sub-streams make the output independent of threading.
std::vector<Phrase> sample_uniform(const MarkovModel& model, std::size_t count, Rng& rng);

struct ClusterOptions {
    std::size_t k = 5;
    std::size_t pool = 25000;
    std::size_t keep = 1000;
    std::size_t samples = default_samples;
    std::size_t cosine_coefficients = default_samples - 1;
    std::size_t max_retries = 5;
};

struct ClusteredSample {
    std::vector<Phrase> phrases;
    std::vector<std::uint32_t> labels;  ///< planted cluster of each phrase
    std::vector<std::size_t> pool_index;  ///< position in the input pool
    Matrix centroids;  ///< in cosine-coefficient space
};

/// Cosine-contour embedding used to pick cluster neighbours.
Matrix cosine_embedding(const std::vector<Phrase>& phrases, std::size_t samples, std::size_t coefficients);

/// k-means in cosine space, then the keep/k members nearest to each centroid.
ClusteredSample make_clustered(const std::vector<Phrase>& uniform, const ClusterOptions& options, Rng& rng);

}  // namespace contourlab
