#include "contourlab/synth.hpp"

#include "contourlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace contourlab {

std::size_t MarkovModel::state_index(int pitch) const {
    auto it = std::lower_bound(states.begin(), states.end(), pitch);
    if (it == states.end()) return states.size() - 1;
    if (it == states.begin() || *it == pitch) return static_cast<std::size_t>(it - states.begin());
    const auto above = static_cast<std::size_t>(it - states.begin());
    return (pitch - states[above - 1] <= *it - pitch) ? above - 1 : above;
}

void MarkovModel::validate() const {
    if (states.empty()) throw FitError("markov model without states");
    if (static_cast<std::size_t>(transition.rows()) != states.size() || transition.rows() != transition.cols())
        throw FitError("transition matrix shape does not match states");
    for (Eigen::Index r = 0; r < transition.rows(); ++r) {
        if (std::abs(transition.row(r).sum() - 1.0) > 1e-9) throw FitError("transition row does not sum to 1");
        if ((transition.row(r).array() < 0.0).any()) throw FitError("negative transition probability");
    }
    if (!(initial_p >= 0.0 && initial_p <= 1.0)) throw FitError("binomial p outside [0,1]");
    if (!(length_lambda > 0.0)) throw FitError("length lambda must be positive");
}

MarkovModel fit_markov(const std::vector<Phrase>& phrases) {
    if (phrases.empty()) throw FitError("cannot fit a markov model to an empty corpus");
    MarkovModel model;
    for (const auto& phrase : phrases)
        for (const auto& note : phrase.notes) model.states.push_back(note.pitch);
    std::sort(model.states.begin(), model.states.end());
    model.states.erase(std::unique(model.states.begin(), model.states.end()), model.states.end());
    if (model.states.empty()) throw FitError("corpus contains no notes");

    const auto s = static_cast<Eigen::Index>(model.states.size());
    Matrix counts = Matrix::Zero(s, s);
    double length_total = 0.0;
    std::vector<double> initial;
    for (const auto& phrase : phrases) {
        if (phrase.notes.empty()) continue;
        length_total += static_cast<double>(phrase.notes.size());
        initial.push_back(phrase.notes.front().pitch);
        for (std::size_t i = 0; i + 1 < phrase.notes.size(); ++i)
            counts(static_cast<Eigen::Index>(model.state_index(phrase.notes[i].pitch)),
                   static_cast<Eigen::Index>(model.state_index(phrase.notes[i + 1].pitch))) += 1.0;
    }
    for (Eigen::Index r = 0; r < s; ++r) {
        const double total = counts.row(r).sum();
        if (total > 0.0) {
            counts.row(r) /= total;
        } else {
            counts(r, r) = 1.0;  // absorbing state for pitches never followed by another note
        }
    }
    model.transition = std::move(counts);
    model.length_lambda = length_total / static_cast<double>(initial.size());

    // Method of moments for Binomial(n, p) on phrase-initial pitches.
    const double mean = std::accumulate(initial.begin(), initial.end(), 0.0) / static_cast<double>(initial.size());
    double var = 0.0;
    for (double v : initial) var += (v - mean) * (v - mean);
    var /= static_cast<double>(initial.size());
    model.initial_p = std::clamp(1.0 - var / mean, 1e-6, 1.0 - 1e-6);
    const int max_initial = static_cast<int>(*std::max_element(initial.begin(), initial.end()));
    model.initial_n = std::max(static_cast<int>(std::lround(mean / model.initial_p)), max_initial);
    model.validate();
    return model;
}

std::vector<Phrase> sample_uniform(const MarkovModel& model, std::size_t count, Rng& rng) {
    if (count == 0) throw InputError("sample_uniform needs count >= 1");
    model.validate();
    const std::uint64_t base = rng();
    std::vector<Phrase> out(count);

    // Cumulative rows; upper_bound on a uniform draw never lands on a zero-probability state.
    const auto s = static_cast<std::size_t>(model.transition.rows());
    std::vector<std::vector<double>> cumulative(s, std::vector<double>(s));
    std::vector<std::size_t> last_positive(s, 0);
    for (std::size_t r = 0; r < s; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < s; ++c) {
            const double p = model.transition(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            acc += p;
            cumulative[r][c] = acc;
            if (p > 0.0) last_positive[r] = c;
        }
    }
    auto next_state = [&](std::size_t from, Rng& local) {
        const double u = std::uniform_real_distribution<double>(0.0, cumulative[from].back())(local);
        const auto it = std::upper_bound(cumulative[from].begin(), cumulative[from].end(), u);
        return std::min(static_cast<std::size_t>(it - cumulative[from].begin()), last_positive[from]);
    };

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
        Rng local = substream(base, static_cast<std::uint64_t>(i));
        const int length = poisson_at_least(local, model.length_lambda, model.min_length);
        std::binomial_distribution<int> binomial(model.initial_n, model.initial_p);
        std::size_t state = model.state_index(binomial(local));

        Phrase& phrase = out[static_cast<std::size_t>(i)];
        phrase.id = "synthetic/" + std::to_string(i);
        phrase.source = "synthetic-uniform";
        phrase.notes.reserve(static_cast<std::size_t>(length));
        phrase.notes.push_back(Note{model.states[state], Rational(1)});
        for (int step = 1; step < length; ++step) {
            state = next_state(state, local);
            phrase.notes.push_back(Note{model.states[state], Rational(1)});
        }
    }
    return out;
}

Matrix cosine_embedding(const std::vector<Phrase>& phrases, std::size_t samples, std::size_t coefficients) {
    Matrix out(static_cast<Eigen::Index>(phrases.size()), static_cast<Eigen::Index>(coefficients));
    for (std::size_t i = 0; i < phrases.size(); ++i) {
        const auto pitch = step_curve_sample(phrases[i], samples);
        const auto centered = standardize(pitch, Representation::centered, std::nullopt, phrases[i].final_pitch());
        const auto cosine = cosine_contour(centered, coefficients);
        for (std::size_t c = 0; c < coefficients; ++c)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = cosine.values[c];
    }
    return out;
}

ClusteredSample make_clustered(const std::vector<Phrase>& uniform, const ClusterOptions& options, Rng& rng) {
    if (options.k == 0) throw InputError("make_clustered needs k >= 1");
    if (uniform.size() < options.pool)
        throw InputError("make_clustered needs at least " + std::to_string(options.pool) + " input contours");
    if (options.keep > options.pool) throw InputError("keep exceeds pool size");

    const std::vector<Phrase> pool(uniform.begin(), uniform.begin() + static_cast<std::ptrdiff_t>(options.pool));
    const Matrix embedding = cosine_embedding(pool, options.samples, options.cosine_coefficients);
    const std::size_t per_cluster = options.keep / options.k;

    for (std::size_t attempt = 0; attempt <= options.max_retries; ++attempt) {
        const KMeansResult fit = kmeans(embedding, options.k, rng());
        ClusteredSample out;
        out.centroids = fit.centroids;

        if (options.keep == options.pool) {
            out.phrases = pool;
            out.labels = fit.labels;
            out.pool_index.resize(pool.size());
            std::iota(out.pool_index.begin(), out.pool_index.end(), 0);
            return out;
        }

        std::vector<std::vector<std::pair<double, std::size_t>>> members(options.k);
        for (std::size_t i = 0; i < pool.size(); ++i) {
            const auto label = fit.labels[i];
            const double d = (embedding.row(static_cast<Eigen::Index>(i)) - fit.centroids.row(label)).norm();
            members[label].emplace_back(d, i);
        }
        bool short_cluster = false;
        for (auto& m : members) {
            if (m.size() < per_cluster) short_cluster = true;
            std::sort(m.begin(), m.end());
        }
        if (short_cluster) continue;

        for (std::size_t c = 0; c < options.k; ++c) {
            for (std::size_t j = 0; j < per_cluster; ++j) {
                const std::size_t index = members[c][j].second;
                Phrase phrase = pool[index];
                phrase.source = "synthetic-clustered";
                out.phrases.push_back(std::move(phrase));
                out.labels.push_back(static_cast<std::uint32_t>(c));
                out.pool_index.push_back(index);
            }
        }
        return out;
    }
    throw FitError("make_clustered: a cluster stayed smaller than keep/k after retries");
}

}  // namespace contourlab
