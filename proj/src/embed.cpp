#include "contourlab/embed.hpp"

#include "contourlab/error.hpp"
#include "contourlab/kernels.hpp"
#include "contourlab/random.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace contourlab {

// --------------------------------------------------------------------------- PCA

PcaModel pca_fit(const Matrix& data, std::size_t n_components) {
    if (data.rows() < 2) throw FitError("pca needs at least 2 rows");
    if (data.cols() < 1) throw FitError("pca needs at least 1 column");
    if (!data.allFinite()) throw InputError("pca: non-finite input");
    const auto dims = static_cast<std::size_t>(data.cols());
    if (n_components == 0 || n_components > dims) n_components = dims;

    PcaModel model;
    model.mean = data.colwise().mean().transpose();
    const Matrix centered = data.rowwise() - model.mean.transpose();
    const Eigen::MatrixXd covariance =
        (centered.transpose() * centered) / static_cast<double>(data.rows() - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance);
    if (solver.info() != Eigen::Success) throw FitError("pca eigen-decomposition failed");

    model.components.resize(static_cast<Eigen::Index>(n_components), data.cols());
    model.explained_variance.resize(static_cast<Eigen::Index>(n_components));
    for (std::size_t c = 0; c < n_components; ++c) {
        // Eigen returns ascending eigenvalues.
        const Eigen::Index source = static_cast<Eigen::Index>(dims - 1 - c);
        Eigen::VectorXd axis = solver.eigenvectors().col(source);
        Eigen::Index largest = 0;
        axis.cwiseAbs().maxCoeff(&largest);
        if (axis(largest) < 0) axis = -axis;
        model.components.row(static_cast<Eigen::Index>(c)) = axis.transpose();
        model.explained_variance(static_cast<Eigen::Index>(c)) = std::max(0.0, solver.eigenvalues()(source));
    }
    return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& data) {
    if (data.cols() != model.mean.size()) throw DimensionError("pca_transform: dimension mismatch");
    return (data.rowwise() - model.mean.transpose()) * model.components.transpose();
}

Matrix pca_inverse_transform(const PcaModel& model, const Matrix& projected) {
    if (projected.cols() != model.components.rows()) throw DimensionError("pca_inverse_transform: dimension mismatch");
    Matrix out = projected * model.components;
    out.rowwise() += model.mean.transpose();
    return out;
}

// --------------------------------------------------------------------------- UMAP

namespace {

struct Edge {
    std::uint32_t head;
    std::uint32_t tail;
    double weight;
};

struct Calibration {
    double rho;
    double sigma;
};

// Binary search for sigma so that sum_j exp(-max(0, d_j - rho) / sigma) == target.
Calibration calibrate(const double* distances, std::size_t k, double target, double mean_distance) {
    double rho = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        if (distances[j] > 0.0) {
            rho = distances[j];
            break;
        }
    }
    double lo = 0.0, hi = std::numeric_limits<double>::infinity(), mid = 1.0;
    for (int iter = 0; iter < 64; ++iter) {
        double total = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double d = distances[j] - rho;
            total += d > 0.0 ? std::exp(-d / mid) : 1.0;
        }
        if (std::abs(total - target) < 1e-5) break;
        if (total > target) {
            hi = mid;
            mid = (lo + hi) / 2.0;
        } else {
            lo = mid;
            mid = std::isinf(hi) ? mid * 2.0 : (lo + hi) / 2.0;
        }
    }
    // Floor keeps sigma meaningful for points whose neighbours are all equidistant.
    mid = std::max(mid, 1e-3 * mean_distance);
    return {rho, mid};
}

double membership(double distance, const Calibration& c) {
    const double d = distance - c.rho;
    return d > 0.0 ? std::exp(-d / c.sigma) : 1.0;
}

double mean_of(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

bool edge_less(const Edge& x, const Edge& y) { return x.head != y.head ? x.head < y.head : x.tail < y.tail; }

std::vector<Edge> fuzzy_graph(const kernels::Neighbors& neighbors, std::size_t n) {
    const std::size_t k = neighbors.k;
    const double target = std::log2(static_cast<double>(k));
    const double mean_distance = mean_of(neighbors.distance);

    std::vector<Edge> directed;
    directed.reserve(n * k);
    for (std::size_t i = 0; i < n; ++i) {
        const Calibration c = calibrate(&neighbors.distance[i * k], k, target, mean_distance);
        for (std::size_t j = 0; j < k; ++j)
            directed.push_back({static_cast<std::uint32_t>(i), neighbors.index[i * k + j],
                                membership(neighbors.distance[i * k + j], c)});
    }
    std::sort(directed.begin(), directed.end(), edge_less);
    auto directed_weight = [&](std::uint32_t head, std::uint32_t tail) {
        auto it = std::lower_bound(directed.begin(), directed.end(), Edge{head, tail, 0.0}, edge_less);
        return (it != directed.end() && it->head == head && it->tail == tail) ? it->weight : 0.0;
    };

    // Fuzzy union w_ij + w_ji - w_ij * w_ji, stored in both directions.
    std::vector<Edge> out;
    out.reserve(2 * directed.size());
    for (const auto& e : directed) {
        out.push_back({e.head, e.tail, 0.0});
        out.push_back({e.tail, e.head, 0.0});
    }
    std::sort(out.begin(), out.end(), edge_less);
    out.erase(std::unique(out.begin(), out.end(),
                          [](const Edge& x, const Edge& y) { return x.head == y.head && x.tail == y.tail; }),
              out.end());
    for (auto& e : out) {
        const double w1 = directed_weight(e.head, e.tail);
        const double w2 = directed_weight(e.tail, e.head);
        e.weight = w1 + w2 - w1 * w2;
    }
    return out;
}

// Smallest non-trivial eigenvectors of the normalized Laplacian via subspace iteration on
// (I + D^-1/2 W D^-1/2) / 2. Returns false when the iteration does not converge.
bool spectral_layout(const std::vector<Edge>& edges, std::size_t n, std::size_t dim, Rng& rng, Matrix& out) {
    const std::size_t needed = dim + 1;
    const std::size_t block = std::min(n, needed + 6);
    if (block < needed || n <= needed) return false;

    std::vector<double> degree(n, 0.0);
    for (const auto& e : edges) degree[e.head] += e.weight;
    for (double d : degree)
        if (!(d > 0.0)) return false;
    std::vector<double> inv_sqrt(n);
    for (std::size_t i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(degree[i]);

    auto apply = [&](const Eigen::MatrixXd& q) {
        Eigen::MatrixXd y = 0.5 * q;
        for (const auto& e : edges) {
            const double w = 0.5 * e.weight * inv_sqrt[e.head] * inv_sqrt[e.tail];
            y.row(e.head) += w * q.row(e.tail);
        }
        return y;
    };

    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd q(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(block));
    for (Eigen::Index c = 0; c < q.cols(); ++c)
        for (Eigen::Index r = 0; r < q.rows(); ++r) q(r, c) = normal(rng);
    auto orthonormalize = [&](Eigen::MatrixXd& m) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
        m = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
    };
    orthonormalize(q);

    Eigen::VectorXd values;
    bool converged = false;
    for (int iter = 1; iter <= 2000 && !converged; ++iter) {
        q = apply(q);
        orthonormalize(q);
        if (iter % 10 != 0) continue;
        // Rayleigh-Ritz step.
        const Eigen::MatrixXd mq = apply(q);
        const Eigen::MatrixXd h = q.transpose() * mq;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (h + h.transpose()));
        // descending order
        const Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();
        values = solver.eigenvalues().reverse();
        q = q * vectors;
        const Eigen::MatrixXd residual = apply(q.leftCols(static_cast<Eigen::Index>(needed))) -
                                         q.leftCols(static_cast<Eigen::Index>(needed)) *
                                             values.head(static_cast<Eigen::Index>(needed)).asDiagonal();
        converged = residual.colwise().norm().maxCoeff() < 1e-4;
    }
    if (!converged) return false;

    out.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    for (std::size_t d = 0; d < dim; ++d)
        for (std::size_t i = 0; i < n; ++i)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) =
                q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d + 1)) * inv_sqrt[i];
    return out.allFinite();
}

void rescale_layout(Matrix& layout, Rng& rng) {
    const double max_abs = layout.cwiseAbs().maxCoeff();
    if (max_abs > 0.0) layout *= 10.0 / max_abs;
    std::normal_distribution<double> noise(0.0, 1e-4);
    for (Eigen::Index i = 0; i < layout.size(); ++i) layout.data()[i] += noise(rng);
    for (Eigen::Index d = 0; d < layout.cols(); ++d) {
        const double lo = layout.col(d).minCoeff(), hi = layout.col(d).maxCoeff();
        if (hi > lo) layout.col(d) = (10.0 * (layout.col(d).array() - lo) / (hi - lo)).matrix();
    }
}

double clip(double value) { return std::clamp(value, -4.0, 4.0); }

void optimize_layout(Matrix& layout, const std::vector<Edge>& edges, const UmapParams& params, double a, double b,
                     Rng& rng) {
    const auto n = static_cast<std::uint32_t>(layout.rows());
    const auto dim = static_cast<Eigen::Index>(layout.cols());
    double max_weight = 0.0;
    for (const auto& e : edges) max_weight = std::max(max_weight, e.weight);

    const double epochs = static_cast<double>(params.n_epochs);
    std::vector<Edge> active;
    for (const auto& e : edges)
        if (e.weight >= max_weight / epochs) active.push_back(e);

    const std::size_t count = active.size();
    std::vector<double> per_sample(count), next_sample(count), per_negative(count), next_negative(count);
    for (std::size_t e = 0; e < count; ++e) {
        per_sample[e] = max_weight / active[e].weight;
        next_sample[e] = per_sample[e];
        per_negative[e] = per_sample[e] / static_cast<double>(params.negative_sample_rate);
        next_negative[e] = per_negative[e];
    }

    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::uniform_int_distribution<std::uint32_t> vertex(0, n - 1);
    std::vector<double> current(static_cast<std::size_t>(dim));

    for (std::size_t epoch = 0; epoch < params.n_epochs; ++epoch) {
        const double alpha = 1.0 - static_cast<double>(epoch) / epochs;
        const double now = static_cast<double>(epoch);
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t e : order) {
            if (next_sample[e] > now) continue;
            const auto j = active[e].head;
            const auto k = active[e].tail;

            double dist2 = (layout.row(j) - layout.row(k)).squaredNorm();
            if (dist2 > 0.0) {
                const double coeff = -2.0 * a * b * std::pow(dist2, b - 1.0) / (a * std::pow(dist2, b) + 1.0);
                for (Eigen::Index d = 0; d < dim; ++d) {
                    const double grad = clip(coeff * (layout(j, d) - layout(k, d)));
                    layout(j, d) += grad * alpha;
                    layout(k, d) -= grad * alpha;
                }
            }
            next_sample[e] += per_sample[e];

            const auto negatives = static_cast<std::size_t>((now - next_negative[e]) / per_negative[e]);
            for (std::size_t s = 0; s < negatives; ++s) {
                const auto other = vertex(rng);
                if (other == j) continue;
                dist2 = (layout.row(j) - layout.row(other)).squaredNorm();
                double coeff = 0.0;
                if (dist2 > 0.0) coeff = 2.0 * b / ((0.001 + dist2) * (a * std::pow(dist2, b) + 1.0));
                for (Eigen::Index d = 0; d < dim; ++d) {
                    const double grad = coeff > 0.0 ? clip(coeff * (layout(j, d) - layout(other, d))) : 4.0;
                    layout(j, d) += grad * alpha;
                }
            }
            next_negative[e] += static_cast<double>(negatives) * per_negative[e];
        }
    }
}

}  // namespace

std::pair<double, double> fit_ab(double min_dist, double spread) {
    constexpr int points = 300;
    std::vector<double> xs(points), ys(points);
    for (int i = 0; i < points; ++i) {
        xs[i] = 3.0 * spread * static_cast<double>(i) / static_cast<double>(points - 1);
        ys[i] = xs[i] < min_dist ? 1.0 : std::exp(-(xs[i] - min_dist) / spread);
    }
    auto residuals = [&](double a, double b, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
        r.resize(points);
        if (jac) jac->resize(points, 2);
        for (int i = 0; i < points; ++i) {
            const double x = xs[i];
            const double p = x > 0.0 ? std::pow(x, 2.0 * b) : 0.0;
            const double f = 1.0 / (1.0 + a * p);
            r(i) = f - ys[i];
            if (jac) {
                (*jac)(i, 0) = -p * f * f;
                (*jac)(i, 1) = x > 0.0 ? -a * p * 2.0 * std::log(x) * f * f : 0.0;
            }
        }
        return r.squaredNorm();
    };

    // Levenberg-Marquardt from the usual starting point.
    double a = 1.0, b = 1.0, lambda = 1e-3;
    Eigen::VectorXd r, r_try;
    Eigen::MatrixXd jac;
    double cost = residuals(a, b, r, &jac);
    for (int iter = 0; iter < 500; ++iter) {
        const Eigen::Matrix2d jtj = jac.transpose() * jac;
        const Eigen::Vector2d grad = jac.transpose() * r;
        Eigen::Matrix2d damped = jtj;
        damped.diagonal() *= (1.0 + lambda);
        const Eigen::Vector2d step = damped.ldlt().solve(-grad);
        const double a_try = a + step(0), b_try = b + step(1);
        if (a_try > 0.0 && b_try > 0.0) {
            const double cost_try = residuals(a_try, b_try, r_try, nullptr);
            if (cost_try < cost) {
                const bool done = (cost - cost_try) < 1e-15 * std::max(1.0, cost);
                a = a_try;
                b = b_try;
                cost = residuals(a, b, r, &jac);
                lambda = std::max(lambda / 10.0, 1e-12);
                if (done) break;
                continue;
            }
        }
        lambda *= 10.0;
        if (lambda > 1e12) break;
    }
    return {a, b};
}

UmapModel umap_fit(const Matrix& data, const UmapParams& params) {
    const auto n = static_cast<std::size_t>(data.rows());
    if (params.n_neighbors < 2) throw InputError("umap needs n_neighbors >= 2");
    if (n < params.n_neighbors + 1) throw FitError("umap needs more points than n_neighbors");
    if (params.target_dim < 1) throw InputError("umap target dimension must be positive");
    if (!data.allFinite()) throw InputError("umap: non-finite input");

    UmapModel model;
    model.params = params;
    model.training_points = data;
    std::tie(model.a, model.b) = fit_ab(params.min_dist, params.spread);

    const auto neighbors = kernels::knn(data, data, params.n_neighbors, true);
    const auto edges = fuzzy_graph(neighbors, n);

    Rng rng(params.seed);
    Matrix layout;
    model.spectral_init = spectral_layout(edges, n, params.target_dim, rng, layout);
    if (!model.spectral_init) {
        std::normal_distribution<double> normal(0.0, 1.0);
        layout.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(params.target_dim));
        for (Eigen::Index i = 0; i < layout.size(); ++i) layout.data()[i] = normal(rng);
    }
    rescale_layout(layout, rng);
    optimize_layout(layout, edges, params, model.a, model.b, rng);
    model.embedding = std::move(layout);
    return model;
}

Matrix umap_transform(const UmapModel& model, const Matrix& points) {
    const Eigen::Index dim = model.embedding.cols();
    if (points.rows() == 0) return Matrix(0, dim);
    if (points.cols() != model.training_points.cols()) throw DimensionError("umap_transform: dimension mismatch");
    if (!points.allFinite()) throw InputError("umap_transform: non-finite input");

    const std::size_t k = std::min<std::size_t>(model.params.n_neighbors, static_cast<std::size_t>(model.training_points.rows()));
    const auto neighbors = kernels::knn(model.training_points, points, k, false);
    const double target = std::log2(static_cast<double>(k));
    const double mean_distance = mean_of(neighbors.distance);

    Matrix out = Matrix::Zero(points.rows(), dim);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const auto row = static_cast<std::size_t>(i);
        const Calibration c = calibrate(&neighbors.distance[row * k], k, target, mean_distance);
        double total = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double w = membership(neighbors.distance[row * k + j], c);
            out.row(i) += w * model.embedding.row(neighbors.index[row * k + j]);
            total += w;
        }
        out.row(i) /= total;
    }
    return out;
}

}  // namespace contourlab
