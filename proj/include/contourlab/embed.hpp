#pragma once

#include "contourlab/matrix.hpp"

#include <cstdint>

namespace contourlab {

struct PcaModel {
    Vector mean;
    Matrix components;  ///< orthonormal rows, descending explained variance
    Vector explained_variance;
};

/// Eigen-decomposition of the sample covariance. Component signs are fixed so that the
/// largest-magnitude loading of each component is positive.
PcaModel pca_fit(const Matrix& data, std::size_t n_components = 0);
Matrix pca_transform(const PcaModel& model, const Matrix& data);
Matrix pca_inverse_transform(const PcaModel& model, const Matrix& projected);

struct UmapParams {
    std::size_t n_neighbors = 15;
    double min_dist = 0.1;
    double spread = 1.0;
    std::size_t target_dim = 2;
    std::size_t n_epochs = 200;
    std::size_t negative_sample_rate = 5;
    std::uint64_t seed = 0;
};

struct UmapModel {
    UmapParams params;
    double a = 0.0;
    double b = 0.0;
    bool spectral_init = false;  ///< false when the random fallback was used
    Matrix embedding;
    Matrix training_points;
};

/// Least-squares fit of 1 / (1 + a d^(2b)) to the min_dist plateau curve.
std::pair<double, double> fit_ab(double min_dist, double spread = 1.0);

UmapModel umap_fit(const Matrix& data, const UmapParams& params);

/// Places new points at the kernel-weighted mean of their training neighbours' embeddings.
Matrix umap_transform(const UmapModel& model, const Matrix& points);

}  // namespace contourlab
