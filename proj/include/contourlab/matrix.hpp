#pragma once

#include <Eigen/Core>

namespace contourlab {

/// Row-major dense matrix: one observation per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace contourlab
