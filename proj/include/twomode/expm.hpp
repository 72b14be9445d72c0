#pragma once

#include <Eigen/Dense>

namespace twomode {

/// Matrix exponential by scaling and squaring around a truncated Taylor
/// series. The scaling is picked from the 1-norm so that the scaled argument
/// has norm <= 1/2; the series is summed until the next term falls below
/// `tolerance` relative to the partial sum.
///
/// Instantiated for Eigen::MatrixXd and Eigen::MatrixXcd.
template <typename Matrix>
Matrix expm(const Matrix& x, double tolerance = 1e-16);

}  // namespace twomode
