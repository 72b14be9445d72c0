#include "twomode/expm.hpp"

#include <cmath>
#include <stdexcept>

namespace twomode {

namespace {

template <typename Matrix>
double one_norm(const Matrix& x) {
  return x.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

template <typename Matrix>
Matrix expm(const Matrix& x, double tolerance) {
  if (x.rows() != x.cols()) throw std::invalid_argument("expm needs a square matrix");
  const Eigen::Index n = x.rows();
  if (n == 0) return x;

  const double norm = one_norm(x);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix scaled = x / std::ldexp(1.0, squarings);

  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  // ||scaled|| <= 1/2, so 40 terms is far past double precision.
  for (int k = 1; k <= 40; ++k) {
    term = (term * scaled) / static_cast<double>(k);
    result += term;
    if (one_norm(term) <= tolerance * one_norm(result)) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

template Eigen::MatrixXd expm(const Eigen::MatrixXd&, double);
template Eigen::MatrixXcd expm(const Eigen::MatrixXcd&, double);

}  // namespace twomode
