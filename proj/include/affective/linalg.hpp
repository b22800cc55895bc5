#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace affective {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace linalg {

/// Eigenvalues by reduction to upper Hessenberg form followed by the
/// Francis double-shift QR iteration. Throws ConvergenceError when an
/// eigenvalue does not deflate within the iteration cap.
std::vector<std::complex<double>> eigenvalues_qr(const Matrix& a);

/// Eigenvalues as roots of the characteristic polynomial (n <= 4):
/// Faddeev-LeVerrier coefficients, simultaneous Aberth iteration, Newton
/// polish.
std::vector<std::complex<double>> eigenvalues_charpoly(const Matrix& a);

/// Monic characteristic polynomial coefficients, highest degree first.
std::vector<double> characteristic_polynomial(const Matrix& a);

double spectral_radius(const Matrix& a);

/// Determinant of the principal submatrix on `rows` (sorted, distinct).
double principal_minor(const Matrix& a, std::span<const std::size_t> rows);

Matrix principal_submatrix(const Matrix& a, std::span<const std::size_t> rows);

/// Indices set in a bitmask over {0, ..., n-1}.
std::vector<std::size_t> subset_indices(unsigned long mask, std::size_t n);

}  // namespace linalg
}  // namespace affective
