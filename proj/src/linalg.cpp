#include "affective/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace affective::linalg {

namespace {

double sign_of(double a, double b) { return b >= 0.0 ? std::fabs(a) : -std::fabs(a); }

// Gaussian elimination with pivoting to upper Hessenberg form.
void reduce_to_hessenberg(Matrix& a) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index m = 1; m < n - 1; ++m) {
    double x = 0.0;
    Eigen::Index pivot = m;
    for (Eigen::Index j = m; j < n; ++j) {
      if (std::fabs(a(j, m - 1)) > std::fabs(x)) {
        x = a(j, m - 1);
        pivot = j;
      }
    }
    if (pivot != m) {
      for (Eigen::Index j = m - 1; j < n; ++j) std::swap(a(pivot, j), a(m, j));
      for (Eigen::Index j = 0; j < n; ++j) std::swap(a(j, pivot), a(j, m));
    }
    if (x != 0.0) {
      for (Eigen::Index i = m + 1; i < n; ++i) {
        double y = a(i, m - 1);
        if (y != 0.0) {
          y /= x;
          a(i, m - 1) = 0.0;
          for (Eigen::Index j = m; j < n; ++j) a(i, j) -= y * a(m, j);
          for (Eigen::Index j = 0; j < n; ++j) a(j, m) += y * a(j, i);
        }
      }
    }
  }
  for (Eigen::Index i = 2; i < n; ++i)
    for (Eigen::Index j = 0; j < i - 1; ++j) a(i, j) = 0.0;
}

// Francis double-shift QR on an upper Hessenberg matrix. The loop structure
// follows the classic EISPACK hqr routine; indices are 1-based internally.
std::vector<std::complex<double>> hessenberg_qr(Matrix& h) {
  const int n = static_cast<int>(h.rows());
  auto a = [&h](int i, int j) -> double& { return h(i - 1, j - 1); };
  std::vector<double> wr(static_cast<std::size_t>(n) + 1), wi(static_cast<std::size_t>(n) + 1);

  double anorm = 0.0;
  for (int i = 1; i <= n; ++i)
    for (int j = std::max(i - 1, 1); j <= n; ++j) anorm += std::fabs(a(i, j));

  int nn = n;
  double t = 0.0;
  constexpr int kMaxIterations = 60;
  while (nn >= 1) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l >= 2; --l) {
        double s = std::fabs(a(l - 1, l - 1)) + std::fabs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::fabs(a(l, l - 1)) + s == s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      double x = a(nn, nn);
      if (l == nn) {
        wr[nn] = x + t;
        wi[nn--] = 0.0;
      } else {
        double y = a(nn - 1, nn - 1);
        double w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          const double p = 0.5 * (y - x);
          const double q = p * p + w;
          double z = std::sqrt(std::fabs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            wr[nn - 1] = wr[nn] = x + z;
            if (z != 0.0) wr[nn] = x - w / z;
            wi[nn - 1] = wi[nn] = 0.0;
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn - 1] = -(wi[nn] = z);
          }
          nn -= 2;
        } else {
          if (its == kMaxIterations)
            throw ConvergenceError("eigenvalues_qr: no convergence within iteration cap");
          if (its == 10 || its == 20 || its == 40) {
            // Exceptional shift.
            t += x;
            for (int i = 1; i <= nn; ++i) a(i, i) -= x;
            const double s = std::fabs(a(nn, nn - 1)) + std::fabs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::fabs(p) + std::fabs(q) + std::fabs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::fabs(a(m, m - 1)) * (std::fabs(q) + std::fabs(r));
            const double v =
                std::fabs(p) * (std::fabs(a(m - 1, m - 1)) + std::fabs(z) + std::fabs(a(m + 1, m + 1)));
            if (u + v == v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = a(k + 2, k - 1);
              x = std::fabs(p) + std::fabs(q) + std::fabs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
            if (s != 0.0) {
              if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
              } else {
                a(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = a(k, j) + q * a(k + 1, j);
                if (k != nn - 1) {
                  p += r * a(k + 2, j);
                  a(k + 2, j) -= p * z;
                }
                a(k + 1, j) -= p * y;
                a(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * a(i, k) + y * a(i, k + 1);
                if (k != nn - 1) {
                  p += z * a(i, k + 2);
                  a(i, k + 2) -= p * r;
                }
                a(i, k + 1) -= p * q;
                a(i, k) -= p;
              }
            }
          }
        }
      }
    } while (l < nn - 1);
  }

  std::vector<std::complex<double>> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) out.emplace_back(wr[i], wi[i]);
  return out;
}

std::complex<double> horner(const std::vector<double>& c, std::complex<double> z) {
  std::complex<double> v = 0.0;
  for (double ck : c) v = v * z + ck;
  return v;
}

std::complex<double> horner_derivative(const std::vector<double>& c, std::complex<double> z) {
  std::complex<double> v = 0.0;
  const std::size_t deg = c.size() - 1;
  for (std::size_t k = 0; k < deg; ++k) v = v * z + c[k] * static_cast<double>(deg - k);
  return v;
}

}  // namespace

std::vector<std::complex<double>> eigenvalues_qr(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("eigenvalues_qr: matrix is not square");
  if (a.rows() == 0) return {};
  if (!a.allFinite()) throw std::invalid_argument("eigenvalues_qr: non-finite entry");
  Matrix h = a;
  reduce_to_hessenberg(h);
  return hessenberg_qr(h);
}

std::vector<double> characteristic_polynomial(const Matrix& a) {
  const Eigen::Index n = a.rows();
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c[0] = 1.0;
  Matrix m = Matrix::Zero(n, n);
  const Matrix id = Matrix::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    m = a * m + c[static_cast<std::size_t>(k - 1)] * id;
    c[static_cast<std::size_t>(k)] = -(a * m).trace() / static_cast<double>(k);
  }
  return c;
}

std::vector<std::complex<double>> eigenvalues_charpoly(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("eigenvalues_charpoly: matrix is not square");
  const auto n = static_cast<std::size_t>(a.rows());
  if (n > 4) throw std::invalid_argument("eigenvalues_charpoly: limited to n <= 4");
  if (n == 0) return {};
  const std::vector<double> c = characteristic_polynomial(a);

  // Starting points on a circle enclosing every root (Cauchy bound).
  double bound = 0.0;
  for (std::size_t k = 1; k <= n; ++k) bound = std::max(bound, std::fabs(c[k]));
  bound += 1.0;
  std::vector<std::complex<double>> z(n);
  for (std::size_t k = 0; k < n; ++k)
    z[k] = std::polar(bound, 2.0 * M_PI * (static_cast<double>(k) + 0.25) / static_cast<double>(n));

  constexpr int kMaxIterations = 2000;
  for (int it = 0; it < kMaxIterations; ++it) {
    double largest_step = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::complex<double> p = horner(c, z[k]);
      const std::complex<double> dp = horner_derivative(c, z[k]);
      if (p == 0.0) continue;
      const std::complex<double> ratio = p / dp;
      std::complex<double> repulsion = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) repulsion += 1.0 / (z[k] - z[j]);
      const std::complex<double> step = ratio / (1.0 - ratio * repulsion);
      z[k] -= step;
      largest_step = std::max(largest_step, std::abs(step));
    }
    if (largest_step <= 1e-15 * bound) break;
  }
  // Newton polish of each root on the polynomial itself.
  for (auto& root : z) {
    for (int it = 0; it < 5; ++it) {
      const std::complex<double> dp = horner_derivative(c, root);
      if (std::abs(dp) < 1e-300) break;
      const std::complex<double> step = horner(c, root) / dp;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      root -= step;
    }
  }
  return z;
}

double spectral_radius(const Matrix& a) {
  double rho = 0.0;
  for (const auto& lambda : eigenvalues_qr(a)) rho = std::max(rho, std::abs(lambda));
  return rho;
}

Matrix principal_submatrix(const Matrix& a, std::span<const std::size_t> rows) {
  const auto k = static_cast<Eigen::Index>(rows.size());
  Matrix sub(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      sub(i, j) = a(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]),
                    static_cast<Eigen::Index>(rows[static_cast<std::size_t>(j)]));
  return sub;
}

double principal_minor(const Matrix& a, std::span<const std::size_t> rows) {
  if (rows.empty()) return 1.0;
  return principal_submatrix(a, rows).partialPivLu().determinant();
}

std::vector<std::size_t> subset_indices(unsigned long mask, std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (mask & (1UL << i)) out.push_back(i);
  return out;
}

}  // namespace affective::linalg
