#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "affective/linalg.hpp"
#include "affective/simplex.hpp"
#include "oracles.hpp"

using namespace affective;

namespace {

double max_modulus(const std::vector<std::complex<double>>& ev) {
  double r = 0;
  for (const auto& z : ev) r = std::max(r, std::abs(z));
  return r;
}

}  // namespace

TEST_SUITE("linalg") {
  TEST_CASE("both eigenvalue routes agree with Eigen") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int n = 1; n <= 4; ++n) {
      for (int t = 0; t < 50; ++t) {
        Matrix a(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) a(i, j) = g(rng);
        const double ref = a.eigenvalues().cwiseAbs().maxCoeff();
        CHECK(max_modulus(linalg::eigenvalues_qr(a)) == doctest::Approx(ref).epsilon(1e-9));
        CHECK(max_modulus(linalg::eigenvalues_charpoly(a)) == doctest::Approx(ref).epsilon(1e-7));
        CHECK(linalg::spectral_radius(a) == doctest::Approx(ref).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("two-by-two off-diagonal spectral radius") {
    for (double p : {-2.0, -0.5, 0.3, 1.7})
      for (double q : {-1.0, 0.25, 0.8}) {
        Matrix j(2, 2);
        j << 0, p, q, 0;
        CHECK(linalg::spectral_radius(j) == doctest::Approx(std::sqrt(std::fabs(p * q))).epsilon(1e-12));
      }
  }

  TEST_CASE("characteristic polynomial") {
    Matrix a(2, 2);
    a << 1, 2, 3, 4;
    const auto c = linalg::characteristic_polynomial(a);
    REQUIRE(c.size() == 3);
    CHECK(c[0] == 1.0);
    CHECK(c[1] == doctest::Approx(-5));
    CHECK(c[2] == doctest::Approx(-2));
  }

  TEST_CASE("principal minors match cofactor expansion") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    Matrix a(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) a(i, j) = u(rng);
    for (unsigned long mask = 1; mask < 16; ++mask) {
      const auto rows = linalg::subset_indices(mask, 4);
      CHECK(linalg::principal_minor(a, rows) ==
            doctest::Approx(oracle::cofactor_det(linalg::principal_submatrix(a, rows))).epsilon(1e-12));
    }
  }

  TEST_CASE("simplex solves small LPs") {
    // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x <= 3.
    lp::Problem p{{3, 2}, {{{1, 1}, lp::Sense::LessEqual, 4}, {{1, 3}, lp::Sense::LessEqual, 6},
                           {{1, 0}, lp::Sense::LessEqual, 3}}};
    auto s = lp::solve(p);
    REQUIRE(s.status == lp::Status::Optimal);
    CHECK(s.value == doctest::Approx(11));
    CHECK(s.z[0] == doctest::Approx(3));
    CHECK(s.z[1] == doctest::Approx(1));

    lp::Problem eq{{1, 1}, {{{1, 2}, lp::Sense::Equal, 2}, {{1, 0}, lp::Sense::GreaterEqual, 0.5}}};
    s = lp::solve(eq);
    REQUIRE(s.status == lp::Status::Optimal);
    CHECK(s.value == doctest::Approx(2));

    lp::Problem infeasible{{1}, {{{1}, lp::Sense::LessEqual, 1}, {{1}, lp::Sense::GreaterEqual, 2}}};
    CHECK(lp::solve(infeasible).status == lp::Status::Infeasible);
    lp::Problem unbounded{{1, 0}, {{{0, 1}, lp::Sense::LessEqual, 1}}};
    CHECK(lp::solve(unbounded).status == lp::Status::Unbounded);
  }

  TEST_CASE("simplex terminates on a degenerate cycling example") {
    // Beale's example; Dantzig's rule cycles on it.
    lp::Problem p{{0.75, -150, 0.02, -6},
                  {{{0.25, -60, -0.04, 9}, lp::Sense::LessEqual, 0},
                   {{0.5, -90, -0.02, 3}, lp::Sense::LessEqual, 0},
                   {{0, 0, 1, 0}, lp::Sense::LessEqual, 1}}};
    const auto s = lp::solve(p);
    REQUIRE(s.status == lp::Status::Optimal);
    CHECK(s.value == doctest::Approx(0.05));
  }
}
