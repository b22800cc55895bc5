#include <doctest.h>

#include <cmath>
#include <random>

#include "affective/conditions.hpp"
#include "affective/examples.hpp"
#include "oracles.hpp"

using namespace affective;
using namespace affective::conditions;

TEST_SUITE("conditions") {
  TEST_CASE("P-matrix test agrees with the minor oracle") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    int positives = 0;
    for (int t = 0; t < 400; ++t) {
      const int n = 2 + t % 3;
      Matrix a(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = i == j ? 1.0 + 0.5 * u(rng) : u(rng) * 0.8;
      const double min_minor = oracle::min_principal_minor(a);
      if (std::fabs(min_minor) < 1e-6) continue;
      const auto v = is_p_matrix(a);
      CHECK(v.holds == (min_minor > 0));
      CHECK(v.min_minor == doctest::Approx(min_minor).epsilon(1e-9));
      if (v.holds) {
        ++positives;
        CHECK(oracle::sign_reversal_by_vertices(a).size() == 0);
      } else {
        REQUIRE(v.witness.has_value());
        CHECK(v.witness_minor <= kTolMinor);
        // A matrix with a nonpositive principal minor reverses the sign of some vector.
        const Vector y = oracle::sign_reversal_by_vertices(a, 1e-9);
        REQUIRE(y.size() == n);
        const Vector ay = a * y;
        CHECK(y.cwiseProduct(ay).maxCoeff() <= 1e-9);
      }
    }
    CHECK(positives > 50);
  }

  TEST_CASE("P-matrix witness is the first failing subset") {
    Matrix a(3, 3);
    a << 1, 0, 0, 0, -1, 0, 0, 0, 1;
    const auto v = is_p_matrix(a);
    CHECK_FALSE(v.holds);
    REQUIRE(v.witness);
    CHECK(*v.witness == std::vector<std::size_t>{1});
    CHECK(v.witness_minor == -1.0);
    Matrix s(2, 2);
    s << 1, 1, 1, 1;
    const auto w = is_p_matrix(s);
    CHECK_FALSE(w.holds);
    CHECK(w.marginal);
  }

  TEST_CASE("sign reversal") {
    Matrix a(2, 2);
    a << 1, 2, 2, 1;
    Vector y(2);
    y << 1, -1;
    CHECK(reverses_sign(a, y));
    y << 1, 1;
    CHECK_FALSE(reverses_sign(a, y));
    CHECK_THROWS_AS(reverses_sign(a, Vector::Zero(2)), std::invalid_argument);
  }

  TEST_CASE("dominant diagonal") {
    Matrix a(2, 2);
    a << 1, -3, -0.1, 1;
    const auto d = check_dominant_diagonal(a);
    REQUIRE(d.weights);
    const Vector& h = *d.weights;
    CHECK(h.sum() == doctest::Approx(2));
    CHECK(h(0) * a(0, 0) > h(1) * std::fabs(a(0, 1)));
    CHECK(h(1) * a(1, 1) > h(0) * std::fabs(a(1, 0)));
    Matrix b(2, 2);
    b << 1, -2, -1, 1;
    CHECK_FALSE(check_dominant_diagonal(b).weights);
  }

  TEST_CASE("assumption checks on the example models") {
    Sampler s;
    s.count = 300;
    CHECK(check_assumption2(examples::builtin("example1"), s).verdict == Verdict::HoldsOnSamples);
    CHECK(check_assumption4(examples::builtin("example1"), s).verdict == Verdict::HoldsOnSamples);
    CHECK(check_assumption5(examples::builtin("example1"), s).verdict == Verdict::HoldsOnSamples);

    const auto explosive = check_assumption2(examples::builtin("explosive"), s);
    CHECK(explosive.verdict == Verdict::Fails);
    REQUIRE(explosive.witness);
    CHECK(explosive.witness->value == doctest::Approx(-1.0));

    const auto spite = examples::builtin("linear_spite");
    CHECK(check_assumption2(spite, s).verdict == Verdict::HoldsOnSamples);
    const auto a4 = check_assumption4(spite, s);
    CHECK(a4.verdict == Verdict::Fails);
    REQUIRE(a4.witness);
    CHECK(a4.witness->value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
    CHECK(check_assumption5(spite, s).verdict == Verdict::Fails);
  }

  TEST_CASE("samples are reproducible") {
    const auto m = examples::builtin("example2");
    Sampler s;
    s.count = 20;
    const auto a = draw_samples(m, s), b = draw_samples(m, s);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].first == b[k].first);
      CHECK(a[k].second == b[k].second);
      CHECK(m.interior(a[k].first));
      CHECK(a[k].second.cwiseAbs().maxCoeff() <= s.u_box);
    }
    CHECK_THROWS(check_assumption(3, m, s));
  }

  TEST_CASE("assumption 4 implies 2 implies consistency solvable, on random linear models") {
    std::mt19937_64 rng(23);
    Sampler s;
    s.count = 50;
    for (int t = 0; t < 20; ++t) {
      const auto lm = oracle::random_linear_model(rng, 2 + t % 3, 0.95);
      const auto m = InteractionModel::load(lm.text);
      CHECK(check_assumption4(m, s).verdict == Verdict::HoldsOnSamples);
      CHECK(check_assumption2(m, s).verdict == Verdict::HoldsOnSamples);
    }
  }
}
