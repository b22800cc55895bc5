#include <doctest.h>

#include <cmath>
#include <random>

#include "affective/equilibrium.hpp"
#include "affective/examples.hpp"
#include "oracles.hpp"

using namespace affective;
using namespace affective::equilibrium;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_SUITE("equilibrium") {
  TEST_CASE("nonseparable example: equilibrium solves the best-reply pair") {
    const auto m = examples::builtin("example2");
    const auto eq = find_parametric_equilibrium(m, vec2(0.5, 0.5));
    REQUIRE(eq.verified());
    CHECK(eq.verification.flags.all());
    const double x = eq.x(0), y = eq.x(1);
    CHECK(std::fabs(x - oracle::example2_beta1(y)) <= 1e-8);
    CHECK(std::fabs(y - oracle::example2_beta2(x)) <= 1e-8);
    CHECK((eq.u - oracle::example2_u(x, y)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(eq.curvature.maxCoeff() < 0);
    CHECK(eq.foc.cwiseAbs().maxCoeff() <= 1e-8);
  }

  TEST_CASE("separable example: equilibrium is the argmax of the base utilities") {
    const auto m = examples::builtin("example1");
    const auto eq = find_parametric_equilibrium(m, vec2(0.2, 0.9));
    REQUIRE(eq.verified());
    CHECK(eq.x(0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(eq.x(1) == doctest::Approx(0.25).epsilon(1e-9));
    const auto game = solver::separable_induced(m);
    CHECK((game.utilities(eq.x) - eq.u).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("shifting attitudes: symmetric equilibria in each quadrant") {
    struct Case {
      const char* name;
      double x0, y0, x, y;
    };
    for (const Case& c : {Case{"example3", 0.5, 0.5, 0.75197, 0.75197}, Case{"example3_neg", -0.5, -0.5, -0.68266, -0.68266},
                          Case{"example3_mixed", 0.5, -0.5, 0.72471, -0.66576}}) {
      CAPTURE(c.name);
      const auto m = examples::builtin(c.name);
      const auto eq = find_parametric_equilibrium(m, vec2(c.x0, c.y0));
      REQUIRE(eq.verified());
      CHECK(std::fabs(eq.x(0) - c.x) <= 1e-4);
      CHECK(std::fabs(eq.x(1) - c.y) <= 1e-4);
      CHECK((eq.u - oracle::example3_u(eq.x(0), eq.x(1))).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }

  TEST_CASE("multistart finds one equilibrium on the examples") {
    for (const char* name : {"example1", "example2", "example3"}) {
      CAPTURE(name);
      const auto all = multistart_equilibria(examples::builtin(name), 6);
      CHECK(all.size() == 1);
    }
  }

  TEST_CASE("verification rejects a non-equilibrium") {
    const auto m = examples::builtin("example2");
    const Vector x = vec2(0.6, 0.3);
    const auto u = solver::solve_consistency(m, x).u;
    const auto rep = verify_equilibrium(m, x, u);
    CHECK(rep.flags.consistent);
    CHECK_FALSE(rep.flags.foc);
    CHECK_FALSE(rep.flags.parametric);
    CHECK_FALSE(rep.flags.nash);
    CHECK_FALSE(rep.violations.empty());
    const auto bad = verify_equilibrium(m, x, u + Vector::Constant(2, 0.1));
    CHECK_FALSE(bad.flags.consistent);
  }

  TEST_CASE("best replies") {
    const auto m = examples::builtin("example2");
    // V1 = x(1 - x) - 2 x u2 peaks at (1 - 2 u2) / 2.
    const auto br = best_reply(m, 0, vec2(0.0, 0.1));
    CHECK(br.interior);
    CHECK(br.action == doctest::Approx(0.4).epsilon(1e-10));
    const auto corner = best_reply(m, 0, vec2(0.0, 0.8));
    CHECK_FALSE(corner.interior);
    CHECK(corner.action == doctest::Approx(m.inset_lo(0)));
    const auto coupled = coupled_best_reply(m, 0, vec2(0.3, 0.5));
    CHECK(coupled.action == doctest::Approx(oracle::example2_beta1(0.5)).epsilon(1e-8));
    const auto coupled2 = coupled_best_reply(m, 1, vec2(0.3, 0.5));
    CHECK(coupled2.action == doctest::Approx(oracle::example2_beta2(0.3)).epsilon(1e-8));
  }

  TEST_CASE("local dominance at the example equilibria") {
    for (const char* name : {"example1", "example2", "example3"}) {
      CAPTURE(name);
      const auto m = examples::builtin(name);
      const auto eq = find_parametric_equilibrium(m, m.window_midpoint());
      REQUIRE(eq.verified());
      const auto d = local_dominance_check(m, eq);
      CHECK(d.stationary);
      CHECK(d.passes);
      CHECK(d.max_cross <= d.tolerance);
      CHECK(d.own_gradient.cwiseAbs().maxCoeff() <= 1e-6);
    }
    EquilibriumResult unverified;
    unverified.x = vec2(0.5, 0.5);
    CHECK_THROWS_AS(local_dominance_check(examples::builtin("example2"), unverified), PreconditionError);
  }

  TEST_CASE("random linear models: equilibrium at the base peaks") {
    std::mt19937_64 rng(77);
    for (int t = 0; t < 10; ++t) {
      const int n = 2 + t % 2;
      const auto lm = oracle::random_linear_model(rng, n, 0.9);
      const auto m = InteractionModel::load(lm.text);
      const auto eq = find_parametric_equilibrium(m, m.window_midpoint());
      REQUIRE(eq.verified());
      CHECK((eq.x - lm.peak).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }

  TEST_CASE("linspace") {
    const auto v = linspace(0, 1, 5);
    REQUIRE(v.size() == 5);
    CHECK(v.front() == 0);
    CHECK(v.back() == 1);
    CHECK(v[2] == 0.5);
  }
}
