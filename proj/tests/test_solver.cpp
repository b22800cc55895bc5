#include <doctest.h>

#include <cmath>
#include <random>

#include "affective/examples.hpp"
#include "affective/solver.hpp"
#include "oracles.hpp"

using namespace affective;
using namespace affective::solver;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("consistency on the nonseparable example matches the closed form") {
    const auto m = examples::builtin("example2");
    for (double x : {0.1, 0.4, 0.9})
      for (double y : {0.2, 0.5, 0.8}) {
        const auto sol = solve_consistency(m, vec2(x, y));
        REQUIRE(sol.converged());
        const Vector ref = oracle::example2_u(x, y);
        CHECK((sol.u - ref).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(sol.residual_norm <= 1e-10);
        CHECK(sol.starts_agree());
      }
  }

  TEST_CASE("separable models use the exact solve") {
    const auto m = examples::builtin("example1");
    const auto sol = solve_consistency(m, vec2(0.5, 0.25));
    REQUIRE(sol.converged());
    CHECK(sol.method == Method::ClosedForm);
    // a = 2, b = 1/4: U = B f with f = (1/4, 1/4).
    const Matrix b = oracle::two_person_b(2, 0.25);
    const Vector ref = b * vec2(0.25, 0.25);
    CHECK((sol.u - ref).cwiseAbs().maxCoeff() <= 1e-14);
  }

  TEST_CASE("a consistent guess returns at once") {
    const auto m = examples::builtin("example3");
    const Vector x = vec2(0.3, 0.6);
    const auto first = solve_consistency(m, x);
    REQUIRE(first.converged());
    const auto again = solve_consistency(m, x, first.u);
    CHECK(again.converged());
    CHECK(again.iterations == 0);
    CHECK(again.u == first.u);
  }

  TEST_CASE("singular interaction reports failure") {
    const auto m = InteractionModel::load(
        "players: 2\nvar 1: x in (0, 1)\nvar 2: y in (0, 1)\nutility 1: x + u2\nutility 2: y + u1\n");
    CHECK_THROWS_AS(separable_induced(m), SingularMatrixError);
    const auto sol = solve_consistency(m, vec2(0.2, 0.4));
    CHECK_FALSE(sol.converged());
    const auto game = induced_game(m, vec2(0.2, 0.4));
    CHECK_FALSE(game.defined);
    CHECK_THROWS_AS(separable_induced(examples::builtin("example2")), NotSeparableError);
  }

  TEST_CASE("induced gradient matches finite differences of U") {
    for (const char* name : {"example2", "example3", "example3_neg", "example1"}) {
      CAPTURE(name);
      const auto m = examples::builtin(name);
      std::mt19937_64 rng(99);
      for (int t = 0; t < 25; ++t) {
        Vector x(2);
        for (int i = 0; i < 2; ++i) {
          std::uniform_real_distribution<double> d(m.inset_lo(i) + 1e-3, m.inset_hi(i) - 1e-3);
          x(i) = d(rng);
        }
        const auto game = induced_game(m, x);
        REQUIRE(game.defined);
        const auto u_of = [&](const Vector& p) { return solve_consistency(m, p, game.u).u; };
        const Matrix fd = oracle::fd_jacobian(u_of, x, 1e-5);
        const double scale = std::max(1.0, game.grad.cwiseAbs().maxCoeff());
        CHECK((fd - game.grad).cwiseAbs().maxCoeff() <= 1e-6 * scale);
      }
    }
  }

  TEST_CASE("separable induced game matches B f") {
    const auto m = examples::builtin("example1");
    const auto game = separable_induced(m);
    CHECK((game.b() - oracle::two_person_b(2, 0.25)).cwiseAbs().maxCoeff() <= 1e-14);
    const Vector x = vec2(0.3, 0.7);
    const Vector f = vec2(0.3 * 0.7, std::sqrt(0.7) - 0.7);
    CHECK((game.utilities(x) - oracle::two_person_b(2, 0.25) * f).cwiseAbs().maxCoeff() <= 1e-14);
  }

  TEST_CASE("Picard iteration") {
    const auto stable = examples::builtin("example3");
    const Vector x = vec2(0.5, 0.5);
    const auto sol = solve_consistency(stable, x);
    const auto conv = picard_iterate(stable, x, sol.u + Vector::Constant(2, 1e-2));
    CHECK(conv.verdict == PicardVerdict::Converged);
    CHECK((conv.final_u - sol.u).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(conv.trajectory.size() == conv.steps + 1);

    const auto spite = examples::builtin("linear_spite");
    const auto s = solve_consistency(spite, x);
    REQUIRE(s.converged());
    const auto div = picard_iterate(spite, x, s.u + Vector::Constant(2, 1e-6));
    CHECK(div.verdict == PicardVerdict::Diverged);
    // Two steps scale the deviation by ab = -2.
    const Vector d0 = div.trajectory[0] - s.u, d2 = div.trajectory[2] - s.u;
    CHECK(d2(0) == doctest::Approx(-2 * d0(0)).epsilon(1e-6));

    const auto cyc = picard_iterate(spite, x, s.u + Vector::Constant(2, 1e-6), 10);
    CHECK(cyc.verdict == PicardVerdict::Cycling);
    CHECK(cyc.steps == 10);
  }

  TEST_CASE("random linear models: consistency equals (I - J)^-1 f") {
    std::mt19937_64 rng(1234);
    for (int t = 0; t < 20; ++t) {
      const int n = 2 + t % 3;
      const auto lm = oracle::random_linear_model(rng, n, 0.9);
      const auto m = InteractionModel::load(lm.text);
      Vector x = Vector::Constant(n, 0.5);
      auto opts = ConsistencyOptions{};
      const auto sol = solve_consistency(m, x, std::nullopt, opts);
      REQUIRE(sol.converged());
      const Vector f = m.evaluate_v(x, Vector::Zero(n));
      const Vector ref = (Matrix::Identity(n, n) - lm.j).fullPivLu().solve(f);
      CHECK((sol.u - ref).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }

  TEST_CASE("Newton handles a nonseparable model without a closed form") {
    const auto m = InteractionModel::load(
        "players: 3\nvar 1: a in (0, 1)\nvar 2: b in (0, 1)\nvar 3: c in (0, 1)\n"
        "utility 1: a*(1-a) + 0.3*a*u2 - 0.2*u3\n"
        "utility 2: b*(1-b) + 0.1*sin(u1) + 0.2*b*u3\n"
        "utility 3: c*(1-c) + 0.25*c*u1*0.5 + 0.1*u2\n");
    Vector x(3);
    x << 0.2, 0.5, 0.8;
    const auto sol = solve_consistency(m, x);
    REQUIRE(sol.converged());
    CHECK(m.residual(x, sol.u).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(sol.method == Method::Newton);
  }
}
