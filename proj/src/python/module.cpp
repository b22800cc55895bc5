#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "affective/cli.hpp"
#include "affective/conditions.hpp"
#include "affective/economy.hpp"
#include "affective/equilibrium.hpp"
#include "affective/examples.hpp"
#include "affective/reproduce.hpp"
#include "affective/serialize.hpp"
#include "affective/solver.hpp"
#include "affective/welfare.hpp"

namespace py = pybind11;
using namespace affective;

namespace {

Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
      throw std::invalid_argument("matrix must be square");
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

}  // namespace

PYBIND11_MODULE(_affective, m) {
  m.doc() = "Purely affective interaction models (JSON-returning core bindings)";

  py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);

  py::class_<InteractionModel>(m, "Model")
      .def_static("load", [](const std::string& text) { return InteractionModel::load(text); })
      .def_static("builtin", [](const std::string& name) { return examples::builtin(name); })
      .def_static("resolve", [](const std::string& spec) { return examples::resolve(spec); })
      .def_property_readonly("players", &InteractionModel::players)
      .def_property_readonly("source", &InteractionModel::source)
      .def_property_readonly("linearly_separable", &InteractionModel::linearly_separable)
      .def("affection_jacobian", [](const InteractionModel& self, const std::vector<double>& x,
                                    const std::vector<double>& u) {
        return io::to_json(self.affection_jacobian(to_vector(x), to_vector(u))).dump();
      });

  m.def("builtin_names", [] {
    std::vector<std::string> names;
    for (const auto& [name, _] : examples::builtin_models()) names.push_back(name);
    return names;
  });

  m.def(
      "solve_consistency",
      [](const InteractionModel& model, const std::vector<double>& x, std::optional<std::vector<double>> guess) {
        std::optional<Vector> g;
        if (guess) g = to_vector(*guess);
        return io::to_json(solver::solve_consistency(model, to_vector(x), g)).dump();
      },
      py::arg("model"), py::arg("x"), py::arg("guess") = py::none());

  m.def("induced_game", [](const InteractionModel& model, const std::vector<double>& x) {
    return io::to_json(solver::induced_game(model, to_vector(x))).dump();
  });

  m.def(
      "check_assumption",
      [](const InteractionModel& model, int id, std::size_t samples, std::uint64_t seed) {
        return io::to_json(conditions::check_assumption(id, model, {samples, seed, 10.0})).dump();
      },
      py::arg("model"), py::arg("assumption"), py::arg("samples") = 1000, py::arg("seed") = 42);

  m.def(
      "find_equilibrium",
      [](const InteractionModel& model, std::optional<std::vector<double>> start) {
        const Vector s = start ? to_vector(*start) : model.window_midpoint();
        py::gil_scoped_release release;
        return io::to_json(equilibrium::find_parametric_equilibrium(model, s)).dump();
      },
      py::arg("model"), py::arg("start") = py::none());

  m.def(
      "pareto_search",
      [](const InteractionModel& model, const std::vector<double>& x, const std::vector<double>& u,
         std::size_t per_axis, std::uint64_t seed) {
        welfare::GridSpec g;
        g.per_axis = per_axis;
        g.seed = seed;
        py::gil_scoped_release release;
        return io::to_json(welfare::pareto_search(model, to_vector(x), to_vector(u), g)).dump();
      },
      py::arg("model"), py::arg("x"), py::arg("u"), py::arg("per_axis") = 64, py::arg("seed") = 42);

  m.def("welfare_weights", [](const std::vector<std::vector<double>>& b) -> std::optional<std::string> {
    const auto w = welfare::welfare_weights(to_matrix(b));
    if (!w) return std::nullopt;
    return io::to_json(*w).dump();
  });

  m.def(
      "economy",
      [](double a, double b, double money, const std::vector<double>& lambda) {
        economy::EconomyModel e{a, b, money};
        const auto audit = economy::efficiency_audit(e);
        io::json j = {{"equilibrium", io::to_json(audit.equilibrium)},
                      {"planner", io::to_json(economy::planner_solve(e, to_vector(lambda)))},
                      {"audit", io::to_json(audit)}};
        return j.dump();
      },
      py::arg("a") = 2.0, py::arg("b") = 0.25, py::arg("money") = 100.0,
      py::arg("lambda_") = std::vector<double>{1.0, 1.0});

  m.def(
      "reproduce",
      [](const std::string& id, std::uint64_t seed) {
        py::gil_scoped_release release;
        return reproduce::to_json(reproduce::run(id, seed)).dump();
      },
      py::arg("example"), py::arg("seed") = 42);

  m.def("run", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = cli::run_command(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  });
}
