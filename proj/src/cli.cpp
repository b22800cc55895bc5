#include "affective/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "affective/conditions.hpp"
#include "affective/economy.hpp"
#include "affective/equilibrium.hpp"
#include "affective/examples.hpp"
#include "affective/plot.hpp"
#include "affective/reproduce.hpp"
#include "affective/serialize.hpp"
#include "affective/solver.hpp"
#include "affective/welfare.hpp"

namespace affective::cli {

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

double parse_real(std::string_view text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw UsageError(what + ": '" + std::string(text) + "' is not a number");
  return v;
}

Vector parse_vector(const std::string& text, const std::string& what) {
  std::vector<double> vals;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    vals.push_back(parse_real(std::string_view(text).substr(start, comma - start), what));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  Vector v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
  return v;
}

Matrix parse_matrix(const std::string& text) {
  std::vector<Vector> rows;
  std::size_t start = 0;
  while (true) {
    const auto semi = text.find(';', start);
    rows.push_back(parse_vector(text.substr(start, semi == std::string::npos ? std::string::npos : semi - start),
                                "--matrix"));
    if (semi == std::string::npos) break;
    start = semi + 1;
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (rows[static_cast<std::size_t>(i)].size() != n) throw UsageError("--matrix: expected a square matrix");
    m.row(i) = rows[static_cast<std::size_t>(i)].transpose();
  }
  return m;
}

Vector require_dim(const Vector& v, const InteractionModel& m, const std::string& what) {
  if (static_cast<std::size_t>(v.size()) != m.players())
    throw UsageError(what + ": expected " + std::to_string(m.players()) + " comma-separated values");
  return v;
}

struct Common {
  std::uint64_t seed = 42;
  std::string out_path;
};

void emit(const std::string& text, const Common& c, std::ostream& out) {
  if (c.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out_path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + c.out_path + "'");
  f << text;
}

InteractionModel load(const std::string& spec) { return examples::resolve(spec); }

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Purely affective interaction: consistency, induced games, equilibria and welfare", "affective"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  Common common;
  app.add_option("--seed", common.seed, "Random seed for samplers and multi-start")->capture_default_str();
  app.add_option("--out", common.out_path, "Write the result to this file instead of stdout");

  std::string model_spec;
  const std::string model_help = "Model file, or builtin:<name> (" + [] {
    std::string names;
    for (const auto& [name, _] : examples::builtin_models()) names += (names.empty() ? "" : ", ") + name;
    return names;
  }() + ")";

  // check
  auto* check = app.add_subcommand("check", "Sample a matrix condition on the affection Jacobian");
  int assumption = 2;
  std::size_t samples = 1000;
  double u_box = 10.0;
  check->add_option("model", model_spec, model_help)->required();
  check->add_option("--assumption", assumption, "2 (P-matrix), 4 (spectral radius), 5 (dominant diagonal)")
      ->check(CLI::IsMember({2, 4, 5}))
      ->capture_default_str();
  check->add_option("--samples", samples, "Number of (x, u) samples")->capture_default_str();
  check->add_option("--u-box", u_box, "Utility levels are sampled from [-u-box, u-box]")->capture_default_str();

  // consistency
  auto* consistency = app.add_subcommand("consistency", "Solve u = V_x(u) at an action profile");
  std::string x_text, guess_text;
  consistency->add_option("model", model_spec, model_help)->required();
  consistency->add_option("--x", x_text, "Action profile, comma separated")->required();
  consistency->add_option("--guess", guess_text, "Starting utility profile (default V_x(0))");

  // iterate
  auto* iterate = app.add_subcommand("iterate", "Undamped re-assessment u <- V_x(u)");
  std::string u0_text;
  double perturb = 1e-6;
  std::size_t kmax = 10000;
  iterate->add_option("model", model_spec, model_help)->required();
  iterate->add_option("--x", x_text, "Action profile, comma separated")->required();
  iterate->add_option("--u0", u0_text, "Start (default U(x) plus --perturb on the first component)");
  iterate->add_option("--perturb", perturb, "Perturbation added to U(x) when --u0 is absent")->capture_default_str();
  iterate->add_option("--kmax", kmax, "Maximum number of steps")->capture_default_str();

  // induced
  auto* induced = app.add_subcommand("induced", "Induced utilities U(x) and their gradient");
  induced->add_option("model", model_spec, model_help)->required();
  induced->add_option("--x", x_text, "Action profile, comma separated")->required();

  // equilibrium
  auto* eqcmd = app.add_subcommand("equilibrium", "Find and verify a parametric equilibrium");
  std::string start_text;
  equilibrium::EquilibriumOptions eq_opts;
  std::size_t multistart = 0;
  eqcmd->add_option("model", model_spec, model_help)->required();
  eqcmd->add_option("--start", start_text, "Starting action profile (default window midpoint)");
  eqcmd->add_option("--grid", eq_opts.grid, "Grid points per player for best replies and deviations")
      ->capture_default_str();
  eqcmd->add_option("--multistart", multistart, "Seeded random starts; reports all distinct equilibria")
      ->capture_default_str();

  // pareto
  auto* pareto = app.add_subcommand("pareto", "Search for a consistent profile dominating the equilibrium");
  std::string search_spec;
  welfare::GridSpec grid;
  pareto->add_option("model", model_spec, model_help)->required();
  pareto->add_option("--start", start_text, "Starting action profile for the equilibrium solve");
  pareto->add_option("--search-model", search_spec, "Search this model's action box instead (same utilities)");
  pareto->add_option("--per-axis", grid.per_axis, "Grid points per axis (n <= 3)")->capture_default_str();
  pareto->add_option("--random-points", grid.random_points, "Random points for n > 3")->capture_default_str();

  // weights
  auto* weights = app.add_subcommand("weights", "Welfare weights lambda >> 0 with lambda B >> 0");
  std::string matrix_text;
  weights->add_option("model", model_spec, "Linearly separable model (B = (I - J)^-1)");
  weights->add_option("--matrix", matrix_text, "B given directly, rows separated by ';'");

  // economy
  auto* econ = app.add_subcommand("economy", "Two-agent exchange economy with affection");
  economy::EconomyModel em;
  std::string lambda_text = "1,1";
  std::size_t scan = 99;
  std::string csv_path;
  econ->add_option("--a", em.a, "Affection of agent 1 for agent 2")->capture_default_str();
  econ->add_option("--b", em.b, "Affection of agent 2 for agent 1")->capture_default_str();
  econ->add_option("--money", em.money, "Money endowment M")->capture_default_str();
  econ->add_option("--lambda", lambda_text, "Planner weights")->capture_default_str();
  econ->add_option("--scan", scan, "Interior weights in the audit scan")->capture_default_str();
  econ->add_option("--csv", csv_path, "Write the weight scan as CSV");

  // reproduce
  auto* repro = app.add_subcommand("reproduce", "Run a built-in example end to end and compare with reference values");
  std::string example_id;
  bool repro_json = false;
  std::vector<std::string> ids = reproduce::example_ids();
  ids.push_back("all");
  repro->add_option("example", example_id, "Example id or 'all'")->required()->check(CLI::IsMember(ids));
  repro->add_flag("--json", repro_json, "Emit JSON instead of a table");

  // plot-data
  auto* plotcmd = app.add_subcommand("plot-data", "CSV data for reaction curves and utility surfaces");
  std::string kind_text = "reaction-curves", range_text;
  plot::PlotOptions plot_opts;
  std::string plot_lambda;
  plotcmd->add_option("model", model_spec, model_help)->required();
  plotcmd->add_option("--kind", kind_text, "reaction-curves, surface:U1, surface:U2 or welfare-surface")
      ->capture_default_str();
  plotcmd->add_option("--resolution", plot_opts.resolution, "Points per axis")->capture_default_str();
  plotcmd->add_option("--range", range_text, "x_lo,x_hi,y_lo,y_hi (default model window)");
  plotcmd->add_option("--lambda", plot_lambda, "Weights for welfare-surface (default equal)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*check) {
      const auto m = load(model_spec);
      conditions::Sampler s{samples, common.seed, u_box};
      const auto report = conditions::check_assumption(assumption, m, s);
      emit(io::dump(io::to_json(report)), common, out);
      return report.verdict == conditions::Verdict::Fails ? kExitNegative : kExitOk;
    }
    if (*consistency) {
      const auto m = load(model_spec);
      const Vector x = require_dim(parse_vector(x_text, "--x"), m, "--x");
      std::optional<Vector> guess;
      if (!guess_text.empty()) guess = require_dim(parse_vector(guess_text, "--guess"), m, "--guess");
      solver::ConsistencyOptions o;
      o.seed = common.seed;
      const auto s = solver::solve_consistency(m, x, guess, o);
      io::json j = io::to_json(s);
      j["x"] = io::to_json(x);
      emit(io::dump(j), common, out);
      return s.converged() ? kExitOk : kExitSolverFailure;
    }
    if (*iterate) {
      const auto m = load(model_spec);
      const Vector x = require_dim(parse_vector(x_text, "--x"), m, "--x");
      Vector u0;
      io::json j;
      if (!u0_text.empty()) {
        u0 = require_dim(parse_vector(u0_text, "--u0"), m, "--u0");
      } else {
        solver::ConsistencyOptions o;
        o.seed = common.seed;
        const auto s = solver::solve_consistency(m, x, std::nullopt, o);
        if (!s.converged()) {
          err << "error: no consistent utility profile found at x (best residual " << s.residual_norm << ")\n";
          return kExitSolverFailure;
        }
        u0 = s.u;
        u0(0) += perturb;
        j["fixed_point"] = io::to_json(s.u);
        j["rho"] = io::number(conditions::spectral_radius(m.affection_jacobian(x, s.u)));
      }
      const auto r = solver::picard_iterate(m, x, u0, kmax);
      j.update(io::to_json(r));
      j["x"] = io::to_json(x);
      j["u0"] = io::to_json(u0);
      emit(io::dump(j), common, out);
      switch (r.verdict) {
        case solver::PicardVerdict::Converged: return kExitOk;
        case solver::PicardVerdict::Diverged: return kExitNegative;
        case solver::PicardVerdict::Cycling: return kExitSolverFailure;
      }
    }
    if (*induced) {
      const auto m = load(model_spec);
      const Vector x = require_dim(parse_vector(x_text, "--x"), m, "--x");
      solver::ConsistencyOptions o;
      o.seed = common.seed;
      const auto ev = solver::induced_game(m, x, std::nullopt, o);
      emit(io::dump(io::to_json(ev)), common, out);
      return ev.defined ? kExitOk : kExitSolverFailure;
    }
    if (*eqcmd) {
      const auto m = load(model_spec);
      if (multistart > 0) {
        const auto all = equilibrium::multistart_equilibria(m, multistart, common.seed, eq_opts);
        io::json arr = io::json::array();
        for (const auto& r : all) arr.push_back(io::to_json(r));
        emit(io::dump({{"starts", multistart}, {"seed", common.seed}, {"equilibria", std::move(arr)}}), common, out);
        return all.empty() ? kExitSolverFailure : kExitOk;
      }
      const Vector start =
          start_text.empty() ? m.window_midpoint() : require_dim(parse_vector(start_text, "--start"), m, "--start");
      const auto r = equilibrium::find_parametric_equilibrium(m, start, eq_opts);
      io::json j = io::to_json(r);
      if (r.verified()) j["local_dominance"] = io::to_json(equilibrium::local_dominance_check(m, r));
      emit(io::dump(j), common, out);
      switch (r.status) {
        case equilibrium::Status::Verified: return kExitOk;
        case equilibrium::Status::NoConvergence: return kExitSolverFailure;
        default: return kExitNegative;
      }
    }
    if (*pareto) {
      const auto m = load(model_spec);
      const Vector start =
          start_text.empty() ? m.window_midpoint() : require_dim(parse_vector(start_text, "--start"), m, "--start");
      const auto eq = equilibrium::find_parametric_equilibrium(m, start);
      if (!eq.verified()) {
        err << "error: equilibrium not verified (" << equilibrium::to_string(eq.status) << ")\n";
        emit(io::dump({{"equilibrium", io::to_json(eq)}}), common, out);
        return kExitSolverFailure;
      }
      grid.seed = common.seed;
      const auto search = search_spec.empty() ? m : load(search_spec);
      if (search.players() != m.players()) throw UsageError("--search-model has a different number of players");
      const auto cert = welfare::pareto_search(search, eq.x, eq.u, grid);
      emit(io::dump(io::to_json(cert)), common, out);
      return cert.outcome == welfare::Outcome::ImprovementFound ? kExitNegative : kExitOk;
    }
    if (*weights) {
      if (matrix_text.empty() == model_spec.empty())
        throw UsageError("weights: give exactly one of a model or --matrix");
      Matrix b;
      if (!matrix_text.empty()) {
        b = parse_matrix(matrix_text);
      } else {
        const auto m = load(model_spec);
        b = solver::separable_induced(m).b();
      }
      const auto w = welfare::welfare_weights(b);
      io::json j = w ? io::to_json(*w) : io::json{{"lambda", nullptr}, {"b", io::to_json(b)}};
      emit(io::dump(j), common, out);
      return w ? kExitOk : kExitNegative;
    }
    if (*econ) {
      const Vector lambda = parse_vector(lambda_text, "--lambda");
      if (lambda.size() != 2) throw UsageError("--lambda: expected two values");
      em.validate();
      const auto audit = economy::efficiency_audit(em, scan);
      const auto planner = economy::planner_solve(em, lambda);
      io::json j = {{"economy", {{"a", io::number(em.a)}, {"b", io::number(em.b)}, {"money", io::number(em.money)}}},
                    {"equilibrium", io::to_json(audit.equilibrium)},
                    {"planner", io::to_json(planner)},
                    {"audit", io::to_json(audit)}};
      emit(io::dump(j), common, out);
      if (!csv_path.empty()) {
        std::ofstream f(csv_path, std::ios::binary);
        if (!f) throw UsageError("cannot write '" + csv_path + "'");
        f << economy::scan_csv(audit);
      }
      return kExitOk;
    }
    if (*repro) {
      std::vector<std::string> run_ids;
      if (example_id == "all")
        run_ids = reproduce::example_ids();
      else
        run_ids.push_back(example_id);
      bool ok = true;
      std::string text;
      io::json arr = io::json::array();
      for (const auto& id : run_ids) {
        const auto report = reproduce::run(id, common.seed);
        ok = ok && report.passed();
        if (repro_json)
          arr.push_back(reproduce::to_json(report));
        else
          text += reproduce::format_table(report);
      }
      emit(repro_json ? io::dump(run_ids.size() == 1 ? arr[0] : arr) : text, common, out);
      return ok ? kExitOk : kExitNegative;
    }
    if (*plotcmd) {
      const auto m = load(model_spec);
      plot_opts.kind = plot::parse_kind(kind_text);
      if (!range_text.empty()) {
        const Vector r = parse_vector(range_text, "--range");
        if (r.size() != 4) throw UsageError("--range: expected x_lo,x_hi,y_lo,y_hi");
        plot_opts.range = plot::Range{r(0), r(1), r(2), r(3)};
      }
      if (!plot_lambda.empty()) plot_opts.lambda = parse_vector(plot_lambda, "--lambda");
      emit(plot::emit_plot_data(m, plot_opts), common, out);
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ModelError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolverFailure;
  }
  return kExitUsage;
}

}  // namespace affective::cli
