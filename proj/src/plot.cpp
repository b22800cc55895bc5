#include "affective/plot.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "affective/equilibrium.hpp"
#include "affective/parallel.hpp"
#include "affective/solver.hpp"

namespace affective::plot {

namespace {

std::string fmt(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Range resolve_range(const InteractionModel& model, const PlotOptions& o) {
  if (o.range) {
    const Range& r = *o.range;
    if (!(r.x_lo < r.x_hi && r.y_lo < r.y_hi)) throw std::invalid_argument("plot range must have lo < hi");
    return r;
  }
  return {model.window_lo(0), model.window_hi(0), model.window_lo(1), model.window_hi(1)};
}

}  // namespace

Kind parse_kind(std::string_view text) {
  if (text == "reaction-curves") return Kind::ReactionCurves;
  if (text == "surface:U1") return Kind::SurfaceU1;
  if (text == "surface:U2") return Kind::SurfaceU2;
  if (text == "welfare-surface") return Kind::WelfareSurface;
  throw std::invalid_argument("unknown plot kind '" + std::string(text) +
                              "' (expected reaction-curves, surface:U1, surface:U2 or welfare-surface)");
}

std::string to_string(Kind k) {
  switch (k) {
    case Kind::ReactionCurves: return "reaction-curves";
    case Kind::SurfaceU1: return "surface:U1";
    case Kind::SurfaceU2: return "surface:U2";
    case Kind::WelfareSurface: return "welfare-surface";
  }
  return "";
}

std::string emit_plot_data(const InteractionModel& model, const PlotOptions& o) {
  if (model.players() != 2) throw std::invalid_argument("plot data is only defined for two-player models");
  if (o.resolution < 2) throw std::invalid_argument("plot resolution must be at least 2");
  const Range r = resolve_range(model, o);
  const auto xs = equilibrium::linspace(r.x_lo, r.x_hi, o.resolution);
  const auto ys = equilibrium::linspace(r.y_lo, r.y_hi, o.resolution);
  std::ostringstream out;
  std::size_t defined = 0;

  if (o.kind == Kind::ReactionCurves) {
    std::vector<double> r1(o.resolution), r2(o.resolution);
    const Vector mid = model.window_midpoint();
    detail::parallel_for(o.resolution, [&](std::size_t k) {
      Vector p = mid;
      p(1) = ys[k];
      const auto b1 = equilibrium::coupled_best_reply(model, 0, p);
      r1[k] = std::isfinite(b1.value) ? b1.action : NAN;
      Vector q = mid;
      q(0) = xs[k];
      const auto b2 = equilibrium::coupled_best_reply(model, 1, q);
      r2[k] = std::isfinite(b2.value) ? b2.action : NAN;
    });
    out << "r1_x,r1_y,r2_x,r2_y\n";
    for (std::size_t k = 0; k < o.resolution; ++k) {
      defined += std::isfinite(r1[k]) + std::isfinite(r2[k]);
      out << fmt(r1[k]) << ',' << fmt(ys[k]) << ',' << fmt(xs[k]) << ',' << fmt(r2[k]) << '\n';
    }
  } else {
    Vector lambda(2);
    if (o.kind == Kind::SurfaceU1)
      lambda << 1.0, 0.0;
    else if (o.kind == Kind::SurfaceU2)
      lambda << 0.0, 1.0;
    else
      lambda = o.lambda ? *o.lambda : Vector::Constant(2, 0.5);
    if (lambda.size() != 2) throw std::invalid_argument("welfare weights must have two entries");
    const std::size_t count = o.resolution * o.resolution;
    std::vector<double> values(count, NAN);
    solver::ConsistencyOptions copts;
    copts.multistart = false;
    detail::parallel_for(count, [&](std::size_t k) {
      Vector x(2);
      x << xs[k / o.resolution], ys[k % o.resolution];
      const auto s = solver::solve_consistency(model, x, std::nullopt, copts);
      if (s.converged()) values[k] = lambda.dot(s.u);
    });
    out << "x,y,value,defined\n";
    for (std::size_t k = 0; k < count; ++k) {
      const bool ok = std::isfinite(values[k]);
      defined += ok;
      out << fmt(xs[k / o.resolution]) << ',' << fmt(ys[k % o.resolution]) << ',' << fmt(values[k]) << ','
          << (ok ? 1 : 0) << '\n';
    }
  }
  if (defined == 0) throw std::runtime_error("induced game is undefined on the whole plot range");
  return out.str();
}

}  // namespace affective::plot
