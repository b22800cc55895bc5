#pragma once

// CSV data for reaction curves and utility/welfare surfaces of two-player
// models. Rendering is left to external tools.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "affective/linalg.hpp"
#include "affective/model.hpp"

namespace affective::plot {

enum class Kind { ReactionCurves, SurfaceU1, SurfaceU2, WelfareSurface };

/// Accepts reaction-curves, surface:U1, surface:U2, welfare-surface.
Kind parse_kind(std::string_view text);
std::string to_string(Kind k);

struct Range {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double y_lo = 0.0;
  double y_hi = 0.0;
};

struct PlotOptions {
  Kind kind = Kind::ReactionCurves;
  std::size_t resolution = 200;
  /// Defaults to the model window.
  std::optional<Range> range;
  /// Weights for welfare-surface; defaults to equal weights.
  std::optional<Vector> lambda;
};

/// reaction-curves: header r1_x,r1_y,r2_x,r2_y; row k holds player 1's
/// induced best reply to the k-th y and player 2's to the k-th x.
/// Surfaces: header x,y,value,defined over a resolution^2 grid, value "nan"
/// where the induced game is undefined. Throws std::runtime_error when the
/// induced game is undefined on the whole range.
std::string emit_plot_data(const InteractionModel& model, const PlotOptions& options);

}  // namespace affective::plot
