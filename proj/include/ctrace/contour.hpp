#pragma once

#include <vector>

#include "ctrace/flow.hpp"

namespace ctrace {

struct ContourOptions {
  int samples = 512;
  /// Seed search along the q axis (then the p axis) over [-w, w].
  double search_half_width = 50.0;
  int scan_points = 20001;
  /// Anything leaving this box while tracing makes the shell non-compact.
  double box_half_width = 1e3;
  double max_period = 1e4;
  double closure_tol = 1e-8;
  IntegratorOptions integrator{};
};

/// One closed N = 1 energy shell, sampled uniformly in time over a period.
/// For driven shells `points` are physical coordinates and `base_points` the
/// pulled-back points on the H-shell of the same energy.
struct ShellContour {
  double energy = 0.0;
  FlowSpec which;
  double period = 0.0;
  /// Integral of p dq once around the shell (forward flow direction).
  double action = 0.0;
  State seed;
  std::vector<double> times;
  std::vector<State> points;
  std::vector<State> base_points;
  double closure_error = 0.0;
  double max_drift = 0.0;
};

/// The shell component through the largest-q seed found on the axis scan.
ShellContour trace_contour(double E, FlowSpec which, const SystemSpec& spec, const ContourOptions& opt = {});

/// All components crossing the scanned axis, ordered by decreasing seed q.
std::vector<ShellContour> shell_components(double E, FlowSpec which, const SystemSpec& spec,
                                           const ContourOptions& opt = {});

/// Time from the contour seed to a point on the shell, in [0, period).
double contour_phase(const ShellContour& c, const State& x, const SystemSpec& spec);

/// Point on the contour at time s after the seed (s taken modulo the period).
State contour_point(const ShellContour& c, double s, const SystemSpec& spec);

}  // namespace ctrace
