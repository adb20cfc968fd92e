#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctrace/density.hpp"
#include "ctrace/orbits.hpp"

namespace ctrace {

struct BackgroundOptions {
  /// Box edges; empty vectors select the box automatically from shells at E + tail_widths * eps.
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  double tail_widths = 100.0;
  /// Initial points per axis; 0 derives the spacing from eps and the shell gradients.
  int points = 0;
  int max_levels = 5;
  double tolerance = 1e-4;
  /// Cap on points per axis; refinement beyond it raises RefinementError.
  long max_points_per_axis = 1 << 14;
};

/// Zero-length contribution (2 pi hbar)^-N \int dx d_eps(E - H) d_eps(E' - H(x|tau)).
double classical_background(const TransitionQuery& q, const SystemSpec& spec, const BackgroundOptions& opt = {});

enum class SigmaPolicy {
  /// Phase of the linearized compound propagator's trace, less pi/4 sig(dt/dE).
  trace_index,
  /// -(pi/2) times the number of zeros of det[I - M] along the orbit path.
  caustic_count,
};

enum class Prefactor {
  /// 1/(pi hbar) per representative orbit.
  unit,
  /// 2^N/(pi hbar) per representative orbit.
  doubled,
};

enum class SmoothingOrder {
  /// Damping exp(-eps(|t|+|t'|)/hbar) only.
  first,
  /// Adds the phase -eps^2 s.(dt/dE).s/(2 hbar), s = (sgn t, sgn t'), from evaluating S at E + i eps sgn t.
  second,
  /// Continues S and ln A along the energy line to (E, E') + i eps s: the action through fourth order
  /// and the amplitude through second, from finite differences of J and det[I - M] along s.
  continued,
};

struct ScOptions {
  SigmaPolicy sigma = SigmaPolicy::trace_index;
  Prefactor prefactor = Prefactor::unit;
  SmoothingOrder smoothing = SmoothingOrder::continued;
  double caustic_threshold = 1e-6;
  /// Energy step for the continued smoothing; non-positive means eps/4.
  double line_step = 0.0;
  /// Calibrated offsets keyed by orbit family; only used when apply_offsets is set.
  std::map<std::string, double> family_offsets;
  bool apply_offsets = false;
  /// Precomputed background; computed from background_options when absent.
  std::optional<double> background;
  BackgroundOptions background_options;
};

/// Family label "a:b:j:j'" shared by the same orbit across a parameter sweep.
std::string orbit_family(const CompoundOrbit& o);

/// sigma for one orbit under the chosen policy (no calibration offset).
double maslov_phase(const CompoundOrbit& o, SigmaPolicy policy);

SCTerm sc_term(const CompoundOrbit& o, const TransitionQuery& q, const SystemSpec& spec, const ScOptions& opt = {});

DensityResult sc_density(const TransitionQuery& q, const std::vector<CompoundOrbit>& catalogue, const SystemSpec& spec,
                         const ScOptions& opt = {});

// ---- calibration ---------------------------------------------------------

struct CalibrationPoint {
  double coordinate = 0.0;
  double exact = 0.0;
  double background = 0.0;
  std::vector<SCTerm> terms;
  std::vector<std::string> families;
};

struct CalibrationOptions {
  /// Polynomial degree removed from both series to isolate the oscillatory part.
  int detrend_degree = 3;
  double noise_floor = 1e-12;
  /// Oscillation RMS below this fraction of the mean |exact| is treated as flat.
  double relative_floor = 1e-6;
};

struct CalibrationReport {
  bool conclusive = false;
  std::string note;
  std::map<std::string, double> offsets;
  /// RMS of (exact - model) oscillatory parts over RMS of the exact one, at the fitted offsets.
  double residual = 0.0;
  double residual_uncalibrated = 0.0;
};

/// Fits one offset in {0, pi/2, pi, 3pi/2} per family; never modifies the inputs.
CalibrationReport sigma_calibration(const std::vector<CalibrationPoint>& points, const CalibrationOptions& opt = {});

/// y minus its least-squares polynomial of the given degree in x (x rescaled to [-1, 1]).
std::vector<double> oscillatory_part(const std::vector<double>& x, const std::vector<double>& y, int degree);

}  // namespace ctrace
