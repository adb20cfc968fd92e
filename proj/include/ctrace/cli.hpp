#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ctrace/orbits.hpp"
#include "ctrace/quantum.hpp"
#include "ctrace/semiclassics.hpp"

namespace ctrace {

/// Parsed run configuration. Sections [system], [sweep], [numerics], [output].
struct RunConfig {
  std::string source = "<config>";

  // [system]
  std::string name = "system";
  std::string hamiltonian;
  Params hamiltonian_params;
  std::string driver;
  Params driver_params;
  /// Degree of freedom the driver acts on (0-based).
  int driver_dof = 0;
  double hbar = 1.0;

  // [sweep]
  std::vector<double> E;
  std::vector<double> E_prime;
  std::vector<double> tau;
  double epsilon = 0.0;

  // [numerics]
  GridSpec grid;
  /// usable, full, or a level count.
  std::string levels = "usable";
  int j_max = -1;
  double damping_cutoff = 1e-6;
  SmoothingOrder smoothing = SmoothingOrder::continued;
  SigmaPolicy sigma = SigmaPolicy::trace_index;
  Prefactor prefactor = Prefactor::unit;
  FtVariant ft_variant = FtVariant::analytic;
  TimeGrid time_grid;
  double background_tolerance = 1e-4;
  std::string cache_dir;
  std::optional<SectionSpec> section;
  std::vector<double> seed;

  // [output]
  std::string prefix = "run";
  std::vector<Pathway> pathways{Pathway::semiclassical, Pathway::eigen_sum, Pathway::double_ft,
                                Pathway::classical_background};

  SystemSpec system() const;
  bool wants(Pathway p) const;
};

/// Throws ConfigError carrying the offending line.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// "all" or a comma list of sc, eigen, double-ft, background.
std::vector<Pathway> parse_pathways(const std::string& list);
/// Plane spec "q<k>=<value>[:+|:-]" with 1-based k; direction defaults to +.
SectionSpec parse_section(const std::string& spec);

/// One pathway evaluated at one grid point.
struct PointRecord {
  double E = 0, E_prime = 0, tau = 0, epsilon = 0, hbar = 0;
  Pathway pathway = Pathway::semiclassical;
  double value = 0.0;
  bool failed = false;
  std::string error;
  int n_orbits = 0;
  std::vector<std::string> warnings;
  std::vector<SCTerm> terms;
  /// Background carried by the sc record.
  std::optional<double> background;
};

struct SimulateResult {
  std::vector<PointRecord> records;
  int failed_points = 0;
  std::vector<std::string> log;
};

/// Evaluates the selected pathways over the grid; per-point failures are recorded and the run continues.
/// Record order is E, then E', then tau, then pathway, independent of `jobs`.
SimulateResult run_simulate(const RunConfig& cfg, int jobs = 1);

inline constexpr const char* kCsvHeader = "E,Eprime,tau,epsilon,hbar,pathway,value,n_orbits,n_warnings";

void write_csv(std::ostream& out, const std::vector<PointRecord>& records);
/// JSON lines, one self-describing versioned record per row.
void write_records(std::ostream& out, const std::vector<PointRecord>& records);

struct OrbitsResult {
  int points = 0;
  int orbits = 0;
  int near_caustic = 0;
  int failed_points = 0;
  /// One JSON line per orbit.
  std::vector<std::string> lines;
  std::vector<std::string> notes;
};

/// Compound-orbit catalogue over the grid (N = 1), or section fixed points (N = 2, needs section and seed).
OrbitsResult run_orbits(const RunConfig& cfg, int jobs = 1);

// ---- comparison --------------------------------------------------------

struct CsvRow {
  double E = 0, E_prime = 0, tau = 0, epsilon = 0, hbar = 0;
  std::string pathway;
  double value = 0;
  int n_orbits = 0;
  int n_warnings = 0;
};

std::vector<CsvRow> read_csv(const std::string& path);

struct Extremum {
  double position = 0.0;
  double value = 0.0;
  /// +1 maximum, -1 minimum.
  int kind = 0;
};

/// Interior extrema of a sampled curve, each refined by the parabola through it and its neighbours.
std::vector<Extremum> find_extrema(const std::vector<double>& x, const std::vector<double>& y);

struct ExtremumMatch {
  Extremum reference;
  Extremum candidate;
  /// candidate - reference position.
  double offset = 0.0;
  /// Distance between the neighbouring same-kind reference extrema; NaN if undetermined.
  double local_period = 0.0;
  bool matched = false;
};

/// Pairs each reference extremum with the nearest candidate extremum of the same kind.
std::vector<ExtremumMatch> match_extrema(const std::vector<Extremum>& reference,
                                         const std::vector<Extremum>& candidate);

struct PointDeviation {
  double E = 0, E_prime = 0, tau = 0;
  double left = 0, right = 0;
  double absolute = 0, relative = 0;
};

struct SliceReport {
  /// "tau", "Eprime" or "E".
  std::string axis;
  double fixed_a = 0, fixed_b = 0;
  std::vector<ExtremumMatch> matches;
};

struct ComparisonReport {
  std::string left_pathway, right_pathway;
  std::vector<PointDeviation> points;
  std::vector<SliceReport> slices;
  int excluded_failed = 0;
  double max_absolute = 0.0;
  double rms_relative = 0.0;
  double max_offset_periods = 0.0;
  int left_orbits = 0, right_orbits = 0, left_warnings = 0, right_warnings = 0;
};

/// Pathway choice per side: empty picks the single non-background pathway of the file.
/// Throws GridMismatchError when the two sides cover different grids.
ComparisonReport run_compare(const std::vector<CsvRow>& left, const std::vector<CsvRow>& right,
                             const std::string& left_pathway = "", const std::string& right_pathway = "");

void write_comparison(const std::string& dir, const ComparisonReport& r);

}  // namespace ctrace
