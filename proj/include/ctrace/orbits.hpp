#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctrace/contour.hpp"
#include "ctrace/symplectic.hpp"

namespace ctrace {

struct ShellIntersection {
  State point;
  bool tangency = false;
  /// Angle between the two shells at the point, in [0, pi/2].
  double grazing_angle = 0.0;
  /// Times from the seeds of the E-contour and of the driven E'-contour.
  double phase = 0.0;
  double driven_phase = 0.0;
  int component = 0;
  int driven_component = 0;
};

struct OrbitOptions {
  /// Winding cutoff; negative picks the smallest j with exp(-eps T / hbar) below the damping cutoff.
  int j_max = -1;
  double damping_cutoff = 1e-6;
  double tangency_angle = 1e-4;
  double caustic_threshold = 1e-6;
  double closure_tol = 1e-7;
  bool compute_jacobian = true;
  ContourOptions contour{};
};

/// N = 1 intersections of the E-shell of H with the E'-shell of H(.|tau).
std::vector<ShellIntersection> shell_intersections(const TransitionQuery& q, const SystemSpec& spec,
                                                   const OrbitOptions& opt = {});

/// Signed traversal time from intersection `from` to `to` along one shell.
struct ArcTime {
  int from = 0;
  int to = 0;
  int winding = 0;
  double time = 0.0;
};

struct SegmentCatalogue {
  double period = 0.0;
  double driven_period = 0.0;
  int j_max = 0;
  /// Arcs on the E-shell and on the driven E'-shell, both directions.
  std::vector<ArcTime> arcs;
  std::vector<ArcTime> driven_arcs;
};

SegmentCatalogue segment_times(const std::vector<ShellIntersection>& xs, const TransitionQuery& q,
                               const SystemSpec& spec, int j_max, const OrbitOptions& opt = {});

/// Winding cutoff used when OrbitOptions::j_max is negative.
int default_j_max(double period, const TransitionQuery& q, const SystemSpec& spec, double damping_cutoff);

/// One closed compound orbit: E-shell segment a -> b of duration t, then the
/// driven segment b -> a of duration t'.
struct CompoundOrbit {
  int id = 0;
  double E = 0.0;
  double E_prime = 0.0;
  double tau = 0.0;
  int a = 0;
  int b = 0;
  ShellIntersection start;
  ShellIntersection end;
  int j = 0;
  int j_prime = 0;
  double t = 0.0;
  double t_prime = 0.0;
  double action_energy = 0.0;
  double action_time = 0.0;
  Eigen::MatrixXd monodromy;
  Eigen::MatrixXd monodromy_e;
  Eigen::MatrixXd monodromy_driven;
  Eigen::Matrix2d jacobian_tE = Eigen::Matrix2d::Zero();
  double jacobian_det = 0.0;
  double det_one_minus_M = 0.0;
  int caustic_index = 0;
  /// Phase of the linearized compound propagator's trace along the orbit path.
  TracePhase trace_phase;
  double closure_error = 0.0;
  double damping = 1.0;
  bool near_caustic = false;
  /// (t, t') lexicographically positive; the cosine form sums these only.
  bool representative = false;
  int partner = -1;
  std::vector<std::string> warnings;
};

std::vector<CompoundOrbit> compound_orbits(const TransitionQuery& q, const SystemSpec& spec,
                                           const OrbitOptions& opt = {});

/// Re-solved orbit geometry at nearby energies or times.
struct OrbitGeometry {
  State a;
  State b;
  double t = 0.0;
  double t_prime = 0.0;
  double action = 0.0;
};

/// Continues an orbit to energies (E1, E1') by warm-started Newton polishing.
OrbitGeometry resolve_orbit(const CompoundOrbit& o, double E1, double E1_prime, const SystemSpec& spec,
                            double closure_tol = 1e-7);

struct JacobianResult {
  Eigen::Matrix2d matrix;
  double det = 0.0;
  /// det d(E,E')/d(t,t') from an independent solve of energies at displaced times.
  double inverse_det = 0.0;
  double step = 0.0;
};

JacobianResult jacobian_times_energies(const CompoundOrbit& o, const TransitionQuery& q, const SystemSpec& spec,
                                       bool with_inverse = false);

/// The orbit family continued to energies (E1, E1'): endpoints, times, action,
/// monodromy and (optionally) the time-energy Jacobian, all recomputed.
CompoundOrbit displaced_orbit(const CompoundOrbit& o, double E1, double E1_prime, const SystemSpec& spec,
                              bool with_jacobian = true);

/// Derivatives along the energy line (E, E') + lambda s, s = (sgn t, sgn t'), at lambda = 0:
/// g = s.J.s with J = d(t,t')/d(E,E'), and a = ln(|det J|^1/2 |det[I - M]|^-1/2).
struct EnergyLineDerivatives {
  double g = 0.0, dg = 0.0, d2g = 0.0;
  double da = 0.0, d2a = 0.0;
  double step = 0.0;
};

EnergyLineDerivatives energy_line_derivatives(const CompoundOrbit& o, const SystemSpec& spec, double step);

/// Energies (E, E') at which the orbit family has segment times (t, t').
std::pair<double, double> energies_for_times(const CompoundOrbit& o, double t, double t_prime,
                                             const SystemSpec& spec);

/// Closed piecewise curve given as consecutive sampled pieces; each piece must
/// have an odd number of samples (even interval count) for the Richardson step.
double symplectic_area(const std::vector<std::vector<State>>& pieces, double closure_tol = 1e-7);

/// symplectic_area over the two segments of an orbit, each sampled with 2n+1 points.
double orbit_area(const CompoundOrbit& o, const SystemSpec& spec, int n = 1000);

/// Tangent maps along the orbit path: the E-segment from the identity, then
/// the driven segment composed on top.
std::vector<Eigen::MatrixXd> orbit_monodromy_path(const CompoundOrbit& o, const SystemSpec& spec,
                                                  int samples_per_unit_time = 50);

struct CausticCount {
  int count = 0;
  bool endpoint_zero = false;
};

/// Zeros of det[I - M] along a path of tangent maps (sign changes plus touching zeros).
CausticCount caustic_counter(std::span<const Eigen::MatrixXd> path);

/// Monodromy re-based to start at the second endpoint: M(t) M'(t').
Eigen::MatrixXd rebased_monodromy(const CompoundOrbit& o);

// ---- N >= 2 ------------------------------------------------------------

struct SectionSpec {
  int coordinate = 0;
  double value = 0.0;
  /// Required sign of dq_k/dt at the crossing.
  int direction = +1;
};

struct PoincareFixedPoint {
  State point;
  Eigen::MatrixXd m;
  double det_one_minus_m = 0.0;
  double residual = 0.0;
  int iterations = 0;
  double t = 0.0;
  double t_prime = 0.0;
  double action = 0.0;
  std::vector<std::string> warnings;
};

struct SectionOptions {
  int max_iterations = 50;
  double tolerance = 1e-6;
  double fd_step = 1e-7;
  double max_time = 100.0;
};

/// Reduced coordinates on the section: all q_i with i != k, then all p_i with i != k.
Eigen::VectorXd section_coordinates(const State& x, const SectionSpec& s);
/// Lifts reduced coordinates to the section at energy E (p_k solved, sign from direction).
State section_lift(const Eigen::VectorXd& z, double E, const SectionSpec& s, const SystemSpec& spec);

/// Fixed point of the composed map: section -> evolved section under H (stop when
/// H(.|tau) = E'), driven flow back until H = E, then H flow to the section.
PoincareFixedPoint product_section_fixed_point(const TransitionQuery& q, const SystemSpec& spec,
                                               const SectionSpec& section, const Eigen::VectorXd& seed,
                                               const SectionOptions& opt = {});

// ---- catalogue records ---------------------------------------------------

std::string orbit_record(const CompoundOrbit& o);
void write_catalogue(const std::string& path, const std::vector<CompoundOrbit>& orbits, bool append = false);

struct OrbitRecord {
  int orbit_id = 0;
  double E = 0, E_prime = 0, tau = 0;
  int j = 0, j_prime = 0;
  double t = 0, t_prime = 0, S_energy = 0, S_time = 0, det_IminusM = 0, jacobian_det = 0;
  int caustic_index = 0;
  bool near_caustic = false;
  std::vector<double> start, end;
};

std::vector<OrbitRecord> read_catalogue(const std::string& path);

}  // namespace ctrace
