#pragma once

#include <span>
#include <vector>

#include "ctrace/core.hpp"

namespace ctrace {

/// Standard symplectic form J = [[0, I], [-I, 0]] in [q, p] ordering.
Eigen::MatrixXd symplectic_form(int dof);

/// max |M^T J M - J|.
double symplectic_error(const Eigen::MatrixXd& M);

/// det[I - M].
double det_one_minus(const Eigen::MatrixXd& M);

/// Phase of the semiclassical trace of the metaplectic operator reached along a
/// continuous path of linearized maps starting at the identity:
///
///   tr ~ exp(i * total) / |det(I - M_end)|^{1/2}.
///
/// `kernel_phase` is the Maslov phase of the mixed (position) propagator
/// kernel, counted from the rotation of the Lagrangian image of the momentum
/// plane; `gaussian_phase` is pi/4 times the signature of the quadratic form
/// left on the diagonal when the kernel is traced.
struct TracePhase {
  double kernel_phase = 0.0;
  double gaussian_phase = 0.0;
  double total = 0.0;
  /// Net number of conjugate points (signed vertical crossings) along the path.
  int conjugate_points = 0;
  /// Representation angle used to keep the end of the path off the vertical.
  double representation_angle = 0.0;
};

/// `path` must start at (or very near) the identity and be sampled finely enough
/// that eigenphases move by less than pi/2 between samples.
TracePhase metaplectic_trace_phase(std::span<const Eigen::MatrixXd> path);

/// Signature (n_plus - n_minus) of the symmetric part of S, with eigenvalues
/// below `zero_tol` relative to the largest treated as zero.
int signature(const Eigen::MatrixXd& S, double zero_tol = 1e-10);

}  // namespace ctrace
