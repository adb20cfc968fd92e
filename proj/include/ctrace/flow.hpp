#pragma once

#include <vector>

#include "ctrace/integrator.hpp"

namespace ctrace {

enum class FlowKind { intrinsic, driver, driven };

/// Which Hamiltonian generates the flow. The driven Hamiltonian is
/// H(x|tau) = H(Phi_Lambda^{-tau}(x)).
struct FlowSpec {
  FlowKind kind = FlowKind::intrinsic;
  double tau = 0.0;

  static FlowSpec intrinsic() { return {FlowKind::intrinsic, 0.0}; }
  static FlowSpec driver() { return {FlowKind::driver, 0.0}; }
  static FlowSpec driven(double tau) { return {FlowKind::driven, tau}; }
};

struct Monodromy {
  Eigen::MatrixXd matrix;
  double time = 0.0;
};

/// One trajectory piece: end point, tangent map and the action integral
/// of p dq along it.
struct Segment {
  State start;
  State end;
  Eigen::MatrixXd monodromy;
  double action = 0.0;
  double time = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  double energy = 0.0;
  double max_drift = 0.0;
  long steps = 0;
};

State flow(const State& x0, double t, FlowSpec which, const SystemSpec& spec, const IntegratorOptions& opt = {});
PhasePoint flow(const PhasePoint& x0, double t, FlowSpec which, const SystemSpec& spec,
                const IntegratorOptions& opt = {});

Monodromy tangent_flow(const State& x0, double t, FlowSpec which, const SystemSpec& spec,
                       const IntegratorOptions& opt = {});

Segment segment(const State& x0, double t, FlowSpec which, const SystemSpec& spec, bool with_tangent = true,
                const IntegratorOptions& opt = {});

/// Tangent maps along a segment at n+1 equally spaced times (first is the identity).
std::vector<Eigen::MatrixXd> monodromy_path(const State& x0, double t, FlowSpec which, const SystemSpec& spec,
                                            int n, const IntegratorOptions& opt = {});

Trajectory trajectory(const State& x0, double t, int n_samples, FlowSpec which, const SystemSpec& spec,
                      const IntegratorOptions& opt = {});

double driven_hamiltonian(const State& x, double tau, const SystemSpec& spec);
/// Gradient of H(.|tau): M_Lambda(-tau; x)^T grad H(Phi_Lambda^{-tau} x).
Eigen::VectorXd driven_gradient(const State& x, double tau, const SystemSpec& spec);

/// Value of the generating phase function (H, Lambda or H(.|tau)).
double flow_energy(const State& x, FlowSpec which, const SystemSpec& spec);
Eigen::VectorXd flow_gradient(const State& x, FlowSpec which, const SystemSpec& spec);

}  // namespace ctrace
