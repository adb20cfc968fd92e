#include "ctrace/flow.hpp"

namespace ctrace {

namespace {

const PhaseFunction& generator(FlowKind kind, const SystemSpec& spec) {
  return kind == FlowKind::driver ? spec.driver : spec.hamiltonian;
}

void check_state(const State& x, const SystemSpec& spec) {
  if (x.size() != 2 * spec.dof) throw DomainError("state dimension does not match system dof");
  if (!x.allFinite()) throw DomainError("state is not finite");
}

// Plain segment under H or Lambda.
Segment plain_segment(const State& x0, double t, const PhaseFunction& F, bool tangent, const IntegratorOptions& opt) {
  HamiltonianIntegrator integ(F, tangent, opt);
  const FlowState end = integ.propagate(integ.start(x0), t);
  return {x0, end.x, end.M, end.action, t};
}

// Driven flow by conjugation: Phi'^t = Phi_L^tau o Phi_H^t o Phi_L^-tau. The
// action picks up the boundary terms of the driver's generating function
// G(y) = A_L(y, tau) - tau L(y).
Segment driven_segment(const State& x0, double t, double tau, const SystemSpec& spec, bool tangent,
                       const IntegratorOptions& opt) {
  if (tau == 0.0) return plain_segment(x0, t, spec.hamiltonian, tangent, opt);
  const Segment back = plain_segment(x0, -tau, spec.driver, tangent, opt);
  const Segment mid = plain_segment(back.end, t, spec.hamiltonian, tangent, opt);
  const Segment fwd = plain_segment(mid.end, tau, spec.driver, tangent, opt);
  Segment s;
  s.start = x0;
  s.end = fwd.end;
  s.time = t;
  if (tangent) s.monodromy = fwd.monodromy * mid.monodromy * back.monodromy;
  s.action = mid.action + back.action + fwd.action - tau * spec.driver.value(mid.end) +
             tau * spec.driver.value(back.end);
  return s;
}

}  // namespace

State flow(const State& x0, double t, FlowSpec which, const SystemSpec& spec, const IntegratorOptions& opt) {
  check_state(x0, spec);
  if (t == 0.0) return x0;
  return segment(x0, t, which, spec, false, opt).end;
}

PhasePoint flow(const PhasePoint& x0, double t, FlowSpec which, const SystemSpec& spec, const IntegratorOptions& opt) {
  return PhasePoint(flow(x0.state(), t, which, spec, opt));
}

Monodromy tangent_flow(const State& x0, double t, FlowSpec which, const SystemSpec& spec,
                       const IntegratorOptions& opt) {
  check_state(x0, spec);
  if (t == 0.0) return {Eigen::MatrixXd::Identity(2 * spec.dof, 2 * spec.dof), 0.0};
  return {segment(x0, t, which, spec, true, opt).monodromy, t};
}

Segment segment(const State& x0, double t, FlowSpec which, const SystemSpec& spec, bool with_tangent,
                const IntegratorOptions& opt) {
  check_state(x0, spec);
  if (which.kind == FlowKind::driven) return driven_segment(x0, t, which.tau, spec, with_tangent, opt);
  return plain_segment(x0, t, generator(which.kind, spec), with_tangent, opt);
}

std::vector<Eigen::MatrixXd> monodromy_path(const State& x0, double t, FlowSpec which, const SystemSpec& spec,
                                            int n, const IntegratorOptions& opt) {
  check_state(x0, spec);
  std::vector<Eigen::MatrixXd> out;
  out.reserve(n + 1);
  if (which.kind != FlowKind::driven || which.tau == 0.0) {
    HamiltonianIntegrator integ(generator(which.kind, spec), true, opt);
    for (const auto& s : integ.sample(integ.start(x0), t, n)) out.push_back(s.M);
    return out;
  }
  const Segment back = plain_segment(x0, -which.tau, spec.driver, true, opt);
  HamiltonianIntegrator integ(spec.hamiltonian, true, opt);
  for (const auto& s : integ.sample(integ.start(back.end), t, n)) {
    const Segment fwd = plain_segment(s.x, which.tau, spec.driver, true, opt);
    out.push_back(fwd.monodromy * s.M * back.monodromy);
  }
  return out;
}

Trajectory trajectory(const State& x0, double t, int n_samples, FlowSpec which, const SystemSpec& spec,
                      const IntegratorOptions& opt) {
  check_state(x0, spec);
  Trajectory tr;
  tr.energy = flow_energy(x0, which, spec);
  State start = x0;
  Segment back;
  const bool driven = which.kind == FlowKind::driven && which.tau != 0.0;
  if (driven) {
    back = plain_segment(x0, -which.tau, spec.driver, false, opt);
    start = back.end;
  }
  HamiltonianIntegrator integ(driven ? spec.hamiltonian : generator(which.kind, spec), false, opt);
  const auto samples = integ.sample(integ.start(start), t, n_samples);
  tr.max_drift = integ.last_drift();
  tr.steps = integ.last_steps();
  for (const auto& s : samples) {
    tr.times.push_back(s.time);
    tr.states.push_back(driven ? plain_segment(s.x, which.tau, spec.driver, false, opt).end : s.x);
  }
  return tr;
}

double driven_hamiltonian(const State& x, double tau, const SystemSpec& spec) {
  check_state(x, spec);
  if (tau == 0.0) return spec.hamiltonian.value(x);
  return spec.hamiltonian.value(plain_segment(x, -tau, spec.driver, false, {}).end);
}

Eigen::VectorXd driven_gradient(const State& x, double tau, const SystemSpec& spec) {
  check_state(x, spec);
  if (tau == 0.0) return spec.hamiltonian.gradient(x);
  const Segment back = plain_segment(x, -tau, spec.driver, true, {});
  return back.monodromy.transpose() * spec.hamiltonian.gradient(back.end);
}

double flow_energy(const State& x, FlowSpec which, const SystemSpec& spec) {
  switch (which.kind) {
    case FlowKind::intrinsic:
      return spec.hamiltonian.value(x);
    case FlowKind::driver:
      return spec.driver.value(x);
    case FlowKind::driven:
      return driven_hamiltonian(x, which.tau, spec);
  }
  return 0.0;
}

Eigen::VectorXd flow_gradient(const State& x, FlowSpec which, const SystemSpec& spec) {
  switch (which.kind) {
    case FlowKind::intrinsic:
      return spec.hamiltonian.gradient(x);
    case FlowKind::driver:
      return spec.driver.gradient(x);
    case FlowKind::driven:
      return driven_gradient(x, which.tau, spec);
  }
  return {};
}

}  // namespace ctrace
