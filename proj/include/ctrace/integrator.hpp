#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ctrace/system.hpp"

namespace ctrace {

struct IntegratorOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-13;
  double initial_step = 1e-2;
  double min_step = 1e-13;
  /// States with max-norm beyond this are treated as escaping.
  double escape_norm = 1e6;
  long max_steps = 5'000'000;
};

/// Integration state: phase point, optional tangent map, and the running
/// action integral of p . dq/dt along the path.
struct FlowState {
  State x;
  Eigen::MatrixXd M;
  double action = 0.0;
  double time = 0.0;
};

/// Adaptive Dormand-Prince 5(4) integration of Hamilton's equations for one
/// phase function, optionally with the variational equations dM/dt = J Hess(F) M.
/// Negative durations integrate backward in time.
class HamiltonianIntegrator {
 public:
  using Event = std::function<double(const State&)>;

  HamiltonianIntegrator(const PhaseFunction& F, bool tangent, IntegratorOptions options = {});

  FlowState start(const State& x0) const;
  FlowState propagate(const FlowState& s, double duration) const;

  /// Integrates until `event` changes sign in `direction` (+1 upward, -1
  /// downward, 0 either) or |duration| is exhausted. Crossings earlier than
  /// |min_duration| are ignored. Returns nullopt when no crossing occurs.
  std::optional<FlowState> propagate_to_event(const FlowState& s, double duration, const Event& event,
                                              int direction = 0, double min_duration = 0.0) const;

  /// States at n+1 equally spaced times from s.time to s.time + duration.
  std::vector<FlowState> sample(const FlowState& s, double duration, int n) const;

  /// Largest |F(x) - F(x0)| seen by the last call, for drift reporting.
  double last_drift() const { return last_drift_; }
  long last_steps() const { return last_steps_; }

  bool tangent() const { return tangent_; }
  int dof() const { return dof_; }

 private:
  template <class Stop>
  FlowState run(const FlowState& s, double duration, Stop&& stop) const;

  PhaseFunction F_;
  bool tangent_;
  int dof_;
  IntegratorOptions opt_;
  mutable double last_drift_ = 0.0;
  mutable long last_steps_ = 0;
};

}  // namespace ctrace
