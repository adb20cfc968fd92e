#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ctrace/core.hpp"
#include "ctrace/polynomial.hpp"

namespace ctrace {

/// A smooth phase-space function with analytic gradient and Hessian.
///
/// Built-in systems are polynomials; the polynomial form is kept alongside the
/// callables because the quantum pathways quantize it.
class PhaseFunction {
 public:
  using ValueFn = std::function<double(const State&)>;
  using GradientFn = std::function<Eigen::VectorXd(const State&)>;
  using HessianFn = std::function<Eigen::MatrixXd(const State&)>;

  PhaseFunction() = default;
  explicit PhaseFunction(Polynomial poly);
  PhaseFunction(int dof, ValueFn value, GradientFn gradient, HessianFn hessian);

  int dof() const { return dof_; }
  double value(const State& x) const { return value_(x); }
  Eigen::VectorXd gradient(const State& x) const { return gradient_(x); }
  Eigen::MatrixXd hessian(const State& x) const { return hessian_(x); }

  /// Null when the function was built from callables.
  const Polynomial* polynomial() const { return polynomial_.get(); }
  /// Throws DomainError when the function is not polynomial.
  const Polynomial& require_polynomial() const;

 private:
  int dof_ = 0;
  ValueFn value_;
  GradientFn gradient_;
  HessianFn hessian_;
  std::shared_ptr<const Polynomial> polynomial_;
};

/// The pair (H, Lambda) plus hbar. Immutable after construction.
struct SystemSpec {
  std::string name;
  PhaseFunction hamiltonian;
  PhaseFunction driver;
  double hbar = 1.0;
  int dof = 1;
};

SystemSpec make_system(std::string name, PhaseFunction hamiltonian, PhaseFunction driver, double hbar);

using Params = std::map<std::string, double>;

/// Built-in intrinsic Hamiltonians:
///   harmonic          p^2/2 + omega^2 q^2/2                      {omega}
///   free              p^2/2
///   quartic           p^2/2 + k q^2/2 + g q^4/4                  {g, k}
///   displaced-quartic p^2/2 + g (q - d)^4/4                      {g, d}
///   double-well       p^2/2 + a (q^2 - b^2)^2/4                  {a, b}
///   product-harmonic  sum_i (p_i^2 + omega_i^2 q_i^2)/2, N = 2   {omega1, omega2}
///   coupled-quartic   sum_i (p_i^2/2 + q_i^4/4) + c q1^2 q2^2/2  {c}
Polynomial named_hamiltonian(const std::string& name, const Params& params);

/// Built-in drivers acting on degree of freedom `dof_index` (0-based):
///   translation  s * p_k        (shifts q_k by s*tau)
///   kick         -s * q_k       (shifts p_k by s*tau)
///   squeeze      s * q_k p_k
///   self         the intrinsic Hamiltonian itself
Polynomial named_driver(const std::string& name, const Params& params, int dof, int dof_index,
                        const Polynomial& hamiltonian);

/// Names accepted by named_hamiltonian / named_driver with their parameter defaults.
const std::map<std::string, Params>& hamiltonian_catalogue();
const std::map<std::string, Params>& driver_catalogue();
int hamiltonian_dof(const std::string& name);

struct ValidationBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static ValidationBox cube(int dof, double half_width);
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> failures;
  double max_relative_error = 0.0;
  State worst_point;
};

/// Checks hbar, dof, and analytic gradients of H and Lambda against central
/// differences at `samples` deterministic pseudo-random points in `box`.
ValidationReport validate_system(const SystemSpec& spec, const ValidationBox& box, int samples = 100,
                                 double tolerance = 1e-6);

}  // namespace ctrace
