#include <boost/math/tools/roots.hpp>

#include "ctrace/orbits.hpp"
#include "ctrace/symplectic.hpp"

namespace ctrace {

Eigen::VectorXd section_coordinates(const State& x, const SectionSpec& s) {
  const int n = static_cast<int>(x.size() / 2);
  Eigen::VectorXd z(2 * n - 2);
  int r = 0;
  for (int i = 0; i < n; ++i)
    if (i != s.coordinate) z[r++] = x[i];
  for (int i = 0; i < n; ++i)
    if (i != s.coordinate) z[r++] = x[n + i];
  return z;
}

State section_lift(const Eigen::VectorXd& z, double E, const SectionSpec& s, const SystemSpec& spec) {
  const int n = spec.dof;
  if (z.size() != 2 * n - 2) throw DomainError("section point has wrong dimension");
  State x(2 * n);
  int r = 0;
  for (int i = 0; i < n; ++i) x[i] = i == s.coordinate ? s.value : z[r++];
  for (int i = 0; i < n; ++i) x[n + i] = i == s.coordinate ? 0.0 : z[r++];
  const int k = n + s.coordinate;
  auto f = [&](double pk) {
    State y = x;
    y[k] = pk;
    return spec.hamiltonian.value(y) - E;
  };
  const double sign = s.direction >= 0 ? 1.0 : -1.0;
  double lo = 0.0, flo = f(0.0);
  if (flo >= 0) throw DomainError("section point lies outside the energy shell");
  double hi = 1e-3;
  while (f(sign * hi) < 0) {
    lo = hi;
    hi *= 2;
    if (hi > 1e6) throw DomainError("no momentum solves the energy condition on the section");
  }
  flo = f(sign * lo);
  std::uintmax_t iters = 200;
  auto g = [&](double s_) { return f(sign * s_); };
  auto root = boost::math::tools::toms748_solve(g, lo, hi, flo, g(hi), boost::math::tools::eps_tolerance<double>(52),
                                                iters);
  x[k] = sign * 0.5 * (root.first + root.second);
  return x;
}

namespace {

struct Leg {
  State end;
  double time = 0.0;
};

// H flow from x0 until `event` changes sign (first crossing after leaving x0).
Leg h_to_event(const State& x0, const HamiltonianIntegrator::Event& event, int direction, double max_time,
               const SystemSpec& spec) {
  HamiltonianIntegrator integ(spec.hamiltonian, false);
  auto hit = integ.propagate_to_event(integ.start(x0), max_time, event, direction, 1e-6);
  if (!hit) throw NoConvergenceError("section map: flow did not reach the target surface");
  return {hit->x, hit->time};
}

// Driven flow from x0 until H - E returns to zero; integrated in pulled-back coordinates.
Leg driven_to_shell(const State& x0, double E, double tau, double max_time, const SystemSpec& spec) {
  const State y0 = flow(x0, -tau, FlowSpec::driver(), spec);
  auto push = [&](const State& y) { return flow(y, tau, FlowSpec::driver(), spec); };
  const Eigen::VectorXd gH = spec.hamiltonian.gradient(x0);
  const Eigen::VectorXd gD = driven_gradient(x0, tau, spec);
  const int n = spec.dof;
  // dH/dt along the driven flow = grad H . J grad H'.
  const double rate = gH.head(n).dot(gD.tail(n)) - gH.tail(n).dot(gD.head(n));
  const int direction = rate > 0 ? -1 : +1;
  HamiltonianIntegrator integ(spec.hamiltonian, false);
  auto hit = integ.propagate_to_event(
      integ.start(y0), max_time, [&](const State& y) { return spec.hamiltonian.value(push(y)) - E; }, direction, 1e-6);
  if (!hit) throw NoConvergenceError("section map: driven flow did not return to the E-shell");
  return {push(hit->x), hit->time};
}

struct MapResult {
  Eigen::VectorXd z;
  State x0, xb, xa, x3;
  double t1 = 0, t2 = 0, t3 = 0;
};

MapResult section_map(const Eigen::VectorXd& z, const TransitionQuery& q, const SystemSpec& spec,
                      const SectionSpec& sec, const SectionOptions& opt) {
  MapResult r;
  r.x0 = section_lift(z, q.E, sec, spec);
  const Leg l1 = h_to_event(
      r.x0, [&](const State& x) { return driven_hamiltonian(x, q.tau, spec) - q.E_prime; }, 0, opt.max_time, spec);
  r.xb = l1.end;
  r.t1 = l1.time;
  const Leg l2 = driven_to_shell(r.xb, q.E, q.tau, opt.max_time, spec);
  r.xa = l2.end;
  r.t2 = l2.time;
  const int k = sec.coordinate;
  const Leg l3 = h_to_event(
      r.xa, [&](const State& x) { return x[k] - sec.value; }, sec.direction >= 0 ? +1 : -1, opt.max_time, spec);
  r.x3 = l3.end;
  r.t3 = l3.time;
  r.z = section_coordinates(r.x3, sec);
  return r;
}

}  // namespace

PoincareFixedPoint product_section_fixed_point(const TransitionQuery& q, const SystemSpec& spec,
                                               const SectionSpec& section, const Eigen::VectorXd& seed,
                                               const SectionOptions& opt) {
  if (spec.dof < 2) throw DomainError("section fixed points need at least two degrees of freedom");
  if (section.coordinate < 0 || section.coordinate >= spec.dof) throw DomainError("section coordinate out of range");
  const int m = 2 * spec.dof - 2;
  Eigen::VectorXd z = seed;
  PoincareFixedPoint out;

  auto eval = [&](const Eigen::VectorXd& zz) {
    try {
      return section_map(zz, q, spec, section, opt);
    } catch (const DomainError& e) {
      throw NoConvergenceError(std::string("section map undefined: ") + e.what());
    } catch (const EscapeError& e) {
      throw NoConvergenceError(std::string("section map escaped: ") + e.what());
    }
  };
  auto jacobian = [&](const Eigen::VectorXd& zz) {
    Eigen::MatrixXd D(m, m);
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd zp = zz, zm = zz;
      zp[i] += opt.fd_step;
      zm[i] -= opt.fd_step;
      D.col(i) = (eval(zp).z - eval(zm).z) / (2 * opt.fd_step);
    }
    return D;
  };

  MapResult r = eval(z);
  double res = (r.z - z).norm();
  int it = 0;
  while (res >= opt.tolerance) {
    if (it >= opt.max_iterations) throw NoConvergenceError("section Newton search did not converge in 50 iterations");
    const Eigen::MatrixXd D = jacobian(z);
    const Eigen::MatrixXd A = D - Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd dz = A.fullPivLu().solve(-(r.z - z));
    if (!dz.allFinite()) throw NoConvergenceError("singular Newton step on the section");
    // Damp steps that leave the map's domain.
    double lambda = 1.0;
    while (true) {
      try {
        MapResult trial = eval(z + lambda * dz);
        const double tres = (trial.z - (z + lambda * dz)).norm();
        if (tres < res || lambda < 1.0 / 64) {
          z += lambda * dz;
          r = trial;
          res = tres;
          break;
        }
      } catch (const NoConvergenceError&) {
        if (lambda < 1.0 / 64) throw;
      }
      lambda *= 0.5;
    }
    ++it;
  }

  out.iterations = it;
  out.residual = res;
  out.point = r.x0;
  out.m = jacobian(z);
  out.det_one_minus_m = (Eigen::MatrixXd::Identity(m, m) - out.m).determinant();
  if (std::abs(out.det_one_minus_m) < 1e-8) out.warnings.push_back("degenerate family: det[I - m] is near zero");
  out.t = r.t1 + r.t3;
  out.t_prime = r.t2;
  out.action = segment(r.x0, r.t1, FlowSpec::intrinsic(), spec, false).action +
               segment(r.xb, r.t2, FlowSpec::driven(q.tau), spec, false).action +
               segment(r.xa, r.t3, FlowSpec::intrinsic(), spec, false).action;
  return out;
}

}  // namespace ctrace
