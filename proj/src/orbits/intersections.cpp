#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "detail.hpp"

namespace ctrace {

namespace detail {

bool polish_intersection(State& x, double E, double E_prime, double tau, const SystemSpec& spec) {
  for (int it = 0; it < 30; ++it) {
    const double r1 = spec.hamiltonian.value(x) - E;
    const double r2 = driven_hamiltonian(x, tau, spec) - E_prime;
    Eigen::Matrix2d J;
    J.row(0) = spec.hamiltonian.gradient(x).transpose();
    J.row(1) = driven_gradient(x, tau, spec).transpose();
    const double det = J.determinant();
    if (std::abs(det) < 1e-14 * J.row(0).norm() * J.row(1).norm()) return false;
    const Eigen::Vector2d dx = J.inverse() * Eigen::Vector2d(r1, r2);
    x -= dx;
    if (dx.norm() < 1e-15 * std::max(1.0, x.norm())) break;
  }
  return true;
}

double time_to_point(const State& x0, const State& target, double guess, FlowSpec which, const SystemSpec& spec,
                     State& reached) {
  double s = guess;
  State z = flow(x0, s, which, spec);
  for (int it = 0; it < 20; ++it) {
    const Eigen::VectorXd g = flow_gradient(z, which, spec);
    const int n = spec.dof;
    Eigen::VectorXd v(2 * n);
    v.head(n) = g.tail(n);
    v.tail(n) = -g.head(n);
    const double ds = -(z - target).dot(v) / v.squaredNorm();
    s += ds;
    z = flow(z, ds, which, spec);
    if (std::abs(ds) < 1e-14 * std::max(1.0, std::abs(s))) break;
  }
  reached = z;
  return s;
}

namespace {

double grazing_angle(const State& x, double tau, const SystemSpec& spec) {
  const Eigen::VectorXd g1 = spec.hamiltonian.gradient(x);
  const Eigen::VectorXd g2 = driven_gradient(x, tau, spec);
  const double c = std::min(1.0, std::abs(g1.dot(g2)) / (g1.norm() * g2.norm()));
  return std::acos(c);
}

}  // namespace

IntersectionSet compute_intersections(const TransitionQuery& q, const SystemSpec& spec, const OrbitOptions& opt) {
  if (spec.dof != 1) throw DomainError("shell intersections are computed for one degree of freedom");
  IntersectionSet set;
  set.shells = shell_components(q.E, FlowSpec::intrinsic(), spec, opt.contour);
  set.driven_shells = shell_components(q.E_prime, FlowSpec::driven(q.tau), spec, opt.contour);
  const double tol = 1e-9 * std::max(1.0, std::abs(q.E_prime));

  for (std::size_t ci = 0; ci < set.shells.size(); ++ci) {
    const ShellContour& c = set.shells[ci];
    const std::size_t n = c.points.size() - 1;
    std::vector<double> g(n + 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = driven_hamiltonian(c.points[i], q.tau, spec) - q.E_prime;
    g[n] = g[0];
    bool all_zero = true;
    for (double v : g) all_zero = all_zero && std::abs(v) < tol;
    if (all_zero) throw DomainError("shells coincide; intersections are not isolated");

    auto gs = [&](double s) { return driven_hamiltonian(contour_point(c, s, spec), q.tau, spec) - q.E_prime; };
    std::vector<double> roots;
    std::vector<bool> touching;
    for (std::size_t i = 0; i < n; ++i) {
      if (g[i] == 0.0) {
        roots.push_back(c.times[i]);
        touching.push_back(false);
        continue;
      }
      if (g[i] * g[i + 1] < 0) {
        std::uintmax_t iters = 200;
        auto r = boost::math::tools::toms748_solve(gs, c.times[i], c.times[i + 1], g[i], g[i + 1],
                                                   boost::math::tools::eps_tolerance<double>(52), iters);
        roots.push_back(0.5 * (r.first + r.second));
        touching.push_back(false);
      }
    }
    // Touching zeros: local minima of |g| with no sign change nearby.
    for (std::size_t i = 0; i < n; ++i) {
      const double gm = g[(i + n - 1) % n], g0 = g[i], gp = g[i + 1];
      if (!(std::abs(g0) <= std::abs(gm) && std::abs(g0) <= std::abs(gp))) continue;
      if (gm * g0 <= 0 || g0 * gp <= 0) continue;
      const double lo = c.times[i] - (c.times[1] - c.times[0]);
      const double hi = c.times[i + 1];
      auto r = boost::math::tools::brent_find_minima([&](double s) { return std::abs(gs(s)); }, lo, hi, 40);
      if (r.second < tol) {
        roots.push_back(r.first < 0 ? r.first + c.period : r.first);
        touching.push_back(true);
      }
    }

    for (std::size_t k = 0; k < roots.size(); ++k) {
      ShellIntersection si;
      si.point = contour_point(c, roots[k], spec);
      si.component = static_cast<int>(ci);
      if (!touching[k]) polish_intersection(si.point, q.E, q.E_prime, q.tau, spec);
      si.grazing_angle = grazing_angle(si.point, q.tau, spec);
      si.tangency = touching[k] || si.grazing_angle < opt.tangency_angle;
      bool dup = false;
      for (const auto& other : set.points) dup = dup || (other.point - si.point).norm() < 1e-7;
      if (dup) continue;
      si.phase = contour_phase(c, si.point, spec);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t di = 0; di < set.driven_shells.size(); ++di) {
        for (const auto& p : set.driven_shells[di].points) {
          const double d = (p - si.point).norm();
          if (d < best) {
            best = d;
            si.driven_component = static_cast<int>(di);
          }
        }
      }
      si.driven_phase = contour_phase(set.driven_shells[si.driven_component], si.point, spec);
      set.points.push_back(si);
    }
  }
  std::sort(set.points.begin(), set.points.end(), [](const ShellIntersection& x, const ShellIntersection& y) {
    return x.component != y.component ? x.component < y.component : x.phase < y.phase;
  });
  return set;
}

}  // namespace detail

std::vector<ShellIntersection> shell_intersections(const TransitionQuery& q, const SystemSpec& spec,
                                                   const OrbitOptions& opt) {
  return detail::compute_intersections(q, spec, opt).points;
}

}  // namespace ctrace
