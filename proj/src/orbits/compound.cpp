#include <cstdio>
#include <map>

#include "ctrace/symplectic.hpp"
#include "detail.hpp"

namespace ctrace {

int default_j_max(double period, const TransitionQuery& q, const SystemSpec& spec, double damping_cutoff) {
  if (!(period > 0)) return 0;
  const double j = spec.hbar * std::log(1.0 / damping_cutoff) / (q.epsilon() * period);
  return std::max(0, static_cast<int>(std::ceil(j)));
}

namespace {

double wrap_period(double x, double T) {
  double r = std::fmod(x, T);
  if (r < 0) r += T;
  return r;
}

std::vector<ArcTime> arcs_on(const std::vector<ShellIntersection>& xs, bool driven, double T, int j_max) {
  std::vector<ArcTime> out;
  const int n = static_cast<int>(xs.size());
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const bool same = driven ? xs[a].driven_component == xs[b].driven_component
                               : xs[a].component == xs[b].component;
      if (!same) continue;
      const double pa = driven ? xs[a].driven_phase : xs[a].phase;
      const double pb = driven ? xs[b].driven_phase : xs[b].phase;
      if (a == b) {
        for (int j = -j_max; j <= j_max; ++j) out.push_back({a, b, j, j * T});
      } else {
        const double base = wrap_period(pb - pa, T);
        for (int j = -(j_max + 1); j <= j_max; ++j) out.push_back({a, b, j, base + j * T});
      }
    }
  }
  return out;
}

}  // namespace

SegmentCatalogue segment_times(const std::vector<ShellIntersection>& xs, const TransitionQuery& q,
                               const SystemSpec& spec, int j_max, const OrbitOptions& opt) {
  if (xs.empty()) return {};
  SegmentCatalogue cat;
  const ShellContour e = trace_contour(q.E, FlowSpec::intrinsic(), spec, opt.contour);
  const ShellContour d = trace_contour(q.E_prime, FlowSpec::driven(q.tau), spec, opt.contour);
  cat.period = e.period;
  cat.driven_period = d.period;
  cat.j_max = j_max;
  cat.arcs = arcs_on(xs, false, cat.period, j_max);
  cat.driven_arcs = arcs_on(xs, true, cat.driven_period, j_max);
  return cat;
}

std::vector<Eigen::MatrixXd> orbit_monodromy_path(const CompoundOrbit& o, const SystemSpec& spec,
                                                  int samples_per_unit_time) {
  const int n1 = std::max(16, static_cast<int>(std::ceil(std::abs(o.t) * samples_per_unit_time)));
  const int n2 = std::max(16, static_cast<int>(std::ceil(std::abs(o.t_prime) * samples_per_unit_time)));
  std::vector<Eigen::MatrixXd> path = monodromy_path(o.start.point, o.t, FlowSpec::intrinsic(), spec, n1);
  const Eigen::MatrixXd Mt = path.back();
  const auto second = monodromy_path(o.end.point, o.t_prime, FlowSpec::driven(o.tau), spec, n2);
  for (std::size_t i = 1; i < second.size(); ++i) path.push_back(second[i] * Mt);
  return path;
}

Eigen::MatrixXd rebased_monodromy(const CompoundOrbit& o) { return o.monodromy_e * o.monodromy_driven; }

std::vector<CompoundOrbit> compound_orbits(const TransitionQuery& q, const SystemSpec& spec, const OrbitOptions& opt) {
  const detail::IntersectionSet set = detail::compute_intersections(q, spec, opt);
  std::vector<CompoundOrbit> out;
  if (set.points.empty()) return out;

  double Tmin = std::numeric_limits<double>::infinity();
  for (const auto& c : set.shells) Tmin = std::min(Tmin, c.period);
  for (const auto& c : set.driven_shells) Tmin = std::min(Tmin, c.period);
  const int j_max = opt.j_max >= 0 ? opt.j_max : default_j_max(Tmin, q, spec, opt.damping_cutoff);

  std::vector<ArcTime> arcs, darcs;
  for (std::size_t ci = 0; ci < set.shells.size(); ++ci) {
    for (const auto& arc : arcs_on(set.points, false, set.shells[ci].period, j_max))
      if (set.points[arc.from].component == static_cast<int>(ci)) arcs.push_back(arc);
  }
  for (std::size_t di = 0; di < set.driven_shells.size(); ++di)
    for (const auto& arc : arcs_on(set.points, true, set.driven_shells[di].period, j_max))
      if (set.points[arc.from].driven_component == static_cast<int>(di)) darcs.push_back(arc);

  const double hbar = spec.hbar, eps = q.epsilon();
  for (const auto& e : arcs) {
    for (const auto& d : darcs) {
      if (d.from != e.to || d.to != e.from) continue;
      if (e.time == 0.0 && d.time == 0.0) continue;
      const double damping = std::exp(-eps * (std::abs(e.time) + std::abs(d.time)) / hbar);
      if (damping < opt.damping_cutoff) continue;

      CompoundOrbit o;
      o.E = q.E;
      o.E_prime = q.E_prime;
      o.tau = q.tau;
      o.a = e.from;
      o.b = e.to;
      o.start = set.points[o.a];
      o.end = set.points[o.b];
      o.j = e.winding;
      o.j_prime = d.winding;
      o.t = e.time;
      o.t_prime = d.time;
      o.damping = damping;

      const Segment s1 = segment(o.start.point, o.t, FlowSpec::intrinsic(), spec, true);
      const Segment s2 = segment(o.end.point, o.t_prime, FlowSpec::driven(q.tau), spec, true);
      o.closure_error = std::max((s1.end - o.end.point).norm(), (s2.end - o.start.point).norm());
      if (o.closure_error > opt.closure_tol) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "compound orbit (%d,%d,%d,%d) fails to close: %.3g", o.a, o.b, o.j, o.j_prime,
                      o.closure_error);
        throw ClosureError(buf);
      }
      o.monodromy_e = s1.monodromy;
      o.monodromy_driven = s2.monodromy;
      o.monodromy = s2.monodromy * s1.monodromy;
      o.action_energy = s1.action + s2.action;
      o.action_time = o.action_energy - q.E * o.t - q.E_prime * o.t_prime;
      o.det_one_minus_M = det_one_minus(o.monodromy);

      if (o.start.tangency || o.end.tangency) {
        o.near_caustic = true;
        o.warnings.push_back("endpoint at shell tangency");
      }
      if (o.a == o.b && (o.j == 0 || o.j_prime == 0)) {
        o.near_caustic = true;
        o.warnings.push_back("degenerate orbit: one segment is a whole number of periods");
      }
      if (std::abs(o.det_one_minus_M) < opt.caustic_threshold) {
        o.near_caustic = true;
        o.warnings.push_back("det[I - M] below caustic threshold");
      }
      const auto path = orbit_monodromy_path(o, spec);
      const CausticCount cc = caustic_counter(path);
      o.caustic_index = cc.count;
      o.trace_phase = metaplectic_trace_phase(path);
      if (cc.endpoint_zero && !o.near_caustic) {
        o.near_caustic = true;
        o.warnings.push_back("det[I - M] vanishes at the orbit endpoint");
      }
      if (opt.compute_jacobian && !o.near_caustic) {
        try {
          const JacobianResult jr = jacobian_times_energies(o, q, spec, false);
          o.jacobian_tE = jr.matrix;
          o.jacobian_det = jr.det;
        } catch (const Error& err) {
          o.near_caustic = true;
          o.warnings.push_back(std::string("jacobian: ") + err.what());
        }
      }
      o.representative = o.t > 0 || (o.t == 0 && o.t_prime > 0);
      out.push_back(std::move(o));
    }
  }

  std::map<std::tuple<int, int, int, int>, int> index;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].id = static_cast<int>(i);
    index[{out[i].a, out[i].b, out[i].j, out[i].j_prime}] = static_cast<int>(i);
  }
  for (auto& o : out) {
    const auto key = o.a == o.b ? std::make_tuple(o.a, o.a, -o.j, -o.j_prime)
                                : std::make_tuple(o.b, o.a, -1 - o.j, -1 - o.j_prime);
    if (auto it = index.find(key); it != index.end()) o.partner = it->second;
  }
  return out;
}

OrbitGeometry resolve_orbit(const CompoundOrbit& o, double E1, double E1_prime, const SystemSpec& spec,
                            double closure_tol) {
  OrbitGeometry g;
  g.a = o.start.point;
  g.b = o.end.point;
  if (!detail::polish_intersection(g.a, E1, E1_prime, o.tau, spec))
    throw BifurcationError("intersection lost (shells tangent) at displaced energies");
  if (o.a == o.b) {
    g.b = g.a;
  } else if (!detail::polish_intersection(g.b, E1, E1_prime, o.tau, spec)) {
    throw BifurcationError("intersection lost (shells tangent) at displaced energies");
  }
  const double jump = std::max(1e-2, 20 * std::max(std::abs(E1 - o.E), std::abs(E1_prime - o.E_prime)));
  if ((g.a - o.start.point).norm() > jump || (g.b - o.end.point).norm() > jump)
    throw BifurcationError("intersection jumped under energy perturbation");
  State reached;
  g.t = detail::time_to_point(g.a, g.b, o.t, FlowSpec::intrinsic(), spec, reached);
  if ((reached - g.b).norm() > closure_tol) throw BifurcationError("E-segment does not reconnect after perturbation");
  g.t_prime = detail::time_to_point(g.b, g.a, o.t_prime, FlowSpec::driven(o.tau), spec, reached);
  if ((reached - g.a).norm() > closure_tol)
    throw BifurcationError("driven segment does not reconnect after perturbation");
  g.action = segment(g.a, g.t, FlowSpec::intrinsic(), spec, false).action +
             segment(g.b, g.t_prime, FlowSpec::driven(o.tau), spec, false).action;
  return g;
}

JacobianResult jacobian_times_energies(const CompoundOrbit& o, const TransitionQuery& q, const SystemSpec& spec,
                                       bool with_inverse) {
  JacobianResult r;
  const double h = std::max(1e-5, 1e-4 * q.epsilon());
  r.step = h;
  const OrbitGeometry ep = resolve_orbit(o, q.E + h, q.E_prime, spec);
  const OrbitGeometry em = resolve_orbit(o, q.E - h, q.E_prime, spec);
  const OrbitGeometry fp = resolve_orbit(o, q.E, q.E_prime + h, spec);
  const OrbitGeometry fm = resolve_orbit(o, q.E, q.E_prime - h, spec);
  r.matrix << (ep.t - em.t) / (2 * h), (fp.t - fm.t) / (2 * h), (ep.t_prime - em.t_prime) / (2 * h),
      (fp.t_prime - fm.t_prime) / (2 * h);
  r.det = r.matrix.determinant();
  if (with_inverse) {
    CompoundOrbit base = o;
    base.jacobian_tE = r.matrix;
    const double ht = h * std::max(1.0, r.matrix.cwiseAbs().maxCoeff());
    const auto a = energies_for_times(base, o.t + ht, o.t_prime, spec);
    const auto b = energies_for_times(base, o.t - ht, o.t_prime, spec);
    const auto c = energies_for_times(base, o.t, o.t_prime + ht, spec);
    const auto d = energies_for_times(base, o.t, o.t_prime - ht, spec);
    Eigen::Matrix2d K;
    K << (a.first - b.first) / (2 * ht), (c.first - d.first) / (2 * ht), (a.second - b.second) / (2 * ht),
        (c.second - d.second) / (2 * ht);
    r.inverse_det = K.determinant();
  }
  return r;
}

CompoundOrbit displaced_orbit(const CompoundOrbit& o, double E1, double E1_prime, const SystemSpec& spec,
                              bool with_jacobian) {
  const OrbitGeometry g = resolve_orbit(o, E1, E1_prime, spec);
  CompoundOrbit d = o;
  d.E = E1;
  d.E_prime = E1_prime;
  d.start.point = g.a;
  d.end.point = g.b;
  d.t = g.t;
  d.t_prime = g.t_prime;
  const Segment s1 = segment(g.a, g.t, FlowSpec::intrinsic(), spec, true);
  const Segment s2 = segment(g.b, g.t_prime, FlowSpec::driven(o.tau), spec, true);
  d.monodromy_e = s1.monodromy;
  d.monodromy_driven = s2.monodromy;
  d.monodromy = s2.monodromy * s1.monodromy;
  d.action_energy = s1.action + s2.action;
  d.action_time = d.action_energy - E1 * d.t - E1_prime * d.t_prime;
  d.det_one_minus_M = det_one_minus(d.monodromy);
  if (with_jacobian) {
    const TransitionQuery q1(E1, E1_prime, o.tau, SmoothingWindow(1.0));
    const JacobianResult jr = jacobian_times_energies(d, q1, spec, false);
    d.jacobian_tE = jr.matrix;
    d.jacobian_det = jr.det;
  }
  return d;
}

EnergyLineDerivatives energy_line_derivatives(const CompoundOrbit& o, const SystemSpec& spec, double step) {
  const Eigen::Vector2d s((o.t > 0) - (o.t < 0), (o.t_prime > 0) - (o.t_prime < 0));
  auto sample = [&](double lambda) {
    const CompoundOrbit d =
        lambda == 0.0 ? o : displaced_orbit(o, o.E + lambda * s[0], o.E_prime + lambda * s[1], spec);
    const double g = s.dot(d.jacobian_tE * s);
    const double a = 0.5 * std::log(std::abs(d.jacobian_det)) - 0.5 * std::log(std::abs(d.det_one_minus_M));
    return std::make_pair(g, a);
  };
  const auto m2 = sample(-2 * step), m1 = sample(-step), z = sample(0.0), p1 = sample(step), p2 = sample(2 * step);
  const double h = step;
  EnergyLineDerivatives r;
  r.step = step;
  r.g = z.first;
  // Fourth-order central differences.
  r.dg = (m2.first - 8 * m1.first + 8 * p1.first - p2.first) / (12 * h);
  r.d2g = (-m2.first + 16 * m1.first - 30 * z.first + 16 * p1.first - p2.first) / (12 * h * h);
  r.da = (m2.second - 8 * m1.second + 8 * p1.second - p2.second) / (12 * h);
  r.d2a = (-m2.second + 16 * m1.second - 30 * z.second + 16 * p1.second - p2.second) / (12 * h * h);
  return r;
}

std::pair<double, double> energies_for_times(const CompoundOrbit& o, double t, double t_prime,
                                             const SystemSpec& spec) {
  if (std::abs(o.jacobian_tE.determinant()) < 1e-14)
    throw BifurcationError("time-energy Jacobian is singular; energies cannot be solved for");
  const Eigen::Matrix2d Jinv = o.jacobian_tE.inverse();
  Eigen::Vector2d e(o.E, o.E_prime);
  for (int it = 0; it < 60; ++it) {
    const OrbitGeometry g = resolve_orbit(o, e[0], e[1], spec);
    const Eigen::Vector2d r(g.t - t, g.t_prime - t_prime);
    e -= Jinv * r;
    if (r.norm() < 1e-13 * std::max(1.0, std::abs(t) + std::abs(t_prime))) return {e[0], e[1]};
  }
  throw NoConvergenceError("energies for prescribed segment times did not converge");
}

}  // namespace ctrace
