#include "ctrace/contour.hpp"

#include <boost/math/tools/roots.hpp>

namespace ctrace {

namespace {

// Right-hand roots of H - E along an axis: points where H - E turns positive
// going outward in +direction, i.e. the exit edge of a sublevel interval.
std::vector<State> axis_seeds(double E, const PhaseFunction& H, int axis, const ContourOptions& opt) {
  std::vector<State> out;
  const int n = opt.scan_points;
  const double w = opt.search_half_width;
  auto at = [&](double s) {
    State x = State::Zero(2);
    x[axis] = s;
    return x;
  };
  auto f = [&](double s) { return H.value(at(s)) - E; };
  double s0 = -w, f0 = f(s0);
  for (int i = 1; i < n; ++i) {
    const double s1 = -w + 2 * w * i / (n - 1);
    const double f1 = f(s1);
    if (f0 < 0 && f1 >= 0) {
      std::uintmax_t iters = 200;
      auto r = boost::math::tools::toms748_solve(f, s0, s1, f0, f1, boost::math::tools::eps_tolerance<double>(52),
                                                 iters);
      out.push_back(at(0.5 * (r.first + r.second)));
    }
    s0 = s1;
    f0 = f1;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

ShellContour trace_from_seed(double E, FlowSpec which, const SystemSpec& spec, const State& seed,
                             const ContourOptions& opt) {
  IntegratorOptions io = opt.integrator;
  io.escape_norm = opt.box_half_width;
  HamiltonianIntegrator integ(spec.hamiltonian, false, io);
  const Eigen::VectorXd g = spec.hamiltonian.gradient(seed);
  Eigen::Vector2d v(g[1], -g[0]);
  if (v.norm() == 0) throw TopologyError("seed is an equilibrium point; shell degenerates");
  auto event = [&](const State& x) { return (x - seed).dot(v); };
  const double accept = 1e-3 * std::max(1.0, seed.norm());

  FlowState cur = integ.start(seed);
  double period = 0.0;
  try {
    while (true) {
      auto hit = integ.propagate_to_event(cur, opt.max_period - cur.time, event, +1, 1e-8);
      if (!hit) throw TopologyError("energy shell does not close within the maximum period");
      cur = *hit;
      if ((cur.x - seed).norm() < accept) {
        period = cur.time;
        break;
      }
    }
  } catch (const EscapeError&) {
    throw TopologyError("energy shell is not compact (trajectory left the search box)");
  }

  ShellContour c;
  c.energy = E;
  c.which = which;
  c.period = period;
  c.closure_error = (cur.x - seed).norm();
  if (c.closure_error > opt.closure_tol)
    throw ClosureError("contour failed to close: return distance " + std::to_string(c.closure_error));
  const auto samples = integ.sample(integ.start(seed), period, opt.samples);
  c.max_drift = integ.last_drift();
  c.action = integ.propagate(integ.start(seed), period).action;
  for (const auto& s : samples) {
    c.times.push_back(s.time);
    c.base_points.push_back(s.x);
  }
  if (which.kind == FlowKind::driven && which.tau != 0.0) {
    for (const auto& y : c.base_points) c.points.push_back(flow(y, which.tau, FlowSpec::driver(), spec, opt.integrator));
  } else {
    c.points = c.base_points;
  }
  c.seed = c.points.front();
  return c;
}

bool on_contour(const ShellContour& c, const State& y) {
  double best = std::numeric_limits<double>::infinity();
  double spacing = 0.0;
  for (std::size_t i = 0; i < c.base_points.size(); ++i) {
    best = std::min(best, (c.base_points[i] - y).norm());
    if (i) spacing = std::max(spacing, (c.base_points[i] - c.base_points[i - 1]).norm());
  }
  return best < spacing;
}

}  // namespace

std::vector<ShellContour> shell_components(double E, FlowSpec which, const SystemSpec& spec,
                                           const ContourOptions& opt) {
  if (spec.dof != 1) throw DomainError("contour tracing requires one degree of freedom");
  if (!std::isfinite(E)) throw DomainError("shell energy is not finite");
  if (which.kind == FlowKind::driver) throw DomainError("contours are traced for H or H(.|tau) only");
  std::vector<State> seeds = axis_seeds(E, spec.hamiltonian, 0, opt);
  if (seeds.empty()) seeds = axis_seeds(E, spec.hamiltonian, 1, opt);
  if (seeds.empty()) throw EmptyShellError("no energy shell at E = " + std::to_string(E));
  std::vector<ShellContour> out;
  for (const auto& s : seeds) {
    bool known = false;
    for (const auto& c : out) known = known || on_contour(c, s);
    if (!known) out.push_back(trace_from_seed(E, which, spec, s, opt));
  }
  return out;
}

ShellContour trace_contour(double E, FlowSpec which, const SystemSpec& spec, const ContourOptions& opt) {
  if (spec.dof != 1) throw DomainError("contour tracing requires one degree of freedom");
  std::vector<State> seeds = axis_seeds(E, spec.hamiltonian, 0, opt);
  if (seeds.empty()) seeds = axis_seeds(E, spec.hamiltonian, 1, opt);
  if (seeds.empty()) throw EmptyShellError("no energy shell at E = " + std::to_string(E));
  return trace_from_seed(E, which, spec, seeds.front(), opt);
}

double contour_phase(const ShellContour& c, const State& x, const SystemSpec& spec) {
  State y = x;
  if (c.which.kind == FlowKind::driven && c.which.tau != 0.0) y = flow(x, -c.which.tau, FlowSpec::driver(), spec);
  std::size_t k = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < c.base_points.size(); ++i) {
    const double d = (c.base_points[i] - y).norm();
    if (d < best) {
      best = d;
      k = i;
    }
  }
  double s = 0.0;
  for (int it = 0; it < 12; ++it) {
    const State z = flow(c.base_points[k], s, FlowSpec::intrinsic(), spec);
    const Eigen::VectorXd g = spec.hamiltonian.gradient(z);
    Eigen::Vector2d v(g[1], -g[0]);
    const double ds = (z - y).dot(v) / v.squaredNorm();
    s -= ds;
    if (std::abs(ds) < 1e-15 * c.period) break;
  }
  double phase = std::fmod(c.times[k] + s, c.period);
  if (phase < 0) phase += c.period;
  return phase;
}

State contour_point(const ShellContour& c, double s, const SystemSpec& spec) {
  double r = std::fmod(s, c.period);
  if (r < 0) r += c.period;
  const double h = c.period / (c.times.size() - 1);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(r / h), c.times.size() - 2);
  State y = flow(c.base_points[k], r - c.times[k], FlowSpec::intrinsic(), spec);
  if (c.which.kind == FlowKind::driven && c.which.tau != 0.0) y = flow(y, c.which.tau, FlowSpec::driver(), spec);
  return y;
}

}  // namespace ctrace
