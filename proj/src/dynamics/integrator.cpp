#include "ctrace/integrator.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

namespace ctrace {

namespace odeint = boost::numeric::odeint;

namespace {

using Vec = std::vector<double>;

struct Rhs {
  const PhaseFunction& F;
  int n;
  bool tangent;
  double sign;

  void operator()(const Vec& y, Vec& dy, double /*t*/) const {
    const int d = 2 * n;
    Eigen::Map<const Eigen::VectorXd> x(y.data(), d);
    const Eigen::VectorXd g = F.gradient(x);
    Eigen::Map<Eigen::VectorXd> dx(dy.data(), d);
    dx.head(n) = sign * g.tail(n);
    dx.tail(n) = -sign * g.head(n);
    std::size_t off = d;
    if (tangent) {
      const Eigen::MatrixXd h = F.hessian(x);
      Eigen::MatrixXd jh(d, d);
      jh.topRows(n) = h.bottomRows(n);
      jh.bottomRows(n) = -h.topRows(n);
      Eigen::Map<const Eigen::MatrixXd> M(y.data() + off, d, d);
      Eigen::Map<Eigen::MatrixXd> dM(dy.data() + off, d, d);
      dM = sign * (jh * M);
      off += static_cast<std::size_t>(d) * d;
    }
    dy[off] = sign * x.tail(n).dot(g.tail(n));
  }
};

}  // namespace

HamiltonianIntegrator::HamiltonianIntegrator(const PhaseFunction& F, bool tangent, IntegratorOptions options)
    : F_(F), tangent_(tangent), dof_(F.dof()), opt_(options) {
  if (dof_ < 1) throw DomainError("integrator needs a phase function with dof >= 1");
}

FlowState HamiltonianIntegrator::start(const State& x0) const {
  if (x0.size() != 2 * dof_) throw DomainError("initial state has wrong dimension");
  if (!x0.allFinite()) throw DomainError("initial state is not finite");
  FlowState s;
  s.x = x0;
  if (tangent_) s.M = Eigen::MatrixXd::Identity(2 * dof_, 2 * dof_);
  return s;
}

template <class Stop>
FlowState HamiltonianIntegrator::run(const FlowState& s, double duration, Stop&& stop) const {
  if (!std::isfinite(duration)) throw DomainError("integration time is not finite");
  const int d = 2 * dof_;
  const std::size_t msize = tangent_ ? static_cast<std::size_t>(d) * d : 0;
  Vec y(d + msize + 1);
  std::copy(s.x.data(), s.x.data() + d, y.begin());
  if (tangent_) {
    if (s.M.rows() != d) throw DomainError("tangent integration needs a tangent map in the state");
    std::copy(s.M.data(), s.M.data() + msize, y.begin() + d);
  }
  y.back() = s.action;

  const double sign = duration < 0 ? -1.0 : 1.0;
  const double total = std::abs(duration);
  Rhs rhs{F_, dof_, tangent_, sign};

  auto unpack = [&](const Vec& v, double elapsed) {
    FlowState out;
    out.x = Eigen::Map<const Eigen::VectorXd>(v.data(), d);
    if (tangent_) out.M = Eigen::Map<const Eigen::MatrixXd>(v.data() + d, d, d);
    out.action = v.back();
    out.time = s.time + sign * elapsed;
    return out;
  };

  const double e0 = F_.value(s.x);
  last_drift_ = 0.0;
  last_steps_ = 0;
  if (total == 0.0) return unpack(y, 0.0);

  auto controlled = odeint::make_controlled(opt_.abs_tol, opt_.rel_tol, odeint::runge_kutta_dopri5<Vec>());
  double t = 0.0;
  double dt = std::min(opt_.initial_step, total);
  Vec prev;
  while (t < total) {
    double step = std::min(dt, total - t);
    const bool clamped = step < dt;
    prev = y;
    const double t_prev = t;
    const double natural = dt;
    if (controlled.try_step(rhs, y, t, step) == odeint::fail) {
      dt = step;
      if (dt < opt_.min_step)
        throw EscapeError("step size underflow", Eigen::Map<const Eigen::VectorXd>(prev.data(), d), s.time + sign * t);
      continue;
    }
    dt = clamped ? natural : step;
    if (++last_steps_ > opt_.max_steps)
      throw EscapeError("integration step budget exhausted", Eigen::Map<const Eigen::VectorXd>(y.data(), d),
                        s.time + sign * t);
    Eigen::Map<const Eigen::VectorXd> x(y.data(), d);
    if (!x.allFinite() || x.lpNorm<Eigen::Infinity>() > opt_.escape_norm)
      throw EscapeError("trajectory escaped the admissible region", Eigen::Map<const Eigen::VectorXd>(prev.data(), d),
                        s.time + sign * t_prev);
    last_drift_ = std::max(last_drift_, std::abs(F_.value(x) - e0));

    if (auto hit = stop(rhs, prev, t_prev, y, t)) return unpack(hit->first, hit->second);
  }
  return unpack(y, t);
}

FlowState HamiltonianIntegrator::propagate(const FlowState& s, double duration) const {
  return run(s, duration, [](auto&, const Vec&, double, const Vec&, double) -> std::optional<std::pair<Vec, double>> {
    return std::nullopt;
  });
}

std::optional<FlowState> HamiltonianIntegrator::propagate_to_event(const FlowState& s, double duration,
                                                                   const Event& event, int direction,
                                                                   double min_duration) const {
  const int d = 2 * dof_;
  bool found = false;
  auto g_of = [&](const Vec& v) { return event(Eigen::Map<const Eigen::VectorXd>(v.data(), d)); };
  auto stop = [&](const Rhs& rhs, const Vec& prev, double t0, const Vec& cur,
                  double t1) -> std::optional<std::pair<Vec, double>> {
    if (t1 <= std::abs(min_duration)) return std::nullopt;
    const double g0 = g_of(prev), g1 = g_of(cur);
    const bool up = g0 < 0 && g1 >= 0, down = g0 > 0 && g1 <= 0;
    if (!((direction >= 0 && up) || (direction <= 0 && down))) return std::nullopt;
    odeint::runge_kutta_dopri5<Vec> stepper;
    Vec tmp(prev.size());
    auto at = [&](double h) {
      if (h <= 0) return prev;
      stepper.reset();
      stepper.do_step(rhs, prev, t0, tmp, h);
      return tmp;
    };
    auto f = [&](double h) { return g_of(at(h)); };
    double lo = std::max(0.0, std::abs(min_duration) - t0);
    double flo = f(lo);
    if ((up && flo >= 0) || (down && flo <= 0)) return std::nullopt;
    std::uintmax_t iters = 100;
    auto r = boost::math::tools::toms748_solve(f, lo, t1 - t0, flo, g1, boost::math::tools::eps_tolerance<double>(52),
                                               iters);
    const double h = 0.5 * (r.first + r.second);
    found = true;
    return std::make_pair(at(h), t0 + h);
  };
  FlowState out = run(s, duration, stop);
  if (!found) return std::nullopt;
  return out;
}

std::vector<FlowState> HamiltonianIntegrator::sample(const FlowState& s, double duration, int n) const {
  if (n < 1) throw DomainError("sample count must be positive");
  std::vector<FlowState> out;
  out.reserve(n + 1);
  out.push_back(s);
  double drift = 0.0;
  long steps = 0;
  for (int i = 1; i <= n; ++i) {
    const double target = s.time + duration * i / n;
    out.push_back(propagate(out.back(), target - out.back().time));
    out.back().time = target;
    drift = std::max(drift, last_drift_ + std::abs(F_.value(out[i - 1].x) - F_.value(s.x)));
    steps += last_steps_;
  }
  last_drift_ = drift;
  last_steps_ = steps;
  return out;
}

}  // namespace ctrace
