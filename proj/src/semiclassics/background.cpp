#include <functional>

#include "ctrace/flow.hpp"
#include "ctrace/semiclassics.hpp"

namespace ctrace {

namespace {

struct Box {
  Eigen::VectorXd lo, hi;
};

void grow(Box& b, const State& x) {
  if (b.lo.size() == 0) {
    b.lo = b.hi = x;
    return;
  }
  b.lo = b.lo.cwiseMin(x);
  b.hi = b.hi.cwiseMax(x);
}

// Extent of {f <= level} along each coordinate axis through the origin.
void axis_extent(Box& b, const std::function<double(const State&)>& f, double level, int dim) {
  const int n = 4001;
  const double w = 50.0;
  for (int k = 0; k < dim; ++k) {
    for (int i = 0; i < n; ++i) {
      State x = State::Zero(dim);
      x[k] = -w + 2 * w * i / (n - 1);
      if (f(x) <= level) grow(b, x);
    }
  }
}

Box auto_box(const TransitionQuery& q, const SystemSpec& spec, const BackgroundOptions& opt) {
  const double cut_e = q.E + opt.tail_widths * q.epsilon();
  const double cut_f = q.E_prime + opt.tail_widths * q.epsilon();
  Box b;
  if (spec.dof == 1) {
    auto add = [&](double level, FlowSpec which) {
      try {
        for (const auto& c : shell_components(level, which, spec))
          for (const auto& x : c.points) grow(b, x);
      } catch (const EmptyShellError&) {
      }
    };
    add(cut_e, FlowSpec::intrinsic());
    add(cut_f, FlowSpec::driven(q.tau));
  } else {
    axis_extent(b, [&](const State& x) { return spec.hamiltonian.value(x); }, cut_e, 2 * spec.dof);
    axis_extent(b, [&](const State& x) { return driven_hamiltonian(x, q.tau, spec); }, cut_f, 2 * spec.dof);
  }
  if (b.lo.size() == 0) throw DomainError("background box cannot be determined; no shell below the tail cutoff");
  const Eigen::VectorXd pad = 0.02 * (b.hi - b.lo).cwiseMax(1e-3);
  b.lo -= pad;
  b.hi += pad;
  return b;
}

// Largest |grad H| on the E- and E'-shells; sets the Lorentzian band width eps/g.
double gradient_scale(const TransitionQuery& q, const SystemSpec& spec) {
  double g = 0.0;
  if (spec.dof == 1) {
    for (auto [level, which] : {std::pair{q.E, FlowSpec::intrinsic()}, std::pair{q.E_prime, FlowSpec::driven(q.tau)}}) {
      try {
        for (const auto& c : shell_components(level, which, spec))
          for (const auto& x : c.base_points) g = std::max(g, spec.hamiltonian.gradient(x).norm());
      } catch (const EmptyShellError&) {
      }
    }
  }
  return g > 0 ? g : 1.0;
}

}  // namespace

double classical_background(const TransitionQuery& q, const SystemSpec& spec, const BackgroundOptions& opt) {
  const int dim = 2 * spec.dof;
  Box box;
  if (opt.lower.size() == dim && opt.upper.size() == dim) {
    box = {opt.lower, opt.upper};
  } else if (opt.lower.size() || opt.upper.size()) {
    throw DomainError("background box has wrong dimension");
  } else {
    box = auto_box(q, spec, opt);
  }
  if (((box.hi - box.lo).array() <= 0).any()) throw DomainError("background box is empty");

  // H(.|tau) = H(Phi^{-tau} x); the pull-back is affine when the driver is at most quadratic.
  std::function<State(const State&)> pull;
  const Polynomial* lam = spec.driver.polynomial();
  if (q.tau == 0.0) {
    pull = [](const State& x) { return x; };
  } else if (lam && lam->max_degree() <= 2) {
    const State c = flow(State::Zero(dim), -q.tau, FlowSpec::driver(), spec);
    const Eigen::MatrixXd M = tangent_flow(State::Zero(dim), -q.tau, FlowSpec::driver(), spec).matrix;
    pull = [c, M](const State& x) -> State { return M * x + c; };
  } else {
    pull = [&](const State& x) { return flow(x, -q.tau, FlowSpec::driver(), spec); };
  }

  const SmoothingWindow w = q.window;
  auto integrand = [&](const State& x) {
    return lorentzian_delta(q.E - spec.hamiltonian.value(x), w) *
           lorentzian_delta(q.E_prime - spec.hamiltonian.value(pull(x)), w);
  };

  long n = opt.points;
  if (n <= 0) {
    const double h = 0.5 * q.epsilon() / gradient_scale(q, spec);
    n = static_cast<long>(std::ceil((box.hi - box.lo).maxCoeff() / h)) + 1;
    n = std::max<long>(n, 16);
  }
  const double norm = std::pow(2 * kPi * spec.hbar, -spec.dof);

  auto trapezoid = [&](long m) {
    const Eigen::VectorXd h = (box.hi - box.lo) / static_cast<double>(m - 1);
    std::vector<long> idx(dim, 0);
    double sum = 0.0;
    State x(dim);
    while (true) {
      double wgt = 1.0;
      for (int k = 0; k < dim; ++k) {
        x[k] = box.lo[k] + h[k] * idx[k];
        if (idx[k] == 0 || idx[k] == m - 1) wgt *= 0.5;
      }
      sum += wgt * integrand(x);
      int k = 0;
      while (k < dim && ++idx[k] == m) idx[k++] = 0;
      if (k == dim) break;
    }
    return sum * h.prod() * norm;
  };

  double prev = trapezoid(n);
  for (int level = 1; level <= opt.max_levels; ++level) {
    n = 2 * n - 1;
    if (n > opt.max_points_per_axis) break;
    const double cur = trapezoid(n);
    const double rich = (4 * cur - prev) / 3;
    if (std::abs(cur - prev) <= opt.tolerance * std::abs(cur) || std::abs(cur - prev) < 1e-300) return rich;
    prev = cur;
  }
  throw RefinementError("background quadrature did not converge to relative " + std::to_string(opt.tolerance));
}

}  // namespace ctrace
