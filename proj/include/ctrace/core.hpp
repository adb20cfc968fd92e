#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "ctrace/errors.hpp"

namespace ctrace {

/// Phase-space state laid out as [q_1..q_N, p_1..p_N].
using State = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;

struct PhasePoint {
  Eigen::VectorXd q;
  Eigen::VectorXd p;

  PhasePoint() = default;
  PhasePoint(Eigen::VectorXd q_, Eigen::VectorXd p_);
  explicit PhasePoint(const State& x);

  int dof() const { return static_cast<int>(q.size()); }
  State state() const;
};

inline PhasePoint::PhasePoint(Eigen::VectorXd q_, Eigen::VectorXd p_) : q(std::move(q_)), p(std::move(p_)) {
  if (q.size() != p.size() || q.size() < 1) throw DomainError("phase point needs q and p of equal length >= 1");
  if (!q.allFinite() || !p.allFinite()) throw DomainError("phase point has non-finite components");
}

inline PhasePoint::PhasePoint(const State& x) {
  if (x.size() < 2 || x.size() % 2 != 0) throw DomainError("state length must be 2N with N >= 1");
  if (!x.allFinite()) throw DomainError("phase point has non-finite components");
  const auto n = x.size() / 2;
  q = x.head(n);
  p = x.tail(n);
}

inline State PhasePoint::state() const {
  State x(2 * q.size());
  x << q, p;
  return x;
}

/// Convenience for N = 1 states.
inline State point(double q, double p) {
  State x(2);
  x << q, p;
  return x;
}

struct SmoothingWindow {
  double epsilon;

  explicit SmoothingWindow(double eps) : epsilon(eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("smoothing width epsilon must be positive");
  }
};

struct TransitionQuery {
  double E;
  double E_prime;
  double tau;
  SmoothingWindow window;

  TransitionQuery(double e, double e_prime, double tau_, SmoothingWindow w)
      : E(e), E_prime(e_prime), tau(tau_), window(w) {
    if (!std::isfinite(e) || !std::isfinite(e_prime) || !std::isfinite(tau_))
      throw DomainError("transition query has non-finite arguments");
  }

  double epsilon() const { return window.epsilon; }
};

/// Lorentzian window eps / (pi (eps^2 + E^2)); integrates to one over the real line.
double lorentzian_delta(double E, const SmoothingWindow& window);

}  // namespace ctrace
