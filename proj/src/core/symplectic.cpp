#include "ctrace/symplectic.hpp"

#include <algorithm>
#include <complex>
#include <limits>

namespace ctrace {

Eigen::MatrixXd symplectic_form(int dof) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * dof, 2 * dof);
  J.topRightCorner(dof, dof) = Eigen::MatrixXd::Identity(dof, dof);
  J.bottomLeftCorner(dof, dof) = -Eigen::MatrixXd::Identity(dof, dof);
  return J;
}

double symplectic_error(const Eigen::MatrixXd& M) {
  const auto J = symplectic_form(static_cast<int>(M.rows() / 2));
  return (M.transpose() * J * M - J).lpNorm<Eigen::Infinity>();
}

double det_one_minus(const Eigen::MatrixXd& M) {
  return (Eigen::MatrixXd::Identity(M.rows(), M.cols()) - M).determinant();
}

int signature(const Eigen::MatrixXd& S, double zero_tol) {
  const Eigen::MatrixXd sym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const auto& ev = es.eigenvalues();
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  int sig = 0;
  for (int i = 0; i < ev.size(); ++i) {
    if (std::abs(ev[i]) <= zero_tol * scale) continue;
    sig += ev[i] > 0 ? 1 : -1;
  }
  return sig;
}

namespace {

// Symplectic rotation by angle a in every (q_i, p_i) plane.
Eigen::MatrixXd rotation(int dof, double a) {
  Eigen::MatrixXd R(2 * dof, 2 * dof);
  const auto I = Eigen::MatrixXd::Identity(dof, dof);
  R << std::cos(a) * I, std::sin(a) * I, -std::sin(a) * I, std::cos(a) * I;
  return R;
}

double wrap_pi(double a) {
  a = std::fmod(a + kPi, 2 * kPi);
  if (a < 0) a += 2 * kPi;
  return a - kPi;
}

// Arguments of the eigenvalues of W = Z Z^T, Z = Y + iX for the orthonormalized
// image of the momentum plane [X; Y].
std::vector<double> lagrangian_phases(const Eigen::MatrixXd& M) {
  const int n = static_cast<int>(M.rows() / 2);
  const Eigen::MatrixXd frame = M.rightCols(n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(frame);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(2 * n, n);
  const Eigen::MatrixXcd Z = Q.bottomRows(n).cast<std::complex<double>>() +
                             std::complex<double>(0, 1) * Q.topRows(n).cast<std::complex<double>>();
  const Eigen::MatrixXcd W = Z * Z.transpose();
  std::vector<double> args(n);
  if (n == 1) {
    args[0] = std::arg(W(0, 0));
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(W);
    for (int i = 0; i < n; ++i) args[i] = std::arg(es.eigenvalues()[i]);
  }
  return args;
}

}  // namespace

TracePhase metaplectic_trace_phase(std::span<const Eigen::MatrixXd> path) {
  if (path.size() < 2) throw DomainError("metaplectic_trace_phase: path needs at least two samples");
  const int n = static_cast<int>(path.front().rows() / 2);
  const Eigen::MatrixXd& end = path.back();

  // Pick the representation in which the end point is farthest from a vertical crossing.
  double best_angle = 0.0, best_score = -1.0;
  for (int k = 0; k < 12; ++k) {
    const double a = k * kPi / 12.0;
    const Eigen::MatrixXd R = rotation(n, a);
    const Eigen::MatrixXd Mt = R * end * R.transpose();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(Mt.topRightCorner(n, n));
    const double score = svd.singularValues().minCoeff() / std::max(1.0, Mt.norm());
    if (score > best_score + 1e-12) {
      best_score = score;
      best_angle = a;
    }
  }
  const Eigen::MatrixXd R = rotation(n, best_angle);

  // Track the half eigenphases theta_j of W continuously from the identity.
  std::vector<double> lifted;
  for (std::size_t s = 1; s < path.size(); ++s) {
    const Eigen::MatrixXd Mt = R * path[s] * R.transpose();
    std::vector<double> args = lagrangian_phases(Mt);
    if (lifted.empty()) {
      lifted = args;
      continue;
    }
    // Greedy nearest matching on the circle.
    std::vector<bool> used(args.size(), false);
    for (double& prev : lifted) {
      int best = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (used[i]) continue;
        const double d = std::abs(wrap_pi(args[i] - prev));
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(i);
        }
      }
      used[best] = true;
      prev += wrap_pi(args[best] - prev);
    }
  }

  TracePhase out;
  out.representation_angle = best_angle;
  double kernel = 0.0;
  int crossings = 0;
  for (double two_theta : lifted) {
    const int k = static_cast<int>(std::floor(0.5 * two_theta / kPi));
    crossings += k >= 0 ? k : k + 1;
    kernel += -0.5 * kPi * (k + 0.5);
  }
  out.kernel_phase = kernel;
  out.conjugate_points = crossings;

  const Eigen::MatrixXd Mt = R * end * R.transpose();
  const Eigen::MatrixXd A = Mt.topLeftCorner(n, n);
  const Eigen::MatrixXd B = Mt.topRightCorner(n, n);
  const Eigen::MatrixXd D = Mt.bottomRightCorner(n, n);
  const Eigen::MatrixXd Binv = B.inverse();
  const Eigen::MatrixXd Q = D * Binv + Binv * A - Binv - Binv.transpose();
  out.gaussian_phase = 0.25 * kPi * signature(Q);
  out.total = out.kernel_phase + out.gaussian_phase;
  return out;
}

}  // namespace ctrace
