#include <unsupported/Eigen/FFT>

#include "detail.hpp"

namespace ctrace {

namespace {

bool is_momentum_only(const Polynomial& f) {
  const int N = f.dof();
  for (const auto& m : f.terms())
    for (int i = 0; i < N; ++i)
      if (m.exponents[i] != 0) return false;
  return true;
}

// Forward unitary DFT of each column along one axis of the tensor grid.
Eigen::MatrixXcd dft_columns(const Eigen::MatrixXcd& X, int n, int dof) {
  Eigen::FFT<double> fft;
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::MatrixXcd out(X.rows(), X.cols());
  std::vector<cplx> in(n), res;
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    if (dof == 1) {
      for (int i = 0; i < n; ++i) in[i] = X(i, c);
      fft.fwd(res, in);
      for (int i = 0; i < n; ++i) out(i, c) = res[i] * s;
      continue;
    }
    Eigen::MatrixXcd grid(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) grid(i, j) = X(static_cast<Eigen::Index>(i) * n + j, c);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) in[j] = grid(i, j);
      fft.fwd(res, in);
      for (int j = 0; j < n; ++j) grid(i, j) = res[j];
    }
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) in[i] = grid(i, j);
      fft.fwd(res, in);
      for (int i = 0; i < n; ++i) grid(i, j) = res[i];
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(static_cast<Eigen::Index>(i) * n + j, c) = grid(i, j) * s * s;
  }
  return out;
}

}  // namespace

Drive::Drive(const SystemSpec& spec, const GridSpec& grid) : hbar_(spec.hbar), dof_(spec.dof), n_(grid.points) {
  const Polynomial& L = spec.driver.require_polynomial();
  const int N = spec.dof;
  if (N < 1 || N > 2) throw DomainError("drive supports one or two degrees of freedom");
  momentum_ = is_momentum_only(L);
  if (!momentum_) {
    detail::hermitian_eigen(weyl_matrix(L, grid, spec.hbar), lambda_, W_);
    return;
  }
  // Plane waves diagonalize any function of p; odd powers drop the Nyquist mode as in weyl_matrix.
  const int n = grid.points;
  const Eigen::VectorXd k = grid_wavenumbers(grid);
  const Eigen::Index dim = N == 1 ? n : static_cast<Eigen::Index>(n) * n;
  lambda_ = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index m = 0; m < dim; ++m) {
    const int idx[2] = {static_cast<int>(N == 1 ? m : m / n), static_cast<int>(N == 1 ? 0 : m % n)};
    for (const auto& t : L.terms()) {
      double v = t.coefficient;
      for (int i = 0; i < N; ++i) {
        const int b = t.exponents[N + i];
        const double kk = (b % 2 && idx[i] == n / 2) ? 0.0 : k[idx[i]];
        v *= std::pow(spec.hbar * kk, b);
      }
      lambda_[m] += v;
    }
  }
  grid_ = grid;
}

Eigen::MatrixXcd Drive::unitary(double tau) const {
  const Eigen::VectorXcd ph = (lambda_ * (-tau / hbar_)).unaryExpr([](double a) { return std::polar(1.0, a); });
  if (!momentum_) return W_ * ph.asDiagonal() * W_.adjoint();
  Eigen::MatrixXcd F = detail::dft_matrix(grid_);
  if (dof_ == 2) F = detail::kron(F, F);
  return F.adjoint() * ph.asDiagonal() * F;
}

Eigen::MatrixXcd Drive::to_eigenbasis(const Eigen::MatrixXcd& states) const {
  if (momentum_) return dft_columns(states, n_, dof_);
  return W_.adjoint() * states;
}

Eigen::MatrixXcd drive_unitary(const SystemSpec& spec, double tau, const GridSpec& grid) {
  return Drive(spec, grid).unitary(tau);
}

TransitionMatrix transition_matrix(const Spectrum& s, const Drive& d, double tau, int levels) {
  const int K = levels > 0 ? std::min(levels, s.size()) : s.usable_levels;
  if (K <= 0) throw CoverageError("no usable levels for the transition matrix");
  TransitionMatrix T;
  T.tau = tau;
  T.size = K;
  const Eigen::MatrixXcd C = d.to_eigenbasis(s.vectors.leftCols(K));
  const Eigen::VectorXcd ph =
      (d.eigenvalues() * (-tau / d.hbar())).unaryExpr([](double a) { return std::polar(1.0, a); });
  T.amplitudes = C.adjoint() * ph.asDiagonal() * C;
  T.probabilities = T.amplitudes.cwiseAbs2();
  const Eigen::VectorXd rows = T.probabilities.rowwise().sum(), cols = T.probabilities.colwise().sum().transpose();
  T.leakage = std::max((1.0 - rows.array()).abs().maxCoeff(), (1.0 - cols.array()).abs().maxCoeff());
  return T;
}

}  // namespace ctrace
