#include <boost/math/special_functions/binomial.hpp>
#include <unsupported/Eigen/FFT>

#include "detail.hpp"

namespace ctrace {

namespace detail {

Eigen::MatrixXcd dft_matrix(const GridSpec& g) {
  const Eigen::VectorXd x = grid_nodes(g), k = grid_wavenumbers(g);
  const int n = g.points;
  Eigen::MatrixXcd F(n, n);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  // exp(-i k x) with x measured from the box edge keeps the phases exact at the nodes.
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < n; ++j) F(a, j) = std::polar(s, -k[a] * (x[j] - g.lower));
  return F;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

void hermitian_eigen(const Eigen::MatrixXcd& A, Eigen::VectorXd& values, Eigen::MatrixXcd& vectors) {
  const double scale = A.cwiseAbs().maxCoeff();
  if (A.imag().cwiseAbs().maxCoeff() <= 1e-15 * scale) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.real());
    if (es.info() != Eigen::Success) throw NoConvergenceError("eigensolver failed");
    values = es.eigenvalues();
    vectors = es.eigenvectors().cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
    if (es.info() != Eigen::Success) throw NoConvergenceError("eigensolver failed");
    values = es.eigenvalues();
    vectors = es.eigenvectors();
  }
}

}  // namespace detail

Eigen::VectorXd grid_nodes(const GridSpec& g) {
  if (g.points < 4 || g.points % 2) throw DomainError("grid needs an even number of points >= 4");
  if (!(g.upper > g.lower)) throw DomainError("grid box is empty");
  Eigen::VectorXd x(g.points);
  const double dx = (g.upper - g.lower) / g.points;
  for (int i = 0; i < g.points; ++i) x[i] = g.lower + i * dx;
  return x;
}

Eigen::VectorXd grid_wavenumbers(const GridSpec& g) {
  const int n = g.points;
  const double L = g.upper - g.lower;
  Eigen::VectorXd k(n);
  for (int i = 0; i < n; ++i) k[i] = 2 * kPi * (i < n / 2 ? i : i - n) / L;
  return k;
}

namespace {

// Matrix of p^b: circulant with first column ifft((hbar k)^b).
Eigen::MatrixXcd momentum_power(int b, const GridSpec& g, double hbar) {
  const int n = g.points;
  if (b == 0) return Eigen::MatrixXcd::Identity(n, n);
  Eigen::VectorXd k = grid_wavenumbers(g);
  if (b % 2) k[n / 2] = 0.0;
  std::vector<cplx> d(n), c;
  for (int i = 0; i < n; ++i) d[i] = std::pow(hbar * k[i], b);
  Eigen::FFT<double> fft;
  fft.inv(c, d);
  Eigen::MatrixXcd P(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) P(i, j) = c[(i - j + n) % n];
  return P;
}

// Weyl form of q^a p^b on one axis: 2^-a sum_k C(a,k) Q^k P^b Q^(a-k).
Eigen::MatrixXcd weyl_axis(int a, int b, const GridSpec& g, double hbar) {
  const int n = g.points;
  const Eigen::VectorXd x = grid_nodes(g);
  const Eigen::MatrixXcd Pb = momentum_power(b, g, hbar);
  if (a == 0) return Pb;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k <= a; ++k) {
    const double c = boost::math::binomial_coefficient<double>(a, k) / std::pow(2.0, a);
    const Eigen::VectorXd l = x.array().pow(k), r = x.array().pow(a - k);
    out += c * (l.cast<cplx>().asDiagonal() * Pb * r.cast<cplx>().asDiagonal());
  }
  return out;
}

}  // namespace

Eigen::MatrixXcd weyl_matrix(const Polynomial& f, const GridSpec& g, double hbar) {
  const int N = f.dof();
  if (N < 1 || N > 2) throw DomainError("grid quantization supports one or two degrees of freedom");
  const Eigen::Index dim = N == 1 ? g.points : static_cast<Eigen::Index>(g.points) * g.points;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& m : f.terms()) {
    Eigen::MatrixXcd term = weyl_axis(m.exponents[0], m.exponents[N], g, hbar);
    if (N == 2) term = detail::kron(term, weyl_axis(m.exponents[1], m.exponents[3], g, hbar));
    out += m.coefficient * term;
  }
  return 0.5 * (out + out.adjoint());
}

}  // namespace ctrace
