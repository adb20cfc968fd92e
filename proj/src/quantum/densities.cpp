#include <cstdio>

#include <boost/math/quadrature/gauss.hpp>

#include "detail.hpp"

namespace ctrace {

namespace {

void check_coverage(const TransitionQuery& q, const Spectrum& s, int K) {
  const double top = std::max(q.E, q.E_prime) + 20 * q.epsilon();
  if (K <= 0 || s.energies[K - 1] < top) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "levels up to %.6g are needed but the usable spectrum ends at %.6g", top,
                  K > 0 ? s.energies[K - 1] : -std::numeric_limits<double>::infinity());
    throw CoverageError(buf);
  }
}

Eigen::VectorXd window(double E, const Spectrum& s, int K, const SmoothingWindow& w) {
  Eigen::VectorXd d(K);
  for (int k = 0; k < K; ++k) d[k] = lorentzian_delta(E - s.energies[k], w);
  return d;
}

}  // namespace

DensityResult eigen_density(const TransitionQuery& q, const Spectrum& s, const TransitionMatrix& T) {
  const int K = T.size;
  check_coverage(q, s, K);
  DensityResult r(q, Pathway::eigen_sum);
  const Eigen::VectorXd a = window(q.E, s, K, q.window), b = window(q.E_prime, s, K, q.window);
  r.value = a.dot(T.probabilities * b);
  return r;
}

TraceResult compound_trace(double t, double t_prime, const Spectrum& s, const TransitionMatrix& T, double eta,
                           double tolerance) {
  if (eta < 0) throw DomainError("trace regularization eta must be non-negative");
  const int K = T.size;
  const double hbar = s.hbar;
  Eigen::VectorXcd u(K), v(K);
  for (int k = 0; k < K; ++k) {
    const double E = s.energies[k];
    u[k] = std::exp(cplx(-eta * E, -t * E) / hbar);
    v[k] = std::exp(cplx(-eta * E, -t_prime * E) / hbar);
  }
  TraceResult r;
  r.value = u.transpose() * T.probabilities.cast<cplx>() * v;
  if (eta == 0.0 || K < 2) {
    r.truncation_bound = std::numeric_limits<double>::infinity();
  } else {
    const double gap = std::max(s.energies[K - 1] - s.energies[K - 2], 1e-300);
    const double w0 = std::max(1.0, std::exp(-eta * s.energies[0] / hbar));
    r.truncation_bound = 2 * w0 * std::exp(-eta * s.energies[K - 1] / hbar) / -std::expm1(-eta * gap / hbar);
  }
  if (r.truncation_bound > tolerance) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "compound trace truncation bound %.3g exceeds tolerance %.3g", r.truncation_bound,
                  tolerance);
    throw TruncationError(buf);
  }
  return r;
}

FtResult double_ft_density(const TransitionQuery& q, const Spectrum& s, const TransitionMatrix& T, FtVariant variant,
                           const TimeGrid& grid) {
  const int K = T.size;
  check_coverage(q, s, K);
  const double hbar = s.hbar, eps = q.epsilon();
  FtResult out{DensityResult(q, Pathway::double_ft)};
  Eigen::VectorXcd a(K), b(K);
  if (variant == FtVariant::analytic) {
    // (2 pi hbar)^-1 \int dt exp(i x t/hbar - eps|t|/hbar) = (1/2pi)[1/(eps - i x) + 1/(eps + i x)]
    auto kernel = [&](double x) { return (1.0 / (eps - cplx(0, x)) + 1.0 / (eps + cplx(0, x))) / (2 * kPi); };
    for (int k = 0; k < K; ++k) {
      a[k] = kernel(q.E - s.energies[k]);
      b[k] = kernel(q.E_prime - s.energies[k]);
    }
  } else {
    const double T_max = grid.t_max > 0 ? grid.t_max : hbar * std::log(1e8) / eps;
    double wmax = 0.0;
    for (int k = 0; k < K; ++k)
      wmax = std::max({wmax, std::abs(q.E - s.energies[k]), std::abs(q.E_prime - s.energies[k])});
    const int n = grid.n_steps > 0 ? grid.n_steps
                                   : std::max(16, static_cast<int>(std::ceil(T_max * (wmax + eps) / (hbar * kPi))) + 1);
    out.t_max = T_max;
    out.n_steps = n;
    using GL = boost::math::quadrature::gauss<double, 16>;
    const auto& xs = GL::abscissa();
    const auto& ws = GL::weights();
    // Symmetric nodes on [-T, T]: each panel on [0, T] and its mirror image.
    std::vector<double> nodes, weights;
    const double h = T_max / n;
    for (int p = 0; p < n; ++p) {
      const double c = (p + 0.5) * h;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const int reps = xs[i] == 0.0 ? 1 : 2;
        for (int sgn = 0; sgn < reps; ++sgn) {
          const double tt = c + (sgn ? -1 : 1) * 0.5 * h * xs[i];
          nodes.push_back(tt);
          weights.push_back(0.5 * h * ws[i]);
          nodes.push_back(-tt);
          weights.push_back(0.5 * h * ws[i]);
        }
      }
    }
    auto kernel = [&](double x) {
      cplx sum = 0.0;
      for (std::size_t i = 0; i < nodes.size(); ++i)
        sum += weights[i] * std::exp(cplx(-eps * std::abs(nodes[i]), x * nodes[i]) / hbar);
      return sum / (2 * kPi * hbar);
    };
    for (int k = 0; k < K; ++k) {
      a[k] = kernel(q.E - s.energies[k]);
      b[k] = kernel(q.E_prime - s.energies[k]);
    }
  }
  const cplx v = a.transpose() * T.probabilities.cast<cplx>() * b;
  out.density.value = v.real();
  out.imaginary = v.imag();
  if (std::abs(v.imag()) > 1e-10 * std::abs(v.real()) && std::abs(v.imag()) > 1e-300) {
    char buf[120];
    std::snprintf(buf, sizeof buf, "double transform has imaginary residue %.3g", v.imag());
    out.density.warnings.push_back(buf);
  }
  return out;
}

TraceDensity::TraceDensity(const Spectrum& s, const Drive& d, LevelSet levels)
    : s_(s), d_(d), K_(levels == LevelSet::usable ? s.usable_levels : s.size()) {
  if (K_ <= 0) throw CoverageError("no usable levels for the density");
  coeffs_ = d.to_eigenbasis(s.vectors.leftCols(K_));
  full_ = levels == LevelSet::full_grid;
}

const Eigen::MatrixXcd& TraceDensity::projector(double E, double eps) {
  const auto key = std::make_pair(E, eps);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const Eigen::VectorXd w = window(E, s_, K_, SmoothingWindow(eps));
  return cache_[key] = coeffs_ * w.cast<cplx>().asDiagonal() * coeffs_.adjoint();
}

DensityResult TraceDensity::operator()(const TransitionQuery& q) {
  if (!full_) check_coverage(q, s_, K_);
  if (cache_.size() > 8) cache_.clear();
  const Eigen::MatrixXcd& A = projector(q.E, q.epsilon());
  const Eigen::MatrixXcd& B = projector(q.E_prime, q.epsilon());
  // tr[A U B U^dag] with U diagonal in the driver basis.
  const Eigen::VectorXcd u =
      (d_.eigenvalues() * (-q.tau / s_.hbar)).unaryExpr([](double a) { return std::polar(1.0, a); });
  const Eigen::VectorXcd Bu = A.conjugate().cwiseProduct(B) * u.conjugate();
  DensityResult r(q, Pathway::eigen_sum);
  r.value = (u.transpose() * Bu).value().real();
  return r;
}

}  // namespace ctrace
