#include <cstdio>

#include "detail.hpp"

namespace ctrace {

namespace {

struct Solved {
  Eigen::VectorXd energies;
  Eigen::MatrixXcd vectors;
};

Solved solve(const Polynomial& H, const GridSpec& g, double hbar) {
  Solved s;
  detail::hermitian_eigen(weyl_matrix(H, g, hbar), s.energies, s.vectors);
  return s;
}

Eigen::VectorXd boundary_mass(const Eigen::MatrixXcd& V, const GridSpec& g, int dof, double fraction) {
  const int n = g.points;
  const int edge = std::max(1, static_cast<int>(std::ceil(fraction * n)));
  auto near = [&](int i) { return i < edge || i >= n - edge; };
  std::vector<Eigen::Index> rows;
  if (dof == 1) {
    for (int i = 0; i < n; ++i)
      if (near(i)) rows.push_back(i);
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (near(i) || near(j)) rows.push_back(static_cast<Eigen::Index>(i) * n + j);
  }
  Eigen::VectorXd m = Eigen::VectorXd::Zero(V.cols());
  for (auto r : rows) m += V.row(r).cwiseAbs2().transpose();
  return m;
}

}  // namespace

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string spectrum_key(const SystemSpec& spec, const GridSpec& grid, const EigensolveOptions& opt) {
  char buf[256];
  std::snprintf(buf, sizeof buf, ";hbar=%.17g;grid=%d,%.17g,%.17g;tol=%.3g,%.3g,%.3g;conv=%d", spec.hbar, grid.points,
                grid.lower, grid.upper, opt.convergence_tol, opt.boundary_tol, opt.boundary_fraction,
                opt.estimate_convergence ? 1 : 0);
  return "H=" + spec.hamiltonian.require_polynomial().to_string() + buf;
}

Spectrum eigensolve(const SystemSpec& spec, const GridSpec& grid, const EigensolveOptions& opt) {
  if (spec.dof < 1 || spec.dof > 2) throw DomainError("eigensolve supports one or two degrees of freedom");
  const Polynomial& H = spec.hamiltonian.require_polynomial();
  Spectrum s;
  s.grid = grid;
  s.dof = spec.dof;
  s.hbar = spec.hbar;
  s.key = spectrum_key(spec, grid, opt);
  Solved fine = solve(H, grid, spec.hbar);
  s.energies = std::move(fine.energies);
  s.vectors = std::move(fine.vectors);
  const int n = s.size();

  s.convergence = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  if (opt.estimate_convergence && grid.points >= 16 && grid.points % 4 == 0) {
    GridSpec half = grid;
    half.points /= 2;
    Eigen::VectorXd coarse;
    Eigen::MatrixXcd unused;
    detail::hermitian_eigen(weyl_matrix(H, half, spec.hbar), coarse, unused);
    for (Eigen::Index k = 0; k < coarse.size(); ++k) s.convergence[k] = std::abs(s.energies[k] - coarse[k]);
  }
  s.boundary_mass = boundary_mass(s.vectors, grid, spec.dof, opt.boundary_fraction);

  const int checked = std::isnan(opt.check_energy)
                          ? std::min(n, 20)
                          : static_cast<int>(std::upper_bound(s.energies.data(), s.energies.data() + n, opt.check_energy) -
                                             s.energies.data());
  for (int k = 0; k < checked; ++k) {
    if (s.boundary_mass[k] > opt.boundary_tol) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "level %d (E = %.6g) has mass %.3g at the box edge [%g, %g]", k, s.energies[k],
                    s.boundary_mass[k], grid.lower, grid.upper);
      throw BoxError(buf);
    }
  }
  int usable = 0;
  while (usable < n && s.convergence[usable] < opt.convergence_tol && s.boundary_mass[usable] <= opt.boundary_tol)
    ++usable;
  s.usable_levels = usable;
  return s;
}

}  // namespace ctrace
