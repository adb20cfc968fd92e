#pragma once

#include <complex>
#include <limits>
#include <map>
#include <optional>
#include <string>

#include "ctrace/density.hpp"
#include "ctrace/system.hpp"

namespace ctrace {

using cplx = std::complex<double>;

/// Periodic grid of `points` nodes on [lower, upper) per degree of freedom.
struct GridSpec {
  int points = 256;
  double lower = -10.0;
  double upper = 10.0;
};

/// Nodes and angular wavenumbers of one axis (FFT ordering).
Eigen::VectorXd grid_nodes(const GridSpec& g);
Eigen::VectorXd grid_wavenumbers(const GridSpec& g);

/// Weyl-symmetrized matrix of a polynomial phase function on the tensor grid.
/// Odd powers of p drop the Nyquist mode so the result stays Hermitian.
Eigen::MatrixXcd weyl_matrix(const Polynomial& f, const GridSpec& g, double hbar);

struct EigensolveOptions {
  double convergence_tol = 1e-8;
  double boundary_tol = 1e-10;
  /// Fraction of the box at each edge counted as boundary.
  double boundary_fraction = 0.05;
  /// Levels up to this energy must pass the boundary test; NaN checks the lowest 20.
  double check_energy = std::numeric_limits<double>::quiet_NaN();
  /// Compare against the grid with half the points on the same box.
  bool estimate_convergence = true;
};

struct Spectrum {
  GridSpec grid;
  int dof = 1;
  double hbar = 1.0;
  std::string key;
  /// Ascending; all grid eigenpairs are kept.
  Eigen::VectorXd energies;
  Eigen::MatrixXcd vectors;
  /// |E_k(n) - E_k(n/2)|; infinity where no counterpart exists.
  Eigen::VectorXd convergence;
  Eigen::VectorXd boundary_mass;
  /// Lowest levels that are converged and clear of the box edges.
  int usable_levels = 0;

  int size() const { return static_cast<int>(energies.size()); }
};

Spectrum eigensolve(const SystemSpec& spec, const GridSpec& grid, const EigensolveOptions& opt = {});

/// Cache identity of a spectrum: Hamiltonian, hbar, grid and solver tolerances.
std::string spectrum_key(const SystemSpec& spec, const GridSpec& grid, const EigensolveOptions& opt);
std::uint64_t fnv1a(const std::string& s);

/// Binary cache: magic "CTSPEC", u32 version, u64 key hash, i32 dof, i32 points, f64 lower, f64 upper, f64 hbar,
/// i32 n_levels, i32 usable, then energies, convergence, boundary mass (f64 each) and vectors (complex f64 pairs,
/// column-major). Little-endian host layout.
void write_spectrum_cache(const std::string& path, const Spectrum& s);
/// Empty when the file is missing, has another version, or another key hash.
std::optional<Spectrum> read_spectrum_cache(const std::string& path, const std::string& key);
/// Loads from `dir` when a matching entry exists, otherwise solves and stores.
Spectrum eigensolve_cached(const SystemSpec& spec, const GridSpec& grid, const std::string& dir,
                           const EigensolveOptions& opt = {});

/// exp(-i tau Lambda/hbar) through the eigen-decomposition of the discretized driver.
class Drive {
 public:
  Drive(const SystemSpec& spec, const GridSpec& grid);

  const Eigen::VectorXd& eigenvalues() const { return lambda_; }
  /// Empty for momentum-only drivers, whose eigenvectors are plane waves.
  const Eigen::MatrixXcd& eigenvectors() const { return W_; }
  bool momentum_only() const { return momentum_; }
  double hbar() const { return hbar_; }
  /// Dense unitary on the grid.
  Eigen::MatrixXcd unitary(double tau) const;
  /// Columns of `states` expressed in the driver eigenbasis.
  Eigen::MatrixXcd to_eigenbasis(const Eigen::MatrixXcd& states) const;

 private:
  Eigen::VectorXd lambda_;
  Eigen::MatrixXcd W_;
  bool momentum_ = false;
  double hbar_ = 1.0;
  int dof_ = 1;
  int n_ = 0;
  GridSpec grid_;
};

Eigen::MatrixXcd drive_unitary(const SystemSpec& spec, double tau, const GridSpec& grid);

struct TransitionMatrix {
  double tau = 0.0;
  /// |<k|U(tau)|l>|^2 over the lowest `size` levels.
  Eigen::MatrixXd probabilities;
  Eigen::MatrixXcd amplitudes;
  int size = 0;
  /// max_k |1 - row or column sum|.
  double leakage = 0.0;
};

/// `levels` <= 0 selects spectrum.usable_levels.
TransitionMatrix transition_matrix(const Spectrum& s, const Drive& d, double tau, int levels = 0);

/// sum_{k,l} d_eps(E - E_k) d_eps(E' - E_l) |<k|U|l>|^2 over the matrix's levels.
DensityResult eigen_density(const TransitionQuery& q, const Spectrum& s, const TransitionMatrix& T);

struct TraceResult {
  cplx value;
  double truncation_bound = 0.0;
};

/// tr[exp(-i t H/hbar) U exp(-i t' H/hbar) U^dag] over the matrix's levels, with t, t' shifted to t - i eta.
TraceResult compound_trace(double t, double t_prime, const Spectrum& s, const TransitionMatrix& T, double eta = 0.0,
                           double tolerance = std::numeric_limits<double>::infinity());

enum class FtVariant { analytic, quadrature };

struct TimeGrid {
  /// Non-positive selects hbar ln(1e8)/eps.
  double t_max = 0.0;
  /// Gauss-Legendre panels on [0, t_max]; non-positive picks enough to resolve every level's frequency.
  int n_steps = 0;
};

/// Double Fourier transform of the damped compound trace; imaginary residue in `imaginary`.
struct FtResult {
  DensityResult density;
  double imaginary = 0.0;
  double t_max = 0.0;
  int n_steps = 0;
};

FtResult double_ft_density(const TransitionQuery& q, const Spectrum& s, const TransitionMatrix& T, FtVariant variant,
                           const TimeGrid& grid = {});

enum class LevelSet {
  /// The spectrum's usable levels.
  usable,
  /// Every grid eigenpair: tr[d_eps(E - H_grid) U d_eps(E' - H_grid) U^dag].
  full_grid,
};

/// Fast eigen-sum for sweeps: caches the energy projectors in the driver eigenbasis so each tau costs O(n^2).
class TraceDensity {
 public:
  TraceDensity(const Spectrum& s, const Drive& d, LevelSet levels = LevelSet::usable);

  DensityResult operator()(const TransitionQuery& q);
  int levels() const { return K_; }

 private:
  const Eigen::MatrixXcd& projector(double E, double eps);

  const Spectrum& s_;
  const Drive& d_;
  int K_;
  bool full_ = false;
  Eigen::MatrixXcd coeffs_;
  std::map<std::pair<double, double>, Eigen::MatrixXcd> cache_;
};

}  // namespace ctrace
