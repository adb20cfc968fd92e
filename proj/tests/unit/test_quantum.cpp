#include <doctest.h>

#include <filesystem>

#include <boost/math/special_functions/laguerre.hpp>

#include "ctrace/quantum.hpp"

using namespace ctrace;

namespace {

SystemSpec ho(double hbar, const std::string& driver = "translation") {
  const Polynomial H = named_hamiltonian("harmonic", {});
  return make_system("ho", PhaseFunction(H), PhaseFunction(named_driver(driver, {}, 1, 0, H)), hbar);
}

const GridSpec kGrid{128, -12.0, 12.0};

}  // namespace

TEST_CASE("grid harmonic spectrum") {
  const Spectrum s = eigensolve(ho(1.0), kGrid);
  for (int k = 0; k < 20; ++k) CHECK(std::abs(s.energies[k] - (k + 0.5)) < 1e-10);
  CHECK(s.usable_levels >= 15);
  CHECK(s.usable_levels < s.size());
  CHECK(s.convergence[0] < 1e-8);
  const Eigen::MatrixXcd W = weyl_matrix(named_hamiltonian("harmonic", {}), kGrid, 1.0);
  CHECK((W - W.adjoint()).norm() < 1e-12);
}

TEST_CASE("too small a box is reported") {
  CHECK_THROWS_AS(eigensolve(ho(1.0), GridSpec{64, -2.0, 2.0}), BoxError);
}

TEST_CASE("kick and translation drivers give the same displaced-oscillator diagonal") {
  const Spectrum s = eigensolve(ho(1.0), kGrid);
  for (const char* name : {"translation", "kick"}) {
    const Drive d(ho(1.0, name), kGrid);
    const TransitionMatrix T = transition_matrix(s, d, 1.0);
    for (unsigned n = 0; n <= 6; ++n) {
      const double L = boost::math::laguerre(n, 0.5);
      CHECK(T.probabilities(n, n) == doctest::Approx(std::exp(-0.5) * L * L).epsilon(1e-9));
    }
  }
}

TEST_CASE("dense unitary agrees with the transition matrix") {
  const SystemSpec spec = ho(1.0);
  const Spectrum s = eigensolve(spec, kGrid);
  const Drive d(spec, kGrid);
  const Eigen::MatrixXcd U = d.unitary(0.7);
  CHECK((U * U.adjoint() - Eigen::MatrixXcd::Identity(U.rows(), U.cols())).norm() < 1e-10);
  const TransitionMatrix T = transition_matrix(s, d, 0.7, 10);
  const Eigen::MatrixXcd A = s.vectors.leftCols(10).adjoint() * U * s.vectors.leftCols(10);
  CHECK((A.cwiseAbs2() - T.probabilities).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(transition_matrix(s, d, 0.7, s.size()).leakage < 1e-10);
}

TEST_CASE("eigen sum, trace density and compound trace") {
  const SystemSpec spec = ho(0.5);
  const GridSpec g{128, -8.0, 8.0};
  const Spectrum s = eigensolve(spec, g);
  const Drive d(spec, g);
  const TransitionMatrix T = transition_matrix(s, d, 1.2);
  TraceDensity fast(s, d);
  const TransitionQuery q(1.3, 1.7, 1.2, SmoothingWindow(0.15));
  const double e = eigen_density(q, s, T).value;
  CHECK(fast(q).value == doctest::Approx(e).epsilon(1e-12));
  CHECK(double_ft_density(q, s, T, FtVariant::analytic).density.value == doctest::Approx(e).epsilon(1e-12));

  const TraceResult tr = compound_trace(0.0, 0.0, s, T, 0.5);
  CHECK(std::isfinite(tr.truncation_bound));
  CHECK_THROWS_AS(compound_trace(0.0, 0.0, s, T, 1e-4, 1e-12), TruncationError);
  CHECK_THROWS_AS(eigen_density(TransitionQuery(500.0, 1.0, 1.2, SmoothingWindow(0.1)), s, T), CoverageError);
}

TEST_CASE("spectrum cache round trip and key mismatch") {
  const SystemSpec spec = ho(1.0);
  const std::string dir = (std::filesystem::temp_directory_path() / "ctrace_cache_test").string();
  std::filesystem::remove_all(dir);
  const Spectrum a = eigensolve_cached(spec, kGrid, dir);
  const Spectrum b = eigensolve_cached(spec, kGrid, dir);
  CHECK(a.energies == b.energies);
  CHECK(a.vectors == b.vectors);
  CHECK(a.usable_levels == b.usable_levels);
  const auto file = std::filesystem::directory_iterator(dir)->path().string();
  CHECK_FALSE(read_spectrum_cache(file, "another key").has_value());
  std::filesystem::remove_all(dir);
}
