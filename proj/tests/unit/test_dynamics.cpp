#include <doctest.h>

#include "ctrace/contour.hpp"
#include "ctrace/flow.hpp"
#include "ctrace/symplectic.hpp"

using namespace ctrace;

namespace {

SystemSpec ho(const std::string& driver = "translation") {
  const Polynomial H = named_hamiltonian("harmonic", {});
  return make_system("ho", PhaseFunction(H), PhaseFunction(named_driver(driver, {}, 1, 0, H)), 0.1);
}

SystemSpec quartic() {
  const Polynomial H = named_hamiltonian("quartic", {});
  return make_system("q", PhaseFunction(H), PhaseFunction(named_driver("translation", {}, 1, 0, H)), 0.1);
}

}  // namespace

TEST_CASE("harmonic flow is a clockwise rotation") {
  const SystemSpec s = ho();
  const State x = flow(point(1.0, 0.0), 0.7, FlowSpec::intrinsic(), s);
  CHECK(x[0] == doctest::Approx(std::cos(0.7)).epsilon(1e-10));
  CHECK(x[1] == doctest::Approx(-std::sin(0.7)).epsilon(1e-10));
  const Monodromy m = tangent_flow(point(0.3, 0.2), 1.3, FlowSpec::intrinsic(), s);
  CHECK(m.matrix(0, 0) == doctest::Approx(std::cos(1.3)).epsilon(1e-9));
  CHECK(m.matrix(0, 1) == doctest::Approx(std::sin(1.3)).epsilon(1e-9));
}

TEST_CASE("translation driver shifts position and driven energy is the pulled-back hamiltonian") {
  const SystemSpec s = ho();
  const State x = flow(point(0.2, -0.4), 1.5, FlowSpec::driver(), s);
  CHECK(x[0] == doctest::Approx(1.7).epsilon(1e-10));
  CHECK(x[1] == doctest::Approx(-0.4).epsilon(1e-10));
  CHECK(driven_hamiltonian(point(1.0, 0.5), 0.4, s) == doctest::Approx(0.5 * (0.36 + 0.25)).epsilon(1e-10));
}

TEST_CASE("monodromy is symplectic and flows are reversible") {
  const SystemSpec s = quartic();
  for (FlowSpec w : {FlowSpec::intrinsic(), FlowSpec::driven(0.8)}) {
    const State x0 = point(0.4, 0.9);
    const Segment seg = segment(x0, 3.7, w, s, true);
    CHECK(symplectic_error(seg.monodromy) < 1e-8);
    CHECK(std::abs(seg.monodromy.determinant() - 1.0) < 1e-8);
    CHECK((flow(seg.end, -3.7, w, s) - x0).norm() < 1e-8);
    CHECK(std::abs(flow_energy(seg.end, w, s) - flow_energy(x0, w, s)) < 1e-9);
  }
}

TEST_CASE("energy contours") {
  const SystemSpec s = ho();
  const ShellContour c = trace_contour(0.5, FlowSpec::intrinsic(), s);
  CHECK(c.period == doctest::Approx(2 * kPi).epsilon(1e-9));
  const SystemSpec q = quartic();
  // T(E) = 4 (4E)^(-1/4) K(1/sqrt2) for p^2/2 + q^4/4 with K(1/sqrt2) = 1.8540746773013719.
  const ShellContour cq = trace_contour(0.5, FlowSpec::intrinsic(), q);
  CHECK(cq.period == doctest::Approx(4 * std::pow(2.0, -0.25) * 1.8540746773013719).epsilon(1e-8));
  CHECK_THROWS_AS(trace_contour(-1.0, FlowSpec::intrinsic(), q), EmptyShellError);
}

TEST_CASE("det[I - M] of a rotation") {
  for (double t : {0.3, 2.0, 4.0}) {
    Eigen::Matrix2d R;
    R << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
    CHECK(det_one_minus(R) == doctest::Approx(2 - 2 * std::cos(t)).epsilon(1e-12));
  }
  CHECK(signature(Eigen::Vector2d(1.0, -3.0).asDiagonal().toDenseMatrix()) == 0);
  CHECK(signature(Eigen::Matrix2d::Identity()) == 2);
}
