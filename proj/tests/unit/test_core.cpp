#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ctrace/system.hpp"

using namespace ctrace;

TEST_CASE("lorentzian window is even, normalized and sharpens with smaller width") {
  const SmoothingWindow w(0.3);
  for (double E : {0.0, 0.1, 1.7, 25.0}) CHECK(lorentzian_delta(E, w) == lorentzian_delta(-E, w));
  CHECK(lorentzian_delta(0.0, SmoothingWindow(0.1)) > lorentzian_delta(0.0, SmoothingWindow(0.2)));
  for (double eps : {0.05, 0.3, 2.0}) {
    const SmoothingWindow we(eps);
    const double L = 10 * eps;
    const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double E) { return lorentzian_delta(E, we); }, -L, L, 15, 1e-15);
    CHECK(std::abs(I - 2 / kPi * std::atan(L / eps)) < 1e-12);
  }
}

TEST_CASE("non-positive or non-finite smoothing width is rejected") {
  CHECK_THROWS_AS(SmoothingWindow(0.0), DomainError);
  CHECK_THROWS_AS(SmoothingWindow(-1.0), DomainError);
  CHECK_THROWS_AS(SmoothingWindow(NAN), DomainError);
  CHECK_THROWS_AS(TransitionQuery(NAN, 0.0, 1.0, SmoothingWindow(0.1)), DomainError);
}

TEST_CASE("polynomial derivatives are exact") {
  Polynomial f(2);
  f.add(0.5, {2, 0}, {0, 0}).add(-1.25, {1, 3}, {1, 0}).add(2.0, {0, 0}, {0, 4});
  State x(4);
  x << 0.3, -0.7, 1.1, 0.4;
  const double h = 1e-6;
  for (int i = 0; i < 4; ++i) {
    State xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    CHECK(f.gradient(x)[i] == doctest::Approx((f.value(xp) - f.value(xm)) / (2 * h)).epsilon(1e-8));
    for (int j = 0; j < 4; ++j)
      CHECK(f.hessian(x)(i, j) ==
            doctest::Approx((f.gradient(xp)[j] - f.gradient(xm)[j]) / (2 * h)).epsilon(1e-7));
  }
  CHECK(f.max_degree() == 5);
  CHECK_FALSE(f.is_separable());
}

TEST_CASE("named systems") {
  const Polynomial H = named_hamiltonian("harmonic", {{"omega", 2.0}});
  CHECK(H.value(point(1.0, 1.0)) == doctest::Approx(0.5 + 2.0));
  const Polynomial L = named_driver("translation", {{"s", 1.0}}, 1, 0, H);
  CHECK(L.value(point(3.0, 0.25)) == doctest::Approx(0.25));
  CHECK(named_driver("self", {}, 1, 0, H).value(point(1, 1)) == doctest::Approx(2.5));
  CHECK_THROWS_AS(named_hamiltonian("nope", {}), DomainError);
  CHECK_THROWS_AS(named_hamiltonian("harmonic", {{"mass", 1.0}}), DomainError);
  CHECK(hamiltonian_dof("product-harmonic") == 2);
}

TEST_CASE("system validation") {
  const Polynomial H = named_hamiltonian("harmonic", {});
  const SystemSpec good = make_system("ho", PhaseFunction(H), PhaseFunction(named_driver("kick", {}, 1, 0, H)), 1.0);
  CHECK(validate_system(good, ValidationBox::cube(1, 2.0)).ok);

  PhaseFunction wrong(
      1, [](const State& x) { return 0.5 * x.squaredNorm(); }, [](const State& x) -> Eigen::VectorXd { return -x; },
      [](const State&) -> Eigen::MatrixXd { return -Eigen::Matrix2d::Identity(); });
  const SystemSpec bad = make_system("bad", wrong, PhaseFunction(H), 1.0);
  const ValidationReport r = validate_system(bad, ValidationBox::cube(1, 2.0));
  CHECK_FALSE(r.ok);
  CHECK(r.worst_point.size() == 2);

  const SystemSpec zero = make_system("ho", PhaseFunction(H), PhaseFunction(H), 0.0);
  const ValidationReport z = validate_system(zero, ValidationBox::cube(1, 1.0));
  CHECK_FALSE(z.ok);
  CHECK(z.failures.front() == "hbar must be positive");
}
