#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ctrace/semiclassics.hpp"

using namespace ctrace;

namespace {

SystemSpec ho(double hbar = 0.05) {
  const Polynomial H = named_hamiltonian("harmonic", {});
  return make_system("ho", PhaseFunction(H), PhaseFunction(named_driver("translation", {}, 1, 0, H)), hbar);
}

const CompoundOrbit& lens(const std::vector<CompoundOrbit>& orbits) {
  for (const auto& o : orbits)
    if (o.representative && o.j == 0 && o.j_prime == 0 && o.a != o.b && std::abs(o.t - 2 * kPi / 3) < 1e-8) return o;
  throw Error("lens orbit missing");
}

}  // namespace

TEST_CASE("lens term: amplitude, phase and index") {
  const SystemSpec s = ho();
  const TransitionQuery q(0.5, 0.5, 1.0, SmoothingWindow(0.05));
  const auto orbits = compound_orbits(q, s);
  const CompoundOrbit& o = lens(orbits);
  CHECK(maslov_phase(o, SigmaPolicy::trace_index) == doctest::Approx(-kPi / 2).epsilon(1e-9));
  CHECK(maslov_phase(o, SigmaPolicy::caustic_count) == doctest::Approx(-0.5 * kPi * o.caustic_index));

  ScOptions opt;
  opt.smoothing = SmoothingOrder::first;
  const SCTerm t = sc_term(o, q, s, opt);
  CHECK(t.amplitude == doctest::Approx(1 / (kPi * 0.05) * 2 / std::sqrt(3.0)).epsilon(1e-6));
  CHECK(t.phase == doctest::Approx(o.action_energy / 0.05).epsilon(1e-12));
  CHECK(t.damping == doctest::Approx(std::exp(-0.05 * 4 * kPi / 3 / 0.05)).epsilon(1e-12));
  CHECK(t.value == doctest::Approx(t.amplitude * t.damping * std::cos(t.phase + t.maslov_sigma)).epsilon(1e-12));
  opt.prefactor = Prefactor::doubled;
  CHECK(sc_term(o, q, s, opt).amplitude == doctest::Approx(2 * t.amplitude).epsilon(1e-12));

  opt.prefactor = Prefactor::unit;
  opt.smoothing = SmoothingOrder::second;
  const SCTerm t2 = sc_term(o, q, s, opt);
  CHECK(t2.phase == doctest::Approx(t.phase - 0.05 * 0.05 * (o.jacobian_tE.sum()) / (2 * 0.05)).epsilon(1e-12));
}

TEST_CASE("continued smoothing approaches the second-order form for narrow windows") {
  const SystemSpec s = ho(0.5);
  const TransitionQuery q(0.5, 0.5, 1.0, SmoothingWindow(1e-3));
  OrbitOptions oo;
  oo.j_max = 0;
  const auto orbits = compound_orbits(q, s, oo);
  const CompoundOrbit& o = lens(orbits);
  ScOptions a, b;
  a.smoothing = SmoothingOrder::second;
  b.smoothing = SmoothingOrder::continued;
  const SCTerm ta = sc_term(o, q, s, a), tb = sc_term(o, q, s, b);
  CHECK(tb.warnings.empty());
  CHECK(std::abs(tb.phase - ta.phase) < 1e-2);
  CHECK(tb.damping == doctest::Approx(ta.damping).epsilon(1e-6));
}

TEST_CASE("energy line derivatives match finite differences of the displaced orbit") {
  const SystemSpec s = ho();
  const auto orbits = compound_orbits(TransitionQuery(0.5, 0.5, 1.0, SmoothingWindow(0.05)), s);
  const CompoundOrbit& o = lens(orbits);
  const EnergyLineDerivatives d = energy_line_derivatives(o, s, 0.01);
  CHECK(d.g == doctest::Approx(o.jacobian_tE.sum()).epsilon(1e-12));
  const double h = 2e-3;
  auto g_at = [&](double l) {
    const CompoundOrbit x = displaced_orbit(o, o.E + l, o.E_prime + l, s);
    return x.jacobian_tE.sum();
  };
  CHECK(d.dg == doctest::Approx((g_at(h) - g_at(-h)) / (2 * h)).epsilon(1e-3));
}

TEST_CASE("empty catalogue gives background only") {
  const SystemSpec s = ho();
  const TransitionQuery q(0.5, 0.5, 3.0, SmoothingWindow(0.05));
  ScOptions opt;
  opt.background = 0.125;
  const DensityResult r = sc_density(q, {}, s, opt);
  CHECK(r.value == 0.125);
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("no classical transition") != std::string::npos);
}

TEST_CASE("near-caustic orbits are excluded with a warning") {
  const SystemSpec s = ho();
  const TransitionQuery q(0.5, 0.5, 2.0, SmoothingWindow(0.05));
  ScOptions opt;
  opt.background = 0.0;
  const DensityResult r = sc_density(q, compound_orbits(q, s), s, opt);
  CHECK(r.terms.empty());
  bool excluded = false;
  for (const auto& w : r.warnings) excluded = excluded || w.find("excluded near a caustic") != std::string::npos;
  CHECK(excluded);
}

TEST_CASE("background against a polar-coordinate quadrature") {
  const double hbar = 0.05, eps = 0.1, E = 0.5, Ep = 0.7, tau = 1.0;
  const SystemSpec s = ho(hbar);
  const SmoothingWindow w(eps);
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto inner = [&](double r) {
    const double a = lorentzian_delta(E - 0.5 * r * r, w);
    const double th = GK::integrate(
        [&](double t) { return lorentzian_delta(Ep - 0.5 * (r * r - 2 * r * tau * std::cos(t) + tau * tau), w); }, 0.0,
        kPi, 12, 1e-11);
    return 2 * th * a * r;
  };
  const std::vector<double> breaks{0.0, 0.5, 0.9, 1.1, 1.3, 1.6, 2.5, 5.0, 10.0, 60.0};
  double I = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) I += GK::integrate(inner, breaks[k], breaks[k + 1], 12, 1e-11);
  const double oracle = I / (2 * kPi * hbar);
  const double bg = classical_background(TransitionQuery(E, Ep, tau, w), s);
  CHECK(bg == doctest::Approx(oracle).epsilon(5e-4));
}

TEST_CASE("oscillatory part removes polynomials") {
  std::vector<double> x, y;
  for (int i = 0; i < 50; ++i) {
    x.push_back(1.0 + 0.02 * i);
    y.push_back(3 - 2 * x.back() + 0.5 * std::pow(x.back(), 3));
  }
  for (double r : oscillatory_part(x, y, 3)) CHECK(std::abs(r) < 1e-10);
}

TEST_CASE("sigma calibration recovers a quarter-period offset") {
  std::vector<CalibrationPoint> pts;
  for (int i = 0; i < 80; ++i) {
    CalibrationPoint p;
    p.coordinate = 0.01 * i;
    SCTerm a;
    a.amplitude = 1.0;
    a.phase = 40 * p.coordinate;
    SCTerm b;
    b.amplitude = 0.4;
    b.phase = 65 * p.coordinate;
    p.terms = {a, b};
    p.families = {"A", "B"};
    p.background = 2.0;
    p.exact = 2.0 + std::cos(a.phase + kPi / 2) + 0.4 * std::cos(b.phase);
    pts.push_back(p);
  }
  const CalibrationReport r = sigma_calibration(pts);
  REQUIRE(r.conclusive);
  CHECK(r.offsets.at("A") == doctest::Approx(kPi / 2));
  CHECK(r.offsets.at("B") == doctest::Approx(0.0));
  CHECK(r.residual < 1e-6);
  CHECK(r.residual_uncalibrated > 0.5);

  for (auto& p : pts) p.exact = 2.0;
  CHECK_FALSE(sigma_calibration(pts).conclusive);
}
