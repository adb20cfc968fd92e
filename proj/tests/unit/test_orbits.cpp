#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "ctrace/orbits.hpp"

using namespace ctrace;

namespace {

SystemSpec ho(double omega = 1.0, double hbar = 0.05) {
  const Polynomial H = named_hamiltonian("harmonic", {{"omega", omega}});
  return make_system("ho", PhaseFunction(H), PhaseFunction(named_driver("translation", {}, 1, 0, H)), hbar);
}

SystemSpec quartic(double hbar = 0.02) {
  const Polynomial H = named_hamiltonian("quartic", {});
  return make_system("q", PhaseFunction(H), PhaseFunction(named_driver("translation", {}, 1, 0, H)), hbar);
}

const TransitionQuery kLens(0.5, 0.5, 1.0, SmoothingWindow(0.05));

}  // namespace

TEST_CASE("circle intersections and the lens orbit") {
  const auto xs = shell_intersections(kLens, ho());
  REQUIRE(xs.size() == 2);
  for (const auto& x : xs) {
    CHECK(x.point[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(x.point[1]) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-12));
    CHECK_FALSE(x.tangency);
  }
  const auto orbits = compound_orbits(kLens, ho());
  int lenses = 0;
  for (const auto& o : orbits)
    if (o.j == 0 && o.j_prime == 0 && o.a != o.b && std::abs(o.t - 2 * kPi / 3) < 1e-9) {
      ++lenses;
      CHECK(o.t_prime == doctest::Approx(2 * kPi / 3).epsilon(1e-9));
      CHECK(o.action_energy == doctest::Approx(2 * kPi / 3 - std::sqrt(3.0) / 2).epsilon(1e-11));
      CHECK(o.det_one_minus_M == doctest::Approx(3.0).epsilon(1e-9));
      CHECK(o.jacobian_det == doctest::Approx(-4.0).epsilon(1e-6));
      CHECK(o.action_time == doctest::Approx(o.action_energy - 0.5 * (o.t + o.t_prime)).epsilon(1e-12));
    }
  CHECK(lenses == 1);
}

TEST_CASE("every orbit has its time-reversed partner") {
  for (const SystemSpec& s : {ho(), quartic()}) {
    const auto orbits = compound_orbits(TransitionQuery(0.5, 0.6, 1.2, SmoothingWindow(0.05)), s);
    REQUIRE_FALSE(orbits.empty());
    for (const auto& o : orbits) {
      REQUIRE(o.partner >= 0);
      const auto& p = orbits[o.partner];
      CHECK(p.partner == o.id);
      CHECK(p.t == doctest::Approx(-o.t).epsilon(1e-9));
      CHECK(p.t_prime == doctest::Approx(-o.t_prime).epsilon(1e-9));
      CHECK(o.representative != p.representative);
    }
  }
}

TEST_CASE("disjoint and tangent shells") {
  CHECK(compound_orbits(TransitionQuery(0.5, 0.5, 3.0, SmoothingWindow(0.05)), ho()).empty());
  const auto xs = shell_intersections(TransitionQuery(0.5, 0.5, 2.0, SmoothingWindow(0.05)), ho());
  REQUIRE_FALSE(xs.empty());
  CHECK(xs.front().tangency);
  for (const auto& o : compound_orbits(TransitionQuery(0.5, 0.5, 2.0, SmoothingWindow(0.05)), ho()))
    CHECK(o.near_caustic);
}

TEST_CASE("det[I - M] does not depend on the start point") {
  for (const auto& o : compound_orbits(TransitionQuery(0.5, 0.55, 1.3, SmoothingWindow(0.05)), quartic()))
    CHECK(std::abs(det_one_minus(rebased_monodromy(o)) - o.det_one_minus_M) < 1e-8);
}

TEST_CASE("continuation in energy and in time are mutually inverse") {
  const SystemSpec s = quartic();
  const TransitionQuery q(0.5, 0.5, 1.6, SmoothingWindow(0.05));
  for (const auto& o : compound_orbits(q, s)) {
    if (!o.representative || o.near_caustic || o.j || o.j_prime) continue;
    const OrbitGeometry g = resolve_orbit(o, 0.51, 0.49, s);
    const auto [E, Ep] = energies_for_times(o, g.t, g.t_prime, s);
    CHECK(E == doctest::Approx(0.51).epsilon(1e-7));
    CHECK(Ep == doctest::Approx(0.49).epsilon(1e-7));
    const JacobianResult jr = jacobian_times_energies(o, q, s, true);
    CHECK(jr.det * jr.inverse_det == doctest::Approx(1.0).epsilon(1e-6));
    const double h = 1e-4;
    const double dS = (resolve_orbit(o, q.E, q.E_prime + h, s).action - resolve_orbit(o, q.E, q.E_prime - h, s).action) /
                      (2 * h);
    CHECK(dS == doctest::Approx(o.t_prime).epsilon(1e-6));
    const CompoundOrbit d = displaced_orbit(o, 0.5, 0.5, s);
    CHECK(d.det_one_minus_M == doctest::Approx(o.det_one_minus_M).epsilon(1e-7));
  }
}

TEST_CASE("symplectic area of the lens") {
  for (const auto& o : compound_orbits(kLens, ho()))
    if (o.j == 0 && o.j_prime == 0 && o.a != o.b && o.representative)
      CHECK(orbit_area(o, ho()) == doctest::Approx(o.action_energy).epsilon(1e-8));
}

TEST_CASE("catalogue records round-trip") {
  const auto orbits = compound_orbits(kLens, ho());
  const std::string path = (std::filesystem::temp_directory_path() / "ctrace_catalogue_test.jsonl").string();
  write_catalogue(path, orbits);
  const auto back = read_catalogue(path);
  REQUIRE(back.size() == orbits.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].orbit_id == orbits[i].id);
    CHECK(back[i].t == orbits[i].t);
    CHECK(back[i].S_energy == orbits[i].action_energy);
    CHECK(back[i].det_IminusM == orbits[i].det_one_minus_M);
    CHECK(back[i].start.size() == 2);
  }
  std::remove(path.c_str());
}

TEST_CASE("section fixed point of two uncoupled oscillators") {
  const Polynomial H = named_hamiltonian("product-harmonic", {{"omega1", 1.0}, {"omega2", std::sqrt(2.0)}});
  const SystemSpec s =
      make_system("p", PhaseFunction(H), PhaseFunction(named_driver("translation", {}, 2, 0, H)), 0.05);
  const SectionSpec sec{0, 0.0, -1};
  Eigen::VectorXd z(2);
  z << 0.01, -0.02;
  const State x = section_lift(z, 0.5, sec, s);
  CHECK(H.value(x) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(x[2] < 0);
  CHECK((section_coordinates(x, sec) - z).norm() < 1e-14);
  const PoincareFixedPoint fp = product_section_fixed_point(kLens, s, sec, z);
  CHECK(fp.residual < 1e-6);
  CHECK(fp.t == doctest::Approx(4 * kPi / 3).epsilon(1e-6));
  CHECK(fp.action == doctest::Approx(2 * kPi - (2 * kPi / 3 - std::sqrt(3.0) / 2)).epsilon(1e-7));
}
