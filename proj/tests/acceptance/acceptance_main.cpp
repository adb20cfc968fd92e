// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <boost/math/special_functions/laguerre.hpp>

#include "ctrace/cli.hpp"
#include "ctrace/flow.hpp"
#include "ctrace/orbits.hpp"
#include "ctrace/quantum.hpp"
#include "ctrace/semiclassics.hpp"

using namespace ctrace;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SystemSpec oscillator(double hbar) {
  const Polynomial H = named_hamiltonian("harmonic", {{"omega", 1.0}});
  return make_system("ho", PhaseFunction(H), PhaseFunction(named_driver("translation", {}, 1, 0, H)), hbar);
}

SystemSpec quartic(double hbar) {
  const Polynomial H = named_hamiltonian("quartic", {{"g", 1.0}, {"k", 0.0}});
  return make_system("quartic", PhaseFunction(H), PhaseFunction(named_driver("translation", {}, 1, 0, H)), hbar);
}

const std::vector<double> kGridE{0.8, 1.4, 2.0, 2.6, 3.2};
const std::vector<double> kGridTau{0.5, 1.0, 2.0};
constexpr double kGridEps = 0.2;

const Spectrum& ho_spectrum() {
  static const Spectrum s = eigensolve(oscillator(1.0), GridSpec{256, -16.0, 16.0});
  return s;
}

// ---- 1 -----------------------------------------------------------------------------

Outcome exact_pathways() {
  const SystemSpec spec = oscillator(1.0);
  const Spectrum& s = ho_spectrum();
  const Drive d(spec, s.grid);
  double ana = 0, quad_e = 0, quad_a = 0;
  for (double tau : kGridTau) {
    const TransitionMatrix T = transition_matrix(s, d, tau);
    for (double E : kGridE)
      for (double Ep : kGridE) {
        const TransitionQuery q(E, Ep, tau, SmoothingWindow(kGridEps));
        const double pe = eigen_density(q, s, T).value;
        const double pa = double_ft_density(q, s, T, FtVariant::analytic).density.value;
        const FtResult fq = double_ft_density(q, s, T, FtVariant::quadrature);
        if (std::abs(fq.t_max - std::log(1e8) / kGridEps) > 1e-12) return {false, "unexpected T_max"};
        ana = std::max(ana, std::abs(pe - pa) / std::abs(pe));
        quad_e = std::max(quad_e, std::abs(fq.density.value - pe) / std::abs(pe));
        quad_a = std::max(quad_a, std::abs(fq.density.value - pa) / std::abs(pa));
      }
  }
  return {ana < 1e-12 && quad_e < 1e-6 && quad_a < 1e-6,
          fmt("eigen vs analytic %.2e (< 1e-12), quadrature vs eigen %.2e, vs analytic %.2e (< 1e-6), %d usable levels",
              ana, quad_e, quad_a, s.usable_levels)};
}

// ---- 2 -----------------------------------------------------------------------------

Outcome displaced_oscillator() {
  const SystemSpec spec = oscillator(1.0);
  const Spectrum& s = ho_spectrum();
  const Drive d(spec, s.grid);
  double err = 0.0;
  for (double tau : {0.5, 1.0, 2.0}) {
    const TransitionMatrix T = transition_matrix(s, d, tau);
    const double a2 = tau * tau / 2.0;
    for (unsigned n = 0; n <= 10; ++n) {
      const double L = boost::math::laguerre(n, a2);
      err = std::max(err, std::abs(T.probabilities(n, n) - std::exp(-a2) * L * L));
    }
  }
  return {err < 1e-8, fmt("max |P_nn - exp(-a^2) L_n(a^2)^2| = %.2e (< 1e-8)", err)};
}

// ---- 3 -----------------------------------------------------------------------------

Outcome exact_symmetry() {
  const SystemSpec spec = oscillator(1.0);
  const Spectrum& s = ho_spectrum();
  const Drive d(spec, s.grid);
  double worst = 0.0;
  for (double tau : kGridTau) {
    const TransitionMatrix Tp = transition_matrix(s, d, tau), Tm = transition_matrix(s, d, -tau);
    for (double E : kGridE)
      for (double Ep : kGridE) {
        const double a = eigen_density(TransitionQuery(E, Ep, tau, SmoothingWindow(kGridEps)), s, Tp).value;
        const double b = eigen_density(TransitionQuery(Ep, E, -tau, SmoothingWindow(kGridEps)), s, Tm).value;
        worst = std::max(worst, std::abs(a - b) / std::abs(a));
      }
  }
  return {worst < 1e-12, fmt("max |P_EE'(tau) - P_E'E(-tau)|/|P| = %.2e (< 1e-12)", worst)};
}

// ---- 4 -----------------------------------------------------------------------------

Outcome circle_geometry() {
  const SystemSpec spec = oscillator(0.05);
  const TransitionQuery q(0.5, 0.5, 1.0, SmoothingWindow(0.05));
  const auto xs = shell_intersections(q, spec);
  double xerr = xs.size() == 2 ? 0.0 : INFINITY;
  for (const auto& x : xs)
    xerr = std::max(xerr, std::hypot(x.point[0] - 0.5, std::abs(x.point[1]) - std::sqrt(0.75)));

  const auto orbits = compound_orbits(q, spec);
  const CompoundOrbit* lens = nullptr;
  double det_err = 0.0;
  int checked = 0;
  for (const auto& o : orbits) {
    if (o.representative && o.j == 0 && o.j_prime == 0 && o.a != o.b &&
        (!lens || std::abs(o.t) + std::abs(o.t_prime) < std::abs(lens->t) + std::abs(lens->t_prime)))
      lens = &o;
    det_err = std::max(det_err, std::abs(o.det_one_minus_M - (2 - 2 * std::cos(o.t + o.t_prime))));
    ++checked;
  }
  if (!lens) return {false, "no lens orbit found"};
  const double S_err = std::abs(lens->action_energy - (2 * kPi / 3 - std::sqrt(3.0) / 2));
  const JacobianResult jr = jacobian_times_energies(*lens, q, spec, true);
  const double inv_err = std::abs(jr.det * jr.inverse_det - 1.0);
  const double h = 1e-4;
  const double dS = (resolve_orbit(*lens, q.E + h, q.E_prime, spec).action -
                     resolve_orbit(*lens, q.E - h, q.E_prime, spec).action) /
                    (2 * h);
  const double dS_err = std::abs(dS - lens->t) / std::abs(lens->t);
  const bool pass = xerr < 1e-9 && S_err < 1e-10 && det_err < 1e-8 && inv_err < 1e-6 && dS_err < 1e-4;
  return {pass, fmt("intersections %.1e, lens action %.1e, det[I-M] %.1e over %d orbits, Jacobian inverse %.1e, "
                    "dS/dE vs t %.1e",
                    xerr, S_err, det_err, checked, inv_err, dS_err)};
}

// ---- 5, 6, 7: quartic sweeps ------------------------------------------------------------

constexpr double kSweepLo = 1.5, kSweepHi = 2.1;
constexpr int kDetrend = 4;

struct Sweep {
  double hbar = 0.0;
  std::vector<double> tau, exact, sc, background;
  std::vector<CalibrationPoint> points;
  std::vector<bool> caustic;
  int usable = 0;
};

Sweep quartic_sweep(double hbar) {
  const SystemSpec spec = quartic(hbar);
  // Box wide enough that translated states do not wrap; the half grid used for the convergence
  // estimate still resolves momenta up to about 3.
  const GridSpec grid{static_cast<int>(std::lround(15.36 / hbar / 4) * 4), -4.0, 4.0};
  EigensolveOptions eo;
  eo.check_energy = 2.0;
  const Spectrum s = eigensolve(spec, grid, eo);
  const Drive d(spec, grid);
  TraceDensity exact(s, d, LevelSet::usable);
  Sweep w;
  w.hbar = hbar;
  w.usable = s.usable_levels;
  const int n = static_cast<int>(std::lround((kSweepHi - kSweepLo) / (0.25 * hbar))) + 1;
  for (int i = 0; i < n; ++i) {
    const double tau = kSweepLo + (kSweepHi - kSweepLo) * i / (n - 1);
    const TransitionQuery q(0.5, 0.5, tau, SmoothingWindow(0.05));
    const auto cat = compound_orbits(q, spec);
    ScOptions so;
    so.background = classical_background(q, spec);
    const DensityResult r = sc_density(q, cat, spec, so);
    bool caustic = false;
    for (const auto& o : cat)
      if (o.representative && (o.near_caustic || std::abs(o.det_one_minus_M) < so.caustic_threshold) &&
          o.damping > 1e-3)
        caustic = true;
    CalibrationPoint cp;
    cp.coordinate = tau;
    cp.exact = exact(q).value;
    cp.background = r.background;
    cp.terms = r.terms;
    for (const auto& t : r.terms) cp.families.push_back(t.family);
    w.tau.push_back(tau);
    w.exact.push_back(cp.exact);
    w.sc.push_back(r.value);
    w.background.push_back(r.background);
    w.caustic.push_back(caustic);
    w.points.push_back(std::move(cp));
  }
  return w;
}

const Sweep& sweep(double hbar) {
  static std::map<double, Sweep> cache;
  auto it = cache.find(hbar);
  if (it == cache.end()) it = cache.emplace(hbar, quartic_sweep(hbar)).first;
  return it->second;
}

std::vector<double> minus(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Outcome phase_validation() {
  const Sweep& w = sweep(0.02);
  const auto ex = oscillatory_part(w.tau, minus(w.exact, w.background), kDetrend);
  const auto sc = oscillatory_part(w.tau, minus(w.sc, w.background), kDetrend);
  const auto ref = find_extrema(w.tau, ex);
  const auto matches = match_extrema(ref, find_extrema(w.tau, sc));
  const double dtau = w.tau[1] - w.tau[0];
  double worst = 0.0, period_sum = 0.0;
  int used = 0, exempt = 0, unmatched = 0;
  for (const auto& m : matches) {
    const auto i = static_cast<std::size_t>(std::lround((m.reference.position - w.tau[0]) / dtau));
    const bool flagged = w.caustic[std::max<std::size_t>(i, 1) - 1] || w.caustic[std::min(i, w.tau.size() - 1)] ||
                         w.caustic[std::min(i + 1, w.tau.size() - 1)];
    if (flagged) {
      ++exempt;
      continue;
    }
    if (!m.matched || !std::isfinite(m.local_period)) {
      ++unmatched;
      continue;
    }
    worst = std::max(worst, std::abs(m.offset) / m.local_period);
    period_sum += m.local_period;
    ++used;
  }
  const double periods = used ? (w.tau.back() - w.tau.front()) / (period_sum / used) : 0.0;
  return {used > 0 && unmatched == 0 && worst < 0.15 && periods >= 4,
          fmt("%d extrema over %.1f periods, worst offset %.3f periods (< 0.15), %d unmatched, %d near-caustic exempt",
              used, periods, worst, unmatched, exempt)};
}

std::string offsets_text(const CalibrationReport& r) {
  std::string s;
  for (const auto& [f, v] : r.offsets) s += (s.empty() ? "" : " ") + f + "=" + fmt("%.2f", v);
  return s.empty() ? "none" : s;
}

Outcome amplitude_validation() {
  CalibrationOptions co;
  co.detrend_degree = kDetrend;
  const CalibrationReport a = sigma_calibration(sweep(0.02).points, co);
  const CalibrationReport b = sigma_calibration(sweep(0.01).points, co);
  if (!a.conclusive || !b.conclusive) return {false, "calibration inconclusive: " + a.note + " / " + b.note};
  return {a.residual < 0.25 && b.residual < a.residual,
          fmt("rms relative deviation %.4f at hbar=0.02 (< 0.25), %.4f at hbar=0.01 (must decrease); offsets "
              "hbar=0.02: %s; hbar=0.01: %s",
              a.residual, b.residual, offsets_text(a).c_str(), offsets_text(b).c_str())};
}

Outcome background_validation() {
  const Sweep& w = sweep(0.02);
  // Period from the dominant orbit's action slope, one period centred on tau0.
  const SystemSpec spec = quartic(0.02);
  const double tau0 = 1.6, h = 1e-4;
  auto lens_action = [&](double tau) {
    const auto cat = compound_orbits(TransitionQuery(0.5, 0.5, tau, SmoothingWindow(0.05)), spec);
    const CompoundOrbit* best = nullptr;
    for (const auto& o : cat)
      if (o.representative && (!best || o.damping > best->damping)) best = &o;
    if (!best) throw Error("no orbit at tau0");
    return best->action_energy;
  };
  const double period = 2 * kPi * 0.02 / std::abs((lens_action(tau0 + h) - lens_action(tau0 - h)) / (2 * h));
  double ex = 0.0, bg = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < w.tau.size(); ++i)
    if (std::abs(w.tau[i] - tau0) <= 0.5 * period) {
      ex += w.exact[i];
      bg += w.background[i];
      ++n;
    }
  ex /= n;
  bg /= n;
  const double rel = std::abs(bg - ex) / std::abs(ex);
  return {rel < 0.10, fmt("period %.4f around tau=%.2f: background %.5f vs averaged eigen %.5f, relative %.2e (< 0.1)",
                          period, tau0, bg, ex, rel)};
}

// ---- 8 -----------------------------------------------------------------------------

Outcome structural_invariants() {
  double sym = 0.0, rev = 0.0, rebase = 0.0;
  int orbits = 0, paired = 0;
  for (const SystemSpec& spec : {oscillator(0.05), quartic(0.02)}) {
    for (double tau : {0.6, 1.0, 1.8}) {
      const TransitionQuery q(0.5, 0.55, tau, SmoothingWindow(0.05));
      const auto cat = compound_orbits(q, spec);
      for (const auto& o : cat) {
        ++orbits;
        sym = std::max({sym, symplectic_error(o.monodromy), symplectic_error(o.monodromy_e),
                        symplectic_error(o.monodromy_driven)});
        rebase = std::max(rebase, std::abs(det_one_minus(rebased_monodromy(o)) - o.det_one_minus_M));
        if (o.partner >= 0 && cat[o.partner].partner == o.id &&
            std::abs(cat[o.partner].t + o.t) + std::abs(cat[o.partner].t_prime + o.t_prime) < 1e-8)
          ++paired;
        for (FlowSpec which : {FlowSpec::intrinsic(), FlowSpec::driven(tau)}) {
          const State x = o.start.point;
          rev = std::max(rev, (flow(flow(x, o.t + 0.37, which, spec), -(o.t + 0.37), which, spec) - x).norm());
        }
      }
    }
  }
  const SystemSpec spec = oscillator(1.0);
  const Spectrum& s = ho_spectrum();
  const Drive d(spec, s.grid);
  double leak = 0.0;
  for (double tau : kGridTau) leak = std::max(leak, transition_matrix(s, d, tau, s.size()).leakage);
  const bool pass = sym < 1e-8 && rev < 1e-8 && orbits > 0 && paired == orbits && rebase < 1e-8 && leak < 1e-8;
  return {pass, fmt("symplecticity %.1e, reversibility %.1e, reversal pairs %d/%d, rebasing %.1e, stochasticity %.1e",
                    sym, rev, paired, orbits, rebase, leak)};
}

// ---- 9 -----------------------------------------------------------------------------

Outcome product_oscillators() {
  const Polynomial H2 = named_hamiltonian("product-harmonic", {{"omega1", 1.0}, {"omega2", std::sqrt(2.0)}});
  const SystemSpec spec2 =
      make_system("product", PhaseFunction(H2), PhaseFunction(named_driver("translation", {}, 2, 0, H2)), 0.05);
  const SystemSpec spec1 = oscillator(0.05);
  const TransitionQuery q(0.5, 0.5, 1.0, SmoothingWindow(0.05));
  Eigen::VectorXd seed(2);
  seed << 0.01, -0.02;
  const PoincareFixedPoint fp = product_section_fixed_point(q, spec2, SectionSpec{0, 0.0, -1}, seed);
  const CompoundOrbit* match = nullptr;
  for (const auto& o : compound_orbits(q, spec1))
    if (std::abs(o.t - fp.t) + std::abs(o.t_prime - fp.t_prime) < 1e-5) match = &o;
  if (!match) return {false, fmt("no N = 1 orbit with (t, t') = (%.6f, %.6f)", fp.t, fp.t_prime)};
  const double ds = std::abs(fp.action - match->action_energy);
  return {fp.residual < 1e-6 && ds < 1e-6,
          fmt("residual %.1e (< 1e-6) after %d iterations, action %.10f vs %.10f (diff %.1e, < 1e-6)", fp.residual,
              fp.iterations, fp.action, match->action_energy, ds)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"exact pathway identity", exact_pathways},
      {"displaced oscillator oracle", displaced_oscillator},
      {"exact symmetry", exact_symmetry},
      {"circle geometry", circle_geometry},
      {"semiclassical phase", phase_validation},
      {"semiclassical amplitude", amplitude_validation},
      {"classical background", background_validation},
      {"structural invariants", structural_invariants},
      {"N=2 product oscillators", product_oscillators},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %zu %-28s %s  %s  [%.1f s]\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), dt);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
