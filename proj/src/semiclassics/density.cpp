#include <cstdio>

#include "ctrace/semiclassics.hpp"
#include "ctrace/symplectic.hpp"

namespace ctrace {

std::string orbit_family(const CompoundOrbit& o) {
  return std::to_string(o.a) + ":" + std::to_string(o.b) + ":" + std::to_string(o.j) + ":" + std::to_string(o.j_prime);
}

double maslov_phase(const CompoundOrbit& o, SigmaPolicy policy) {
  if (policy == SigmaPolicy::caustic_count) return -0.5 * kPi * o.caustic_index;
  const Eigen::Matrix2d sym = 0.5 * (o.jacobian_tE + o.jacobian_tE.transpose());
  return o.trace_phase.total - 0.25 * kPi * signature(sym);
}

SCTerm sc_term(const CompoundOrbit& o, const TransitionQuery& q, const SystemSpec& spec, const ScOptions& opt) {
  const double hbar = spec.hbar, eps = q.epsilon();
  SCTerm s;
  s.orbit_id = o.id;
  s.family = orbit_family(o);
  s.action = o.action_energy;
  const double c = opt.prefactor == Prefactor::doubled ? std::pow(2.0, spec.dof) : 1.0;
  s.amplitude = c / (kPi * hbar) * std::sqrt(std::abs(o.jacobian_det)) / std::sqrt(std::abs(o.det_one_minus_M));
  s.phase = o.action_energy / hbar;
  s.damping = std::exp(-eps * (std::abs(o.t) + std::abs(o.t_prime)) / hbar);
  const Eigen::Vector2d v((o.t > 0) - (o.t < 0), (o.t_prime > 0) - (o.t_prime < 0));
  const double g = v.dot(o.jacobian_tE * v);
  bool second = opt.smoothing == SmoothingOrder::second;
  if (opt.smoothing == SmoothingOrder::continued) {
    try {
      const EnergyLineDerivatives d = energy_line_derivatives(o, spec, opt.line_step > 0 ? opt.line_step : eps / 4);
      const double e2 = eps * eps;
      s.phase += (-e2 * d.g / 2 + e2 * e2 * d.d2g / 24) / hbar + eps * d.da;
      s.damping *= std::exp(e2 * eps * d.dg / (6 * hbar) - e2 * d.d2a / 2);
    } catch (const Error& err) {
      second = true;
      s.warnings.push_back(std::string("continued smoothing unavailable, second order used: ") + err.what());
    }
  }
  if (second) s.phase -= eps * eps * g / (2 * hbar);
  s.maslov_sigma = maslov_phase(o, opt.sigma);
  if (opt.apply_offsets) {
    if (auto it = opt.family_offsets.find(s.family); it != opt.family_offsets.end()) s.maslov_sigma += it->second;
  }
  s.value = s.amplitude * s.damping * std::cos(s.phase + s.maslov_sigma);
  return s;
}

DensityResult sc_density(const TransitionQuery& q, const std::vector<CompoundOrbit>& catalogue, const SystemSpec& spec,
                         const ScOptions& opt) {
  DensityResult r(q, Pathway::semiclassical);
  r.background = opt.background ? *opt.background : classical_background(q, spec, opt.background_options);
  r.value = r.background;
  if (catalogue.empty()) {
    r.warnings.push_back("no classical transition: empty orbit catalogue, background only");
    return r;
  }
  for (const auto& o : catalogue) {
    if (!o.representative) continue;
    for (const auto& w : o.warnings) r.warnings.push_back("orbit " + std::to_string(o.id) + ": " + w);
    char buf[160];
    if (o.near_caustic || std::abs(o.det_one_minus_M) < opt.caustic_threshold || o.jacobian_det == 0.0) {
      std::snprintf(buf, sizeof buf, "orbit %d (%s) excluded near a caustic: det[I - M] = %.3g", o.id,
                    orbit_family(o).c_str(), o.det_one_minus_M);
      r.warnings.push_back(buf);
      continue;
    }
    SCTerm s = sc_term(o, q, spec, opt);
    for (const auto& w : s.warnings) r.warnings.push_back("orbit " + std::to_string(o.id) + ": " + w);
    r.value += s.value;
    r.terms.push_back(std::move(s));
  }
  return r;
}

}  // namespace ctrace
