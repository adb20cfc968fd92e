#include <atomic>
#include <cstdio>
#include <functional>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "ctrace/cli.hpp"

namespace ctrace {

namespace {

void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
  const int workers = std::max(1, std::min(jobs, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

struct Quantum {
  std::optional<Spectrum> spectrum;
  std::optional<Drive> drive;
  std::string error;
  int levels = 0;
  bool full = false;
};

Quantum prepare_quantum(const RunConfig& cfg, const SystemSpec& spec) {
  Quantum qm;
  try {
    EigensolveOptions eo;
    const double top = std::max(*std::max_element(cfg.E.begin(), cfg.E.end()),
                                *std::max_element(cfg.E_prime.begin(), cfg.E_prime.end()));
    eo.check_energy = top + 20 * cfg.epsilon;
    qm.spectrum = cfg.cache_dir.empty() ? eigensolve(spec, cfg.grid, eo) : eigensolve_cached(spec, cfg.grid, cfg.cache_dir, eo);
    qm.drive.emplace(spec, cfg.grid);
    qm.full = cfg.levels == "full";
    if (qm.full)
      qm.levels = qm.spectrum->size();
    else if (cfg.levels != "usable")
      qm.levels = std::min(std::stoi(cfg.levels), qm.spectrum->size());
  } catch (const Error& e) {
    qm.error = std::string("quantum setup failed: ") + e.what();
  }
  return qm;
}

void fail(PointRecord& r, const std::string& what) {
  r.failed = true;
  r.value = std::numeric_limits<double>::quiet_NaN();
  r.error = what;
  r.warnings.push_back("error: " + what);
}

}  // namespace

SimulateResult run_simulate(const RunConfig& cfg, int jobs) {
  const SystemSpec spec = cfg.system();
  SimulateResult out;
  const bool quantum = cfg.wants(Pathway::eigen_sum) || cfg.wants(Pathway::double_ft);
  Quantum qm;
  if (quantum) {
    qm = prepare_quantum(cfg, spec);
    if (qm.error.empty()) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "spectrum: %d grid levels, %d usable", qm.spectrum->size(),
                    qm.spectrum->usable_levels);
      out.log.push_back(buf);
    } else {
      out.log.push_back(qm.error);
    }
  }

  const int nE = static_cast<int>(cfg.E.size()), nF = static_cast<int>(cfg.E_prime.size()),
            nT = static_cast<int>(cfg.tau.size()), nP = static_cast<int>(cfg.pathways.size());
  out.records.resize(static_cast<std::size_t>(nE) * nF * nT * nP);

  parallel_for(nT, jobs, [&](int it) {
    const double tau = cfg.tau[it];
    std::optional<TransitionMatrix> T;
    std::string t_error = qm.error;
    if (quantum && t_error.empty()) {
      try {
        T = transition_matrix(*qm.spectrum, *qm.drive, tau, qm.levels);
      } catch (const Error& e) {
        t_error = e.what();
      }
    }
    std::optional<TraceDensity> trace;
    if (quantum && t_error.empty() && qm.full && cfg.wants(Pathway::eigen_sum))
      trace.emplace(*qm.spectrum, *qm.drive, LevelSet::full_grid);

    for (int iE = 0; iE < nE; ++iE)
      for (int iF = 0; iF < nF; ++iF) {
        const TransitionQuery q(cfg.E[iE], cfg.E_prime[iF], tau, SmoothingWindow(cfg.epsilon));
        std::optional<double> background;
        std::string bg_error;
        if ((cfg.wants(Pathway::semiclassical) && spec.dof == 1) || cfg.wants(Pathway::classical_background)) {
          try {
            BackgroundOptions bo;
            bo.tolerance = cfg.background_tolerance;
            background = classical_background(q, spec, bo);
          } catch (const Error& e) {
            bg_error = std::string("background: ") + e.what();
          }
        }
        for (int ip = 0; ip < nP; ++ip) {
          PointRecord& r = out.records[((static_cast<std::size_t>(iE) * nF + iF) * nT + it) * nP + ip];
          r.E = q.E;
          r.E_prime = q.E_prime;
          r.tau = tau;
          r.epsilon = cfg.epsilon;
          r.hbar = cfg.hbar;
          r.pathway = cfg.pathways[ip];
          try {
            switch (r.pathway) {
              case Pathway::semiclassical: {
                if (spec.dof != 1)
                  throw DomainError("the sc pathway sums N = 1 compound orbits; use the orbits verb for N = 2");
                if (!background) throw Error(bg_error);
                OrbitOptions oo;
                oo.j_max = cfg.j_max;
                oo.damping_cutoff = cfg.damping_cutoff;
                std::vector<CompoundOrbit> catalogue;
                std::string empty;
                try {
                  catalogue = compound_orbits(q, spec, oo);
                } catch (const EmptyShellError& e) {
                  empty = std::string("no classical transition: ") + e.what();
                }
                ScOptions so;
                so.sigma = cfg.sigma;
                so.prefactor = cfg.prefactor;
                so.smoothing = cfg.smoothing;
                so.background = background;
                const DensityResult d = sc_density(q, catalogue, spec, so);
                r.value = d.value;
                r.background = d.background;
                r.n_orbits = static_cast<int>(catalogue.size());
                r.warnings = d.warnings;
                if (!empty.empty()) r.warnings.push_back(empty);
                r.terms = d.terms;
                break;
              }
              case Pathway::eigen_sum: {
                if (!t_error.empty()) throw Error(t_error);
                const DensityResult d = trace ? (*trace)(q) : eigen_density(q, *qm.spectrum, *T);
                r.value = d.value;
                r.warnings = d.warnings;
                break;
              }
              case Pathway::double_ft: {
                if (!t_error.empty()) throw Error(t_error);
                const FtResult f = double_ft_density(q, *qm.spectrum, *T, cfg.ft_variant, cfg.time_grid);
                r.value = f.density.value;
                r.warnings = f.density.warnings;
                break;
              }
              case Pathway::classical_background:
                if (!background) throw Error(bg_error);
                r.value = *background;
                break;
            }
          } catch (const Error& e) {
            fail(r, e.what());
          }
        }
      }
  });

  for (std::size_t i = 0; i < out.records.size(); i += static_cast<std::size_t>(nP)) {
    bool any = false;
    for (int ip = 0; ip < nP; ++ip) any = any || out.records[i + ip].failed;
    out.failed_points += any;
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<PointRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records)
    out << fmt(r.E) << ',' << fmt(r.E_prime) << ',' << fmt(r.tau) << ',' << fmt(r.epsilon) << ',' << fmt(r.hbar) << ','
        << pathway_name(r.pathway) << ',' << fmt(r.value) << ',' << r.n_orbits << ',' << r.warnings.size() << '\n';
}

void write_records(std::ostream& out, const std::vector<PointRecord>& records) {
  for (const auto& r : records) {
    nlohmann::json j;
    j["version"] = 1;
    j["E"] = r.E;
    j["Eprime"] = r.E_prime;
    j["tau"] = r.tau;
    j["epsilon"] = r.epsilon;
    j["hbar"] = r.hbar;
    j["pathway"] = pathway_name(r.pathway);
    j["status"] = r.failed ? "failed" : "ok";
    j["value"] = number_or_null(r.value);
    if (r.failed) j["error"] = r.error;
    j["n_orbits"] = r.n_orbits;
    j["warnings"] = r.warnings;
    if (r.background) j["background"] = *r.background;
    if (!r.terms.empty()) {
      nlohmann::json terms = nlohmann::json::array();
      for (const auto& t : r.terms)
        terms.push_back({{"orbit_id", t.orbit_id},
                         {"family", t.family},
                         {"action", t.action},
                         {"amplitude", t.amplitude},
                         {"phase", t.phase},
                         {"maslov_sigma", t.maslov_sigma},
                         {"damping", t.damping},
                         {"value", t.value}});
      j["terms"] = terms;
    }
    out << j.dump() << '\n';
  }
}

OrbitsResult run_orbits(const RunConfig& cfg, int jobs) {
  const SystemSpec spec = cfg.system();
  if (spec.dof == 2 && (!cfg.section || cfg.seed.empty()))
    throw ConfigError("N = 2 orbits need a section (--seed-section or [numerics] section) and a seed");
  if (spec.dof > 2) throw ConfigError("orbits supports N = 1 and N = 2");

  const int nE = static_cast<int>(cfg.E.size()), nF = static_cast<int>(cfg.E_prime.size()),
            nT = static_cast<int>(cfg.tau.size());
  const int n = nE * nF * nT;
  struct PointOut {
    std::vector<std::string> lines;
    std::string note;
    int near = 0;
    bool failed = false;
  };
  std::vector<PointOut> points(n);

  parallel_for(n, jobs, [&](int i) {
    const int iE = i / (nF * nT), iF = (i / nT) % nF, it = i % nT;
    const TransitionQuery q(cfg.E[iE], cfg.E_prime[iF], cfg.tau[it], SmoothingWindow(cfg.epsilon));
    char where[120];
    std::snprintf(where, sizeof where, "E=%.6g Eprime=%.6g tau=%.6g", q.E, q.E_prime, q.tau);
    PointOut& p = points[i];
    try {
      if (spec.dof == 1) {
        OrbitOptions oo;
        oo.j_max = cfg.j_max;
        oo.damping_cutoff = cfg.damping_cutoff;
        const auto orbits = compound_orbits(q, spec, oo);
        for (const auto& o : orbits) {
          p.lines.push_back(orbit_record(o));
          p.near += o.near_caustic;
        }
        if (orbits.empty()) p.note = std::string(where) + ": no classical transition";
      } else {
        const Eigen::VectorXd seed = Eigen::Map<const Eigen::VectorXd>(cfg.seed.data(), cfg.seed.size());
        const PoincareFixedPoint fp = product_section_fixed_point(q, spec, *cfg.section, seed);
        nlohmann::json j;
        j["version"] = 1;
        j["orbit_id"] = 0;
        j["E"] = q.E;
        j["Eprime"] = q.E_prime;
        j["tau"] = q.tau;
        j["j"] = 0;
        j["jprime"] = 0;
        j["t"] = fp.t;
        j["tprime"] = fp.t_prime;
        j["S_energy"] = fp.action;
        j["S_time"] = fp.action - q.E * fp.t - q.E_prime * fp.t_prime;
        j["det_IminusM"] = fp.det_one_minus_m;
        j["jacobian_det"] = nullptr;
        j["caustic_index"] = nullptr;
        j["residual"] = fp.residual;
        j["iterations"] = fp.iterations;
        j["start"] = std::vector<double>(fp.point.data(), fp.point.data() + fp.point.size());
        j["end"] = j["start"];
        j["warnings"] = fp.warnings;
        p.lines.push_back(j.dump());
        p.near += !fp.warnings.empty();
      }
    } catch (const EmptyShellError& e) {
      p.note = std::string(where) + ": no classical transition (" + e.what() + ")";
    } catch (const Error& e) {
      p.failed = true;
      p.note = std::string(where) + ": failed: " + e.what();
    }
  });

  OrbitsResult r;
  r.points = n;
  for (auto& p : points) {
    r.orbits += static_cast<int>(p.lines.size());
    r.near_caustic += p.near;
    r.failed_points += p.failed;
    for (auto& l : p.lines) r.lines.push_back(std::move(l));
    if (!p.note.empty()) r.notes.push_back(p.note);
  }
  return r;
}

}  // namespace ctrace
