#include "ctrace/system.hpp"

#include <random>
#include <sstream>

namespace ctrace {

PhaseFunction::PhaseFunction(Polynomial poly)
    : dof_(poly.dof()), polynomial_(std::make_shared<const Polynomial>(std::move(poly))) {
  auto p = polynomial_;
  value_ = [p](const State& x) { return p->value(x); };
  gradient_ = [p](const State& x) { return p->gradient(x); };
  hessian_ = [p](const State& x) { return p->hessian(x); };
}

PhaseFunction::PhaseFunction(int dof, ValueFn value, GradientFn gradient, HessianFn hessian)
    : dof_(dof), value_(std::move(value)), gradient_(std::move(gradient)), hessian_(std::move(hessian)) {
  if (dof < 1) throw DomainError("phase function needs dof >= 1");
}

const Polynomial& PhaseFunction::require_polynomial() const {
  if (!polynomial_) throw DomainError("operation requires a polynomial phase function");
  return *polynomial_;
}

SystemSpec make_system(std::string name, PhaseFunction hamiltonian, PhaseFunction driver, double hbar) {
  if (hamiltonian.dof() != driver.dof()) throw DomainError("hamiltonian and driver dof differ");
  SystemSpec s;
  s.name = std::move(name);
  s.hamiltonian = std::move(hamiltonian);
  s.driver = std::move(driver);
  s.hbar = hbar;
  s.dof = s.hamiltonian.dof();
  return s;
}

namespace {

double param(const Params& given, const Params& defaults, const std::string& key) {
  if (auto it = given.find(key); it != given.end()) return it->second;
  return defaults.at(key);
}

void check_params(const std::string& what, const Params& given, const Params& defaults) {
  for (const auto& [k, v] : given) {
    if (!defaults.count(k)) throw DomainError(what + ": unknown parameter '" + k + "'");
    if (!std::isfinite(v)) throw DomainError(what + ": parameter '" + k + "' is not finite");
  }
}

}  // namespace

const std::map<std::string, Params>& hamiltonian_catalogue() {
  static const std::map<std::string, Params> cat = {
      {"harmonic", {{"omega", 1.0}}},
      {"free", {}},
      {"quartic", {{"g", 1.0}, {"k", 0.0}}},
      {"displaced-quartic", {{"g", 1.0}, {"d", 0.0}}},
      {"double-well", {{"a", 1.0}, {"b", 1.0}}},
      {"product-harmonic", {{"omega1", 1.0}, {"omega2", 1.4142135623730951}}},
      {"coupled-quartic", {{"c", 0.5}}},
  };
  return cat;
}

const std::map<std::string, Params>& driver_catalogue() {
  static const std::map<std::string, Params> cat = {
      {"translation", {{"s", 1.0}}},
      {"kick", {{"s", 1.0}}},
      {"squeeze", {{"s", 1.0}}},
      {"self", {}},
  };
  return cat;
}

int hamiltonian_dof(const std::string& name) {
  return (name == "product-harmonic" || name == "coupled-quartic") ? 2 : 1;
}

Polynomial named_hamiltonian(const std::string& name, const Params& params) {
  const auto& cat = hamiltonian_catalogue();
  auto it = cat.find(name);
  if (it == cat.end()) throw DomainError("unknown system '" + name + "'");
  check_params(name, params, it->second);
  auto P = [&](const std::string& k) { return param(params, it->second, k); };

  if (name == "product-harmonic") {
    Polynomial h(2);
    const double w1 = P("omega1"), w2 = P("omega2");
    h.add(0.5, {0, 0}, {2, 0}).add(0.5, {0, 0}, {0, 2});
    h.add(0.5 * w1 * w1, {2, 0}, {0, 0}).add(0.5 * w2 * w2, {0, 2}, {0, 0});
    return h;
  }
  if (name == "coupled-quartic") {
    Polynomial h(2);
    h.add(0.5, {0, 0}, {2, 0}).add(0.5, {0, 0}, {0, 2});
    h.add(0.25, {4, 0}, {0, 0}).add(0.25, {0, 4}, {0, 0});
    h.add(0.5 * P("c"), {2, 2}, {0, 0});
    return h;
  }

  Polynomial h(1);
  h.add(0.5, 0, 2);
  if (name == "harmonic") {
    const double w = P("omega");
    h.add(0.5 * w * w, 2, 0);
  } else if (name == "quartic") {
    h.add(0.25 * P("g"), 4, 0).add(0.5 * P("k"), 2, 0);
  } else if (name == "displaced-quartic") {
    // g (q - d)^4 / 4 expanded binomially
    const double g = P("g"), d = P("d");
    const double c[5] = {1, 4, 6, 4, 1};
    for (int k = 0; k <= 4; ++k) h.add(0.25 * g * c[k] * std::pow(-d, 4 - k), k, 0);
  } else if (name == "double-well") {
    const double a = P("a"), b = P("b");
    h.add(0.25 * a, 4, 0).add(-0.5 * a * b * b, 2, 0).add(0.25 * a * b * b * b * b, 0, 0);
  }
  return h;
}

Polynomial named_driver(const std::string& name, const Params& params, int dof, int dof_index,
                        const Polynomial& hamiltonian) {
  const auto& cat = driver_catalogue();
  auto it = cat.find(name);
  if (it == cat.end()) throw DomainError("unknown driver '" + name + "'");
  check_params(name, params, it->second);
  if (name == "self") return hamiltonian;
  if (dof_index < 0 || dof_index >= dof) throw DomainError("driver dof index out of range");
  const double s = param(params, it->second, "s");
  std::vector<int> zq(dof, 0), zp(dof, 0);
  Polynomial l(dof);
  auto qk = zq, pk = zp;
  if (name == "translation") {
    pk[dof_index] = 1;
    l.add(s, zq, pk);
  } else if (name == "kick") {
    qk[dof_index] = 1;
    l.add(-s, qk, zp);
  } else if (name == "squeeze") {
    qk[dof_index] = 1;
    pk[dof_index] = 1;
    l.add(s, qk, pk);
  }
  return l;
}

ValidationBox ValidationBox::cube(int dof, double half_width) {
  return {Eigen::VectorXd::Constant(2 * dof, -half_width), Eigen::VectorXd::Constant(2 * dof, half_width)};
}

ValidationReport validate_system(const SystemSpec& spec, const ValidationBox& box, int samples, double tolerance) {
  ValidationReport report;
  auto fail = [&](std::string msg) {
    report.ok = false;
    report.failures.push_back(std::move(msg));
  };

  if (!(spec.hbar > 0.0) || !std::isfinite(spec.hbar)) fail("hbar must be positive");
  if (spec.dof < 1) {
    fail("dof must be at least 1");
    return report;
  }
  if (spec.hamiltonian.dof() != spec.dof || spec.driver.dof() != spec.dof) {
    fail("hamiltonian/driver dof does not match system dof");
    return report;
  }
  const int n = 2 * spec.dof;
  if (box.lower.size() != n || box.upper.size() != n) {
    fail("validation box dimension does not match phase space");
    return report;
  }

  std::mt19937_64 rng(0x5eed1234u);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  struct Worst {
    double err = 0.0;
    State x;
  };
  auto check = [&](const PhaseFunction& f, const char* label) {
    Worst worst;
    Worst worst_hess;
    for (int s = 0; s < samples; ++s) {
      State x(n);
      for (int i = 0; i < n; ++i) x[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * unit(rng);
      const Eigen::VectorXd g = f.gradient(x);
      const Eigen::MatrixXd hs = f.hessian(x);
      Eigen::VectorXd g_fd(n);
      Eigen::MatrixXd h_fd(n, n);
      for (int i = 0; i < n; ++i) {
        const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
        State xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g_fd[i] = (f.value(xp) - f.value(xm)) / (2 * h);
        h_fd.col(i) = (f.gradient(xp) - f.gradient(xm)) / (2 * h);
      }
      const double e = (g - g_fd).lpNorm<Eigen::Infinity>() / std::max(1.0, g_fd.lpNorm<Eigen::Infinity>());
      if (e > worst.err || worst.x.size() == 0) worst = {e, x};
      const double eh = (hs - h_fd).lpNorm<Eigen::Infinity>() / std::max(1.0, h_fd.lpNorm<Eigen::Infinity>());
      if (eh > worst_hess.err || worst_hess.x.size() == 0) worst_hess = {eh, x};
    }
    if (worst.err > report.max_relative_error) {
      report.max_relative_error = worst.err;
      report.worst_point = worst.x;
    }
    auto where = [](const State& x) {
      std::ostringstream os;
      os.precision(6);
      os << "(";
      for (int i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
      os << ")";
      return os.str();
    };
    if (worst.err >= tolerance) {
      std::ostringstream os;
      os << label << " gradient inconsistent: max relative error " << worst.err << " at " << where(worst.x);
      fail(os.str());
    }
    if (worst_hess.err >= tolerance) {
      std::ostringstream os;
      os << label << " hessian inconsistent: max relative error " << worst_hess.err << " at "
         << where(worst_hess.x);
      fail(os.str());
    }
  };
  check(spec.hamiltonian, "H");
  check(spec.driver, "Lambda");
  return report;
}

}  // namespace ctrace
