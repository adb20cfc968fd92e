#include <set>

#include "ctrace/semiclassics.hpp"

namespace ctrace {

std::vector<double> oscillatory_part(const std::vector<double>& x, const std::vector<double>& y, int degree) {
  const auto n = static_cast<Eigen::Index>(x.size());
  if (static_cast<std::size_t>(n) != y.size()) throw DomainError("oscillatory_part: length mismatch");
  if (degree < 0 || n <= degree) return std::vector<double>(n, 0.0);
  const double lo = *std::min_element(x.begin(), x.end()), hi = *std::max_element(x.begin(), x.end());
  const double mid = 0.5 * (lo + hi), half = hi > lo ? 0.5 * (hi - lo) : 1.0;
  Eigen::MatrixXd V(n, degree + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = (x[i] - mid) / half;
    double p = 1.0;
    for (int k = 0; k <= degree; ++k, p *= u) V(i, k) = p;
    b[i] = y[i];
  }
  const Eigen::VectorXd c = V.colPivHouseholderQr().solve(b);
  const Eigen::VectorXd r = b - V * c;
  return {r.data(), r.data() + n};
}

namespace {

double rms(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return v.empty() ? 0.0 : std::sqrt(s / v.size());
}

}  // namespace

CalibrationReport sigma_calibration(const std::vector<CalibrationPoint>& points, const CalibrationOptions& opt) {
  CalibrationReport rep;
  if (points.size() < static_cast<std::size_t>(opt.detrend_degree) + 3) {
    rep.note = "inconclusive: too few points for the detrending fit";
    return rep;
  }
  std::set<std::string> fams;
  for (const auto& p : points) {
    if (p.families.size() != p.terms.size()) throw DomainError("calibration point: families and terms differ in length");
    fams.insert(p.families.begin(), p.families.end());
  }
  const std::vector<std::string> families(fams.begin(), fams.end());
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < families.size(); ++i) index[families[i]] = static_cast<int>(i);

  std::vector<double> x, target;
  double mean_abs = 0.0;
  for (const auto& p : points) {
    x.push_back(p.coordinate);
    target.push_back(p.exact - p.background);
    mean_abs += std::abs(p.exact) / points.size();
  }
  const auto exact_osc = oscillatory_part(x, target, opt.detrend_degree);
  const double scale = rms(exact_osc);
  if (scale < opt.noise_floor || scale < opt.relative_floor * mean_abs) {
    rep.note = "inconclusive: oscillation of the reference is below the noise floor";
    return rep;
  }
  if (families.empty()) {
    rep.note = "inconclusive: no orbit terms to calibrate";
    return rep;
  }

  auto residual = [&](const std::vector<int>& choice) {
    std::vector<double> model(points.size(), 0.0);
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t k = 0; k < points[i].terms.size(); ++k) {
        const SCTerm& t = points[i].terms[k];
        const double off = 0.5 * kPi * choice[index.at(points[i].families[k])];
        model[i] += t.amplitude * t.damping * std::cos(t.phase + t.maslov_sigma + off);
      }
    const auto m = oscillatory_part(x, model, opt.detrend_degree);
    std::vector<double> d(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) d[i] = exact_osc[i] - m[i];
    return rms(d) / scale;
  };

  const std::size_t F = families.size();
  std::vector<int> best(F, 0);
  rep.residual_uncalibrated = residual(best);
  double best_r = rep.residual_uncalibrated;
  if (F <= 6) {
    std::vector<int> c(F, 0);
    while (true) {
      const double r = residual(c);
      if (r < best_r) {
        best_r = r;
        best = c;
      }
      std::size_t k = 0;
      while (k < F && ++c[k] == 4) c[k++] = 0;
      if (k == F) break;
    }
  } else {
    for (int sweep = 0; sweep < 8; ++sweep) {
      bool moved = false;
      for (std::size_t f = 0; f < F; ++f) {
        for (int v = 0; v < 4; ++v) {
          std::vector<int> c = best;
          c[f] = v;
          const double r = residual(c);
          if (r < best_r) {
            best_r = r;
            best = c;
            moved = true;
          }
        }
      }
      if (!moved) break;
    }
  }
  rep.conclusive = true;
  rep.residual = best_r;
  for (std::size_t f = 0; f < F; ++f) rep.offsets[families[f]] = 0.5 * kPi * best[f];
  rep.note = "fitted over " + std::to_string(points.size()) + " points";
  return rep;
}

}  // namespace ctrace
