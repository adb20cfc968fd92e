#include "ctrace/orbits.hpp"
#include "ctrace/symplectic.hpp"

namespace ctrace {

CausticCount caustic_counter(std::span<const Eigen::MatrixXd> path) {
  CausticCount cc;
  if (path.size() < 2) return cc;
  std::vector<double> d(path.size());
  double scale = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    d[i] = det_one_minus(path[i]);
    scale = std::max(scale, std::abs(d[i]));
  }
  if (scale == 0.0) {
    cc.endpoint_zero = true;
    return cc;
  }
  const double tol = 1e-4 * scale;
  // The path starts at the identity, where det[I - M] = 0; skip that zero.
  std::size_t i0 = 1;
  while (i0 < d.size() && std::abs(d[i0]) < 1e-12 * scale) ++i0;
  for (std::size_t i = i0; i + 1 < d.size(); ++i) {
    if (d[i] * d[i + 1] < 0) {
      ++cc.count;
      continue;
    }
    if (d[i + 1] == 0.0) {
      if (i + 2 < d.size()) ++cc.count;
      continue;
    }
    if (d[i] == 0.0) continue;
    // Touching zero between samples: parabola through three neighbours.
    if (i > i0 && std::abs(d[i]) <= std::abs(d[i - 1]) && std::abs(d[i]) <= std::abs(d[i + 1])) {
      const double a = 0.5 * (d[i - 1] + d[i + 1]) - d[i];
      const double b = 0.5 * (d[i + 1] - d[i - 1]);
      if (a == 0.0) continue;
      const double xv = -b / (2 * a);
      const double vertex = d[i] - b * b / (4 * a);
      if (std::abs(xv) <= 1.0 && (vertex * d[i] <= 0 || std::abs(vertex) < tol)) ++cc.count;
    }
  }
  cc.endpoint_zero = std::abs(d.back()) < tol;
  return cc;
}

}  // namespace ctrace
