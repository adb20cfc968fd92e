#include "ctrace/core.hpp"
#include "ctrace/density.hpp"

namespace ctrace {

double lorentzian_delta(double E, const SmoothingWindow& window) {
  if (!std::isfinite(E)) throw DomainError("lorentzian_delta: non-finite energy");
  const double eps = window.epsilon;
  return eps / (kPi * (eps * eps + E * E));
}

const char* pathway_name(Pathway p) {
  switch (p) {
    case Pathway::semiclassical: return "sc";
    case Pathway::eigen_sum: return "eigen";
    case Pathway::double_ft: return "double-ft";
    case Pathway::classical_background: return "background";
  }
  return "unknown";
}

}  // namespace ctrace
